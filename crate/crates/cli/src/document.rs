//! Input documents. Cone and face indices are 1-based on disk and 0-based in
//! memory; rationals are strings `"p/q"`.

use serde::{Deserialize, Serialize};
use torfan_core::bundle_blowup::{blowup_face, blowup_face_monotone, line_bundle_fan, nlb_from_k};
use torfan_core::exact_algebra::{format_rational, parse_rational};
use torfan_core::{
    BigRational, Complex64, Fan, LatticeVector, LineBundleSpec, MatrixFamily, MomentPolytope,
    PresentationMode,
};

use crate::CliError;

pub const FAN_SCHEMA: &str = "torfan/fan@1";
pub const FAMILY_SCHEMA: &str = "torfan/family@1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub rank: usize,
    pub edges: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
    pub lambdas: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bundle: Option<BundleSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blowup: Option<BlowupSection>,
}

/// Exactly one of `k` (monotone bundle over a normalised base) and `n`
/// (explicit degrees, one per base edge).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupSection {
    #[serde(rename = "I")]
    pub face: Vec<usize>,
    /// Chop depth; the monotone depth `|I| − 1` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Real(f64),
    Complex([f64; 2]),
}

impl Coefficient {
    fn value(&self) -> Complex64 {
        match *self {
            Coefficient::Real(re) => Complex64::new(re, 0.0),
            Coefficient::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

/// Entry `(i, j)` is the coefficient list of a polynomial in `x`, constant first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub entries: Vec<Vec<Vec<Coefficient>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray: Option<Vec<f64>>,
}

/// What a fan document describes after bundle and blow-up sections are applied.
#[derive(Clone, Debug)]
pub struct Space {
    pub fan: Fan,
    pub polytope: MomentPolytope,
    pub mode: PresentationMode,
    /// The document's own fan and polytope before any construction.
    pub base: (Fan, MomentPolytope),
    pub bundle: Option<LineBundleSpec>,
    /// Fan and polytope just before the blow-up, with the new edge's index.
    pub surgery: Option<(Fan, MomentPolytope, usize)>,
    pub twist: Option<Vec<f64>>,
    pub warnings: Vec<String>,
}

/// Parse JSON, reporting the offending line on syntax or shape errors.
fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| {
        let line = e.line();
        let shown = text.lines().nth(line.saturating_sub(1)).unwrap_or("").trim();
        CliError::Parse(format!("line {line}, column {}: {e}\n  {line} | {shown}", e.column()))
    })
}

pub fn parse_fan_document(text: &str) -> Result<FanDocument, CliError> {
    let doc: FanDocument = from_json(text)?;
    check_schema(doc.schema.as_deref(), FAN_SCHEMA)?;
    Ok(doc)
}

pub fn parse_family_document(text: &str) -> Result<FamilyDocument, CliError> {
    let doc: FamilyDocument = from_json(text)?;
    check_schema(doc.schema.as_deref(), FAMILY_SCHEMA)?;
    Ok(doc)
}

fn check_schema(found: Option<&str>, expected: &str) -> Result<(), CliError> {
    match found {
        Some(s) if s != expected => Err(CliError::Validation(format!(
            "schema {s:?} is not supported, expected {expected:?}"
        ))),
        _ => Ok(()),
    }
}

fn invalid(e: torfan_core::Error) -> CliError {
    CliError::Validation(e.to_string())
}

fn zero_based(indices: &[usize], bound: usize, what: &str) -> Result<Vec<usize>, CliError> {
    indices
        .iter()
        .map(|&i| {
            if i == 0 || i > bound {
                Err(CliError::Validation(format!(
                    "{what} index {i} out of range 1..={bound}"
                )))
            } else {
                Ok(i - 1)
            }
        })
        .collect()
}

impl FanDocument {
    /// The document's own fan and polytope, with structural validation only.
    pub fn base(&self) -> Result<(Fan, MomentPolytope), CliError> {
        if self.edges.len() != self.lambdas.len() {
            return Err(CliError::Validation(format!(
                "{} edges but {} lambdas",
                self.edges.len(),
                self.lambdas.len()
            )));
        }
        let mut cones = Vec::with_capacity(self.max_cones.len());
        for (c, cone) in self.max_cones.iter().enumerate() {
            cones.push(zero_based(cone, self.edges.len(), &format!("max_cones[{}]", c + 1))?);
        }
        let edges: Vec<LatticeVector> = self.edges.iter().map(|e| LatticeVector::from_i64(e)).collect();
        let fan = Fan::new(self.rank, edges.clone(), cones).map_err(invalid)?;
        let lambdas = self
            .lambdas
            .iter()
            .enumerate()
            .map(|(i, s)| {
                parse_rational(s).map_err(|_| CliError::Validation(format!("lambdas[{}] = {s:?} is not p/q", i + 1)))
            })
            .collect::<Result<Vec<BigRational>, _>>()?;
        let polytope = MomentPolytope::new(self.rank, edges, lambdas).map_err(invalid)?;
        Ok((fan, polytope))
    }

    /// Apply the bundle section (with `k_override` taking precedence over its
    /// `k`) and then the blow-up section (with `epsilon_override`).
    pub fn space(&self, k_override: Option<u64>, epsilon_override: Option<&str>) -> Result<Space, CliError> {
        let (base_fan, base_poly) = self.base()?;
        let mut warnings = Vec::new();
        let (mut fan, mut polytope) = (base_fan.clone(), base_poly.clone());
        let mut mode = PresentationMode::Compact;
        let mut bundle = None;
        let mut surgery = None;
        if let Some(b) = &self.bundle {
            if b.k.is_some() == b.n.is_some() {
                return Err(CliError::Validation("bundle needs exactly one of k and n".into()));
            }
        }
        let k = k_override.or(self.bundle.as_ref().and_then(|b| b.k));
        let degrees = self.bundle.as_ref().and_then(|b| b.n.clone());
        match (k, degrees) {
            (Some(k), _) => {
                if self.bundle.as_ref().is_some_and(|b| b.n.is_some()) {
                    warnings.push("--k replaces the document's bundle degrees".into());
                }
                let (f, p, spec) = nlb_from_k(&base_fan, &base_poly, k)?;
                fan = f;
                polytope = p;
                bundle = Some(spec);
                mode = PresentationMode::Nlb;
            }
            (None, Some(n)) => {
                if n.len() != base_fan.num_edges() {
                    return Err(CliError::Validation(format!(
                        "bundle has {} degrees for {} edges",
                        n.len(),
                        base_fan.num_edges()
                    )));
                }
                let spec = LineBundleSpec::from_degrees(n);
                fan = line_bundle_fan(&base_fan, &spec)?;
                let mut lambdas = base_poly.lambdas().to_vec();
                lambdas.push(BigRational::from_integer(0.into()));
                polytope = MomentPolytope::from_fan(&fan, lambdas)?;
                bundle = Some(spec);
                mode = PresentationMode::Nlb;
            }
            (None, None) => {}
        }
        if let Some(b) = &self.blowup {
            let face = zero_based(&b.face, fan.num_edges(), "blowup.I")?;
            let eps = epsilon_override.map(str::to_string).or_else(|| b.epsilon.clone());
            let s = match eps {
                Some(e) => {
                    let e = parse_rational(&e)
                        .map_err(|_| CliError::Validation(format!("epsilon {e:?} is not p/q")))?;
                    blowup_face(&fan, &polytope, &face, &e)?
                }
                None => blowup_face_monotone(&fan, &polytope, &face)?,
            };
            warnings.extend(s.warnings);
            surgery = Some((fan, polytope, s.new_edge));
            fan = s.fan;
            polytope = s.polytope;
            mode = PresentationMode::Blowup;
        } else if epsilon_override.is_some() {
            warnings.push("--epsilon ignored: the document has no blowup section".into());
        }
        // the twist is a function on the edges of the constructed fan
        if let Some(t) = &self.twist {
            if t.len() != fan.num_edges() || t.iter().any(|x| !x.is_finite()) {
                return Err(CliError::Validation(format!(
                    "twist needs {} finite entries, found {}",
                    fan.num_edges(),
                    t.len()
                )));
            }
        }
        Ok(Space {
            fan,
            polytope,
            mode,
            base: (base_fan, base_poly),
            bundle,
            surgery,
            twist: self.twist.clone(),
            warnings,
        })
    }

    /// Document for an already constructed fan and polytope.
    pub fn from_parts(fan: &Fan, polytope: &MomentPolytope) -> FanDocument {
        FanDocument {
            schema: Some(FAN_SCHEMA.into()),
            name: None,
            rank: fan.rank(),
            edges: fan
                .edges()
                .iter()
                .map(|e| e.to_i64().expect("edge coordinates fit in i64"))
                .collect(),
            max_cones: fan
                .max_cones()
                .iter()
                .map(|c| c.iter().map(|i| i + 1).collect())
                .collect(),
            lambdas: polytope.lambdas().iter().map(format_rational).collect(),
            twist: None,
            bundle: None,
            blowup: None,
        }
    }
}

impl FamilyDocument {
    pub fn family(&self) -> Result<MatrixFamily, CliError> {
        let entries: Vec<Vec<Vec<Complex64>>> = self
            .entries
            .iter()
            .map(|row| row.iter().map(|p| p.iter().map(Coefficient::value).collect()).collect())
            .collect();
        MatrixFamily::new(entries).map_err(invalid)
    }

    pub fn ray(&self) -> Result<Vec<f64>, CliError> {
        match &self.ray {
            None => Ok(torfan_core::perturbation::default_ray()),
            Some(r) => {
                if r.is_empty() || r.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                    return Err(CliError::Validation("ray must be a nonempty list of positive numbers".into()));
                }
                if r.windows(2).any(|w| w[1] >= w[0]) {
                    return Err(CliError::Validation("ray must be strictly decreasing".into()));
                }
                Ok(r.clone())
            }
        }
    }
}
