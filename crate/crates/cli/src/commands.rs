//! One function per command; each turns a parsed document into report values.

use serde_json::{json, Value};
use torfan_core::exact_algebra::univariate::exact_spectrum;
use torfan_core::exact_algebra::{char_min_poly, format_rational, parse_rational, QuotientAlgebra};
use torfan_core::lattice_fan::validate_fan;
use torfan_core::perturbation::{
    derivative_spectrum, gevec_convergence, is_semisimple, pole_exponents, semisimple_convergence_check,
    spectrum_at_zero, total_projection_limit_check,
};
use torfan_core::polytope::{check_reflexive, is_delzant, vertices};
use torfan_core::quantum_algebra::{
    c1_operator, char_poly_transfer_check, classical_dimension, display_in_t, eigen_family_check,
    eigenvalue_transfer_check, omega_operator, phi_check, qh_presentation, sh_classes, sh_presentation,
    Presentation,
};
use torfan_core::superpotential::{
    barycentre_landing_check, build_superpotential, critical_points_in, galkin_point, jacobian_ring,
    mirror_check, perturb_and_separate, CriticalPoint, JacAlgebra, Superpotential,
};
use torfan_core::{BigRational, Error, MomentPolytope, Monomial, Polynomial, PresentationMode};

use crate::document::{parse_family_document, parse_fan_document, FanDocument, Space};
use crate::report::{
    complex, complexes, error_value, rational, rationals, real, reals, sorted_values, spectrum, unipoly, Report,
};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Validate,
    Qh,
    Sh,
    Mirror,
    Critical,
    Galkin,
    Barycentre,
    Linebundle,
    Blowup,
    Separate,
    Kato,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Qh => "qh",
            Command::Sh => "sh",
            Command::Mirror => "mirror",
            Command::Critical => "critical",
            Command::Galkin => "galkin",
            Command::Barycentre => "barycentre",
            Command::Linebundle => "linebundle",
            Command::Blowup => "blowup",
            Command::Separate => "separate",
            Command::Kato => "kato",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Options {
    pub seed: u64,
    pub t_symbolic: bool,
    pub k: Option<u64>,
    pub epsilon: Option<String>,
    /// Perturbation radius for `separate`.
    pub radius: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            seed: 0,
            t_symbolic: false,
            k: None,
            epsilon: None,
            radius: 1e-2,
        }
    }
}

type Out = Result<(Value, Vec<String>), CliError>;

/// Run `cmd` on the document `text`; `input` is only echoed into the report.
pub fn run(cmd: Command, input: &str, text: &str, opts: &Options) -> Result<Report, CliError> {
    if let Some(e) = &opts.epsilon {
        parse_rational(e).map_err(|_| CliError::Validation(format!("--epsilon {e:?} is not p/q")))?;
    }
    let (results, warnings) = match cmd {
        Command::Kato => kato(text),
        _ => {
            let doc = parse_fan_document(text)?;
            let space = doc.space(opts.k, opts.epsilon.as_deref())?;
            let (v, mut w) = match cmd {
                Command::Validate => validate(&doc, &space),
                Command::Qh => qh(&space, opts),
                Command::Sh => sh(&space),
                Command::Mirror => mirror(&space),
                Command::Critical => critical(&space, opts.seed),
                Command::Galkin => galkin(&space),
                Command::Barycentre => barycentre(&space),
                Command::Linebundle => linebundle(&space),
                Command::Blowup => blowup(&space),
                Command::Separate => separate(&space, opts),
                Command::Kato => unreachable!("handled above"),
            }?;
            let mut all = space.warnings.clone();
            all.append(&mut w);
            Ok((v, all))
        }
    }?;
    Ok(Report {
        command: cmd.name().into(),
        input: input.into(),
        seed: opts.seed,
        results,
        warnings,
    })
}

fn mode_name(m: PresentationMode) -> &'static str {
    match m {
        PresentationMode::Compact => "compact",
        PresentationMode::Nlb => "bundle",
        PresentationMode::Blowup => "blowup",
    }
}

fn polytope_summary(p: &MomentPolytope) -> Result<Value, CliError> {
    let bounded = p.is_bounded();
    let vs = vertices(p)?;
    Ok(json!({
        "bounded": bounded,
        "vertex_count": vs.len(),
        "vertices": vs.vertices.iter().map(|v| rationals(v)).collect::<Vec<_>>(),
        "delzant": is_delzant(p)?,
        "reflexive": if bounded { Value::Bool(check_reflexive(p)?) } else { Value::Null },
    }))
}

fn validate(doc: &FanDocument, s: &Space) -> Out {
    let report = validate_fan(&s.fan)?;
    let mut results = json!({
        "mode": mode_name(s.mode),
        "rank": s.fan.rank(),
        "edge_count": s.fan.num_edges(),
        "max_cone_count": s.fan.max_cones().len(),
        "smooth": report.smooth,
        "complete": report.complete,
        "notes": report.notes,
        "fano_index": s.fan.fano_index(),
        "polytope": polytope_summary(&s.polytope)?,
        "document": serde_json::to_value(doc).expect("document is JSON"),
    });
    if s.bundle.is_some() || s.surgery.is_some() {
        let built = FanDocument::from_parts(&s.fan, &s.polytope);
        results["constructed"] = serde_json::to_value(built).expect("document is JSON");
    }
    Ok((results, vec![]))
}

fn presentation(s: &Space) -> Result<(Presentation, QuotientAlgebra), CliError> {
    Ok(qh_presentation(&s.fan, &s.polytope, s.mode)?)
}

/// Characteristic and minimal polynomial with the exact spectrum.
fn operator_summary(m: &torfan_core::RationalMatrix) -> Result<Value, CliError> {
    let (chi, min) = char_min_poly(m)?;
    Ok(json!({
        "characteristic": unipoly(&chi),
        "minimal": unipoly(&min),
        "eigenvalues": spectrum(&exact_spectrum(m)?),
    }))
}

fn qh(s: &Space, opts: &Options) -> Out {
    let (pres, a) = presentation(s)?;
    let c1 = c1_operator(&a, &pres)?;
    let chi = char_min_poly(&c1)?.0;
    let fam = eigen_family_check(&chi, pres.lambda_x);
    let mut results = json!({
        "mode": mode_name(s.mode),
        "variables": pres.x_ring.names(),
        "lambda_x": pres.lambda_x,
        "linear_relations": pres.linear_relations.iter().map(|p| pres.display(p)).collect::<Vec<_>>(),
        "quantum_relations": pres.qsr_relations.iter().map(|p| pres.display(p)).collect::<Vec<_>>(),
        "dimension": a.dimension(),
        "classical_dimension": classical_dimension(&pres)?,
        "groebner_basis_t1": a.groebner().generators().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "c1": operator_summary(&c1)?,
        "omega": operator_summary(&omega_operator(&a, &pres)?)?,
        "family": {"d0": fam.d0, "g": unipoly(&fam.g), "holds": fam.holds},
    });
    if opts.t_symbolic {
        let g = pres.symbolic_basis()?;
        results["groebner_basis"] = json!(g.generators().iter().map(|p| pres.display(p)).collect::<Vec<_>>());
    }
    Ok((results, vec![]))
}

/// `p` in the `T = 1` ring, homogenised with powers of `T` (every divisor
/// and `T` have the same degree) and written in `t`.
fn homogenised(pres: &Presentation, p: &Polynomial) -> String {
    let top = p.terms().iter().map(|(m, _)| m.degree()).max().unwrap_or(0);
    let lifted = Polynomial::from_terms(
        &pres.ring,
        p.terms().iter().map(|(m, c)| {
            let mut e = m.0.clone();
            e.push((top - m.degree()) as u32);
            (Monomial(e), c.clone())
        }),
    );
    display_in_t(&lifted, pres.t_index(), pres.lambda_x)
}

fn sh_algebra(s: &Space) -> Result<(Presentation, QuotientAlgebra, QuotientAlgebra), CliError> {
    let (pres, qh) = presentation(s)?;
    let sh = sh_presentation(&qh, &sh_classes(&pres))?;
    Ok((pres, qh, sh))
}

fn sh(s: &Space) -> Out {
    let (pres, qh, sh) = sh_algebra(s)?;
    let gens = sh.groebner().generators();
    let results = json!({
        "mode": mode_name(s.mode),
        "localised_at": sh_classes(&pres).iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "qh_dimension": qh.dimension(),
        "dimension": sh.dimension(),
        "relations": gens.iter().map(|p| homogenised(&pres, p)).collect::<Vec<_>>(),
        "relations_t1": gens.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "omega": operator_summary(&omega_operator(&sh, &pres)?)?,
        "c1": operator_summary(&c1_operator(&sh, &pres)?)?,
    });
    Ok((results, vec![]))
}

fn superpotential(s: &Space) -> Result<(Superpotential, JacAlgebra), CliError> {
    let w = build_superpotential(&s.polytope, s.twist.as_deref())?;
    let jac = jacobian_ring(&w, &BigRational::from_integer(1.into()))?;
    Ok((w, jac))
}

fn mirror(s: &Space) -> Out {
    let (pres, qh, sh) = sh_algebra(s)?;
    let (target, a) = match s.mode {
        PresentationMode::Compact => ("QH", &qh),
        _ => ("SH", &sh),
    };
    let (w, jac) = superpotential(s)?;
    let rep = mirror_check(&pres, a, &w, &jac)?;
    let clauses: Vec<Value> = rep
        .clauses
        .iter()
        .map(|(c, ok, detail)| json!({"clause": c.to_string(), "holds": ok, "detail": detail}))
        .collect();
    let results = json!({
        "superpotential": w.to_string(),
        "jacobian_dimension": jac.dimension(),
        "target": target,
        "target_dimension": a.dimension(),
        "clauses": clauses,
        "holds": rep.holds(),
        "tolerance": real(1e-8),
    });
    Ok((results, vec![]))
}

fn point(p: &CriticalPoint) -> Value {
    json!({
        "coordinates": complexes(&p.coords),
        "value": complex(p.value),
        "multiplicity": p.multiplicity,
        "hessian_rank": p.hessian_rank,
        "nondegenerate": p.nondegenerate,
        "gradient_norm": real(p.gradient_norm),
    })
}

fn sorted_points(points: &[CriticalPoint]) -> Vec<Value> {
    let mut ps: Vec<&CriticalPoint> = points.iter().collect();
    ps.sort_by(|a, b| torfan_core::exact_algebra::numeric::spectral_order(&a.value, &b.value));
    ps.into_iter().map(point).collect()
}

fn critical(s: &Space, seed: u64) -> Out {
    let (w, jac) = superpotential(s)?;
    let set = critical_points_in(&w, &jac, seed)?;
    let warnings = set
        .diverged
        .iter()
        .map(|e| format!("Newton polish failed [{}]: {e}", e.name()))
        .collect();
    let results = json!({
        "superpotential": w.to_string(),
        "jacobian_dimension": jac.dimension(),
        "points": sorted_points(&set.points),
        "values": sorted_values(&set.values()),
        "diverged": set.diverged.len(),
        "gradient_tolerance": real(1e-9),
    });
    Ok((results, warnings))
}

fn galkin(s: &Space) -> Out {
    let g = galkin_point(&s.fan)?;
    let results = json!({
        "u": reals(&g.u),
        "z": reals(&g.z),
        "value": real(g.value),
        "gradient_norm": real(g.gradient_norm),
        "hessian_min_eigenvalue": real(g.hessian_min_eigenvalue),
        "iterations": g.iterations,
        "gradient_tolerance": real(1e-10),
    });
    Ok((results, vec![]))
}

/// The common lattice distance `d` of some point from every facet, from
/// `⟨y, eᵢ⟩ − d = λᵢ`; `None` when no such point exists.
fn facet_distance(p: &MomentPolytope) -> Result<Option<BigRational>, CliError> {
    let rows = p
        .edges()
        .iter()
        .map(|e| {
            let mut r = e.to_rationals();
            r.push(BigRational::from_integer((-1).into()));
            r
        })
        .collect();
    let a = torfan_core::RationalMatrix::from_rows(rows)?;
    Ok(a.solve(p.lambdas()).and_then(|y| y.last().cloned()))
}

/// The barycentre sits at distance `d = 1/n` from every facet; a normalised
/// monotone polytope has `n = λ_X`, a reflexive one `n = 1`.
fn barycentre(s: &Space) -> Out {
    let d = facet_distance(&s.polytope)?
        .filter(|d| *d > BigRational::from_integer(0.into()))
        .ok_or_else(|| Error::NotMonotone("no point is at the same positive lattice distance from every facet".into()))?;
    let n = d.recip();
    if !n.is_integer() {
        return Err(Error::DivisibilityFails(format!("facet distance {} is not 1/n", format_rational(&d))).into());
    }
    let n = n
        .to_integer()
        .to_string()
        .parse::<u64>()
        .map_err(|_| Error::DivisibilityFails("index does not fit in 64 bits".into()))?;
    let rep = barycentre_landing_check(&s.polytope, n)?;
    let results = json!({
        "lambda_x": s.fan.fano_index(),
        "facet_distance": rational(&d),
        "barycentre": rationals(&rep.barycentre),
        "exponents": rationals(&rep.exponents),
        "holds": rep.holds,
        "torus_points": sorted_points(&rep.torus_points),
    });
    Ok((results, vec![]))
}

fn families(fs: &[torfan_core::quantum_algebra::Family]) -> Value {
    let mut fs: Vec<_> = fs.iter().collect();
    fs.sort_by(|a, b| torfan_core::exact_algebra::numeric::spectral_order(&a.invariant, &b.invariant));
    Value::Array(
        fs.iter()
            .map(|f| json!({"invariant": complex(f.invariant), "count": f.count}))
            .collect(),
    )
}

fn linebundle(s: &Space) -> Out {
    let spec = s
        .bundle
        .as_ref()
        .ok_or_else(|| CliError::Validation("linebundle needs a bundle section or --k".into()))?;
    let k = spec
        .k
        .ok_or_else(|| Error::InvalidInput("transfer checks need the bundle given by k".into()))?;
    let (base_fan, base_poly) = &s.base;
    let (pres_b, qh_b) = qh_presentation(base_fan, base_poly, PresentationMode::Compact)?;
    let (pres_e, qh_e, sh_e) = sh_algebra(s)?;
    let phi = torfan_core::PhiMap::new(&pres_e, k, &spec.n);
    let omega_b = omega_operator(&qh_b, &pres_b)?;
    let chi_b = char_min_poly(&omega_b)?.0;
    let phi_holds = phi_check(&pres_b, &pres_e, &phi)?;
    let chi_holds = char_poly_transfer_check(&pres_b, &pres_e, &phi, &chi_b)?;
    let rep = eigenvalue_transfer_check(&omega_b, &qh_e, &sh_e, &pres_e, k, pres_b.lambda_x)?;
    let results = json!({
        "k": k,
        "n": spec.n,
        "lambda_b": pres_b.lambda_x,
        "lambda_e": pres_e.lambda_x,
        "transfer_constant": torfan_core::quantum_algebra::transfer_constant(k).to_string(),
        "relations_map": phi_holds,
        "characteristic_transfer": chi_holds,
        "base_families": families(&rep.base_families),
        "bundle_families": families(&rep.bundle_families),
        "worst_residual": real(rep.worst_residual),
        "tolerance": real(1e-8),
        "dim_qh": rep.dim_qh_e,
        "dim_sh": rep.dim_sh_e,
        "dim_nilpotent": rep.dim_nilpotent,
        "bookkeeping": rep.dim_qh_e == rep.dim_sh_e + rep.dim_nilpotent,
    });
    Ok((results, vec![]))
}

fn blowup(s: &Space) -> Out {
    let (fan0, poly0, new_edge) = s
        .surgery
        .as_ref()
        .ok_or_else(|| CliError::Validation("blowup needs a blowup section".into()))?;
    let (pres, a) = presentation(s)?;
    let mut results = json!({
        "before": {"edge_count": fan0.num_edges(), "vertex_count": vertices(poly0)?.len()},
        "after": {"edge_count": s.fan.num_edges(), "vertex_count": vertices(&s.polytope)?.len()},
        "new_edge": {
            "index": new_edge + 1,
            "vector": s.fan.edges()[*new_edge].to_i64().unwrap_or_default(),
            "lambda": rational(&s.polytope.lambdas()[*new_edge]),
        },
        "variables": pres.x_ring.names(),
        "quantum_relations": pres.qsr_relations.iter().map(|p| pres.display(p)).collect::<Vec<_>>(),
        "dimension": a.dimension(),
        "classical_dimension": classical_dimension(&pres)?,
    });
    results["groebner_basis"] =
        json!(pres.symbolic_basis()?.generators().iter().map(|p| pres.display(p)).collect::<Vec<_>>());
    Ok((results, vec![]))
}

fn separate(s: &Space, opts: &Options) -> Out {
    if !(opts.radius > 0.0 && opts.radius.is_finite()) {
        return Err(CliError::Validation(format!("--radius {} must be positive", opts.radius)));
    }
    let rep = perturb_and_separate(&s.polytope, opts.seed, opts.radius)?;
    let results = json!({
        "radius": real(opts.radius),
        "perturbed_lambdas": reals(&rep.lambdas),
        "coefficients": rationals(&rep.coefficients),
        "jacobian_dimension": rep.jac_dim,
        "values": sorted_values(&rep.values),
        "morse": rep.morse,
        "min_gap": real(rep.min_gap),
        "min_abs_value": real(rep.min_abs_value),
        "gap_tolerance": real(1e-9),
        "diverged": rep.diverged,
        "separated": rep.separated,
    });
    Ok((results, vec![]))
}

/// Value of a sub-check, or its error inline so the other checks still show.
fn attempt<T>(r: torfan_core::Result<T>, f: impl FnOnce(T) -> Value) -> Value {
    match r {
        Ok(t) => f(t),
        Err(e) => json!({"error": error_value(&CliError::Domain(e))}),
    }
}

fn kato(text: &str) -> Out {
    let doc = parse_family_document(text)?;
    let fam = doc.family()?;
    let ray = doc.ray()?;
    let spec = spectrum_at_zero(&fam)?;
    let mut eigen = Vec::new();
    for &(lambda, mult) in &spec {
        let mut entry = json!({
            "eigenvalue": complex(lambda),
            "multiplicity": mult,
            "total_projection": attempt(total_projection_limit_check(&fam, lambda, &ray), |r| json!({
                "rank": r.multiplicity,
                "norms": reals(&r.norms),
                "errors": reals(&r.errors),
                "limit_norm": real(r.limit_norm),
                "bounded": r.bounded,
                "converged": r.converged,
            })),
            "semisimple": attempt(is_semisimple(&fam, lambda), Value::Bool),
        });
        if mult > 1 {
            entry["derivatives"] = attempt(derivative_spectrum(&fam, lambda, &ray), |d| sorted_values(&d));
            entry["lines"] = attempt(semisimple_convergence_check(&fam, lambda, &ray), |r| json!({
                "limit_span_distance": real(r.limit_span_distance),
                "bounded": r.bounded,
                "cauchy": r.cauchy,
                "lines": r.lines.iter().map(|l| json!({
                    "derivative": complex(l.derivative),
                    "final_step": real(l.step_distances.last().copied().unwrap_or(0.0)),
                })).collect::<Vec<_>>(),
            }));
        }
        eigen.push(entry);
    }
    let results = json!({
        "size": fam.size(),
        "ray": reals(&ray),
        "spectrum_at_zero": spectrum(&spec),
        "eigenvalues": eigen,
        "eigenvectors": attempt(gevec_convergence(&fam, &ray), |r| json!({
            "orthogonal_limits": r.orthogonal_limits,
            "clusters": r.clusters.iter().map(|c| json!({
                "members": c.members.iter().map(|m| m + 1).collect::<Vec<_>>(),
                "eigenvalue": complex(c.eigenvalue),
                "final_distance": real(c.distances.last().copied().unwrap_or(0.0)),
                "monotone": c.monotone,
                "flag_distances": reals(&c.flag_distances),
            })).collect::<Vec<_>>(),
        })),
        "poles": attempt(pole_exponents(&fam, &ray), |ps| Value::Array(ps.iter().map(|p| json!({
            "start": complex(p.start),
            "exponent": real(p.exponent),
            "norms": reals(&p.norms),
        })).collect())),
        "exponent_tolerance": real(0.05),
    });
    Ok((results, vec![]))
}
