//! Report values and their text/JSON rendering.
//!
//! `serde_json` is built without `preserve_order`, so objects are key-sorted
//! and JSON output is byte-stable for equal inputs.

use serde::Serialize;
use serde_json::{json, Map, Value};
use torfan_core::exact_algebra::format_rational;
use torfan_core::exact_algebra::numeric::spectral_order;
use torfan_core::{BigRational, Complex64, UniPoly};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub input: String,
    pub seed: u64,
    pub results: Value,
    pub warnings: Vec<String>,
}

pub fn rational(q: &BigRational) -> Value {
    Value::String(format_rational(q))
}

pub fn rationals(qs: &[BigRational]) -> Value {
    Value::Array(qs.iter().map(rational).collect())
}

/// `-0.0` is written as `0.0` so that sign-of-zero noise cannot change output.
pub fn real(x: f64) -> Value {
    let x = if x == 0.0 { 0.0 } else { x };
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(x.to_string()), Value::Number)
}

pub fn reals(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| real(x)).collect())
}

pub fn complex(z: Complex64) -> Value {
    json!([real(z.re), real(z.im)])
}

pub fn complexes(zs: &[Complex64]) -> Value {
    Value::Array(zs.iter().map(|&z| complex(z)).collect())
}

/// Eigenvalues with multiplicity, in `(|λ|, arg λ)` order.
pub fn spectrum(spec: &[(Complex64, usize)]) -> Value {
    let mut s = spec.to_vec();
    s.sort_by(|a, b| spectral_order(&a.0, &b.0));
    Value::Array(
        s.iter()
            .map(|(z, m)| json!({"value": complex(*z), "multiplicity": m}))
            .collect(),
    )
}

pub fn sorted_values(zs: &[Complex64]) -> Value {
    let mut v = zs.to_vec();
    v.sort_by(spectral_order);
    complexes(&v)
}

pub fn unipoly(p: &UniPoly) -> Value {
    json!({
        "polynomial": p.to_string(),
        "coefficients": rationals(p.coeffs()),
    })
}

pub fn error_value(e: &CliError) -> Value {
    json!({"kind": e.name(), "message": e.to_string()})
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report values are finite JSON");
            s.push('\n');
            s
        }
        Format::Text => render_text(report),
    }
}

pub fn render_error(command: &str, input: &str, e: &CliError, format: Format) -> String {
    match format {
        Format::Json => {
            let v = json!({"command": command, "input": input, "error": error_value(e)});
            let mut s = serde_json::to_string_pretty(&v).expect("error report is JSON");
            s.push('\n');
            s
        }
        Format::Text => format!("error[{}]: {e}\n", e.name()),
    }
}

fn render_text(r: &Report) -> String {
    let mut out = String::new();
    // a report holding a single scalar is one line
    if let Value::Object(m) = &r.results {
        if m.len() == 1 {
            let (k, v) = m.iter().next().expect("one entry");
            if !matches!(v, Value::Object(_) | Value::Array(_)) {
                out.push_str(&format!("{}: {} = {}\n", r.command, k, scalar(v)));
                push_warnings(&mut out, &r.warnings);
                return out;
            }
        }
    }
    out.push_str(&format!("{} {} (seed {})\n", r.command, r.input, r.seed));
    write_value(&mut out, &r.results, 0);
    push_warnings(&mut out, &r.warnings);
    out
}

fn push_warnings(out: &mut String, warnings: &[String]) {
    for w in warnings {
        out.push_str(&format!("warning: {w}\n"));
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Bool(true) => "PASS".into(),
        Value::Bool(false) => "FAIL".into(),
        Value::Null => "-".into(),
        Value::Number(n) => n.to_string(),
        Value::Array(a) if is_complex(v) => format_complex(a),
        Value::Array(a) => format!("[{}]", a.iter().map(scalar).collect::<Vec<_>>().join(", ")),
        Value::Object(_) => serde_json::to_string(v).expect("object is JSON"),
    }
}

/// `[re, im]` pairs are written by [`complex`] as floats, so integer pairs
/// such as index lists are never mistaken for them.
fn is_complex(v: &Value) -> bool {
    matches!(v, Value::Array(a) if a.len() == 2 && a.iter().all(Value::is_f64))
}

/// Keys whose values come from [`reals`]; a length-2 list under one of them
/// is a real vector, not a complex number.
const REAL_LISTS: &[&str] = &["errors", "flag_distances", "norms", "perturbed_lambdas", "ray", "u", "z"];

fn keyed_scalar(key: &str, v: &Value) -> String {
    match v {
        Value::Array(a) if REAL_LISTS.contains(&key) => {
            format!("[{}]", a.iter().map(scalar).collect::<Vec<_>>().join(", "))
        }
        _ => scalar(v),
    }
}

fn format_complex(a: &[Value]) -> String {
    let re = a[0].as_f64().unwrap_or(0.0);
    let im = a[1].as_f64().unwrap_or(0.0);
    if im == 0.0 {
        format!("{re}")
    } else if im < 0.0 {
        format!("{re} - {}i", -im)
    } else {
        format!("{re} + {im}i")
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Object(_) => false,
        Value::Array(a) => is_complex(v) || a.iter().all(|x| !matches!(x, Value::Object(_) | Value::Array(_)) || is_complex(x)),
        _ => true,
    }
}

/// Arrays of objects with flat fields render as a table.
fn table_columns(a: &[Value]) -> Option<Vec<String>> {
    let first = a.first()?.as_object()?;
    let cols: Vec<String> = first.keys().cloned().collect();
    for row in a {
        let m = row.as_object()?;
        if m.keys().ne(cols.iter()) || !m.values().all(is_flat) {
            return None;
        }
    }
    Some(cols)
}

fn write_table(out: &mut String, a: &[Value], cols: &[String], indent: usize) {
    let cells: Vec<Vec<String>> = a
        .iter()
        .map(|row| cols.iter().map(|c| keyed_scalar(c, &row[c])).collect())
        .collect();
    let widths: Vec<usize> = cols
        .iter()
        .enumerate()
        .map(|(j, c)| cells.iter().map(|r| r[j].chars().count()).chain([c.chars().count()]).max().unwrap_or(0))
        .collect();
    let pad = " ".repeat(indent);
    let line = |row: &[String]| -> String {
        let parts: Vec<String> = row.iter().zip(&widths).map(|(s, &w)| format!("{s:<w$}")).collect();
        format!("{pad}{}\n", parts.join("  ").trim_end())
    };
    out.push_str(&line(cols));
    out.push_str(&line(&widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>()));
    for r in &cells {
        out.push_str(&line(r));
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(m) => write_object(out, m, indent),
        Value::Array(a) if !is_flat(v) => {
            if let Some(cols) = table_columns(a) {
                write_table(out, a, &cols, indent);
            } else {
                for (i, x) in a.iter().enumerate() {
                    out.push_str(&format!("{pad}[{}]\n", i + 1));
                    write_value(out, x, indent + 2);
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", scalar(v))),
    }
}

fn write_object(out: &mut String, m: &Map<String, Value>, indent: usize) {
    let pad = " ".repeat(indent);
    let width = m
        .iter()
        .filter(|(_, v)| is_flat(v))
        .map(|(k, _)| k.chars().count())
        .max()
        .unwrap_or(0);
    for (k, v) in m {
        if is_flat(v) {
            out.push_str(&format!("{pad}{k:<width$}  {}\n", keyed_scalar(k, v)));
        }
    }
    for (k, v) in m {
        if !is_flat(v) {
            out.push_str(&format!("{pad}{k}:\n"));
            write_value(out, v, indent + 2);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(results: Value) -> Report {
        Report {
            command: "qh".into(),
            input: "p2.json".into(),
            seed: 0,
            results,
            warnings: vec![],
        }
    }

    #[test]
    fn single_scalar_is_one_line() {
        let s = render(&report(json!({"dimension": 3})), Format::Text);
        assert_eq!(s, "qh: dimension = 3\n");
    }

    #[test]
    fn clause_lists_become_tables() {
        let r = report(json!({"clauses": [
            {"clause": "a", "holds": true, "detail": "ok"},
            {"clause": "b", "holds": false, "detail": "dimension 2 vs 3"},
        ]}));
        let s = render(&r, Format::Text);
        assert!(s.contains("clause  detail            holds"));
        assert!(s.contains("a       ok                PASS"));
        assert!(s.contains("b       dimension 2 vs 3  FAIL"));
    }

    #[test]
    fn spectra_are_ordered_by_modulus_then_argument() {
        let v = spectrum(&[
            (Complex64::new(-2.0, 0.0), 1),
            (Complex64::new(0.0, 1.0), 2),
            (Complex64::new(1.0, 0.0), 1),
        ]);
        let firsts: Vec<f64> = v.as_array().unwrap().iter().map(|e| e["value"][0].as_f64().unwrap()).collect();
        assert_eq!(firsts, vec![1.0, 0.0, -2.0]);
    }

    #[test]
    fn real_pairs_stay_lists() {
        let s = render(&report(json!({"z": [1.0, 2.0], "value": [1.0, 2.0]})), Format::Text);
        assert!(s.contains("z      [1.0, 2.0]"), "{s}");
        assert!(s.contains("value  1 + 2i"), "{s}");
    }

    #[test]
    fn negative_zero_is_normalised() {
        assert_eq!(real(-0.0).to_string(), "0.0");
        assert_eq!(complex(Complex64::new(1.5, -0.0)).to_string(), "[1.5,0.0]");
    }
}
