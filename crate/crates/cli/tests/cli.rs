//! The binary end to end: exit codes, determinism, round-trips and the
//! documented example outputs.

use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use torfan::document::{parse_fan_document, parse_family_document};

fn example(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "examples", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn torfan(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_torfan")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(cmd: &str, file: &str, extra: &[&str]) -> (i32, Value, String) {
    let mut args = vec![cmd, "--input", file, "--format", "json"];
    args.extend_from_slice(extra);
    let (code, out, _) = torfan(&args);
    let v = serde_json::from_str(&out).expect("stdout is JSON");
    (code, v, out)
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect()
}

fn scratch(name: &str, body: &str) -> String {
    let dir = std::env::temp_dir().join(format!("torfan-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn plane_has_cube_root_relation() {
    let (code, v, _) = json("qh", &example("p2.json"), &["--t-symbolic"]);
    assert_eq!(code, 0);
    let r = &v["results"];
    assert_eq!(r["dimension"], 3);
    assert!(strings(&r["groebner_basis"]).contains(&"x3^3 - t".to_string()));
    assert_eq!(strings(&r["quantum_relations"]), vec!["x1*x2*x3 - t"]);
    let (_, text, _) = torfan(&["qh", "--input", &example("p2.json"), "--t-symbolic"]);
    assert!(text.contains("x3^3 - t"));
}

#[test]
fn bundle_over_plane_localises_to_dimension_two() {
    let (code, v, _) = json("sh", &example("o-1_p2.json"), &[]);
    assert_eq!(code, 0);
    let r = &v["results"];
    assert_eq!(r["dimension"], 2);
    assert_eq!(r["qh_dimension"], 3);
    assert!(strings(&r["relations"]).contains(&"xf^2 + t".to_string()));
}

#[test]
fn exceptional_point_has_a_simple_pole() {
    let (code, v, _) = json("kato", &example("exceptional_2x2.json"), &[]);
    assert_eq!(code, 0);
    let poles = v["results"]["poles"].as_array().unwrap();
    assert!(!poles.is_empty());
    for p in poles {
        assert!((p["exponent"].as_f64().unwrap() + 1.0).abs() < 0.05);
    }
    let first = &v["results"]["eigenvalues"][0];
    assert_eq!(first["derivatives"]["error"]["kind"], "NotSemisimple");
}

#[test]
fn three_by_three_gevecs_converge() {
    let (code, v, _) = json("kato", &example("jordan_3x3.json"), &[]);
    assert_eq!(code, 0);
    let clusters = v["results"]["eigenvectors"]["clusters"].as_array().unwrap();
    assert_eq!(clusters.len(), 2);
    for c in clusters {
        assert_eq!(c["monotone"], true);
        assert!(c["final_distance"].as_f64().unwrap() < 1e-3);
    }
}

#[test]
fn exit_status_follows_error_class() {
    let bad_json = scratch("bad.json", "{\n  \"rank\": 2,\n  \"edges\": [[1, 0] [0, 1]]\n}\n");
    let (code, _, err) = torfan(&["validate", "--input", &bad_json]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error[ParseError]: line 3"), "{err}");
    assert!(err.contains("\"edges\": [[1, 0] [0, 1]]"));

    let non_primitive = scratch(
        "np.json",
        r#"{"rank": 2, "edges": [[2, 4], [0, 1], [-1, -1]], "max_cones": [[1, 2], [2, 3], [1, 3]], "lambdas": ["0", "0", "-1"]}"#,
    );
    let (code, v, _) = json("validate", &non_primitive, &[]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "ValidationError");
    assert!(v["error"]["message"].as_str().unwrap().contains("primitive"));

    let bad_index = scratch(
        "idx.json",
        r#"{"rank": 1, "edges": [[1], [-1]], "max_cones": [[1], [3]], "lambdas": ["0", "-1"]}"#,
    );
    let (code, v, _) = json("validate", &bad_index, &[]);
    assert_eq!(code, 2);
    assert!(v["error"]["message"].as_str().unwrap().contains("index 3"));

    let unknown = scratch("unk.json", r#"{"rank": 1, "edges": [[1], [-1]], "max_cones": [[1], [2]], "lambdas": ["0", "-1"], "colour": 1}"#);
    assert_eq!(torfan(&["validate", "--input", &unknown]).0, 2);
    assert_eq!(torfan(&["validate", "--input", "/nonexistent/torfan.json"]).0, 2);

    let (code, v, _) = json("qh", &example("p2.json"), &["--k", "3"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "NotMonotone");

    let (code, v, _) = json("galkin", &example("o-1_p2.json"), &[]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "HalfSpaceFan");

    let (code, _, err) = torfan(&["blowup", "--input", &example("p2.json")]);
    assert_eq!(code, 2);
    assert!(err.contains("ValidationError"));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for (cmd, file) in [
        ("critical", "p1xp1.json"),
        ("critical", "o-1-1_p1xp1.json"),
        ("separate", "o-1-1_p1xp1.json"),
        ("validate", "o-2_p3.json"),
        ("kato", "jordan_3x3.json"),
    ] {
        let (_, _, a) = json(cmd, &example(file), &["--seed", "7"]);
        let (_, _, b) = json(cmd, &example(file), &["--seed", "7"]);
        assert_eq!(a, b, "{cmd} {file}");
    }
}

#[test]
fn rendered_documents_reparse_identically() {
    let dir: PathBuf = [env!("CARGO_MANIFEST_DIR"), "examples"].iter().collect();
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        if text.contains("torfan/family@1") {
            let doc = parse_family_document(&text).unwrap();
            let again = parse_family_document(&serde_json::to_string(&doc).unwrap()).unwrap();
            assert_eq!(doc, again);
            continue;
        }
        let doc = parse_fan_document(&text).unwrap();
        let (_, v, _) = json("validate", path.to_str().unwrap(), &[]);
        let shown = serde_json::to_string(&v["results"]["document"]).unwrap();
        assert_eq!(parse_fan_document(&shown).unwrap(), doc);
        if let Some(built) = v["results"].get("constructed") {
            // the constructed fan is itself a valid plain document
            let b = parse_fan_document(&serde_json::to_string(built).unwrap()).unwrap();
            let s = b.space(None, None).unwrap();
            assert_eq!(s.fan.num_edges(), v["results"]["edge_count"].as_u64().unwrap() as usize);
        }
        seen += 1;
    }
    assert!(seen >= 15);
}

#[test]
fn bundle_document_builds_the_total_space() {
    for m in 1..=4usize {
        let (code, v, _) = json("validate", &example(&format!("o-1_p{m}.json")), &[]);
        assert_eq!(code, 0);
        let built = &v["results"]["constructed"];
        let edges = built["edges"].as_array().unwrap();
        assert_eq!(edges.len(), m + 2);
        let mut fibre = vec![0i64; m];
        fibre.push(1);
        assert_eq!(edges[m + 1], serde_json::json!(fibre));
        assert_eq!(v["results"]["mode"], "bundle");
        assert_eq!(v["results"]["polytope"]["bounded"], false);
    }
}

#[test]
fn plane_document_round_trips_to_three_cones() {
    let text = std::fs::read_to_string(example("p2.json")).unwrap();
    let (fan, _) = parse_fan_document(&text).unwrap().base().unwrap();
    assert_eq!(fan.num_edges(), 3);
    assert_eq!(fan.max_cones().len(), 3);
}

#[test]
fn mirror_prints_a_clause_table() {
    let (code, out, _) = torfan(&["mirror", "--input", &example("o-1-1_p1xp1.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("clause  detail"));
    assert!(!out.contains("FAIL"));
}

#[test]
fn epsilon_overrides_the_chop_depth() {
    let (code, v, _) = json("blowup", &example("p2_reflexive_blowup.json"), &["--epsilon", "1/2"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["before"]["vertex_count"], 3);
    assert_eq!(v["results"]["after"]["vertex_count"], 4);
    // λ₁ + λ₂ + ε for the chopped corner
    assert_eq!(v["results"]["new_edge"]["lambda"], "-3/2");
    assert!(!v["warnings"].as_array().unwrap().is_empty());
    assert_eq!(torfan(&["blowup", "--input", &example("p2_reflexive_blowup.json"), "--epsilon", "half"]).0, 2);
}
