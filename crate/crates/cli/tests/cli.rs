use std::process::{Command, Output};

use serde_json::Value;

fn stratkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stratkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = stratkit(&all);
    let doc = serde_json::from_slice(&out.stdout).expect("valid JSON");
    (out.status.code().unwrap(), doc)
}

#[test]
fn certify_passes_on_every_segment() {
    let (code, doc) = json(&["certify", "corpus/sl2_z0.strat", "--bound", "6"]);
    assert_eq!(code, 0);
    assert_eq!(doc["status"], "PASS");
    let segments: Vec<Value> = doc["result"]["certificates"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["segment"].clone())
        .collect();
    assert_eq!(segments, [serde_json::json!([]), serde_json::json!(["e"]), serde_json::json!(["e", "f"])]);
    for cert in doc["result"]["certificates"].as_array().unwrap() {
        assert_eq!(cert["verdict"], "PASS");
        for key in ["segment", "bound", "flat_dim", "unit", "counit", "fullness", "verdict"] {
            assert!(cert.get(key).is_some(), "missing {key}");
        }
    }
}

#[test]
fn reversed_order_exits_with_certified_failure() {
    let out = stratkit(&["check", "corpus/sl2_reversed.strat"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAIL at filtration of Af"), "{text}");
}

#[test]
fn basis_lists_six_normal_forms() {
    let (code, doc) = json(&["basis", "corpus/sl2_z0.strat"]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["normal_forms"], serde_json::json!(["e", "f", "a", "b", "c", "b^2"]));
    assert_eq!(doc["result"]["dim"], 6);
}

#[test]
fn errors_exit_with_two() {
    assert_eq!(stratkit(&["basis", "no/such/file.strat"]).status.code(), Some(2));
    assert_eq!(stratkit(&["ext", "sl2_z0", "--from", "S_q", "--to", "S_e"]).status.code(), Some(2));
    assert_eq!(stratkit(&["certify", "sl2_z0", "--segment", "q"]).status.code(), Some(2));
    assert_eq!(stratkit(&["certify", "sl2_z0", "--bound", "0"]).status.code(), Some(2));
    assert_eq!(stratkit(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn output_is_byte_deterministic() {
    for args in [
        vec!["report", "corpus/sl2_z0.strat", "--bound", "3"],
        vec!["report", "corpus/sl2_z1.strat", "--bound", "3", "--json"],
        vec!["simples", "corpus/sl2_z1.strat", "--json"],
        vec!["chain", "corpus/a2_quiver.strat"],
    ] {
        let first = stratkit(&args);
        let second = stratkit(&args);
        assert_eq!(first.stdout, second.stdout, "{args:?}");
        assert_eq!(first.status.code(), second.status.code());
    }
}

#[test]
fn reports_embed_version_and_config() {
    let (_, doc) = json(&["ext", "corpus/sl2_z0.strat", "--from", "S_e", "--to", "S_e", "--bound", "4"]);
    assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(doc["config"]["bound"], 4);
    assert_eq!(doc["config"]["command"]["from"], "S_e");
    assert_eq!(doc["result"]["dims"], serde_json::json!([1, 1, 1, 1, 1]));
}

#[test]
fn segments_are_closed_downwards_with_a_warning() {
    let out = stratkit(&["certify", "sl2_z0", "--segment", "f", "--bound", "2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("not down-closed"), "{err}");
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["result"]["certificates"][0]["segment"], serde_json::json!(["e", "f"]));
    assert_eq!(doc["warnings"].as_array().unwrap().len(), 1);
}

#[test]
fn param_overrides_change_the_specialization() {
    let (_, z0) = json(&["simples", "corpus/sl2_z0.strat"]);
    let (_, z1) = json(&["simples", "corpus/sl2_z0.strat", "--param", "z=1"]);
    assert_eq!(z0["result"]["basic_over_vertices"], true);
    assert_eq!(z1["result"]["basic_over_vertices"], false);
    assert_eq!(z1["result"]["radical_dim"], 0);
}

#[test]
fn corpus_semisimple_and_hereditary_global_dimensions() {
    let (code, doc) = json(&["certify", "semisimple_pair", "--bound", "4"]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["global_dim"], serde_json::json!({"value": 0, "exact": true}));
    let (code, doc) = json(&["certify", "a2_quiver", "--bound", "4"]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["global_dim"], serde_json::json!({"value": 1, "exact": true}));
}

#[test]
fn rendered_presentations_run_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in stratkit::corpus::corpus() {
        let p = stratkit_core::parse_presentation(text).unwrap();
        let path = dir.path().join(format!("{name}.strat"));
        std::fs::write(&path, p.render()).unwrap();
        let from_disk = stratkit(&["basis", path.to_str().unwrap(), "--json"]);
        let bundled = stratkit(&["basis", name, "--json"]);
        let a: Value = serde_json::from_slice(&from_disk.stdout).unwrap();
        let b: Value = serde_json::from_slice(&bundled.stdout).unwrap();
        assert_eq!(a["result"]["normal_forms"], b["result"]["normal_forms"], "{name}");
    }
}

#[test]
fn in_process_entry_point_matches_the_binary() {
    let args = ["stratkit", "peirce", "corpus/sl2_z0.strat"];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = stratkit::main_with(args, &mut out, &mut err);
    let binary = stratkit(&args[1..]);
    assert_eq!(code, 0);
    assert_eq!(out, binary.stdout);
}

#[test]
fn standard_kernels_and_truncation_products_depend_on_the_parameter() {
    let (_, z0) = json(&["check", "sl2_z0"]);
    let (_, z1) = json(&["check", "sl2_z1"]);
    assert_eq!(z0["result"]["standards"]["e"]["kernel"], serde_json::json!(["a", "b^2"]));
    assert_eq!(z1["result"]["standards"]["e"]["kernel"], serde_json::json!(["a", "-1*e + b^2"]));
    let (_, z0) = json(&["certify", "sl2_z0", "--segment", "e", "--bound", "2"]);
    let (_, z1) = json(&["certify", "sl2_z1", "--segment", "e", "--bound", "2"]);
    assert_eq!(z0["result"]["certificates"][0]["b"]["products"], serde_json::json!(["b*b = 0"]));
    assert_eq!(z1["result"]["certificates"][0]["b"]["products"], serde_json::json!(["b*b = e"]));
}
