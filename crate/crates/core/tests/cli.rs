use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

use lipschitz_baire::lipschitz::TreeHom;
use lipschitz_baire::prefix::{Alphabet, Point, Word};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lipbaire")).args(args).output().unwrap()
}

fn write(name: &str, value: &Value) -> String {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, value.to_string()).unwrap();
    path.to_string_lossy().into_owned()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn pt(stem: &[u32], tail: u32) -> Value {
    serde_json::to_value(Point::new(stem.to_vec(), tail)).unwrap()
}

#[test]
fn isometry_and_lipschitz_exit_codes() {
    let iso = write("iso.json", &json!([[pt(&[0], 0), pt(&[5], 0)], [pt(&[1], 0), pt(&[6], 0)]]));
    let out = bin(&["check-isometry", "--input", &iso]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["verdict"], "ok");

    let collapse = write("collapse.json", &json!([[pt(&[0], 0), pt(&[5], 0)], [pt(&[1], 0), pt(&[5], 0)]]));
    let out = bin(&["check-isometry", "--input", &collapse]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "violation");
    assert_eq!(v["witness"]["kind"], "not_injective");
    // collapsing is still Lipschitz
    assert_eq!(bin(&["check-lipschitz", "--input", &collapse]).status.code(), Some(0));
}

#[test]
fn malformed_input_exits_two() {
    let bad = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("bad.json");
    std::fs::write(&bad, "[[{\"stem\": [0], \"tail\": ").unwrap();
    let out = bin(&["check-lipschitz", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());

    assert_eq!(bin(&["check-lipschitz"]).status.code(), Some(2));
    assert_eq!(bin(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(bin(&["backforth", "--alphabet", "zero"]).status.code(), Some(2));

    let wide = write("wide.json", &json!([[pt(&[7], 0), pt(&[1], 0)]]));
    assert_eq!(bin(&["check-isometry", "--alphabet", "2", "--input", &wide]).status.code(), Some(2));
}

#[test]
fn induce_and_analyse() {
    let m = write("m.json", &json!([[pt(&[0], 0), pt(&[1, 0, 1], 0)], [pt(&[1], 0), pt(&[0], 0)]]));
    let out = bin(&["induce-hom", "--alphabet", "2", "--depth", "2", "--input", &m]);
    assert_eq!(out.status.code(), Some(0));
    let h: TreeHom = serde_json::from_value(stdout_json(&out)).unwrap();
    assert_eq!(h.apply(&Word::from([0, 0])).unwrap(), Word::from([1, 0]));

    let parity = write("parity.json", &serde_json::to_value(TreeHom::parity(Alphabet::BINARY)).unwrap());
    let out = bin(&["level-analysis", "--depth", "3", "--input", &parity]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["isometry_to_depth"], true);
}

#[test]
fn backforth_prints_seed_and_map() {
    let out = bin(&["backforth", "--seed", "9", "--steps", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["seed"], 9);
    assert_eq!(v["isometry"]["verdict"], "ok");
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed 9"));

    // three eventually-0 points cannot all find partners among two
    let samples = write(
        "samples.json",
        &json!({ "a": [pt(&[], 0), pt(&[1], 0), pt(&[0, 1], 0)], "b": [pt(&[], 1), pt(&[0], 1)] }),
    );
    let out = bin(&["backforth", "--steps", "3", "--input", &samples]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout_json(&out)["error"].is_string());
}

#[test]
fn parity_families_roundtrip() {
    let mut paths = Vec::new();
    for kind in ["odd", "even"] {
        let out = bin(&["gen-parity-family", "--kind", kind, "--depth", "2", "--per-cell", "6", "--seed", "4"]);
        assert_eq!(out.status.code(), Some(0));
        let v = stdout_json(&out);
        assert_eq!(v["seed"], 4);
        paths.push(write(&format!("{kind}.json"), &v["family"]));
    }
    let out = bin(&["certify-no-isometry", "--input", &paths[0], "--input", &paths[1]]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["isometric_pairs"], 0);
    // the certificate only compares opposite kinds
    let out = bin(&["certify-no-isometry", "--input", &paths[0], "--input", &paths[0]]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn slaloms_and_widths() {
    let hom = write("id.json", &serde_json::to_value(TreeHom::identity(Alphabet::Countable)).unwrap());
    let sample = write(
        "sample.json",
        &json!({ "s": [3], "points": [pt(&[3, 0, 1], 0), pt(&[3, 1], 1)] }),
    );
    let out = bin(&["slalom-from-hom", "--depth", "4", "--input", &hom, "--input", &sample]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["widths"], json!([1, 2, 1, 2]));

    let pieces = write(
        "pieces.json",
        &json!([{ "s": [], "slalom": [[0], [1], [2]] }, { "s": [1], "slalom": [[5], [6], [7]] }]),
    );
    let out = bin(&["merge-slaloms", "--input", &pieces]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["slalom"], json!([[], [1], [2, 7]]));

    let tree = write("tree.json", &json!([[0, 0, 0], [0, 1, 0], [1, 1, 1]]));
    let out = bin(&["tree-width", "--input", &tree]);
    assert_eq!(stdout_json(&out)["widths"], json!([1, 2, 3, 3]));
    let out = bin(&["tree-width", "--input", &tree, "--corset", r#"{"kind":"ceillog2"}"#]);
    assert_eq!(out.status.code(), Some(1));

    let parity = write("par3.json", &serde_json::to_value(TreeHom::parity(Alphabet::Finite(3))).unwrap());
    let tri = write("tri.json", &json!([[0, 2], [2, 0], [1]]));
    let out = bin(&["hom-image", "--input", &parity, "--input", &tri]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["image_widths"], json!([1, 2, 1]));
}

#[test]
fn forcing_commands() {
    let p = write("p.json", &json!([[pt(&[1], 0), pt(&[2], 0)]]));
    let q = write("q.json", &json!([[pt(&[1], 0), pt(&[3], 0)]]));
    let out = bin(&["forcing-check", "--input", &p, "--input", &q]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["compatible"], false);

    let contract = write("contract.json", &json!([[pt(&[0, 0], 0), pt(&[3], 0)], [pt(&[0, 1], 0), pt(&[4], 0)]]));
    assert_eq!(bin(&["forcing-check", "--input", &contract]).status.code(), Some(1));

    let ext = write("ext.json", &json!({ "condition": [[pt(&[1], 0), pt(&[2], 0)]], "a": pt(&[4], 0), "b": pt(&[9], 0) }));
    let out = bin(&["forcing-extend", "--seed", "2", "--input", &ext]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["condition"].as_array().unwrap().len(), 3);

    let fam = write(
        "fam.json",
        &json!([[[pt(&[0], 0), pt(&[1], 0)]], [[pt(&[0], 0), pt(&[2], 0)]], [[pt(&[5], 0), pt(&[1], 0)]]]),
    );
    let out = bin(&["forcing-antichain", "--min-size", "2", "--input", &fam]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["members"].as_array().unwrap().len(), 2);
    assert_eq!(bin(&["forcing-antichain", "--min-size", "3", "--input", &fam]).status.code(), Some(1));
}

#[test]
fn output_flag_writes_file() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("out.json");
    let out = bin(&["backforth", "--steps", "3", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["completed_steps"], 3);
}

#[test]
fn quick_selftest_is_deterministic() {
    let a = bin(&["selftest", "--quick", "--seed", "5"]);
    let b = bin(&["selftest", "--quick", "--seed", "5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout_json(&a)["seed"], 5);
}
