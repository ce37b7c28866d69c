use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data").join(name)
}

fn phodge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phodge")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("phodge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn pcurv_and_phitchin_of_the_p2_anchor() {
    let input = data("anchor_p2_rank2.json");
    let out = phodge(&["pcurv", "-i", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["matrix"], serde_json::json!([["z", "0"], ["1", "z"]]));
    assert_eq!(v["twist_weight"], 2);

    let out = phodge(&["phitchin", "-i", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["var"], "z'");
    assert_eq!(v["entries"], serde_json::json!(["0", "z"]));
    // p = 2 does not exceed the rank
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn pinned_outputs_are_byte_identical() {
    for name in ["anchor_p3_rank1", "anchor_p2_rank2", "anchor_p3_rank2"] {
        let input = data(&format!("{name}.json"));
        for cmd in ["pcurv", "phitchin"] {
            let out = phodge(&[cmd, "-i", input.to_str().unwrap()]);
            let expected = std::fs::read(data(&format!("{name}.{cmd}.json"))).unwrap();
            assert_eq!(out.stdout, expected, "{cmd} on {name}");
        }
    }
}

#[test]
fn verify_example_passes() {
    let args = ["verify", "--suite", "pcurv", "--p", "2,3", "--rank", "1,2", "--trials", "50", "--seed", "7"];
    let out = phodge(&args);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["fail"], 0);
    assert_eq!(v["total"], v["pass"]);
    assert_eq!(phodge(&args).stdout, out.stdout, "report is byte-stable");
}

#[test]
fn verify_all_small() {
    let out = phodge(&["verify", "--p", "2,3", "--rank", "1,2", "--trials", "3", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(stdout_json(&out)["suite"], "all");
}

#[test]
fn schema_errors_exit_two_with_path() {
    let bad = scratch("bad.json");
    std::fs::write(&bad, r#"{"p":3,"var":"z","precision":4,"rank":2,"matrix":[["0","1"],["z","w"]]}"#).unwrap();
    let out = phodge(&["pcurv", "-i", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&out);
    assert_eq!(v["error"]["code"], "SchemaError");
    assert_eq!(v["error"]["details"]["path"], "matrix[1][1]");

    let out = phodge(&["pcurv", "-i", "/nonexistent/conn.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["error"]["code"], "IoError");

    let out = phodge(&["verify", "--suite", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn header_from_flag() {
    let bare = scratch("bare.json");
    std::fs::write(&bare, r#"{"var":"z","precision":10,"rank":1,"matrix":[["z"]]}"#).unwrap();
    let out = phodge(&["pcurv", "--p", "3", "-i", bare.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["matrix"], serde_json::json!([["z^3"]]));
    let out = phodge(&["pcurv", "-i", bare.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn harmonic_pipeline() {
    // ∂ + diag(1, z^2) over F_3 moved by [[1, z], [2z + z^2, 1 + z]]
    let conn = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/gauged_diag_p3.json");
    let pkg = scratch("pkg.json");
    let out = phodge(&["solve-harmonic", "-i", conn.to_str().unwrap(), "-o", pkg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let package: Value = serde_json::from_str(&std::fs::read_to_string(&pkg).unwrap()).unwrap();
    assert_eq!(package["harmonic"]["frame"], "eigen");

    let out = phodge(&["cmap", "-i", pkg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["var"], "z");

    let out = phodge(&["cinv", "-i", pkg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let cinv = stdout_json(&out);
    assert_eq!(cinv["higgs"]["var"], "z'");

    let out = phodge(&["cinv", "-i", conn.to_str().unwrap(), "-i", pkg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out), cinv);
}

#[test]
fn rank_one_commands() {
    let form = scratch("form.json");
    std::fs::write(&form, r#"{"p":3,"var":"z","precision":7,"coefficient":"1 + z^2 + z^5"}"#).unwrap();
    let out = phodge(&["cartier", "-i", form.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["coefficient"], "1 + z");

    let eta = scratch("eta.json");
    std::fs::write(&eta, r#"{"p":3,"var":"z'","precision":3,"coefficient":"1 + z"}"#).unwrap();
    let out = phodge(&["solve-hp", "-i", eta.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let u = scratch("u.json");
    std::fs::write(&u, &out.stdout).unwrap();
    let out = phodge(&["hp", "-i", u.to_str().unwrap()]);
    let image = stdout_json(&out);
    assert!(image["coefficient"].as_str().unwrap().starts_with("1 + z"));

    let unit = scratch("unit.json");
    std::fs::write(&unit, r#"{"p":3,"var":"z","precision":8,"series":"1 + z"}"#).unwrap();
    let out = phodge(&["dlog", "-i", unit.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let w = scratch("w.json");
    std::fs::write(&w, &out.stdout).unwrap();
    let out = phodge(&["dlog", "-i", w.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["series"].as_str().unwrap().split(" + ").next(), Some("1"));

    let s = scratch("s.json");
    std::fs::write(&s, r#"{"p":3,"var":"z","precision":6,"series":"2 + 2*z^3"}"#).unwrap();
    let out = phodge(&["descend", "-i", s.to_str().unwrap()]);
    assert_eq!(stdout_json(&out)["series"], "2 + 2*z");
    std::fs::write(&s, r#"{"p":3,"var":"z","precision":6,"series":"z"}"#).unwrap();
    let out = phodge(&["descend", "-i", s.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["error"]["code"], "NotAPthPower");
}
