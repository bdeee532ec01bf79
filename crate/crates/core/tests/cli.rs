use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn tauconv(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tauconv"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn read(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write(path: PathBuf, v: &Value) {
    std::fs::write(path, serde_json::to_string_pretty(v).unwrap()).unwrap();
}

fn setup() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    let o = tauconv(&["group-build", "--h", "cyclic:2", "--k", "cyclic:3", "--tau", "inversion", "--out", "g.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let row = |v: [&str; 3]| v.iter().map(|s| json!([s, "0"])).collect::<Vec<_>>();
    write(
        dir.path().join("e.json"),
        &json!({"format": 1, "group": "g.json", "values": [row(["1", "0", "0"]), row(["0", "0", "0"])]}),
    );
    write(
        dir.path().join("u.json"),
        &json!({"format": 1, "group": "g.json", "values": [row(["0", "0", "0"]), row(["1", "0", "0"])]}),
    );
    write(
        dir.path().join("f.json"),
        &json!({"format": 1, "group": "g.json", "values": [row(["1/2", "-3", "0"]), row(["2/7", "0", "5"])]}),
    );
    dir
}

#[test]
fn group_build_and_validate() {
    let dir = setup();
    let g = read(dir.path().join("g.json"));
    assert_eq!(g["format"], 1);
    assert_eq!(g["tau"]["kind"], "inversion");
    let o = tauconv(&["group-validate", "--group", "g.json"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("order 6"));
}

#[test]
fn corrupted_group() {
    let dir = setup();
    write(
        dir.path().join("bad.json"),
        &json!({"format": 1, "H": {"kind": "cyclic", "n": 1},
                "K": {"kind": "table", "cayley": [[0, 1, 2], [1, 1, 0], [2, 0, 1]]},
                "tau": {"kind": "trivial"}}),
    );
    let o = tauconv(&["group-validate", "--group", "bad.json"], dir.path());
    assert_eq!(code(&o), 1);
    let o = tauconv(&["verify", "--group", "bad.json", "--report", "r.json"], dir.path());
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("invalid group"), "{err}");
    assert!(!dir.path().join("r.json").exists());
}

#[test]
fn tconv_of_point_masses() {
    let dir = setup();
    let o = tauconv(
        &["convolve", "--group", "g.json", "--f", "e.json", "--g", "u.json", "--op", "tconv", "--out", "out.json"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = read(dir.path().join("out.json"));
    assert_eq!(out["values"][0][0], json!(["1/2", "0/1"]));
    assert_eq!(out["values"][1][0], json!(["1/2", "0/1"]));
    assert_eq!(out["values"][0][1], json!(["0/1", "0/1"]));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("‖out‖_1 = 1/1"), "{stdout}");
}

#[test]
fn tilde_of_zero_is_zero() {
    let dir = setup();
    let zero = json!({"format": 1, "group": "g.json", "values": [[[0, 0], [0, 0], [0, 0]], [[0, 0], [0, 0], [0, 0]]]});
    write(dir.path().join("z.json"), &zero);
    let o = tauconv(&["convolve", "--group", "g.json", "--f", "z.json", "--op", "tilde", "--out", "t.json"], dir.path());
    assert_eq!(code(&o), 0);
    let t = read(dir.path().join("t.json"));
    assert_eq!(t["values"], json!([[["0/1", "0/1"], ["0/1", "0/1"], ["0/1", "0/1"]]]));
}

#[test]
fn involution_twice_and_round_trip() {
    let dir = setup();
    let run = |f: &str, out: &str| {
        let o = tauconv(&["convolve", "--group", "g.json", "--f", f, "--op", "involution", "--out", out], dir.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    };
    run("f.json", "a.json");
    run("a.json", "b.json");
    let f = read(dir.path().join("f.json"));
    let b = read(dir.path().join("b.json"));
    let canon = |v: &Value| -> Vec<Vec<(tauconv::scalar::Rational, tauconv::scalar::Rational)>> {
        v["values"]
            .as_array()
            .unwrap()
            .iter()
            .map(|row| {
                row.as_array()
                    .unwrap()
                    .iter()
                    .map(|x| (x[0].as_str().unwrap().parse().unwrap(), x[1].as_str().unwrap().parse().unwrap()))
                    .collect()
            })
            .collect()
    };
    assert_eq!(canon(&f), canon(&b));
    // a file written by convolve re-parses and re-serializes to the same bytes
    run("b.json", "c.json");
    run("c.json", "d.json");
    assert_eq!(
        std::fs::read(dir.path().join("b.json")).unwrap(),
        std::fs::read(dir.path().join("d.json")).unwrap()
    );
}

#[test]
fn arity_and_parse_errors() {
    let dir = setup();
    let o = tauconv(&["convolve", "--group", "g.json", "--f", "e.json", "--op", "tconv", "--out", "o.json"], dir.path());
    assert_eq!(code(&o), 2);
    let o = tauconv(
        &["convolve", "--group", "g.json", "--f", "e.json", "--g", "u.json", "--op", "tilde", "--out", "o.json"],
        dir.path(),
    );
    assert_eq!(code(&o), 2);
    std::fs::write(dir.path().join("junk.json"), "{").unwrap();
    let o = tauconv(&["convolve", "--group", "g.json", "--f", "junk.json", "--op", "tilde", "--out", "o.json"], dir.path());
    assert_eq!(code(&o), 2);
    let o = tauconv(&["convolve", "--group", "g.json", "--f", "e.json", "--op", "nope", "--out", "o.json"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn module_action_and_lift() {
    let dir = setup();
    let o = tauconv(
        &[
            "convolve", "--group", "g.json", "--f", "e.json", "--g", "f.json", "--op", "module-action", "--p", "3", "--out",
            "m.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m = read(dir.path().join("m.json"));
    assert_eq!(m["p"], json!(3.0));
    // e = 1_(0,0) has tilde 1_e, so it acts as the identity
    assert_eq!(
        m["values"],
        json!([
            [["1/2", "0/1"], ["-3/1", "0/1"], ["0/1", "0/1"]],
            [["2/7", "0/1"], ["0/1", "0/1"], ["5/1", "0/1"]]
        ])
    );
    write(dir.path().join("psi.json"), &json!({"format": 1, "group": "g.json", "values": [[["2", "0"], ["0", "0"], ["-1", "0"]]]}));
    let o = tauconv(
        &["convolve", "--group", "g.json", "--f", "e.json", "--g", "psi.json", "--op", "lift", "--out", "l.json"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let l = read(dir.path().join("l.json"));
    assert_eq!(l["values"][0][2], json!(["-1/1", "0/1"]));
    assert_eq!(l["values"][1][0], json!(["0/1", "0/1"]));
}

#[test]
fn verify_report_and_witnesses() {
    let dir = setup();
    let args = ["verify", "--group", "g.json", "--seed", "7", "--trials", "50", "--report", "r.json"];
    let o = tauconv(&args, dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = read(dir.path().join("r.json"));
    let checks = r["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 16);
    for c in checks {
        for key in ["check_id", "anchor", "mode", "backend", "verdict", "residual", "witness_path"] {
            assert!(c.get(key).is_some(), "{key} missing");
        }
    }
    let assoc = checks.iter().find(|c| c["check_id"] == "cor-associativity-dichotomy").unwrap();
    assert_eq!(assoc["verdict"], "witness-found");
    let w = read(dir.path().join(assoc["witness_path"].as_str().unwrap()));
    assert_eq!(w["functions"]["u"]["values"][1][0], json!(["1/1", "0/1"]));
    let first = std::fs::read(dir.path().join("r.json")).unwrap();
    assert_eq!(code(&tauconv(&args, dir.path())), 0);
    assert_eq!(first, std::fs::read(dir.path().join("r.json")).unwrap());
}

#[test]
fn verify_float_backend() {
    let dir = setup();
    let o = tauconv(
        &["verify", "--group", "g.json", "--trials", "20", "--backend", "float", "--report", "r.json"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(read(dir.path().join("r.json"))["backend"], "floating(tol=1e-9)");
}

#[test]
fn bench_csv() {
    let dir = setup();
    let o = tauconv(&["bench", "--sizes", "2x4096", "--reps", "1", "--out", "b.csv"], dir.path());
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "h_order,k_order,kernel,ns_median");
    assert_eq!(lines.len(), 4);
    assert!(lines[1..].iter().all(|l| l.starts_with("2,4096,")));
}

#[test]
fn continuum_study() {
    let dir = setup();
    write(
        dir.path().join("grid.json"),
        &json!({"format": 1, "dx": 0.015625, "x0": -8.0, "n": 1024, "q": 2.0, "m": 4}),
    );
    let o = tauconv(&["continuum", "--grid", "grid.json", "--report", "c.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = read(dir.path().join("c.json"));
    assert_eq!(r["verdict"], "consistent");
    assert_eq!(r["levels"].as_array().unwrap().len(), 3);
    write(dir.path().join("bad.json"), &json!({"format": 1, "dx": -1.0, "x0": 0.0, "n": 8, "q": 2.0, "m": 1}));
    assert_eq!(code(&tauconv(&["continuum", "--grid", "bad.json", "--report", "c2.json"], dir.path())), 2);
}
