use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn nonclass() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nonclass"));
    c.env_remove("NONCLASS_SOLVER");
    c
}

fn run(args: &[&str]) -> Output {
    nonclass().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&o.stderr))
    })
}

/// Dumps a catalog entry into `dir` and returns its path.
fn dump(dir: &Path, name: &str) -> PathBuf {
    let p = dir.join(format!("{name}.json"));
    let o = run(&["catalog", "dump", name, "--out", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn catalog_lists_and_dumps() {
    let o = run(&["catalog", "list"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("motzkin\tpolynomial")));
    assert!(text.lines().any(|l| l.starts_with("tura-17\tdicke-state")));
    let o = run(&["catalog", "dump", "fock-1"]);
    let v = json_out(&o);
    assert_eq!(v["kind"], "fock");
    assert_eq!(v["re"][1][1], 1.0);
    assert_eq!(code(&run(&["catalog", "dump", "nope"])), 2);
}

#[test]
fn certify_motzkin() {
    let dir = TempDir::new().unwrap();
    let m = dump(dir.path(), "motzkin");

    let o = run(&["certify", s(&m), "--method", "reznick", "--b-max", "2"]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    assert_eq!(v["certified"], true);
    assert_eq!(v["level"], 1);
    assert_eq!(v["certificate"]["kind"], "reznick");

    let o = run(&["certify", s(&m), "--method", "sos"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json_out(&o)["certificate"], Value::Null);

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    let o = run(&["certify", s(&garbage)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    assert_eq!(code(&run(&["certify", "/nonexistent/poly.json"])), 2);
    // a state is not a polynomial
    assert_eq!(code(&run(&["certify", s(&dump(dir.path(), "vacuum"))])), 2);
}

#[test]
fn verify_accepts_valid_and_rejects_tampered_certificates() {
    let dir = TempDir::new().unwrap();
    let m = dump(dir.path(), "motzkin");
    let cert = dir.path().join("cert.json");
    let o = run(&["certify", s(&m), "--b-max", "2", "--out", s(&cert)]);
    assert_eq!(code(&o), 0);

    assert_eq!(code(&run(&["verify", s(&cert)])), 0);
    let o = run(&["verify", s(&cert), s(&m)]);
    assert_eq!(code(&o), 0);
    assert_eq!(json_out(&o)["ok"], true);

    // one diagonal entry lowered by 1e-3
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let d = v["certificate"]["blocks"][0]["re"][0][0].as_f64().unwrap();
    v["certificate"]["blocks"][0]["re"][0][0] = (d - 1e-3).into();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, v.to_string()).unwrap();
    assert_eq!(code(&run(&["verify", s(&bad)])), 1);

    // bare certificate against a different polynomial of the same degree
    let bare = dir.path().join("bare.json");
    std::fs::write(&bare, v["certificate"].to_string()).unwrap();
    let cl = dump(dir.path(), "choi-lam");
    let o = run(&["verify", s(&bare), s(&cl)]);
    assert_eq!(code(&o), 1);
    assert_eq!(json_out(&o)["ok"], false);
    assert_eq!(code(&run(&["verify", s(&bare)])), 2, "no polynomial to check against");

    let quartic = dir.path().join("quartic.json");
    std::fs::write(&quartic, r#"{"support":"total","degree":4,"terms":[{"k":2,"l":2,"re":1.0}]}"#).unwrap();
    assert_eq!(code(&run(&["verify", s(&cert), s(&quartic)])), 2, "mismatched degree");
}

#[test]
fn detect_light_examples() {
    let dir = TempDir::new().unwrap();
    let vac = dump(dir.path(), "vacuum");
    let one = dump(dir.path(), "fock-1");

    let o = run(&["detect", s(&vac), "--method", "reznick", "--level", "0"]);
    assert_eq!(code(&o), 1);
    assert!(json_out(&o)["value"].as_f64().unwrap().abs() < 1e-7);

    let res = dir.path().join("res.json");
    let o = run(&["detect", s(&one), "--method", "reznick", "--level", "0", "--degree", "4", "--out", s(&res)]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&res).unwrap()).unwrap();
    assert!(v["value"].as_f64().unwrap() < -1e-3);
    assert_eq!(v["normalization"], "gram-trace");
    for key in ["level", "method", "witness", "certificate", "status"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    // certificates from detection pass the standalone checker
    assert_eq!(code(&run(&["verify", s(&res)])), 0);

    let pfr = dir.path().join("pfr.json");
    let o = run(&["detect", s(&one), "--method", "pfr", "--level", "6", "--out", s(&pfr)]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&run(&["verify", s(&pfr)])), 0);

    let o = run(&["detect", s(&one), "--method", "rays", "--rays", "32", "--norm", "reference"]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    assert_eq!(v["rays"], 32);
    assert_eq!(v["normalization"], "reference");
}

#[test]
fn detect_from_moments() {
    let dir = TempDir::new().unwrap();
    let moments = dir.path().join("m.json");
    // ⟨a†a⟩ = 1, ⟨a†²a²⟩ = 0: the single photon up to degree 4
    let mut entries = Vec::new();
    for k in 0..=4usize {
        for l in 0..=k.min(4 - k) {
            let re = match (k, l) {
                (0, 0) | (1, 1) => 1.0,
                _ => 0.0,
            };
            entries.push(serde_json::json!({"k": k, "l": l, "re": re}));
        }
    }
    std::fs::write(&moments, serde_json::json!({"D": 4, "entries": entries}).to_string()).unwrap();
    assert_eq!(code(&run(&["detect", s(&moments)])), 0);
    assert_eq!(code(&run(&["detect", s(&moments), "--norm", "reference"])), 2);
    assert_eq!(code(&run(&["detect", s(&moments), "--system", "spin"])), 2);
}

#[test]
fn detect_spin_examples() {
    let dir = TempDir::new().unwrap();
    let ghz = dump(dir.path(), "ghz-3");
    let out = dir.path().join("ghz-res.json");
    let o = run(&["detect", s(&ghz), "--method", "pfr", "--level", "2", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(v["value"].as_f64().unwrap() <= -0.5 + 1e-6);
    assert_eq!(v["observable"]["kind"], "dicke-observable");
    assert_eq!(code(&run(&["verify", s(&out)])), 0);
    assert_eq!(code(&run(&["detect", s(&ghz), "--norm", "reference"])), 2);
}

#[test]
fn detect_tura_state_at_pfr_40() {
    let dir = TempDir::new().unwrap();
    let tura = dump(dir.path(), "tura-17");
    let o = run(&["detect", s(&tura), "--system", "spin", "--method", "pfr", "--level", "40"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(json_out(&o)["value"].as_f64().unwrap() < 0.0);
}

#[test]
fn map_ghz_witness() {
    let dir = TempDir::new().unwrap();
    let w = dump(dir.path(), "ghz-witness-3");
    let o = run(&["map", s(&w)]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    // −½(a³ + a†³) + ½(3a†a + 3a†²a²)
    let mut terms: Vec<(u64, u64, f64)> = v["light_witness"]["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| (t["k"].as_u64().unwrap(), t["l"].as_u64().unwrap(), t["re"].as_f64().unwrap()))
        .filter(|t| t.2 != 0.0)
        .collect();
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(terms, vec![(1, 1, 1.5), (2, 2, 1.5), (3, 0, -0.5)]);
    assert_eq!(v["inclusion"]["in_p_m"], false);
    assert_eq!(v["inclusion"]["in_s_m"], true);
}

#[test]
fn config_file_with_flag_override() {
    let dir = TempDir::new().unwrap();
    let m = dump(dir.path(), "motzkin");
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "method = \"sos\"\nb-max = 3\n").unwrap();
    assert_eq!(code(&run(&["--config", s(&cfg), "certify", s(&m)])), 1);
    let o = run(&["certify", s(&m), "--config", s(&cfg), "--method", "reznick"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json_out(&o)["b_max"], 3);

    std::fs::write(&cfg, "colour = \"blue\"\n").unwrap();
    assert_eq!(code(&run(&["--config", s(&cfg), "catalog", "list"])), 2);
}

#[test]
fn unknown_solver_is_an_error() {
    let dir = TempDir::new().unwrap();
    let m = dump(dir.path(), "motzkin");
    let o = nonclass().env("NONCLASS_SOLVER", "nope").args(["certify", s(&m)]).output().unwrap();
    assert_eq!(code(&o), 2);
    let o = nonclass().env("NONCLASS_SOLVER", "clarabel").args(["certify", s(&m)]).output().unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn reproduce_fig2_is_deterministic_with_expected_signs() {
    let a = run(&["reproduce", "fig2", "--jobs", "1"]);
    assert_eq!(code(&a), 0);
    let b = run(&["reproduce", "fig2", "--jobs", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,value,method,level"));
    let rows: Vec<(usize, f64, String, usize)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].to_string(), f[3].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 33);
    for (n_max, value, method, d_tilde) in &rows {
        assert_eq!(method, "motzkin");
        if *n_max <= 4 {
            assert!(*value >= -1e-7, "n_max {n_max}, D̃ {d_tilde}: {value}");
        }
        if *n_max == 10 && *d_tilde == 6 {
            assert!(*value < -1e-4);
        }
    }
    assert_eq!(code(&run(&["reproduce", "fig9"])), 2);
}

#[test]
fn reproduce_other_figures() {
    let o = run(&["reproduce", "robinson-choi-lam"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["robinson", "choi-lam"] {
        let at10: f64 = text
            .lines()
            .find(|l| l.starts_with("10,") && l.ends_with(&format!(",{name},6")))
            .and_then(|l| l.split(',').nth(1))
            .unwrap()
            .parse()
            .unwrap();
        assert!(at10 < 0.0, "{name}: {at10}");
    }

    let o = run(&["reproduce", "fig3b", "--b-max", "1", "--rays", "8"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("\n1,") && text.contains(",pfr,1\n"));
    // eight lines cannot bound a 17-qubit witness
    assert!(text.contains("0,-inf,rays,8\n"), "{text}");
}

#[test]
fn sample_is_seeded() {
    let a = run(&["sample", "--n-max", "3", "--seed", "9"]);
    let b = run(&["sample", "--n-max", "3", "--seed", "9"]);
    let c = run(&["sample", "--n-max", "3", "--seed", "10"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(json_out(&a)["dim_param"], 3);
    let spin = json_out(&run(&["sample", "--spin", "4"]));
    assert_eq!(spin["kind"], "dicke");
}
