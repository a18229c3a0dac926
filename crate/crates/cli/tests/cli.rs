use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn levyk(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_levyk"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read_json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn assert_schema(doc: &Value, schema: &str) {
    let schema: Value = serde_json::from_str(levyk::io::schema(schema).expect("schema shipped")).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    let msgs: Vec<String> = match compiled.validate(doc) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| e.to_string()).collect(),
    };
    assert!(msgs.is_empty(), "schema violations: {msgs:?}");
}

#[test]
fn exponent_writes_tables_deterministically() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = config("relativistic.json");
    for dir in [a.path(), b.path()] {
        let o = levyk(dir, &["exponent", "--config", cfg.to_str().unwrap(), "--emit", "csv,svg"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["exponent.csv", "timescale.csv", "exponent.svg"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f} differs between runs");
    }
    let csv = std::fs::read_to_string(a.path().join("exponent.csv")).unwrap();
    assert!(csv.starts_with("rho,re_phi,psi\n"));
    let svg = std::fs::read_to_string(a.path().join("exponent.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
}

#[test]
fn missing_variant_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"d": 1, "kappa": {"alpha1": 0.5, "alpha2": 0}, "m": 1, "beta": 1, "delta": 1}"#).unwrap();
    let o = levyk(dir.path(), &["exponent", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("kappa.variant"));
}

#[test]
fn rho_below_table_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("relativistic.json");
    let o = levyk(dir.path(), &["exponent", "--config", cfg.to_str().unwrap(), "--rho-min", "1e-6"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("table range"));
}

#[test]
fn check_f_exit_codes_and_reason() {
    let dir = tempfile::tempdir().unwrap();
    let o = levyk(dir.path(), &["check", "F", "--config", config("lamperti.json").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let report = read_json(dir.path().join("check_F.json"));
    assert_eq!(report["reason"], "FAILS(CRITICAL_EXP)");
    assert_schema(&report, "condition_report.schema.json");

    let o = levyk(dir.path(), &["check", "f", "--config", config("polynomial_tail.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(read_json(dir.path().join("check_F.json"))["reason"], "HOLDS(a)");
}

#[test]
fn check_e_fails_for_pure_log() {
    let dir = tempfile::tempdir().unwrap();
    let o = levyk(dir.path(), &["check", "E", "--config", config("pure_log.json").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let report = read_json(dir.path().join("check_E.json"));
    assert_eq!(report["verdict"], "FAIL");
    assert_schema(&report, "condition_report.schema.json");
}

#[test]
fn density_refuses_without_e() {
    let dir = tempfile::tempdir().unwrap();
    let o = levyk(dir.path(), &["density", "--t", "0.1", "--config", config("pure_log.json").to_str().unwrap()]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("condition E"));
}

#[test]
fn density_outputs_validate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("drifted.json");
    let o = levyk(dir.path(), &["density", "--t", "0.05", "--config", cfg.to_str().unwrap(), "--emit", "csv,json,svg"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let meta = read_json(dir.path().join("density.json"));
    assert_schema(&meta, "density_meta.schema.json");
    assert!((meta["mass"].as_f64().unwrap() - 1.0).abs() < 5e-4);
    // symmetric ν with drift: the profile is centred at t·b
    assert!((meta["shift"].as_f64().unwrap() - 0.025).abs() < 1e-12);
    let csv = std::fs::read_to_string(dir.path().join("density.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,p,method,err_flag"));
    let (mut best_x, mut best_p) = (0.0, 0.0);
    for l in lines {
        let cols: Vec<&str> = l.split(',').collect();
        assert_eq!(cols.len(), 4);
        assert_eq!(cols[2], "split");
        let (x, p): (f64, f64) = (cols[0].parse().unwrap(), cols[1].parse().unwrap());
        if p > best_p {
            (best_x, best_p) = (x, p);
        }
    }
    assert!((best_x - 0.025f64).abs() < 1e-9, "mode at {best_x}");
    assert!(dir.path().join("density.svg").exists());
}

#[test]
fn verify_t14_refuses_superexponential() {
    let dir = tempfile::tempdir().unwrap();
    let o = levyk(dir.path(), &["verify", "t14", "--config", config("superexponential.json").to_str().unwrap()]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("condition C"));
}

#[test]
fn verify_t13_relativistic_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = levyk(dir.path(), &["verify", "t13", "--config", config("relativistic.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let report = read_json(dir.path().join("verify_t13.json"));
    assert_schema(&report, "bound_report.schema.json");
    assert!(report["far"]["inf"].as_f64().unwrap() > 0.0);
}

#[test]
fn verify_dichotomy_default_pair() {
    let dir = tempfile::tempdir().unwrap();
    let o = levyk(dir.path(), &["verify", "dichotomy"]);
    assert_eq!(code(&o), 0);
    let report = read_json(dir.path().join("verify_dichotomy.json"));
    assert_eq!(report["verdict"], "DICHOTOMY_CONFIRMED");
    assert_schema(&report, "dichotomy_report.schema.json");
    let csv = std::fs::read_to_string(dir.path().join("verify_dichotomy.csv")).unwrap();
    assert!(csv.starts_with("model,x,ratio\n"));
}

#[test]
fn convolve_reports_mass() {
    let dir = tempfile::tempdir().unwrap();
    let o = levyk(dir.path(), &["convolve", "--n", "3", "--config", config("relativistic.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let meta = read_json(dir.path().join("conv_power.json"));
    assert_schema(&meta, "conv_power_meta.schema.json");
    let (m, e) = (meta["mass"].as_f64().unwrap(), meta["expected_mass"].as_f64().unwrap());
    assert!((m - e).abs() / e < 1e-4);
}

#[test]
fn thread_cap_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("relativistic.json");
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_levyk"))
            .args(["check", "F", "--config", cfg.to_str().unwrap(), "--out"])
            .arg(dir.path())
            .env("LEVYK_THREADS", threads)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("1")), 0);
    assert_eq!(code(&run("zero")), 2);
}

#[test]
fn unknown_condition_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = levyk(dir.path(), &["check", "Q", "--config", config("relativistic.json").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn shipped_model_configs_validate() {
    for name in ["relativistic.json", "lamperti.json", "tempered_half.json", "pure_log.json", "superexponential.json", "drifted.json"] {
        let doc = read_json(config(name));
        assert_schema(&doc, "model_config.schema.json");
    }
}
