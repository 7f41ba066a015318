use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use alr_cli::Scenario;
use serde_json::Value;

const MN: &str = r#"{
  "schema_version": 1,
  "dimension": 2,
  "k": 0.0,
  "geometry": {"type": "core_shell", "r1": 1.0, "r2": 2.0},
  "source": {"rho": 2.5, "profile": {"type": "point_like", "exponent": 0.0}},
  "rho_range": [2.2, 3.6]
}"#;

const FINITE_K: &str = r#"{
  "schema_version": 1,
  "dimension": 2,
  "k": 1.0,
  "geometry": {
    "type": "complementary", "r2": 1.0, "r3": 4.0,
    "a": {"type": "constant", "value": 1.0},
    "sigma": {"type": "constant", "value": 1.0}
  },
  "source": {"rho": 6.0, "profile": {"type": "point_like", "exponent": 0.0}},
  "rho_range": [1.5, 3.0]
}"#;

fn alr(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alr")).args(args).current_dir(dir).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn sweep_inside_the_critical_radius_blows_up() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "mn.json", MN);
    let o = alr(&["sweep", &s, "--out", "res"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&dir.path().join("res/verdict.json"));
    assert_eq!(v["verdict"], "blows_up");
    assert_eq!(v["prediction"], "blows_up");
    let csv = fs::read_to_string(dir.path().join("res/sweep.csv")).unwrap();
    assert!(csv.starts_with("delta,E,c_delta,shell_energy,far_trace_err,h1_norm\n"));
    assert_eq!(csv.lines().count(), 14);
    let modes = fs::read_to_string(dir.path().join("res/modes_1e-7.csv")).unwrap();
    assert!(modes.starts_with("n,layer,alpha_re,alpha_im,beta_re,beta_im,cond\n"));
}

#[test]
fn sweep_outside_the_outer_radius_is_bounded() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.json", FINITE_K);
    let o = alr(&["sweep", &s], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&dir.path().join("out/verdict.json"));
    assert_eq!(v["verdict"], "bounded");
}

#[test]
fn empty_delta_grid_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = MN.replace("\"rho_range\"", "\"deltas\": [],\n  \"rho_range\"");
    let s = write(dir.path(), "s.json", &text);
    let o = alr(&["sweep", &s], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("deltas"), "{}", stderr(&o));
}

#[test]
fn critical_radius_quasistatic() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "mn.json", MN);
    let o = alr(&["critical-radius", &s], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let c = json(&dir.path().join("out/critical.json"));
    let est = c["estimate"].as_f64().unwrap();
    assert!((2.77..=2.89).contains(&est), "{est}");
    assert!(c["probes"].as_array().unwrap().len() >= 2);
}

#[test]
fn critical_radius_finite_frequency() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.json", FINITE_K);
    let o = alr(&["critical-radius", &s], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let est = json(&dir.path().join("out/critical.json"))["estimate"].as_f64().unwrap();
    assert!((1.9..=2.1).contains(&est), "{est}");
}

#[test]
fn non_bracketing_range_fails() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "mn.json", &MN.replace("[2.2, 3.6]", "[4.5, 6.0]"));
    let o = alr(&["critical-radius", &s], dir.path());
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("bracket"), "{}", stderr(&o));
    let s = write(dir.path(), "none.json", &MN.replace(",\n  \"rho_range\": [2.2, 3.6]", ""));
    assert_eq!(code(&alr(&["critical-radius", &s], dir.path())), 2);
}

#[test]
fn converge_bounded_source() {
    let dir = tempfile::tempdir().unwrap();
    let text = FINITE_K.replace("\"rho\": 6.0", "\"rho\": 3.0").replace(
        "\"rho_range\": [1.5, 3.0]",
        "\"deltas\": [1e-2, 1e-3, 1e-4, 1e-5, 1e-6]",
    );
    let s = write(dir.path(), "s.json", &text);
    let o = alr(&["converge", &s], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("out/converge.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("delta,far_trace_err,normalized_trace"));
    let errs: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(*errs.last().unwrap() < 1e-2, "{errs:?}");
    assert!(dir.path().join("out/u_hat_trace.csv").exists());
}

#[test]
fn converge_without_deltas_writes_only_the_limit() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "mn.json", MN);
    let o = alr(&["converge", &s], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(!dir.path().join("out/converge.csv").exists());
    let trace = fs::read_to_string(dir.path().join("out/u_hat_trace.csv")).unwrap();
    assert!(trace.starts_with("angle,re,im\n"));
    assert_eq!(trace.lines().count(), 257);
}

#[test]
fn design_cloak_layers() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(
        dir.path(),
        "m.json",
        r#"{"schema_version": 1, "dimension": 2, "a": {"type": "constant", "value": 1.0}, "sigma": {"type": "constant", "value": 1.0}}"#,
    );
    let o = alr(&["design-cloak", &m, "--r2", "2", "--r3", "4"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&dir.path().join("out/verify.json"));
    assert_eq!(v["pass"], true);
    assert_eq!(v["r1"].as_f64(), Some(1.0));
    assert_eq!(v["r0"].as_f64(), Some(0.5));
    let csv = fs::read_to_string(dir.path().join("out/cloak_profiles.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("r,sign,a,sigma"));
    // in d = 2 the Kelvin image keeps a and scales σ by (r2/r)^4
    for l in lines {
        let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
        let (r, sign, a, sigma) = (f[0], f[1], f[2], f[3]);
        assert_eq!(a, 1.0);
        let (es, esig) = if r < 0.5 {
            (1.0, 1.0)
        } else if r < 1.0 {
            (1.0, 16.0)
        } else if r < 2.0 {
            (-1.0, 16.0 / r.powi(4))
        } else {
            (1.0, 1.0)
        };
        assert_eq!(sign, es, "r = {r}");
        assert!((sigma - esig).abs() <= 1e-12 * esig, "r = {r}: {sigma} vs {esig}");
    }

    let p = write(dir.path(), "power.json", &fs::read_to_string(&m).unwrap().replace(
        r#""a": {"type": "constant", "value": 1.0}"#,
        r#""a": {"type": "power", "coef": 2.0, "exponent": 0.5}"#,
    ).replace("\"dimension\": 2", "\"dimension\": 3"));
    let o = alr(&["design-cloak", &p, "--r2", "1", "--r3", "3"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn malformed_files_are_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", "{\"schema_version\": 1,\n \"dimension\": 2,\n \"a\": }");
    let o = alr(&["design-cloak", &m, "--r2", "2", "--r3", "4"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
    let s = write(dir.path(), "s.json", &MN.replace("\"k\"", "\"wavenumber\""));
    let o = alr(&["sweep", &s], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("wavenumber"), "{}", stderr(&o));
    let o = alr(&["sweep", "missing.json"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn identical_scenarios_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let text = MN.replace("\"rho_range\"", "\"deltas\": [0.1, 0.01, 0.001, 0.0001],\n  \"rho_range\"");
    let s = write(dir.path(), "mn.json", &text);
    assert_eq!(code(&alr(&["sweep", &s, "--out", "a"], dir.path())), 0);
    let o = Command::new(env!("CARGO_BIN_EXE_alr"))
        .args(["sweep", &s, "--out", "b"])
        .current_dir(dir.path())
        .env("ALR_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let mut names: Vec<_> = fs::read_dir(dir.path().join("a")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 6);
    for n in names {
        assert_eq!(fs::read(dir.path().join("a").join(&n)).unwrap(), fs::read(dir.path().join("b").join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn output_dir_from_the_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let text = MN.replace("\"rho_range\"", "\"deltas\": [0.1, 0.01],\n  \"output_dir\": \"fromfile\",\n  \"rho_range\"");
    let s = write(dir.path(), "mn.json", &text);
    assert_eq!(code(&alr(&["sweep", &s], dir.path())), 0);
    assert!(dir.path().join("fromfile/sweep.csv").exists());
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_alr")).args(["selftest"]).env("ALR_THREADS", "many").output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn scenario_round_trip() {
    for text in [MN, FINITE_K] {
        let s = Scenario::parse(text).unwrap();
        assert_eq!(Scenario::parse(&s.to_json()).unwrap(), s);
    }
}

#[test]
fn selftest_quick_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = alr(&["selftest"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let out = String::from_utf8_lossy(&o.stdout);
    for name in ["push-forward composition", "wronskians", "power balance", "hat asymptotics"] {
        assert!(out.contains(name), "{out}");
    }
}

#[test]
fn injected_table_fault_fails_the_wronskians() {
    let dir = tempfile::tempdir().unwrap();
    let o = alr(&["selftest", "--inject-fault", "hat-table"], dir.path());
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("wronskians"), "{}", stderr(&o));
}
