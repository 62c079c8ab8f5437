use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use minkprob::io::{parse_domain, read_function, read_text};
use minkprob::spec::parse_spec;
use serde_json::Value;

fn minkprob(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minkprob"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("MINKPROB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn ok(o: &Output) {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn quadratic_preset_recovers_the_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    ok(&minkprob(dir.path(), &["solve", "--preset", "quadratic"]));
    let r = report(dir.path());
    assert_eq!(r["converged"], true);
    assert_eq!(r["below_envelope"], true);
    assert!(r["sup_error"].as_f64().unwrap() <= 2e-2, "{r}");
    let h = read_function(&dir.path().join("solution.csv")).unwrap();
    assert_eq!(h.grid.len(), 1 + 48 * 96);
}

#[test]
fn constant_curvature_preset_gives_the_hyperboloid() {
    let dir = tempfile::tempdir().unwrap();
    ok(&minkprob(dir.path(), &["solve-eq", "--preset", "fuchsian-t1"]));
    let r = report(dir.path());
    assert!((r["hbar_min"].as_f64().unwrap() + 1.0).abs() < 0.02, "{r}");
    assert!((r["hbar_max"].as_f64().unwrap() + 1.0).abs() < 0.02, "{r}");
    assert!(r["equivariance_defect"].as_f64().unwrap() < 1e-6);
}

#[test]
fn affine_input_has_zero_measure() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("affine.json");
    fs::write(
        &spec,
        r#"{"grid": {"rings": 8, "angular": 16, "rho_max": 0.9}, "function": {"preset": "affine", "q": [0.3, -0.2], "c": 1},
            "boundary": {"preset": "trace"}}"#,
    )
    .unwrap();
    let made = dir.path().join("made");
    ok(&minkprob(&made, &["envelope", "--spec", spec.to_str().unwrap()]));
    let input = dir.path().join("made/envelope.csv");
    let out = dir.path().join("ma");
    ok(&minkprob(&out, &["ma", "--input", input.to_str().unwrap()]));
    let r = report(&out);
    assert_eq!(r["total"].as_f64().unwrap(), 0.0);
    assert_eq!(r["nonzero_nodes"], 0);
}

#[test]
fn malformed_spec_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.json");
    fs::write(&spec, "{\n  \"tol\": 1e-3,\n  \"grid\": {\"rings\": 12,}\n}\n").unwrap();
    let o = minkprob(dir.path(), &["solve", "--spec", spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");
    assert!(parse_spec("{\"grid\": 3}", "x").is_err());
}

#[test]
fn nonconvergence_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("capped.json");
    fs::write(
        &spec,
        r#"{"grid": {"rings": 12, "angular": 24, "rho_max": 0.9}, "function": {"preset": "quadratic"},
            "measure": {"preset": "from_function"}, "boundary": {"preset": "trace"}, "max_sweeps": 1, "tol": 1e-9}"#,
    )
    .unwrap();
    let capped = minkprob(dir.path(), &["solve", "--spec", spec.to_str().unwrap()]);
    assert_eq!(capped.status.code(), Some(3), "{}", String::from_utf8_lossy(&capped.stderr));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        ok(&minkprob(d.path(), &["solve", "--preset", "dirac", "--seed", "7"]));
    }
    for name in ["solution.csv", "residuals.csv", "report.json"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn emitted_files_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    ok(&minkprob(dir.path(), &["envelope", "--preset", "quadratic", "--plots"]));
    let env = read_function(&dir.path().join("envelope.csv")).unwrap();
    let again = tempfile::tempdir().unwrap();
    ok(&minkprob(again.path(), &["ma", "--input", dir.path().join("envelope.csv").to_str().unwrap()]));
    assert!(read_text(&again.path().join("ma.csv")).unwrap().starts_with("node,x1,x2,mass\n"));
    assert_eq!(env.grid.len(), 1 + 48 * 96);
    assert!(fs::read_to_string(dir.path().join("envelope.svg")).unwrap().starts_with("<svg"));

    let eq = tempfile::tempdir().unwrap();
    ok(&minkprob(eq.path(), &["gtau", "--preset", "coboundary"]));
    let space = minkprob::commands::load_problem(None, Some("coboundary"), 0).unwrap().eq_space().unwrap();
    let path = eq.path().join("htau.csv");
    let h = parse_domain(&read_text(&path).unwrap(), &path, &space).unwrap();
    assert_eq!(h.hbar.len(), space.num_vars());
}

#[test]
fn covolume_of_shifted_tau_matches_exact() {
    let dir = tempfile::tempdir().unwrap();
    ok(&minkprob(dir.path(), &["covol", "--preset", "fuchsian-t2"]));
    let r = report(dir.path());
    let s = &r["supports"][0];
    let (c, exact) = (s["covolume"].as_f64().unwrap(), s["exact"].as_f64().unwrap());
    assert!((c - exact).abs() <= 0.01 * exact, "{r}");
}

#[test]
fn pogorelov_unit_ball_reports_failure() {
    let dir = tempfile::tempdir().unwrap();
    let o = minkprob(dir.path(), &["pogorelov", "--samples", "2000"]);
    assert_eq!(o.status.code(), Some(1));
    let r = report(dir.path());
    assert!(r["beta"].is_null());
    let small = tempfile::tempdir().unwrap();
    ok(&minkprob(small.path(), &["pogorelov", "--samples", "2000", "--radius", "0.3"]));
    assert_eq!(report(small.path())["beta"], 1.0);
}

#[test]
fn unknown_preset_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = minkprob(dir.path(), &["solve", "--preset", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("quadratic"));
}
