use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_semigroup-lab");

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("SEMIGROUP_LAB_OUT")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn passing_run_exits_zero_and_writes_outputs() {
    let dir = TempDir::new().unwrap();
    let o = run(&["identities"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path());
    for key in [
        "name",
        "inputs_digest",
        "residuals",
        "tolerances",
        "pass",
        "wall_time_s",
    ] {
        assert!(r.get(key).is_some(), "report.json lacks {key}");
    }
    assert_eq!(r["pass"], true);
    assert!(dir.path().join("identities.csv").exists());
    assert!(dir.path().join("reports/negative_controls.json").exists());
    let csv = fs::read_to_string(dir.path().join("identities.csv")).unwrap();
    assert!(csv.starts_with("name,max_abs,scale,pass\n"));
}

#[test]
fn failed_check_exits_one() {
    // The one-sided quotient is first order: 1e-4 steps miss the 1e-6 bar.
    let dir = TempDir::new().unwrap();
    let o = run(&["logrep", "--scheme", "forward"], dir.path());
    assert_eq!(code(&o), 1);
    assert_eq!(report(dir.path())["pass"], false);
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL generator_recovery"));
}

#[test]
fn configuration_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let o = run(&["colehopf", "--n", "0"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("`n`"));

    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "mu = 1\nwhatever = 3\n").unwrap();
    let o = run(&["colehopf", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("whatever"));

    assert_eq!(code(&run(&["logrep", "--family", "bogus"], dir.path())), 2);
    assert_eq!(code(&run(&["logrep", "--sweep", "family=random"], dir.path())), 2);
    assert_eq!(code(&run(&["xevolve", "--traces", "/nonexistent.csv"], dir.path())), 2);
    assert_eq!(code(&run(&["nope"], dir.path())), 2);
}

#[test]
fn numerical_errors_exit_three() {
    let dir = TempDir::new().unwrap();
    // U = I, so U - I = 0 sits on the branch cut.
    let o = run(&["logrep", "--kappa", "-1", "--family", "identity"], dir.path());
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("mat_log_principal"));
    // The growing branch overflows over a wide slab.
    assert_eq!(
        code(&run(&["xevolve", "--L", "200", "--targets", "200"], dir.path())),
        3
    );
}

#[test]
fn flags_override_file_values() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# reference run\nn = 64\nmu = 2\n").unwrap();
    let o = run(
        &["colehopf", "--config", cfg.to_str().unwrap(), "--n", "96"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let resolved = fs::read_to_string(dir.path().join("config.resolved")).unwrap();
    assert!(resolved.contains("n = 96\n"));
    assert!(resolved.contains("mu = 2\n"));
}

#[test]
fn environment_sets_the_default_output_dir() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("from-env");
    let o = Command::new(BIN)
        .arg("identities")
        .env("SEMIGROUP_LAB_OUT", &target)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(target.join("report.json").exists());
}

#[test]
fn reads_trace_files() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("traces.csv");
    let mut text = String::from("t,v0_re,v0_im,v1_re,v1_im\n");
    for k in 0..32 {
        let t = 0.1 * k as f64;
        let w = 2.0 * std::f64::consts::PI / 3.2;
        text.push_str(&format!("{t},{},0,{},0\n", 1.0 + (w * t).cos(), 0.5 * (w * t).sin()));
    }
    fs::write(&path, text).unwrap();
    let o = run(&["xevolve", "--traces", path.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = fs::read_to_string(dir.path().join("xevolve.csv"))
        .unwrap()
        .lines()
        .count();
    assert_eq!(rows, 1 + 3 * 32);
}

#[test]
fn h_sweep_converges_quadratically() {
    let dir = TempDir::new().unwrap();
    let o = run(&["logrep", "--sweep", "h=1e-2,1e-3"], dir.path());
    assert!([0, 1].contains(&code(&o)));
    let mut rdr = csv::Reader::from_path(dir.path().join("sweep_h.csv")).unwrap();
    let col = rdr
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == "generator_recovery.max_error")
        .unwrap();
    let vals: Vec<(f64, f64)> = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[col].parse().unwrap())
        })
        .collect();
    // sorted by axis value
    assert_eq!(vals[0].0, 1e-3);
    let ratio = vals[1].1 / vals[0].1;
    assert!(ratio > 50.0 && ratio < 200.0, "{ratio}");
}

#[test]
fn n_sweep_residual_drops_at_least_3_5x_per_doubling() {
    let dir = TempDir::new().unwrap();
    let o = run(&["colehopf", "--sweep", "n=64,128,256"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let mut rdr = csv::Reader::from_path(dir.path().join("sweep_n.csv")).unwrap();
    let col = rdr
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == "burgers_residual.max_abs")
        .unwrap();
    let r: Vec<f64> = rdr.records().map(|rec| rec.unwrap()[col].parse().unwrap()).collect();
    for w in r.windows(2) {
        assert!(w[0] / w[1] >= 3.5, "{r:?}");
    }
}

#[test]
fn kappa_sweep_is_flat_and_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        assert_eq!(
            code(&run(
                &[
                    "logrep",
                    "--sweep",
                    "kappa=2,0.3,1",
                    "--scheme",
                    "richardson",
                    "--h",
                    "1e-3"
                ],
                d.path()
            )),
            0
        );
    }
    let sa = fs::read(a.path().join("sweep_kappa.csv")).unwrap();
    assert_eq!(sa, fs::read(b.path().join("sweep_kappa.csv")).unwrap());
    let mut rdr = csv::Reader::from_reader(sa.as_slice());
    let col = rdr
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == "generator_recovery.max_error")
        .unwrap();
    let r: Vec<f64> = rdr.records().map(|rec| rec.unwrap()[col].parse().unwrap()).collect();
    let spread = r.iter().cloned().fold(f64::MIN, f64::max) - r.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 1e-8, "{r:?}");
}

#[test]
fn failing_sweep_points_are_recorded() {
    let dir = TempDir::new().unwrap();
    let o = run(&["logrep", "--sweep", "kappa=-1,1", "--family", "identity"], dir.path());
    assert_eq!(code(&o), 3);
    let csv = fs::read_to_string(dir.path().join("sweep_kappa.csv")).unwrap();
    assert!(csv.contains("error:3"));
    assert!(csv.lines().any(|l| l.starts_with("1,pass")));
}
