use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn levy_scl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_levy-scl"))
        .args(args)
        .output()
        .unwrap()
}

fn shipped(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(format!("{name}.conf"))
        .display()
        .to_string()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("exp.conf");
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

const SMALL_BV: &str = "\
kind = bv_monotone
grid.x_min = -1
grid.x_max = 1
grid.n_cells = 64
time.horizon = 0.1
time.snapshots = 0.05, 0.1
viscosity.eps = 0.01
initial.kind = box
initial.width = 0.5
flux.kind = burgers
noise.kind = linear
noise.scale = 0.2
measure.kind = atomic
measure.atoms = 1:2
ensemble.paths = 8
";

#[test]
fn presets_lists_every_shipped_config() {
    let out = levy_scl(&["presets"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "error_rate",
        "continuous_dependence",
        "bv_monotone",
        "fractional_bv",
        "entropy_check",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn validate_accepts_shipped_configs() {
    for name in ["error_rate", "continuous_dependence_flux", "fractional_bv"] {
        let out = levy_scl(&["validate", &shipped(name)]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn validate_rejects_bad_config_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &format!("{SMALL_BV}grid.n_cells = 32\n"));
    let out = levy_scl(&["validate", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn missing_config_exits_1() {
    let out = levy_scl(&["run", "/nonexistent/exp.conf"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn passing_run_exits_0_and_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), SMALL_BV);
    let out_dir = dir.path().join("out");
    let out = levy_scl(&[
        "run",
        &path,
        "--out",
        out_dir.to_str().unwrap(),
        "--threads",
        "2",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let csv = fs::read_to_string(out_dir.join("bv_monotone.csv")).unwrap();
    assert!(csv.starts_with("stat_name,value,std_error,n_samples\n"));
    assert!(csv.contains("bv{eps=0.01,t=0.1}"));
    let verdicts = fs::read_to_string(out_dir.join("verdicts.csv")).unwrap();
    assert!(verdicts.starts_with("verdict,passed,value,lower,upper\n"));
    assert!(out_dir.join("summary.txt").exists());
}

#[test]
fn failing_verdict_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL_BV.replace(
        "initial.width = 0.5",
        "initial.width = 0.5\nverdict.bv_slack = -0.5",
    );
    let path = write_config(dir.path(), &text);
    let out_dir = dir.path().join("out");
    let out = levy_scl(&["run", &path, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn paths_and_seed_overrides_take_effect() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), SMALL_BV);
    let run = |seed: &str, sub: &str| {
        let out_dir = dir.path().join(sub);
        let out = levy_scl(&[
            "run",
            &path,
            "--out",
            out_dir.to_str().unwrap(),
            "--paths",
            "3",
            "--seed",
            seed,
        ]);
        assert_eq!(out.status.code(), Some(0));
        fs::read_to_string(out_dir.join("bv_monotone.csv")).unwrap()
    };
    let a = run("1", "a");
    let b = run("1", "b");
    let c = run("2", "c");
    assert!(a.contains(",3\n"));
    assert_eq!(a, b);
    assert_ne!(a, c);
}
