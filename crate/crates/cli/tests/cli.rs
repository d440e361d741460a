use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(format!("{name}.toml"))
}

fn gradobs(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gradobs"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

#[test]
fn rank_check_exit_codes_follow_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let ok = gradobs(&["rank-check"], &scenario("point"), dir.path());
    assert_eq!(ok.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("strategic_report.csv")).unwrap();
    assert!(csv.starts_with("group,eigenvalue,multiplicity,rank,min_singular_value,verdict\n"));
    assert_eq!(csv.lines().count(), 5);
    let summary = fs::read_to_string(dir.path().join("run_summary.toml")).unwrap();
    assert!(summary.contains("strategic = true"));

    let bad = gradobs(&["rank-check"], &scenario("point_violating"), dir.path());
    assert_eq!(bad.status.code(), Some(2));
    let csv = fs::read_to_string(dir.path().join("strategic_report.csv")).unwrap();
    assert!(csv.contains("rank_deficient"));
}

#[test]
fn simulate_writes_trajectory_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gradobs"))
        .args(["simulate", "--emit-mode-coeffs", "--truncation", "5", "--config"])
        .arg(scenario("unstable_reaction"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let traj = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let header = traj.lines().next().unwrap();
    assert!(header.starts_with("t,omega_error_norm,gamma_error_norm,e_1_1,e_1_2"));
    assert_eq!(header.split(',').count(), 3 + 25);
    assert_eq!(traj.lines().count(), 1 + 401);
    let fit = fs::read_to_string(dir.path().join("decay_fit.csv")).unwrap();
    assert!(fit.starts_with("series,amplitude,rate,residual,samples,converged\ngamma_error_norm,"));
}

#[test]
fn whole_domain_target_reports_the_neutral_group() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gradobs"))
        .args(["simulate", "--target-omega", "--config"])
        .arg(scenario("neutral_mode"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("{(0, 0)}"), "{stdout}");
    assert!(!dir.path().join("trajectory.csv").exists());
}

#[test]
fn neutral_mode_command_passes_on_the_shipped_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let out = gradobs(&["example-3-7"], &scenario("neutral_mode"), dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let summary = fs::read_to_string(dir.path().join("run_summary.toml")).unwrap();
    assert!(summary.contains("passes = true"));
    assert!(summary.contains("omega_failing_groups = [[[0, 0]]]"), "{summary}");
}

#[test]
fn sweep_writes_one_row_per_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = gradobs(&["sweep"], &scenario("sweep_pointwise"), dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 19 * 11);
    // Every decided placement agrees with the closed-form prediction.
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[2], f[5], "{line}");
    }
}

#[test]
fn malformed_scenarios_exit_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "name = \"bad\"\ndomain = { a1 = 1.0, a2 = 1.0 }\nmargn = 0.2\n[[sensors]]\nkind = \"pointwise\"\nlocation = [0.3, 0.3]\n").unwrap();
    let out = gradobs(&["rank-check"], &cfg, dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("margn"));

    fs::write(
        &cfg,
        "name = \"bad\"\ndomain = { a1 = 1.0, a2 = 1.0 }\n[[sensors]]\nkind = \"pointwise\"\nlocation = [1.3, 0.3]\n",
    )
    .unwrap();
    let out = gradobs(&["rank-check"], &cfg, dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sensors[0]"));
}
