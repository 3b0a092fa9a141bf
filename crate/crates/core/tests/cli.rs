use std::path::{Path, PathBuf};

use eqwave::cli::{main_with, Exit};
use eqwave::scenario::{ScenarioConfig, Table};
use tempfile::TempDir;

struct Run {
    exit: Exit,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let exit = main_with(std::iter::once("eqwave").chain(args.iter().copied()), &mut out, &mut err);
    Run { exit, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn write_scenario(dir: &Path, name: &str, scenario: &ScenarioConfig) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, scenario.to_toml_string()).unwrap();
    path
}

fn scenario(c0: f64) -> ScenarioConfig {
    let mut s = ScenarioConfig::reference();
    s.wave.c0 = c0;
    s
}

fn read_table(path: &Path) -> Table {
    Table::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn command(dir: &TempDir, sub: &str, cfg: &Path, extra: &[&str]) -> Run {
    let out = dir.path().join("out");
    let mut args = vec![sub, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn validate_reports_region_and_derived_values() {
    let dir = TempDir::new().unwrap();
    let cfg = write_scenario(dir.path(), "a.toml", &scenario(0.0));
    let r = command(&dir, "validate", &cfg, &[]);
    assert_eq!(r.exit, Exit::Success, "{}", r.stderr);
    assert!(r.stdout.contains("trapping region: all-latitudes"));
    assert!(r.stdout.contains("gamma = 9.8 m/s^2"));
    assert!(r.stdout.contains("c = 12.48770703602701"));
}

#[test]
fn validate_names_the_current_bound() {
    let dir = TempDir::new().unwrap();
    let probe = scenario(0.0).wave_config().unwrap();
    let mut s = scenario(0.0);
    s.wave.c0 = probe.current_bound() * 1.0001;
    let cfg = write_scenario(dir.path(), "a.toml", &s);
    let r = command(&dir, "validate", &cfg, &[]);
    assert_eq!(r.exit, Exit::Validation);
    assert!(r.stdout.contains("current bound c0 < c*exp(2*k*r0) fails"), "{}", r.stdout);
}

#[test]
fn validate_reports_nonpositive_gamma() {
    let dir = TempDir::new().unwrap();
    let cfg = write_scenario(dir.path(), "a.toml", &scenario(-9.8 / (2.0 * 7.3e-5) - 0.01));
    let r = command(&dir, "validate", &cfg, &[]);
    assert_eq!(r.exit, Exit::Validation);
    assert!(r.stdout.contains("gamma nonpositive"), "{}", r.stdout);
}

#[test]
fn parse_errors_exit_with_io_status() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[wave]\nwavelength = 100.0\nc0 = [1]\nr0 = -5.0\n").unwrap();
    let r = command(&dir, "validate", &path, &[]);
    assert_eq!(r.exit, Exit::Io);
    assert!(r.stderr.contains("line 3") && r.stderr.contains("c0"), "{}", r.stderr);

    let r = command(&dir, "meanflow", &dir.path().join("missing.toml"), &[]);
    assert_eq!(r.exit, Exit::Io);
    assert_eq!(run(&["meanflow"]).exit, Exit::Io);
}

#[test]
fn unsorted_grid_is_a_validation_failure() {
    let dir = TempDir::new().unwrap();
    let mut s = scenario(0.0);
    s.grids.s = vec![5e4, 0.0];
    let cfg = write_scenario(dir.path(), "a.toml", &s);
    assert_eq!(command(&dir, "surface", &cfg, &[]).exit, Exit::Validation);
}

#[test]
fn beta_mismatch_warns() {
    let dir = TempDir::new().unwrap();
    let mut s = scenario(0.0);
    s.constants.beta = Some(3e-11);
    let cfg = write_scenario(dir.path(), "a.toml", &s);
    let r = command(&dir, "validate", &cfg, &[]);
    assert_eq!(r.exit, Exit::Success);
    assert!(r.stderr.contains("warning: supplied beta"));
    s.constants.beta = Some(2.28e-11);
    let cfg = write_scenario(dir.path(), "b.toml", &s);
    assert!(command(&dir, "validate", &cfg, &[]).stderr.is_empty());
}

#[test]
fn meanflow_without_current_is_westward() {
    let dir = TempDir::new().unwrap();
    let cfg = write_scenario(dir.path(), "a.toml", &scenario(0.0));
    let r = command(&dir, "meanflow", &cfg, &[]);
    assert_eq!(r.exit, Exit::Success, "{}", r.stderr);
    let t = read_table(&dir.path().join("out/meanflow.csv"));
    assert_eq!(
        &t.header[..10],
        [
            "s_m",
            "z0_m",
            "mean_lagrangian_m_per_s",
            "mean_eulerian_m_per_s",
            "err_m_per_s",
            "stokes_m_per_s",
            "lower_m_per_s",
            "upper_m_per_s",
            "westward_flag",
            "eastward_flag"
        ]
    );
    let u = t.column("mean_eulerian_m_per_s").unwrap();
    assert_eq!(u.len(), 8);
    assert!(u.iter().all(|&u| u < 0.0));
}

#[test]
fn stokes_with_following_current_is_eastward() {
    let dir = TempDir::new().unwrap();
    let cfg = write_scenario(dir.path(), "a.toml", &scenario(2.0));
    let r = command(&dir, "stokes", &cfg, &[]);
    assert_eq!(r.exit, Exit::Success, "{}", r.stderr);
    let drift = read_table(&dir.path().join("out/stokes.csv")).column("stokes_m_per_s").unwrap();
    assert!(!drift.is_empty() && drift.iter().all(|&d| d > 0.0));
}

#[test]
fn trajectory_drifts_with_the_current() {
    let dir = TempDir::new().unwrap();
    let s = scenario(-1.5);
    let period = s.wave_config().unwrap().period();
    let cfg = write_scenario(dir.path(), "a.toml", &s);
    let r = command(&dir, "trajectory", &cfg, &[]);
    assert_eq!(r.exit, Exit::Success, "{}", r.stderr);
    let d = read_table(&dir.path().join("out/trajectory.csv")).column("displacement_m").unwrap();
    assert!((d.last().unwrap() - 1.5 * period).abs() <= 1e-6 * 100.0);
}

#[test]
fn flux_rows_and_regimes() {
    let dir = TempDir::new().unwrap();
    let cfg = write_scenario(dir.path(), "a.toml", &scenario(-0.5));
    let r = command(&dir, "flux", &cfg, &[]);
    assert_eq!(r.exit, Exit::Success, "{}", r.stderr);
    let t = read_table(&dir.path().join("out/flux.csv"));
    assert_eq!(t.header, ["station", "s_m", "r_lower_m", "value_m2_per_s", "err_m2_per_s", "regime"]);
    for row in &t.rows {
        let value: f64 = row[3].parse().unwrap();
        assert_eq!(row[5], "normal");
        match row[0].as_str() {
            "crest" => assert!(value > 0.0),
            "trough" => assert!(value < 0.0),
            other => panic!("station {other}"),
        }
    }
    assert!(r.stdout.contains("d(flux)/d(depth)"));
}

#[test]
fn output_is_deterministic_and_round_trips() {
    let dir = TempDir::new().unwrap();
    let cfg = write_scenario(dir.path(), "a.toml", &scenario(0.4));
    let out = dir.path().join("out/meanflow.csv");
    assert_eq!(command(&dir, "meanflow", &cfg, &["--seed", "5"]).exit, Exit::Success);
    let first = std::fs::read(&out).unwrap();
    assert_eq!(command(&dir, "meanflow", &cfg, &["--seed", "5"]).exit, Exit::Success);
    assert_eq!(first, std::fs::read(&out).unwrap());

    let text = String::from_utf8(first).unwrap();
    assert!(!text.contains('\r') && text.ends_with('\n'));
    let table = Table::parse(&text).unwrap();
    assert_eq!(table.to_csv_string(), text);
    for row in &table.rows {
        for cell in &row[..8] {
            let x: f64 = cell.parse().unwrap();
            assert_eq!(eqwave::scenario::fmt_num(x), *cell);
        }
    }
}

#[test]
fn check_passes_on_reference_and_catches_mutation() {
    let dir = TempDir::new().unwrap();
    let cfg = write_scenario(dir.path(), "a.toml", &scenario(0.0));
    let r = command(&dir, "check", &cfg, &["--seed", "3"]);
    assert_eq!(r.exit, Exit::Success, "{}", r.stdout);
    assert!(r.stdout.starts_with("seed = 3\n"));
    assert!(!r.stdout.contains("FAIL"));
    let t = read_table(&dir.path().join("out/check.csv"));
    assert!(t.rows.iter().all(|row| row[0] == "3" && row[3] == "true"));

    let r = command(&dir, "check", &cfg, &["--mutate", "determinant"]);
    assert_eq!(r.exit, Exit::Validation);
    assert!(r.stdout.contains("FAIL model/volume preservation"));
}

#[test]
fn check_with_tightened_tolerance_fails_cleanly() {
    let dir = TempDir::new().unwrap();
    let cfg = write_scenario(dir.path(), "a.toml", &scenario(0.0));
    let r = command(&dir, "check", &cfg, &["--tol", "1e-12"]);
    assert_eq!(r.exit, Exit::Validation);
    for line in r.stdout.lines().filter(|l| l.starts_with("FAIL")) {
        assert!(line.contains("limit"), "{line}");
    }
}

#[test]
fn surface_profile_spans_crest_to_trough() {
    let dir = TempDir::new().unwrap();
    let cfg = write_scenario(dir.path(), "a.toml", &scenario(0.0));
    let r = command(&dir, "surface", &cfg, &["--t", "1.5"]);
    assert_eq!(r.exit, Exit::Success, "{}", r.stderr);
    let t = read_table(&dir.path().join("out/surface.csv"));
    let eta = t.column("eta_m").unwrap();
    let top = eta.iter().cloned().fold(f64::MIN, f64::max);
    let bottom = eta.iter().cloned().fold(f64::MAX, f64::min);
    assert!(top < 6.625 && top > 6.0 && bottom > -16.625 && bottom < -16.0);
    assert!(t.column("t_s").unwrap().iter().all(|&x| x == 1.5));
}
