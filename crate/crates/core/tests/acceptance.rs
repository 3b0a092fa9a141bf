//! Acceptance suite: one pass/fail line per criterion on stderr.
//!
//! Reference configuration unless stated: L = 100 m, r0 = -5 m.

use std::f64::consts::TAU;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eqwave::field::{divergence, integrate_particle, invert_map, kinematic_surface_check, EulerianQuery};
use eqwave::geometry::{crest_trough, surface_label, trapping_margin, trapping_region, DepthColumn, TrappingRegion};
use eqwave::mass_transport::{
    flux_sign_condition, full_flux_divergence, period_averaged_flux, regime_threshold, truncated_flux, FluxRegime,
    FluxRequest, Station,
};
use eqwave::mean_flow::{
    eastward_threshold, mean_eulerian, mean_flow_report, westward_threshold, MeanFlowReport,
};
use eqwave::model::{jacobian, label_to_position, label_velocity, modified_gravity, phase_speed};
use eqwave::quad::{integrate, QuadOptions};
use eqwave::{LagrangianLabel, PhysicalConstants, WaveConfig};

const L: f64 = 100.0;
const R0: f64 = -5.0;
const S_GRID: [f64; 2] = [0.0, 5e4];

fn wave(c0: f64) -> WaveConfig {
    WaveConfig::new(L, c0, R0, PhysicalConstants::equatorial()).unwrap()
}

fn report(criterion: u32, passed: bool, summary: &str) {
    let status = if passed { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "criterion {criterion:>2} {status}: {summary}");
}

/// Depths below the trough at latitude `s`: just below it, then deeper.
fn z0_grid(cfg: &WaveConfig, s: f64) -> Vec<f64> {
    let (_, trough) = crest_trough(s, cfg).unwrap();
    [0.5, 2.0, 5.0, 15.0, 40.0, 100.0].iter().map(|d| trough - d).collect()
}

#[test]
fn criterion_01_dispersion() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pc = PhysicalConstants::equatorial();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let l = 10f64.powf(rng.gen_range(1.0..3.0));
        let c0 = rng.gen_range(-5.0..5.0);
        let k = TAU / l;
        let gamma = modified_gravity(c0, &pc).unwrap();
        let c = phase_speed(k, gamma, &pc).unwrap();
        worst = worst.max((k * c * c + 2.0 * pc.omega * c - gamma).abs() / gamma);
    }
    let no_rotation = PhysicalConstants { omega: 0.0, ..pc };
    let mut worst_limit = 0.0f64;
    for l in [10.0, 100.0, 1000.0] {
        let k = TAU / l;
        let c = phase_speed(k, pc.g, &no_rotation).unwrap();
        worst_limit = worst_limit.max((c - (pc.g / k).sqrt()).abs() / c);
    }
    let passed = worst <= 1e-10 && worst_limit <= 1e-12;
    report(
        1,
        passed,
        &format!("max |kc^2 + 2 omega c - gamma|/gamma = {worst:.2e} (<= 1e-10); omega -> 0 relative error {worst_limit:.2e} (<= 1e-12)"),
    );
    assert!(passed);
}

#[test]
fn criterion_02_volume_preservation() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = (0.0f64, 0.0f64);
    for i in 0..1000 {
        let cfg = wave([0.0, 0.7, -2.0, 4.0][i % 4]);
        let s = rng.gen_range(0.0..1e5);
        let top = surface_label(s, &cfg).unwrap();
        let label = LagrangianLabel::new(rng.gen_range(0.0..L), top - rng.gen_range(1e-3..300.0), s);
        let exact = -(2.0 * cfg.xi(label.r, s)).exp_m1();
        let dets: Vec<f64> = (0..3)
            .map(|_| jacobian(&label, rng.gen_range(-50.0..50.0), &cfg).unwrap().numeric_determinant())
            .collect();
        for d in &dets {
            worst.0 = worst.0.max((d - exact).abs() / exact);
            worst.1 = worst.1.max((d - dets[0]).abs() / exact);
        }
    }
    let passed = worst.0 <= 1e-12 && worst.1 <= 1e-12;
    report(
        2,
        passed,
        &format!("1000 labels x 3 times: max |det J - (1 - e^2xi)|/(1 - e^2xi) = {:.2e}, max t-spread {:.2e} (<= 1e-12)", worst.0, worst.1),
    );
    assert!(passed);
}

#[test]
fn criterion_03_mean_lagrangian() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let cfg = wave(rng.gen_range(-4.0..4.0));
        let s = rng.gen_range(0.0..1e5);
        let top = surface_label(s, &cfg).unwrap();
        let label = LagrangianLabel::new(rng.gen_range(0.0..L), top - rng.gen_range(0.0..50.0), s);
        let t0 = rng.gen_range(0.0..cfg.period());
        let tol = 1e-12 * cfg.c() * cfg.period();
        let q = integrate(
            |t| Ok(label_velocity(&label, t, &cfg)?.u),
            t0,
            t0 + cfg.period(),
            tol,
            QuadOptions::default(),
        )
        .unwrap();
        worst = worst.max((q.value / cfg.period() + cfg.c0()).abs() / cfg.c());
    }
    let mut drift = 0.0f64;
    for c0 in [1.2, -2.5] {
        let cfg = wave(c0);
        let period = cfg.period();
        let start = EulerianQuery::new(3.0, -9.0, 0.0, 0.0);
        let path = integrate_particle(&start, period, period / 1000.0, &cfg).unwrap();
        drift = drift.max((path.displacement() + c0 * period).abs() / L);
    }
    let passed = worst <= 1e-10 && drift <= 1e-6;
    report(
        3,
        passed,
        &format!("max |<u>_L + c0|/c = {worst:.2e} over 50 labels (<= 1e-10); trajectory drift error {drift:.2e} L (<= 1e-6)"),
    );
    assert!(passed);
}

#[test]
fn criterion_04_mean_eulerian_signs_and_bounds() {
    let cfg = wave(0.0);
    let mut no_current = Vec::new();
    for s in S_GRID {
        for z0 in z0_grid(&cfg, s) {
            let q = mean_eulerian(s, z0, 0.0, &cfg, 1e-10 * cfg.c()).unwrap();
            no_current.push((q.value, q.error_estimate));
        }
    }
    let west = no_current.iter().filter(|(u, _)| *u < 0.0).count();

    let bound = cfg.current_bound();
    let mut bad = Vec::new();
    let mut worst_err = no_current.iter().map(|q| q.1).fold(0.0f64, f64::max) / cfg.c();
    for i in 1..=10 {
        let c0 = bound * i as f64 / 11.0;
        let cfg = wave(c0);
        for s in S_GRID {
            for z0 in z0_grid(&cfg, s) {
                let r = mean_flow_report(s, z0, 0.0, &cfg, 1e-10 * cfg.c()).unwrap();
                let u = r.mean_eulerian.value;
                let tol = r.mean_eulerian.error_estimate;
                worst_err = worst_err.max(tol / cfg.c());
                let range_lower = -cfg.c() * (1.0 - (3.0 * cfg.k() * R0).exp()) / (1.0 - (cfg.k() * R0).exp());
                let inside = range_lower < u && u < 0.0 && r.lower_bound - tol <= u && u <= r.upper_bound + tol;
                if !inside {
                    bad.push((c0, s, z0, u, r.lower_bound, r.upper_bound));
                }
            }
        }
    }
    let passed = west == no_current.len() && bad.is_empty() && worst_err <= 1e-10;
    report(
        4,
        passed,
        &format!(
            "c0 = 0: {west}/{} points westward; 10 currents in (0, c e^2kr0): {} bound violations; max error estimate {worst_err:.2e} c (<= 1e-10)",
            no_current.len(),
            bad.len()
        ),
    );
    assert!(passed, "{bad:?}");
}

/// Mean-flow reports over `(s, z0)` for a set of adverse currents, with two
/// currents built from the thresholds at the shallowest grid depth.
fn adverse_sweep() -> Vec<MeanFlowReport> {
    let probe = wave(-1.0);
    let (_, trough) = crest_trough(0.0, &probe).unwrap();
    let column = DepthColumn::new(&probe, 0.0, trough - 0.5).unwrap();
    let east = eastward_threshold(&column).unwrap().threshold;
    let west = westward_threshold(&column).unwrap().threshold;
    let mut currents: Vec<f64> = (1..=8).map(|i| -0.5 * i as f64).collect();
    currents.push(1.3 * east);
    currents.push(0.5 * west);
    currents.push(-20.0);
    let mut reports = Vec::new();
    for c0 in currents {
        let cfg = wave(c0);
        for s in S_GRID {
            for z0 in z0_grid(&cfg, s) {
                reports.push(mean_flow_report(s, z0, 0.0, &cfg, 1e-10 * cfg.c()).unwrap());
            }
        }
    }
    reports
}

#[test]
fn criterion_05_direction_conditions() {
    let reports = adverse_sweep();
    let west: Vec<_> = reports.iter().filter(|r| r.westward_sufficient).collect();
    let east: Vec<_> = reports.iter().filter(|r| r.eastward_sufficient).collect();
    let west_bad = west.iter().filter(|r| !(r.mean_eulerian.value < 0.0)).count();
    let east_bad = east.iter().filter(|r| !(r.mean_eulerian.value > 0.0)).count();
    let passed = west_bad == 0 && east_bad == 0 && !west.is_empty() && !east.is_empty();
    report(
        5,
        passed,
        &format!(
            "{} sweep points: westward flag {} times ({west_bad} counterexamples), eastward flag {} times ({east_bad} counterexamples)",
            reports.len(),
            west.len(),
            east.len()
        ),
    );
    assert!(passed);
}

#[test]
fn criterion_06_stokes_decomposition_and_direction() {
    let mut reports = adverse_sweep();
    for c0 in [0.0, 0.5, 2.0, 6.0] {
        let cfg = wave(c0);
        for s in S_GRID {
            for z0 in z0_grid(&cfg, s) {
                reports.push(mean_flow_report(s, z0, 0.0, &cfg, 1e-10 * cfg.c()).unwrap());
            }
        }
    }
    let identity = reports
        .iter()
        .map(|r| (r.mean_lagrangian - r.mean_eulerian.value - r.stokes_drift).abs())
        .fold(0.0f64, f64::max);
    let forward: Vec<_> = reports.iter().filter(|r| r.mean_lagrangian <= 0.0).collect();
    let forward_bad = forward.iter().filter(|r| !(r.stokes_drift > 0.0)).count();
    let east: Vec<_> = reports.iter().filter(|r| r.eastward_sufficient).collect();
    let east_bad = east.iter().filter(|r| !(r.stokes_drift < 0.0)).count();
    let min_east_stokes = east.iter().map(|r| r.stokes_drift).fold(f64::INFINITY, f64::min);

    let clauses = [identity <= 1e-12, forward_bad == 0, east_bad == 0];
    let passed = clauses.iter().all(|&b| b);
    report(
        6,
        passed,
        &format!(
            "identity max residual {identity:.2e} m/s [{}]; U_S > 0 at {}/{} points with c0 >= 0 [{}]; U_S < 0 at {}/{} eastward-flagged points, smallest U_S there {min_east_stokes:.3e} m/s [{}]",
            ok(clauses[0]),
            forward.len() - forward_bad,
            forward.len(),
            ok(clauses[1]),
            east.len() - east_bad,
            east.len(),
            ok(clauses[2]),
        ),
    );
    assert!(passed, "Stokes drift is positive wherever the eastward condition holds");
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "violated"
    }
}

/// Uniform Riemann sum with its own Newton solve for the depth label.
fn riemann(cfg: &WaveConfig, s: f64, z0: f64, nodes: usize) -> f64 {
    let (k, c, c0) = (cfg.k(), cfg.c(), cfg.c0());
    let f = cfg.decay_f(s);
    let mut r = z0;
    let mut sum = 0.0;
    for i in 0..nodes {
        let q = L * i as f64 / nodes as f64;
        let cos = (k * q).cos();
        for _ in 0..60 {
            let e = (k * (r - f)).exp();
            let step = (r + e * cos / k - z0) / (1.0 + e * cos);
            r -= step;
            if step.abs() < 1e-14 * z0.abs() {
                break;
            }
        }
        let e = (k * (r - f)).exp();
        sum += -c * e * e - c0 * (1.0 - e * e) / (1.0 + e * cos);
    }
    sum / nodes as f64
}

#[test]
fn criterion_07_quadrature_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let c0 = rng.gen_range(-10.0..6.0);
        let cfg = wave(c0);
        let s = rng.gen_range(0.0..1e5);
        let (_, trough) = crest_trough(s, &cfg).unwrap();
        let z0 = trough - rng.gen_range(0.1..60.0);
        let adaptive = mean_eulerian(s, z0, 0.0, &cfg, 1e-10 * cfg.c()).unwrap().value;
        worst = worst.max((adaptive - riemann(&cfg, s, z0, 100_000)).abs() / cfg.c());
    }
    let passed = worst <= 1e-6;
    report(7, passed, &format!("20 random (s, z0, c0): max |adaptive - Riemann(1e5)|/c = {worst:.2e} (<= 1e-6)"));
    assert!(passed);
}

#[test]
fn criterion_08_mass_flux() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let tol = |cfg: &WaveConfig| 1e-10 * cfg.c() / cfg.k();
    let flux = |cfg: &WaveConfig, station: Station, s: f64, r_tilde: f64| {
        let req = FluxRequest { x0: station.x0(0.0, cfg), s, t: 0.0, r_lower: r_tilde, r_upper: None };
        truncated_flux(&req, cfg, tol(cfg)).unwrap().value
    };

    let probe = wave(0.0);
    let mut normal_bad = 0;
    for _ in 0..50 {
        let s = rng.gen_range(0.0..1e5);
        let r_tilde = rng.gen_range(-40.0..-6.0);
        let limit = regime_threshold(r_tilde, s, &probe).min(0.99 * probe.current_bound());
        let cfg = wave(rng.gen_range(-limit..limit));
        assert_eq!(flux_sign_condition(r_tilde, s, &cfg).unwrap(), FluxRegime::Normal);
        let (crest, trough) = (flux(&cfg, Station::Crest, s, r_tilde), flux(&cfg, Station::Trough, s, r_tilde));
        normal_bad += usize::from(!(crest > 0.0 && 0.0 > trough));
    }

    let mut anomalous_bad = 0;
    for (s, r_tilde) in [(0.0, -8.0), (5e4, -12.0), (2e4, -20.0)] {
        let cfg = wave(-2.0 * regime_threshold(r_tilde, s, &probe));
        let regime = flux_sign_condition(r_tilde, s, &cfg).unwrap();
        anomalous_bad += usize::from(!(regime == FluxRegime::Anomalous && flux(&cfg, Station::Trough, s, r_tilde) > 0.0));
    }

    let still = wave(0.0);
    let avg = period_averaged_flux(Station::Crest.x0(0.0, &still), 0.0, &still, 10.0 * L, tol(&still)).unwrap();
    let avg_ok = avg.value.abs() <= 1e-8 * still.c() / still.k();

    let depths: Vec<f64> = [5.0, 10.0, 20.0, 50.0].iter().map(|d| d * L).collect();
    let mut slope_err = 0.0f64;
    for c0 in [0.8, -1.5, -6.0] {
        let cfg = wave(c0);
        for station in [Station::Crest, Station::Trough] {
            let fit = full_flux_divergence(station.x0(0.0, &cfg), 5e4, 0.0, &cfg, &depths, tol(&cfg)).unwrap();
            slope_err = slope_err.max((fit.slope + c0).abs() / c0.abs());
        }
    }

    let passed = normal_bad == 0 && anomalous_bad == 0 && avg_ok && slope_err <= 0.01;
    report(
        8,
        passed,
        &format!(
            "normal regime: {normal_bad}/50 sign violations; anomalous: {anomalous_bad}/3 violations; c0 = 0 period average {:.2e} m^2/s (<= {:.2e}); max slope error {:.2e} (<= 1%)",
            avg.value,
            1e-8 * still.c() / still.k(),
            slope_err
        ),
    );
    assert!(passed);
}

#[test]
fn criterion_09_field_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut div_worst = 0.0f64;
    let mut off_order = 0;
    let mut inversion = 0.0f64;
    let mut kinematic = 0.0f64;
    for i in 0..100 {
        let cfg = wave([0.0, 1.0, -3.0, 5.0][i % 4]);
        let (c, k) = (cfg.c(), cfg.k());
        let s = rng.gen_range(0.0..8e4);
        let top = surface_label(s, &cfg).unwrap();
        let t = rng.gen_range(0.0..cfg.period());
        let label = LagrangianLabel::new(rng.gen_range(0.0..L), top - rng.gen_range(1.0..3.0) / k, s);
        let p = label_to_position(&label, t, &cfg).unwrap();
        let query = EulerianQuery::new(p.x, p.z, s, t);

        div_worst = div_worst.max(divergence(&query, &cfg, 1e-3 / k).unwrap().abs() / (c * k));
        let coarse = divergence(&query, &cfg, 0.2 / k).unwrap();
        let fine = divergence(&query, &cfg, 0.1 / k).unwrap();
        if coarse.abs() > 1e-9 * c * k && !(3.0..=5.0).contains(&(coarse / fine)) {
            off_order += 1;
        }

        let back = invert_map(&query, &cfg).unwrap();
        inversion = inversion.max((back.q - label.q).abs()).max((back.r - label.r).abs());

        let q = rng.gen_range(0.0..L);
        kinematic = kinematic.max(kinematic_surface_check(q, s, t, &cfg, 1e-4 * L).unwrap().abs() / c);
    }

    let cfg = wave(0.6);
    let period = cfg.period();
    let label = LagrangianLabel::new(10.0, R0 - 4.0, 0.0);
    let p = label_to_position(&label, 0.0, &cfg).unwrap();
    // stop off the period: over a whole period the leading error terms
    // partly cancel and mask the order
    let t_end = 0.73 * period;
    let exact = label_to_position(&label, t_end, &cfg).unwrap();
    let endpoint = |steps: f64| {
        let path = integrate_particle(&EulerianQuery::new(p.x, p.z, 0.0, 0.0), t_end, period / steps, &cfg).unwrap();
        let last = path.last();
        (last.x - exact.x).hypot(last.z - exact.z)
    };
    let (e1, e2) = (endpoint(200.0), endpoint(400.0));
    let ratio = e1 / e2;

    let passed = div_worst <= 1e-6 && off_order == 0 && kinematic <= 1e-6 && inversion <= 1e-10 && (12.0..=20.0).contains(&ratio);
    report(
        9,
        passed,
        &format!(
            "100 points: max |div|/(ck) = {div_worst:.2e} (<= 1e-6), {off_order} off second order; kinematic residual {kinematic:.2e} c (<= 1e-6); inversion error {inversion:.2e} (<= 1e-10); trajectory error ratio T/200 -> T/400 = {ratio:.2}"
        ),
    );
    assert!(passed);
}

#[test]
fn criterion_10_trapping_region() {
    let adverse_all = [-0.1, -1.0, -5.0, 0.0]
        .iter()
        .all(|&c0| trapping_region(&wave(c0)).unwrap() == TrappingRegion::AllLatitudes);
    let mut worst_residual = 0.0f64;
    let mut edge_ok = true;
    for c0 in [0.1, 1.0, 3.0, 6.0] {
        let cfg = wave(c0);
        let TrappingRegion::Finite { s_max } = trapping_region(&cfg).unwrap() else {
            edge_ok = false;
            continue;
        };
        worst_residual = worst_residual.max(trapping_margin(s_max, &cfg).abs());
        edge_ok &= surface_label(0.99 * s_max, &cfg).is_ok() && surface_label(s_max * (1.0 + 1e-9), &cfg).is_err();
    }
    let passed = adverse_all && worst_residual <= 1e-12 && edge_ok;
    report(
        10,
        passed,
        &format!(
            "c0 <= 0 all-latitudes: {adverse_all}; c0 > 0: max equality residual {worst_residual:.2e} (<= 1e-12), inside at 0.99 s_max and outside beyond: {edge_ok}"
        ),
    );
    assert!(passed);
}
