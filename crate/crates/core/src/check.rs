//! One-shot invariant suite run by `eqwave check`.
//!
//! Every check draws its random points from a seeded ChaCha stream, so a
//! given scenario and seed always exercise the same points.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::field::{integrate_particle, kinematic_surface_check, EulerianQuery, Field};
use crate::geometry::{surface_elevation, surface_label, trapping_margin, trapping_region, DepthColumn, TrappingRegion};
use crate::mass_transport::{FixedStation, Station};
use crate::mean_flow::{column_means, mean_eulerian, mean_flow_report, MeanFlowReport};
use crate::model::{flow_sample, jacobian, label_to_position, label_velocity, LagrangianLabel, WaveConfig};
use crate::scenario::{fmt_num, ScenarioConfig, Table};
use crate::sweep;

/// A deliberate defect injected to prove the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Replace `1 - exp(2 xi)` by `1 - exp(xi)` as the analytic determinant.
    Determinant,
}

impl FromStr for Mutation {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "determinant" => Ok(Mutation::Determinant),
            other => Err(format!("unknown mutation {other:?} (expected \"determinant\")")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub seed: u64,
    /// Quadrature tolerance relative to `c`.
    pub quad_rel: f64,
    /// Multiplies every pass threshold.
    pub tol_scale: f64,
    pub mutation: Option<Mutation>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { seed: 0, quad_rel: crate::mean_flow::DEFAULT_REL_TOL, tol_scale: 1.0, mutation: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}/{}: {}", self.module, self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub seed: u64,
    pub outcomes: Vec<CheckOutcome>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.outcomes.iter().filter(|o| !o.passed)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["seed", "module", "invariant", "passed", "detail"]);
        for o in &self.outcomes {
            t.push(vec![
                self.seed.to_string(),
                o.module.into(),
                o.name.into(),
                o.passed.to_string(),
                o.detail.clone(),
            ]);
        }
        t
    }
}

type Verdict = Result<(bool, String)>;

struct Suite<'a> {
    scenario: &'a ScenarioConfig,
    config: WaveConfig,
    opts: CheckOptions,
    rng: ChaCha8Rng,
    outcomes: Vec<CheckOutcome>,
}

impl Suite<'_> {
    fn record(&mut self, module: &'static str, name: &'static str, verdict: Verdict) {
        let (passed, detail) = verdict.unwrap_or_else(|e| (false, format!("error: {e}")));
        self.outcomes.push(CheckOutcome { module, name, passed, detail });
    }

    fn tol(&self, base: f64) -> f64 {
        base * self.opts.tol_scale
    }

    fn quad_tol(&self) -> f64 {
        self.opts.quad_rel * self.config.c()
    }

    /// Largest latitude used for random labels.
    fn s_hi(&self) -> f64 {
        let hi = self.scenario.grids.s.last().copied().unwrap_or(0.0).abs();
        match trapping_region(&self.config) {
            Ok(TrappingRegion::Finite { s_max }) => hi.min(0.9 * s_max),
            _ => hi,
        }
    }

    fn random_label(&mut self) -> Result<(LagrangianLabel, f64)> {
        let l = self.config.wavelength();
        let s = self.rng.gen_range(0.0..=self.s_hi());
        let top = surface_label(s, &self.config)?;
        let q = self.rng.gen_range(0.0..l);
        let r = top - self.rng.gen_range(1e-3..3.0) * l;
        let t = self.rng.gen_range(0.0..self.config.period());
        Ok((LagrangianLabel::new(q, r, s), t))
    }

    /// `(s, z0)` grid points whose depth lies below the trough.
    fn mean_points(&self) -> Vec<(f64, f64)> {
        let g = &self.scenario.grids;
        sweep::product(&g.s, &g.z0)
            .into_iter()
            .filter(|&(s, z0)| DepthColumn::new(&self.config, s, z0).is_ok())
            .collect()
    }
}

fn counterexamples(bad: usize, total: usize, what: &str) -> (bool, String) {
    (bad == 0, format!("{bad} of {total} {what} violate"))
}

fn n_a(reason: &str) -> Verdict {
    Ok((true, format!("not applicable: {reason}")))
}

/// Run every invariant against the scenario's wave configuration.
pub fn run_checks(scenario: &ScenarioConfig, opts: CheckOptions) -> Result<CheckReport> {
    let config = scenario.wave_config()?;
    let mut suite = Suite {
        scenario,
        config,
        opts,
        rng: ChaCha8Rng::seed_from_u64(opts.seed),
        outcomes: Vec::new(),
    };
    model_checks(&mut suite);
    geometry_checks(&mut suite);
    mean_flow_checks(&mut suite);
    mass_transport_checks(&mut suite);
    field_checks(&mut suite);
    io_checks(&mut suite);
    Ok(CheckReport { seed: opts.seed, outcomes: suite.outcomes })
}

fn model_checks(suite: &mut Suite) {
    let cfg = suite.config;
    let pc = *cfg.constants();
    let (k, c) = (cfg.k(), cfg.c());
    let residual = (k * c * c + 2.0 * pc.omega * c - cfg.gamma()).abs();
    let tol = suite.tol(1e-10) * cfg.gamma();
    suite.record("model", "dispersion", Ok((residual <= tol, format!("|k c^2 + 2 omega c - gamma| = {residual:e} (limit {tol:e})"))));

    let v = (|| -> Verdict {
        let mut worst = (0.0f64, 0.0f64);
        for _ in 0..200 {
            let (label, t0) = suite.random_label()?;
            let e2 = (2.0 * cfg.xi(label.r, label.s)).exp();
            let exact = 1.0 - e2;
            let mut dets = Vec::with_capacity(3);
            for t in [t0, t0 + 0.31 * cfg.period(), t0 + 0.77 * cfg.period()] {
                let j = jacobian(&label, t, &cfg)?;
                let analytic = match suite.opts.mutation {
                    Some(Mutation::Determinant) => 1.0 - e2.sqrt(),
                    None => j.determinant,
                };
                worst.0 = worst.0.max((j.numeric_determinant() - analytic).abs() / exact);
                dets.push(j.numeric_determinant());
            }
            let spread = dets.iter().fold(0.0f64, |m, d| m.max((d - dets[0]).abs()));
            worst.1 = worst.1.max(spread / exact);
        }
        let tol = suite.tol(1e-12);
        Ok((
            worst.0 <= tol && worst.1 <= tol,
            format!("max relative det error {:e}, max t-spread {:e} (limit {tol:e})", worst.0, worst.1),
        ))
    })();
    suite.record("model", "volume preservation", v);

    let v = (|| -> Verdict {
        let (label, t) = suite.random_label()?;
        let u = label_velocity(&label, t, &cfg)?;
        let err = |h: f64| -> Result<f64> {
            let p = label_to_position(&label, t + h, &cfg)?;
            let m = label_to_position(&label, t - h, &cfg)?;
            Ok(((p.x - m.x) / (2.0 * h) - u.u).abs().max(((p.z - m.z) / (2.0 * h) - u.w).abs()))
        };
        let (e1, e2) = (err(1e-2 * cfg.period())?, err(5e-3 * cfg.period())?);
        let fine = err(1e-4 * cfg.period())?;
        let ratio = e1 / e2;
        let limit = suite.tol(1e-6) * c;
        let ok = fine <= limit && (e1 < 1e3 * f64::EPSILON * c || (3.0..=5.0).contains(&ratio));
        Ok((ok, format!("error at h = 1e-4 T: {fine:e} m/s (limit {limit:e}); halving ratio {ratio:.3}")))
    })();
    suite.record("model", "velocity is position derivative", v);

    let v = (|| -> Verdict {
        let s = suite.s_hi();
        let top = surface_label(s, &cfg)?;
        let mut prev = f64::INFINITY;
        let mut ok = true;
        let mut worst = 0.0f64;
        for n in 1..=5 {
            let r = top - n as f64 * cfg.wavelength();
            let label = LagrangianLabel::new(0.3 * n as f64, r, s);
            let u = label_velocity(&label, 0.1 * n as f64, &cfg)?;
            let dev = (u.u + cfg.c0()).hypot(u.w);
            let bound = c * cfg.xi(r, s).exp();
            let rounding = 4.0 * f64::EPSILON * (cfg.c0().abs() + c);
            ok &= dev <= bound * (1.0 + 1e-12) + rounding && bound < prev;
            worst = worst.max((dev - rounding).max(0.0) / bound);
            prev = bound;
        }
        Ok((ok, format!("max |(u + c0, w)| / (c exp(xi)) = {worst:.15} over r0(s) - n L, n = 1..5")))
    })();
    suite.record("model", "deep-water decay", v);

    let v = (|| -> Verdict {
        let mut bad = 0;
        for _ in 0..100 {
            let (label, t) = suite.random_label()?;
            bad += usize::from(flow_sample(&label, t, &cfg)?.v != 0.0);
        }
        Ok(counterexamples(bad, 100, "samples"))
    })();
    suite.record("model", "no meridional velocity", v);
}

fn geometry_checks(suite: &mut Suite) {
    let cfg = suite.config;
    let l = cfg.wavelength();
    let points = suite.mean_points();

    let v = (|| -> Verdict {
        let mut worst = 0.0f64;
        let mut inadmissible = 0;
        for &(s, z0) in &points {
            let col = DepthColumn::new(&cfg, s, z0)?;
            for _ in 0..10 {
                let q = suite.rng.gen_range(0.0..l);
                let t = suite.rng.gen_range(0.0..cfg.period());
                let a = col.label(q, t, None)?;
                let b = col.label(q + l, t, None)?;
                worst = worst.max((a - b).abs());
                inadmissible += usize::from(!(col.amplitude(a) < 1.0 && a <= col.levels().surface_label));
            }
        }
        let tol = suite.tol(1e-9);
        Ok((
            worst <= tol && inadmissible == 0,
            format!("max |R(q+L) - R(q)| = {worst:e} m (limit {tol:e}); {inadmissible} inadmissible roots"),
        ))
    })();
    suite.record("geometry", "depth label periodic and admissible", v);

    let v = (|| -> Verdict {
        let mut worst = 0.0f64;
        for &s in &suite.scenario.grids.s {
            if !trapping_region(&cfg)?.contains(s) {
                continue;
            }
            worst = worst.max((surface_label(s, &cfg)? - surface_label(-s, &cfg)?).abs());
        }
        Ok((worst <= suite.tol(1e-12), format!("max |r0(s) - r0(-s)| = {worst:e} m")))
    })();
    suite.record("geometry", "surface label even", v);

    let v = (|| -> Verdict {
        let Some(&(s, z0)) = points.first() else {
            return n_a("no grid depth below the trough");
        };
        let col = DepthColumn::new(&cfg, s, z0)?;
        let k = cfg.k();
        let q = suite.rng.gen_range(0.0..l);
        let reference = col.label(q, 0.0, None)?;
        let lo = z0 - 1.0 / k;
        let hi = (z0 + 1.0 / k).min(col.levels().surface_label);
        let mut spread = 0.0f64;
        for _ in 0..1000 {
            let warm = suite.rng.gen_range(lo..hi);
            spread = spread.max((col.label(q, 0.0, Some(warm))? - reference).abs());
        }
        let tol = suite.tol(1e-10);
        Ok((spread <= tol, format!("1000 restarts, max deviation {spread:e} m (limit {tol:e})")))
    })();
    suite.record("geometry", "root uniqueness", v);

    let v = (|| -> Verdict {
        let region = trapping_region(&cfg)?;
        match region {
            TrappingRegion::AllLatitudes => Ok((cfg.c0() <= 0.0, format!("region {region}, c0 = {}", cfg.c0()))),
            TrappingRegion::Finite { s_max } => {
                let at = trapping_margin(s_max, &cfg);
                let before = trapping_margin(s_max.next_down(), &cfg);
                let inner = surface_label(0.99 * s_max, &cfg);
                let outer = surface_label(s_max * (1.0 + 1e-9), &cfg);
                let ok = cfg.c0() > 0.0
                    && at >= 0.0
                    && before < 0.0
                    && at.abs() <= suite.tol(1e-12)
                    && inner.is_ok()
                    && outer.is_err();
                Ok((ok, format!("s_max = {s_max} m, margin at s_max {at:e}, just inside {before:e}")))
            }
        }
    })();
    suite.record("geometry", "trapping region", v);
}

fn mean_flow_checks(suite: &mut Suite) {
    let cfg = suite.config;
    let points = suite.mean_points();
    let tol = suite.quad_tol();
    let reports: Vec<Result<MeanFlowReport>> =
        sweep::map(&points, |&(s, z0)| mean_flow_report(s, z0, 0.0, &cfg, tol));
    let reports: Result<Vec<MeanFlowReport>> = reports.into_iter().collect();
    let reports = match reports {
        Ok(r) => r,
        Err(e) => {
            suite.record("mean_flow", "reports", Ok((false, format!("error: {e}"))));
            return;
        }
    };
    let c = cfg.c();
    let n = reports.len();

    let worst = reports
        .iter()
        .map(|r| (r.mean_lagrangian - r.mean_eulerian.value - r.stokes_drift).abs())
        .fold(0.0f64, f64::max);
    let limit = suite.tol(1e-12) * c;
    suite.record(
        "mean_flow",
        "Stokes decomposition",
        Ok((worst <= limit, format!("max |U_L - U_E - U_S| = {worst:e} m/s over {n} points"))),
    );

    let v = (|| -> Verdict {
        let mut worst = 0.0f64;
        for &(s, z0) in &points {
            let a = mean_eulerian(s, z0, 0.0, &cfg, tol)?.value;
            let b = mean_eulerian(s, z0, 0.37 * cfg.period(), &cfg, tol)?.value;
            worst = worst.max((a - b).abs());
        }
        let limit = 2.0 * tol * suite.opts.tol_scale;
        Ok((worst <= limit, format!("max |U_E(0) - U_E(0.37 T)| = {worst:e} m/s (limit {limit:e})")))
    })();
    suite.record("mean_flow", "t-invariance", v);

    let c0 = cfg.c0();
    let v = if c0 >= 0.0 {
        let bad = reports.iter().filter(|r| !(r.mean_eulerian.value < 0.0 && r.stokes_drift > 0.0)).count();
        Ok(counterexamples(bad, n, "points (need U_E < 0 < U_S)"))
    } else {
        n_a("adverse current")
    };
    suite.record("mean_flow", "westward mean and eastward Stokes drift for c0 >= 0", v);

    let v = if c0 < 0.0 {
        let bad = reports.iter().filter(|r| r.westward_sufficient && !(r.mean_eulerian.value < 0.0)).count();
        let flagged = reports.iter().filter(|r| r.westward_sufficient).count();
        let (ok, msg) = counterexamples(bad, flagged, "flagged points");
        Ok((ok, msg))
    } else {
        n_a("c0 >= 0")
    };
    suite.record("mean_flow", "westward condition implies westward mean", v);

    let flagged: Vec<&MeanFlowReport> = reports.iter().filter(|r| r.eastward_sufficient).collect();
    let bad = flagged.iter().filter(|r| !(r.mean_eulerian.value > 0.0)).count();
    suite.record(
        "mean_flow",
        "eastward condition implies eastward mean",
        Ok(counterexamples(bad, flagged.len(), "flagged points")),
    );
    let bad = flagged.iter().filter(|r| !(r.stokes_drift < 0.0)).count();
    suite.record(
        "mean_flow",
        "eastward condition implies westward Stokes drift",
        Ok(counterexamples(bad, flagged.len(), "flagged points")),
    );

    let v = if c0 > 0.0 {
        let bad = reports
            .iter()
            .filter(|r| {
                let u = r.mean_eulerian.value;
                !(r.lower_bound - tol <= u && u <= r.upper_bound + tol && r.range_lower < r.lower_bound && r.upper_bound < 0.0)
            })
            .count();
        Ok(counterexamples(bad, n, "points"))
    } else {
        n_a("c0 <= 0")
    };
    suite.record("mean_flow", "bound sandwich", v);

    let v = (|| -> Verdict {
        let Some(&(s, z0)) = points.first() else {
            return n_a("no grid depth below the trough");
        };
        let adaptive = mean_eulerian(s, z0, 0.0, &cfg, tol)?.value;
        let riemann = riemann_mean_eulerian(s, z0, &cfg, 100_000)?;
        let diff = (adaptive - riemann).abs();
        let limit = suite.tol(1e-6) * c;
        Ok((diff <= limit, format!("|adaptive - Riemann(1e5)| = {diff:e} m/s (limit {limit:e})")))
    })();
    suite.record("mean_flow", "Riemann sum agreement", v);

    let v = (|| -> Verdict {
        let Some(&(s, z0)) = points.first() else {
            return n_a("no grid depth below the trough");
        };
        let col = DepthColumn::new(&cfg, s, z0)?;
        let m = column_means(&col, 0.0, [tol; 4])?;
        let worst = m.errors.iter().fold(0.0f64, |a, &b| a.max(b));
        Ok((worst <= tol, format!("largest component error estimate {worst:e} (limit {tol:e}), {} nodes", m.nodes)))
    })();
    suite.record("mean_flow", "quadrature error within tolerance", v);
}

/// Plain uniform-node Riemann sum of the mean Eulerian integrand.
pub fn riemann_mean_eulerian(s: f64, z0: f64, config: &WaveConfig, nodes: usize) -> Result<f64> {
    let col = DepthColumn::new(config, s, z0)?;
    let (c, c0, l) = (config.c(), config.c0(), config.wavelength());
    let h = l / nodes as f64;
    let mut sum = 0.0;
    let mut warm = None;
    for i in 0..nodes {
        let q = h * i as f64;
        let r = col.label(q, 0.0, warm)?;
        warm = Some(r);
        let e = col.amplitude(r);
        let cos = config.theta(q, 0.0).cos();
        sum += -c * e * e - c0 * (1.0 - e * e) / (1.0 + e * cos);
    }
    Ok(sum / nodes as f64)
}

fn mass_transport_checks(suite: &mut Suite) {
    let cfg = suite.config;
    let k = cfg.k();

    let v = (|| -> Verdict {
        let s = suite.scenario.grids.s[0];
        let top = surface_label(s, &cfg)?;
        let t = suite.rng.gen_range(0.0..cfg.period());
        let station = FixedStation::new(&cfg, suite.rng.gen_range(0.0..cfg.wavelength()), s);
        let r = top - suite.rng.gen_range(0.2..2.0) / k;
        let z = |r: f64| -> Result<f64> {
            let q = station.label(r, t, None)?;
            Ok(label_to_position(&LagrangianLabel::new(q, r, s), t, &cfg)?.z)
        };
        let exact = station.dz_dr(r, t)?;
        let err = |h: f64| -> Result<f64> { Ok(((z(r + h)? - z(r - h)?) / (2.0 * h) - exact).abs()) };
        let (e1, e2) = (err(0.1 / k)?, err(0.05 / k)?);
        let fine = err(1e-4 / k)?;
        let ratio = e1 / e2;
        let limit = suite.tol(1e-6) * exact.abs();
        let ok = fine <= limit && (3.0..=5.0).contains(&ratio);
        Ok((ok, format!("error at h = 1e-4/k: {fine:e} (limit {limit:e}); halving ratio {ratio:.3}")))
    })();
    suite.record("mass_transport", "dz/dr identity", v);

    let v = if cfg.c0() == 0.0 {
        (|| -> Verdict {
            let s = suite.scenario.grids.s[0];
            let top = surface_label(s, &cfg)?;
            let mut worst = 0.0f64;
            for _ in 0..20 {
                let station = FixedStation::new(&cfg, suite.rng.gen_range(0.0..cfg.wavelength()), s);
                let r = top - suite.rng.gen_range(0.0..3.0) * cfg.wavelength();
                let t = suite.rng.gen_range(0.0..cfg.period());
                worst = worst.max((station.label(r, t + cfg.period(), None)? - station.label(r, t, None)?).abs());
            }
            let limit = suite.tol(1e-10) * cfg.wavelength();
            Ok((worst <= limit, format!("max |gamma(t+T) - gamma(t)| = {worst:e} m (limit {limit:e})")))
        })()
    } else {
        n_a("c0 != 0")
    };
    suite.record("mass_transport", "fixed-x label periodic in t", v);

    let v = (|| -> Verdict {
        let s = suite.scenario.grids.s[0];
        let top = surface_label(s, &cfg)?;
        let t = suite.rng.gen_range(0.0..cfg.period());
        let mut worst = 0.0f64;
        for station in [Station::Crest, Station::Trough] {
            let col = FixedStation::new(&cfg, station.x0(t, &cfg), s);
            let want = if station == Station::Crest { 1.0 } else { -1.0 };
            for i in 0..20 {
                let r = top - 0.25 * i as f64 / k;
                let theta = cfg.theta(col.label(r, t, None)?, t);
                worst = worst.max(theta.sin().abs()).max((theta.cos() - want).abs());
            }
        }
        Ok((worst <= suite.tol(1e-10), format!("max phase misalignment {worst:e}")))
    })();
    suite.record("mass_transport", "crest and trough columns aligned", v);

    let v = (|| -> Verdict {
        let grids = &suite.scenario.grids;
        let mut cases = Vec::new();
        for _ in 0..20 {
            let s = grids.s[suite.rng.gen_range(0..grids.s.len())];
            let r_tilde = grids.r_tilde[suite.rng.gen_range(0..grids.r_tilde.len())];
            let limit = crate::mass_transport::regime_threshold(r_tilde, s, &cfg).min(0.99 * cfg.current_bound());
            let c0 = suite.rng.gen_range(-limit..limit);
            cases.push((s, r_tilde, c0));
        }
        let t = 0.0;
        let results = sweep::map(&cases, |&(s, r_tilde, c0)| -> Result<Option<(f64, f64)>> {
            let Ok(cfg) = cfg.with_current(c0) else { return Ok(None) };
            let top = surface_label(s, &cfg)?;
            if !(r_tilde < top) {
                return Ok(None);
            }
            let tol = 1e-10 * cfg.c() / cfg.k();
            let crest = FixedStation::new(&cfg, Station::Crest.x0(t, &cfg), s).flux(r_tilde, top, t, tol)?.value;
            let trough = FixedStation::new(&cfg, Station::Trough.x0(t, &cfg), s).flux(r_tilde, top, t, tol)?.value;
            Ok(Some((crest, trough)))
        });
        let mut bad = 0;
        let mut used = 0;
        for r in results {
            if let Some((crest, trough)) = r? {
                used += 1;
                bad += usize::from(!(crest > 0.0 && 0.0 > trough));
            }
        }
        Ok(counterexamples(bad, used, "sweep cases (need crest > 0 > trough)"))
    })();
    suite.record("mass_transport", "normal regime sign law", v);
}

fn field_checks(suite: &mut Suite) {
    let cfg = suite.config;
    let (k, c) = (cfg.k(), cfg.c());
    let period = cfg.period();
    let s = suite.scenario.grids.s[0];

    let v = (|| -> Verdict {
        let field = Field::new(&cfg, s)?;
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let q = suite.rng.gen_range(0.0..cfg.wavelength());
            let r = field.surface_label() - suite.rng.gen_range(1e-3..3.0) / k;
            let t = suite.rng.gen_range(0.0..period);
            let label = LagrangianLabel::new(q, r, s);
            let p = label_to_position(&label, t, &cfg)?;
            let back = field.invert(p.x, p.z, t)?;
            worst = worst.max((back.q - q).abs()).max((back.r - r).abs());
        }
        let limit = suite.tol(1e-10);
        Ok((worst <= limit, format!("max label round-trip error {worst:e} m (limit {limit:e})")))
    })();
    suite.record("field", "map inversion round trip", v);

    let v = (|| -> Verdict {
        let field = Field::new(&cfg, s)?;
        let mut worst = 0.0f64;
        let mut bad_order = 0;
        for _ in 0..20 {
            let x = suite.rng.gen_range(0.0..cfg.wavelength());
            let z = field.surface_label() - suite.rng.gen_range(1.0..3.0) / k;
            let t = suite.rng.gen_range(0.0..period);
            worst = worst.max(field.divergence(x, z, t, 1e-3 / k)?.abs());
            let d1 = field.divergence(x, z, t, 0.2 / k)?;
            let d2 = field.divergence(x, z, t, 0.1 / k)?;
            if d1.abs() > 1e-9 * c * k && !(3.0..=5.0).contains(&(d1 / d2)) {
                bad_order += 1;
            }
        }
        let limit = suite.tol(1e-6) * c * k;
        Ok((
            worst <= limit && bad_order == 0,
            format!("max |div| at h = 1e-3/k: {worst:e} 1/s (limit {limit:e}); {bad_order} of 20 off second order"),
        ))
    })();
    suite.record("field", "divergence vanishes", v);

    let v = (|| -> Verdict {
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let q = suite.rng.gen_range(0.0..cfg.wavelength());
            let t = suite.rng.gen_range(0.0..period);
            worst = worst.max(kinematic_surface_check(q, s, t, &cfg, 1e-4 * cfg.wavelength())?.abs());
        }
        let limit = suite.tol(1e-6) * c;
        Ok((worst <= limit, format!("max residual {worst:e} m/s (limit {limit:e})")))
    })();
    suite.record("field", "kinematic surface condition", v);

    let v = (|| -> Verdict {
        let field = Field::new(&cfg, s)?;
        let mut worst = (0.0f64, 0.0f64);
        for depth in [0.0, 1.5 / k] {
            let label = LagrangianLabel::new(suite.rng.gen_range(0.0..cfg.wavelength()), field.surface_label() - depth, s);
            let p = label_to_position(&label, 0.0, &cfg)?;
            let traj = integrate_particle(&EulerianQuery::new(p.x, p.z, s, 0.0), period, period / 1000.0, &cfg)?;
            for sample in traj.samples.iter().step_by(50) {
                let l = field.invert(sample.x, sample.z, sample.t)?;
                let slot = if depth == 0.0 { &mut worst.1 } else { &mut worst.0 };
                *slot = slot.max((l.q - label.q).abs()).max((l.r - label.r).abs());
            }
        }
        let limit = suite.tol(1e-8) / k;
        Ok((
            worst.0 <= limit && worst.1 <= limit,
            format!("label drift interior {:e} m, surface {:e} m (limit {limit:e})", worst.0, worst.1),
        ))
    })();
    suite.record("field", "labels are material", v);

    let v = (|| -> Verdict {
        let field = Field::new(&cfg, s)?;
        let label = LagrangianLabel::new(0.0, field.surface_label() - 0.5 / k, s);
        let p = label_to_position(&label, 0.0, &cfg)?;
        let t_end = 0.73 * period;
        let end = label_to_position(&label, t_end, &cfg)?;
        let err = |steps: f64| -> Result<f64> {
            let traj = integrate_particle(&EulerianQuery::new(p.x, p.z, s, 0.0), t_end, period / steps, &cfg)?;
            let last = traj.last();
            Ok((last.x - end.x).hypot(last.z - end.z))
        };
        let (e1, e2) = (err(200.0)?, err(400.0)?);
        let ratio = e1 / e2;
        Ok(((12.0..=20.0).contains(&ratio), format!("endpoint errors {e1:e}, {e2:e} m; ratio {ratio:.2} (fourth order: 16)")))
    })();
    suite.record("field", "trajectory fourth-order convergence", v);

    let v = (|| -> Verdict {
        let field = Field::new(&cfg, s)?;
        let z = field.surface_label() - 1.0 / k;
        let traj = integrate_particle(&EulerianQuery::new(0.0, z, s, 0.0), period, period / 1000.0, &cfg)?;
        let err = (traj.displacement() + cfg.c0() * period).abs();
        let limit = suite.tol(1e-6) * cfg.wavelength();
        Ok((err <= limit, format!("|displacement + c0 T| = {err:e} m (limit {limit:e})")))
    })();
    suite.record("field", "one-period drift", v);
}

fn io_checks(suite: &mut Suite) {
    let cfg = suite.config;
    let mut table = Table::new(&["value_m"]);
    let values: Vec<f64> = (0..200).map(|_| suite.rng.gen_range(-1e3..1e3) * 10f64.powi(suite.rng.gen_range(-300..300))).collect();
    for v in &values {
        table.push(vec![fmt_num(*v)]);
    }
    let v = Table::parse(&table.to_csv_string()).map_err(|e| crate::Error::InvalidConfig(vec![e.to_string()])).map(|back| {
        let same = back.column("value_m").is_some_and(|col| col.iter().zip(&values).all(|(a, b)| a.to_bits() == b.to_bits()));
        (same, format!("{} values re-parsed", values.len()))
    });
    suite.record("io", "CSV round trip", v);

    let v = (|| -> Verdict {
        let render = || -> Result<String> {
            let mut t = Table::new(&["q_m", "x_m", "eta_m"]);
            for i in 0..16 {
                let q = cfg.wavelength() * i as f64 / 16.0;
                let (x, eta) = surface_elevation(q, suite.scenario.grids.s[0], 0.0, &cfg)?;
                t.push(vec![fmt_num(q), fmt_num(x), fmt_num(eta)]);
            }
            Ok(t.to_csv_string())
        };
        Ok((render()? == render()?, "surface table rendered twice".into()))
    })();
    suite.record("io", "deterministic output", v);
}
