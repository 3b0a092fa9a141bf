//! The `eqwave` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::check::{run_checks, CheckOptions, Mutation};
use crate::error::Error;
use crate::field::{integrate_particle, EulerianQuery};
use crate::geometry::{surface_profile, trapping_region, SurfaceLevels};
use crate::mass_transport::{
    flux_sign_condition, full_flux_divergence, period_averaged_flux, truncated_flux, FluxRequest,
};
use crate::mean_flow::{mean_flow_report, MeanFlowReport, DEFAULT_REL_TOL};
use crate::model::{modified_gravity, WaveConfig};
use crate::scenario::{fmt_num, ScenarioConfig, ScenarioError, Table};
use crate::sweep;

#[derive(Debug, Parser)]
#[command(name = "eqwave", version, about = "Equatorially trapped waves riding an underlying current")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Scenario file (TOML).
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Output directory; overrides the scenario's `output.dir`.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Quadrature tolerance relative to the phase speed.
    #[arg(long, value_name = "FLOAT")]
    pub tol: Option<f64>,
    /// Seed for random sweeps.
    #[arg(long, value_name = "INT")]
    pub seed: Option<u64>,
    /// Evaluation time, s.
    #[arg(long, value_name = "FLOAT")]
    pub t: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print derived parameters and every constraint violation.
    Validate(Common),
    /// Free-surface profiles at each grid latitude.
    Surface(Common),
    /// Mean Lagrangian/Eulerian velocities, bounds and direction flags.
    Meanflow(Common),
    /// Stokes drift on the (s, z0) grid.
    Stokes(Common),
    /// Truncated mass fluxes at the crest and trough stations.
    Flux(Common),
    /// Integrate one particle through the reconstructed field.
    Trajectory(Common),
    /// Run the invariant suite.
    Check {
        #[command(flatten)]
        common: Common,
        /// Inject a known defect (test hook).
        #[arg(long, hide = true)]
        mutate: Option<Mutation>,
    },
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Validation = 1,
    Numerical = 2,
    Io = 3,
}

impl From<&Error> for Exit {
    fn from(e: &Error) -> Self {
        if e.is_numerical() {
            Exit::Numerical
        } else {
            Exit::Validation
        }
    }
}

impl From<&ScenarioError> for Exit {
    fn from(e: &ScenarioError) -> Self {
        match e {
            ScenarioError::Invalid(_) => Exit::Validation,
            _ => Exit::Io,
        }
    }
}

struct Failure {
    exit: Exit,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self { exit: Exit::from(&e), message: e.to_string() }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        Self { exit: Exit::from(&e), message: e.to_string() }
    }
}

type Outcome = std::result::Result<Exit, Failure>;

/// Parse `args` and run; returns the exit status.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> Exit
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            if e.use_stderr() {
                Exit::Io
            } else {
                let _ = write!(out, "{}", e.render());
                Exit::Success
            }
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Exit {
    let result = match &cli.command {
        Command::Validate(c) => validate(c, out, err),
        Command::Surface(c) => context(c, err).and_then(|ctx| surface(&ctx, out)),
        Command::Meanflow(c) => context(c, err).and_then(|ctx| meanflow(&ctx, out, err)),
        Command::Stokes(c) => context(c, err).and_then(|ctx| stokes(&ctx, out, err)),
        Command::Flux(c) => context(c, err).and_then(|ctx| flux(&ctx, out)),
        Command::Trajectory(c) => context(c, err).and_then(|ctx| trajectory(&ctx, out)),
        Command::Check { common, mutate } => check(common, *mutate, out, err),
    };
    match result {
        Ok(exit) => exit,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.exit
        }
    }
}

fn load(common: &Common, err: &mut dyn Write) -> std::result::Result<ScenarioConfig, Failure> {
    let scenario = ScenarioConfig::load(&common.config)?;
    if let Ok((_, Some(w))) = scenario.constants() {
        let _ = writeln!(err, "warning: {w}");
    }
    Ok(scenario)
}

struct Context {
    scenario: ScenarioConfig,
    config: WaveConfig,
    out_dir: PathBuf,
    tol: f64,
    t: f64,
}

impl Context {
    fn write(&self, name: &str, table: &Table, out: &mut dyn Write) -> std::result::Result<(), Failure> {
        let path = self.out_dir.join(name);
        table.write_file(&path)?;
        let _ = writeln!(out, "wrote {} ({} rows)", path.display(), table.rows.len());
        Ok(())
    }
}

fn context(common: &Common, err: &mut dyn Write) -> std::result::Result<Context, Failure> {
    let scenario = load(common, err)?;
    let config = scenario.wave_config()?;
    let rel = common.tol.unwrap_or(scenario.tolerances.quad_rel);
    if !(rel > 0.0) {
        return Err(Error::InvalidParameter { name: "tol", reason: format!("must be positive, got {rel}") }.into());
    }
    let out_dir = common.out.clone().unwrap_or_else(|| scenario.output.dir.clone());
    Ok(Context { tol: rel * config.c(), t: common.t.unwrap_or(0.0), scenario, config, out_dir })
}

fn validate(common: &Common, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let scenario = load(common, err)?;
    let config = scenario.wave_config_unchecked()?;
    let violations = config.validate();
    let _ = writeln!(out, "wavelength L = {} m, k = {} 1/m", config.wavelength(), config.k());
    match modified_gravity(config.c0(), config.constants()) {
        Ok(gamma) => {
            let _ = writeln!(out, "gamma = {gamma} m/s^2");
            let _ = writeln!(out, "c = {} m/s, T = {} s", config.c(), config.period());
            let _ = writeln!(out, "current bound c*exp(2*k*r0) = {} m/s", config.current_bound());
        }
        Err(_) => {
            let _ = writeln!(out, "gamma = {} m/s^2; c undefined", config.gamma());
        }
    }
    if violations.is_empty() {
        let region = trapping_region(&config)?;
        let _ = writeln!(out, "trapping region: {region}");
        let _ = writeln!(out, "valid");
        Ok(Exit::Success)
    } else {
        for v in &violations {
            let _ = writeln!(out, "violation: {v}");
        }
        Ok(Exit::Validation)
    }
}

fn surface(ctx: &Context, out: &mut dyn Write) -> Outcome {
    let cfg = &ctx.config;
    let region = trapping_region(cfg)?;
    let mut table = Table::new(&["s_m", "t_s", "q_m", "x_m", "eta_m"]);
    for &s in &ctx.scenario.grids.s {
        if !region.contains(s) {
            return Err(Error::OutsideTrappingRegion { s }.into());
        }
        let levels = SurfaceLevels::new(s, cfg)?;
        let _ = writeln!(
            out,
            "s = {s} m: surface label {} m, crest {} m, trough {} m",
            levels.surface_label, levels.z_plus, levels.z_minus
        );
        let profile = surface_profile(s, ctx.t, ctx.scenario.surface.samples, cfg)?;
        for &(q, x, eta) in &profile.samples {
            table.push(vec![fmt_num(s), fmt_num(ctx.t), fmt_num(q), fmt_num(x), fmt_num(eta)]);
        }
    }
    ctx.write("surface.csv", &table, out)?;
    Ok(Exit::Success)
}

fn mean_reports(ctx: &Context, err: &mut dyn Write) -> std::result::Result<Vec<MeanFlowReport>, Failure> {
    let g = &ctx.scenario.grids;
    let points = sweep::product(&g.s, &g.z0);
    let results = sweep::map(&points, |&(s, z0)| mean_flow_report(s, z0, ctx.t, &ctx.config, ctx.tol));
    let mut reports = Vec::with_capacity(points.len());
    for ((s, z0), r) in points.iter().zip(results) {
        match r {
            Ok(r) => reports.push(r),
            Err(e @ Error::NotBelowTrough { .. }) => {
                let _ = writeln!(err, "warning: skipping s = {s} m, z0 = {z0} m: {e}");
            }
            Err(e) => return Err(e.into()),
        }
    }
    if reports.is_empty() {
        return Err(Error::InvalidConfig(vec!["no (s, z0) grid point lies below the trough".into()]).into());
    }
    Ok(reports)
}

fn flag(b: bool) -> String {
    u8::from(b).to_string()
}

fn meanflow(ctx: &Context, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let reports = mean_reports(ctx, err)?;
    let mut table = Table::new(&[
        "s_m",
        "z0_m",
        "mean_lagrangian_m_per_s",
        "mean_eulerian_m_per_s",
        "err_m_per_s",
        "stokes_m_per_s",
        "lower_m_per_s",
        "upper_m_per_s",
        "westward_flag",
        "eastward_flag",
        "westward_threshold_m_per_s",
        "eastward_threshold_m_per_s",
    ]);
    for r in &reports {
        table.push(vec![
            fmt_num(r.s),
            fmt_num(r.z0),
            fmt_num(r.mean_lagrangian),
            fmt_num(r.mean_eulerian.value),
            fmt_num(r.mean_eulerian.error_estimate),
            fmt_num(r.stokes_drift),
            fmt_num(r.lower_bound),
            fmt_num(r.upper_bound),
            flag(r.westward_sufficient),
            flag(r.eastward_sufficient),
            fmt_num(r.westward_threshold),
            fmt_num(r.eastward_threshold),
        ]);
    }
    ctx.write("meanflow.csv", &table, out)?;
    Ok(Exit::Success)
}

fn stokes(ctx: &Context, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let reports = mean_reports(ctx, err)?;
    let mut table = Table::new(&[
        "s_m",
        "z0_m",
        "mean_lagrangian_m_per_s",
        "mean_eulerian_m_per_s",
        "stokes_m_per_s",
        "err_m_per_s",
    ]);
    for r in &reports {
        table.push(vec![
            fmt_num(r.s),
            fmt_num(r.z0),
            fmt_num(r.mean_lagrangian),
            fmt_num(r.mean_eulerian.value),
            fmt_num(r.stokes_drift),
            fmt_num(r.mean_eulerian.error_estimate),
        ]);
    }
    ctx.write("stokes.csv", &table, out)?;
    Ok(Exit::Success)
}

fn flux(ctx: &Context, out: &mut dyn Write) -> Outcome {
    let cfg = &ctx.config;
    let g = &ctx.scenario.grids;
    let flux_tol = ctx.tol / cfg.k();
    let stations = ctx.scenario.stations();
    let cases: Vec<_> = stations
        .iter()
        .flat_map(|&st| g.s.iter().flat_map(move |&s| g.r_tilde.iter().map(move |&r| (st, s, r))))
        .collect();
    let results = sweep::map(&cases, |&(st, s, r_lower)| {
        let req = FluxRequest { x0: st.x0(ctx.t, cfg), s, t: ctx.t, r_lower, r_upper: None };
        Ok::<_, Error>((truncated_flux(&req, cfg, flux_tol)?, flux_sign_condition(r_lower, s, cfg)?))
    });
    let mut table = Table::new(&[
        "station",
        "s_m",
        "r_lower_m",
        "value_m2_per_s",
        "err_m2_per_s",
        "regime",
    ]);
    for (&(st, s, r_lower), r) in cases.iter().zip(results) {
        let (q, regime) = r?;
        table.push(vec![
            st.to_string(),
            fmt_num(s),
            fmt_num(r_lower),
            fmt_num(q.value),
            fmt_num(q.error_estimate),
            regime.to_string(),
        ]);
    }
    ctx.write("flux.csv", &table, out)?;

    let s = g.s[0];
    let mut depth_table = Table::new(&["station", "s_m", "depth_m", "value_m2_per_s", "err_m2_per_s"]);
    let depths = ctx.scenario.depths();
    for &st in &stations {
        let x0 = st.x0(ctx.t, cfg);
        if cfg.c0() == 0.0 {
            let depth = 10.0 * cfg.wavelength();
            let avg = period_averaged_flux(x0, s, cfg, depth, flux_tol)?;
            let _ = writeln!(
                out,
                "{st}: period-averaged flux above depth {depth} m = {:e} m^2/s (quadrature error {:e}, truncation bound {:e})",
                avg.value, avg.error_estimate, avg.truncation_bound
            );
        }
        let fit = full_flux_divergence(x0, s, ctx.t, cfg, &depths, flux_tol)?;
        for (d, q) in &fit.samples {
            depth_table.push(vec![st.to_string(), fmt_num(s), fmt_num(*d), fmt_num(q.value), fmt_num(q.error_estimate)]);
        }
        let _ = writeln!(out, "{st}: d(flux)/d(depth) = {:e} m/s (-c0 = {:e} m/s)", fit.slope, -cfg.c0());
    }
    ctx.write("flux_depth.csv", &depth_table, out)?;
    Ok(Exit::Success)
}

fn trajectory(ctx: &Context, out: &mut dyn Write) -> Outcome {
    let cfg = &ctx.config;
    let tr = &ctx.scenario.trajectory;
    let period = cfg.period();
    let start = EulerianQuery::new(tr.x, tr.z, tr.s, ctx.t);
    let path = integrate_particle(&start, ctx.t + tr.periods * period, period / tr.steps_per_period as f64, cfg)?;
    let mut table = Table::new(&["t_s", "x_m", "z_m", "u_m_per_s", "w_m_per_s", "displacement_m"]);
    let x_start = path.samples[0].x;
    for p in &path.samples {
        table.push(vec![
            fmt_num(p.t),
            fmt_num(p.x),
            fmt_num(p.z),
            fmt_num(p.u),
            fmt_num(p.w),
            fmt_num(p.x - x_start),
        ]);
    }
    let _ = writeln!(
        out,
        "displacement after {} periods: {:e} m (-c0 T per period = {:e} m)",
        tr.periods,
        path.displacement(),
        -cfg.c0() * period
    );
    ctx.write("trajectory.csv", &table, out)?;
    Ok(Exit::Success)
}

fn check(common: &Common, mutate: Option<Mutation>, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let scenario = load(common, err)?;
    let quad_rel = common.tol.unwrap_or(scenario.tolerances.quad_rel);
    if !(quad_rel > 0.0) {
        return Err(Error::InvalidParameter { name: "tol", reason: format!("must be positive, got {quad_rel}") }.into());
    }
    let opts = CheckOptions {
        seed: common.seed.unwrap_or(0),
        quad_rel,
        tol_scale: quad_rel / DEFAULT_REL_TOL,
        mutation: mutate,
    };
    let report = run_checks(&scenario, opts)?;
    let _ = writeln!(out, "seed = {}", report.seed);
    for o in &report.outcomes {
        let _ = writeln!(out, "{o}");
    }
    let failed = report.failures().count();
    let _ = writeln!(out, "{} of {} invariants passed", report.outcomes.len() - failed, report.outcomes.len());
    if let Some(dir) = &common.out {
        let path = Path::new(dir).join("check.csv");
        report.to_table().write_file(&path)?;
        let _ = writeln!(out, "wrote {}", path.display());
    }
    Ok(if failed == 0 { Exit::Success } else { Exit::Validation })
}
