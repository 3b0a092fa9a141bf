//! Mean Lagrangian and Eulerian velocities, Stokes drift, and the estimates
//! that fix the direction of the mean Eulerian flow.
//!
//! Eulerian means are averages over one wavelength at a fixed depth `z0`
//! below the trough, rewritten in labels along the curve `r = R(q)`:
//!
//! ```text
//! <u>_E = -c <exp(2 xi)> - c0 <(1 - exp(2 xi)) / (1 + exp(xi) cos theta)>
//! ```
//!
//! where `<.>` is the mean over `q` in `[0, L]`.

use crate::error::{Error, Result};
use crate::geometry::DepthColumn;
use crate::model::WaveConfig;
use crate::quad::{integrate_vec, QuadOptions, QuadResult};

/// Default quadrature tolerance, relative to the phase speed.
pub const DEFAULT_REL_TOL: f64 = 1e-10;

/// Nodes of the initial scan for the direction-condition extrema.
pub const EXTREMUM_GRID: usize = 256;

/// Wavelength means along one fixed-depth curve, sharing one node set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnMeans {
    /// `<exp(2 xi)>`.
    pub wave: f64,
    /// `<(1 - exp(2 xi)) / (1 + exp(xi) cos theta)>`.
    pub transport: f64,
    /// The transport integrand with `cos theta` replaced by `+1`.
    pub transport_crest: f64,
    /// The transport integrand with `cos theta` replaced by `-1`.
    pub transport_trough: f64,
    pub errors: [f64; 4],
    pub nodes: usize,
}

/// Integrate the four column means at time `t` with per-component absolute
/// tolerances.
pub fn column_means(column: &DepthColumn, t: f64, tol: [f64; 4]) -> Result<ColumnMeans> {
    let cfg = column.config();
    let l = cfg.wavelength();
    let mut warm = None;
    let r = integrate_vec(
        |q| {
            let r = column.label(q, t, warm)?;
            warm = Some(r);
            let e = column.amplitude(r);
            let cos = cfg.theta(q, t).cos();
            let e2 = e * e;
            Ok([e2 / l, (1.0 - e2) / (1.0 + e * cos) / l, (1.0 - e) / l, (1.0 + e) / l])
        },
        0.0,
        l,
        tol,
        QuadOptions::default(),
    )?;
    Ok(ColumnMeans {
        wave: r.values[0],
        transport: r.values[1],
        transport_crest: r.values[2],
        transport_trough: r.values[3],
        errors: r.errors,
        nodes: r.nodes,
    })
}

// Split an absolute tolerance on `-c A - c0 B` between the two means.
fn split_tol(config: &WaveConfig, tol: f64) -> [f64; 4] {
    let a = tol / (2.0 * config.c());
    let b = tol / (2.0 * config.c0().abs());
    [a, b, b, b]
}

/// Mean Lagrangian velocity: `-c0`, independent of position and latitude.
pub fn mean_lagrangian(config: &WaveConfig) -> f64 {
    -config.c0()
}

fn eulerian_from(config: &WaveConfig, m: &ColumnMeans) -> QuadResult {
    QuadResult {
        value: -config.c() * m.wave - config.c0() * m.transport,
        error_estimate: config.c() * m.errors[0] + config.c0().abs() * m.errors[1],
        nodes: m.nodes,
    }
}

/// Mean Eulerian velocity at latitude `s` and depth `z0`, with the phase
/// evaluated at time `t`; `tol` is absolute (m/s).
pub fn mean_eulerian(s: f64, z0: f64, t: f64, config: &WaveConfig, tol: f64) -> Result<QuadResult> {
    let column = DepthColumn::new(config, s, z0)?;
    let m = column_means(&column, t, split_tol(config, tol))?;
    Ok(eulerian_from(config, &m))
}

/// Stokes drift `<u>_L - <u>_E`.
pub fn stokes_drift(s: f64, z0: f64, config: &WaveConfig, tol: f64) -> Result<f64> {
    Ok(mean_lagrangian(config) - mean_eulerian(s, z0, 0.0, config, tol)?.value)
}

/// Bounds on the mean Eulerian velocity obtained by replacing `cos theta`
/// with `±1` in the transport integrand, plus the global range valid for an
/// adverse current.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerianBounds {
    pub lower: f64,
    pub upper: f64,
    /// `-c (1 - exp(3 k r0)) / (1 - exp(k r0))`.
    pub range_lower: f64,
    pub range_upper: f64,
}

fn bounds_from(config: &WaveConfig, m: &ColumnMeans) -> EulerianBounds {
    let base = -config.c() * m.wave;
    let a = base - config.c0() * m.transport_crest;
    let b = base - config.c0() * m.transport_trough;
    let e = (config.k() * config.r0()).exp();
    EulerianBounds {
        lower: a.min(b),
        upper: a.max(b),
        range_lower: -config.c() * (1.0 + e + e * e),
        range_upper: 0.0,
    }
}

pub fn eulerian_bounds(s: f64, z0: f64, config: &WaveConfig, tol: f64) -> Result<EulerianBounds> {
    let column = DepthColumn::new(config, s, z0)?;
    let m = column_means(&column, 0.0, split_tol(config, tol))?;
    Ok(bounds_from(config, &m))
}

/// Threshold on `c0` from one of the direction conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionThreshold {
    /// Current (m/s) the condition compares `c0` against.
    pub threshold: f64,
    /// Extremum of the dimensionless ratio at the crest or trough phase.
    pub analytic_extremum: f64,
    /// Same extremum located by grid scan and golden-section refinement.
    pub grid_extremum: f64,
}

#[derive(Clone, Copy)]
enum Extremum {
    Min,
    Max,
}

fn ratio_extremum(
    column: &DepthColumn,
    ratio: impl Fn(f64) -> f64,
    kind: Extremum,
) -> Result<(f64, f64)> {
    let l = column.config().wavelength();
    let (r_min, r_max) = column.extremes()?;
    // the ratios are increasing in exp(xi), so the extremes sit at the
    // extremes of R
    let analytic = match kind {
        Extremum::Min => ratio(column.amplitude(r_min)),
        Extremum::Max => ratio(column.amplitude(r_max)),
    };

    let sign = match kind {
        Extremum::Min => 1.0,
        Extremum::Max => -1.0,
    };
    let objective = |q: f64| -> Result<f64> {
        let r = column.label(q, 0.0, None)?;
        Ok(sign * ratio(column.amplitude(r)))
    };
    let h = l / EXTREMUM_GRID as f64;
    let mut best = (0usize, f64::INFINITY);
    for i in 0..EXTREMUM_GRID {
        let v = objective(h * i as f64)?;
        if v < best.1 {
            best = (i, v);
        }
    }
    let centre = h * best.0 as f64;
    let grid = sign * golden_min(&objective, centre - h, centre + h, 1e-10 * l)?;

    if (grid - analytic).abs() > 1e-10 * analytic.abs().max(1.0) {
        return Err(Error::NoConvergence {
            solver: "extremum scan",
            iterations: EXTREMUM_GRID,
            residual: (grid - analytic).abs(),
        });
    }
    Ok((analytic, grid))
}

fn golden_min(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, width: f64) -> Result<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    let mut best = fc.min(fd);
    while b - a > width {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
        best = best.min(fc).min(fd);
    }
    Ok(best)
}

/// Threshold `-c min_q exp(2 xi)(1 - exp(xi))/(1 - exp(2 xi))`; the mean
/// Eulerian flow is westward whenever `c0` exceeds it.
pub fn westward_threshold(column: &DepthColumn) -> Result<DirectionThreshold> {
    let (analytic, grid) = ratio_extremum(column, |e| e * e * (1.0 - e) / (1.0 - e * e), Extremum::Min)?;
    let c = column.config().c();
    Ok(DirectionThreshold { threshold: -c * analytic, analytic_extremum: analytic, grid_extremum: grid })
}

/// Threshold `-c max_q exp(2 xi)(1 + exp(xi))/(1 - exp(2 xi))`; the mean
/// Eulerian flow is eastward whenever `c0` is below it.
pub fn eastward_threshold(column: &DepthColumn) -> Result<DirectionThreshold> {
    let (analytic, grid) = ratio_extremum(column, |e| e * e * (1.0 + e) / (1.0 - e * e), Extremum::Max)?;
    let c = column.config().c();
    Ok(DirectionThreshold { threshold: -c * analytic, analytic_extremum: analytic, grid_extremum: grid })
}

pub fn westward_sufficient(s: f64, z0: f64, config: &WaveConfig) -> Result<bool> {
    let column = DepthColumn::new(config, s, z0)?;
    Ok(config.c0() > westward_threshold(&column)?.threshold)
}

pub fn eastward_sufficient(s: f64, z0: f64, config: &WaveConfig) -> Result<bool> {
    let column = DepthColumn::new(config, s, z0)?;
    Ok(config.c0() < eastward_threshold(&column)?.threshold)
}

/// Everything about the mean flow at one `(s, z0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFlowReport {
    pub s: f64,
    pub z0: f64,
    pub t: f64,
    pub mean_lagrangian: f64,
    pub mean_eulerian: QuadResult,
    pub stokes_drift: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub range_lower: f64,
    pub westward_threshold: f64,
    pub eastward_threshold: f64,
    pub westward_sufficient: bool,
    pub eastward_sufficient: bool,
}

pub fn mean_flow_report(s: f64, z0: f64, t: f64, config: &WaveConfig, tol: f64) -> Result<MeanFlowReport> {
    let column = DepthColumn::new(config, s, z0)?;
    let m = column_means(&column, t, split_tol(config, tol))?;
    let eulerian = eulerian_from(config, &m);
    let bounds = bounds_from(config, &m);
    let west = westward_threshold(&column)?.threshold;
    let east = eastward_threshold(&column)?.threshold;
    let lagrangian = mean_lagrangian(config);
    Ok(MeanFlowReport {
        s,
        z0,
        t,
        mean_lagrangian: lagrangian,
        mean_eulerian: eulerian,
        stokes_drift: lagrangian - eulerian.value,
        lower_bound: bounds.lower,
        upper_bound: bounds.upper,
        range_lower: bounds.range_lower,
        westward_threshold: west,
        eastward_threshold: east,
        westward_sufficient: config.c0() > west,
        eastward_sufficient: config.c0() < east,
    })
}
