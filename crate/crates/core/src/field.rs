//! Eulerian field reconstruction by inverting the flow map.
//!
//! At a fixed latitude the map `(q, r) -> (x, z)` has the Jacobian block
//!
//! ```text
//! | 1 - e cos   -e sin   |
//! | -e sin      1 + e cos |      det = 1 - e²,  e = exp(xi) < 1
//! ```
//!
//! so Newton steps are always well defined in the admissible domain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::surface_label;
use crate::mass_transport::FixedStation;
use crate::model::{label_to_position, label_velocity, FlowSample, LagrangianLabel, WaveConfig};
use crate::roots::bisect;

/// Points up to this many `1/k` above the surface label still count as on
/// the surface.
pub const SURFACE_SLACK: f64 = 1e-9;

/// Tolerance, in `1/k`, for a trajectory step to count as crossing the surface.
pub const TRAJECTORY_SLACK: f64 = 1e-6;

const NEWTON_MAX_ITER: usize = 100;

/// A fixed Eulerian point at latitude `s` and time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerianQuery {
    pub x: f64,
    pub z: f64,
    pub s: f64,
    pub t: f64,
}

impl EulerianQuery {
    pub fn new(x: f64, z: f64, s: f64, t: f64) -> Self {
        Self { x, z, s, t }
    }
}

/// Velocity in the zonal-vertical plane; the meridional component is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneVelocity {
    pub u: f64,
    pub w: f64,
}

/// Field sampler for one latitude, with the surface label precomputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Field {
    config: WaveConfig,
    s: f64,
    f: f64,
    surface: f64,
}

impl Field {
    pub fn new(config: &WaveConfig, s: f64) -> Result<Self> {
        Ok(Self { config: *config, s, f: config.decay_f(s), surface: surface_label(s, config)? })
    }

    pub fn surface_label(&self) -> f64 {
        self.surface
    }

    /// Labels `(q, r)` of the particle at `(x, z)` at time `t`.
    pub fn invert(&self, x: f64, z: f64, t: f64) -> Result<LagrangianLabel> {
        let label = self.invert_extended(x, z, t)?;
        if label.r > self.surface + SURFACE_SLACK / self.config.k() {
            return Err(Error::AboveSurface { x, z, r: label.r, surface: self.surface });
        }
        Ok(label)
    }

    /// Inversion on the analytic extension of the map: only `xi < 0` is
    /// required, the point may lie above the free surface.
    fn invert_extended(&self, x: f64, z: f64, t: f64) -> Result<LagrangianLabel> {
        match self.newton(x, z, t) {
            Some(l) => Ok(l),
            None => self.column_solve(x, z, t),
        }
    }

    fn residual(&self, q: f64, r: f64, x: f64, z: f64, t: f64) -> (f64, f64, f64, f64, f64) {
        let k = self.config.k();
        let e = (k * (r - self.f)).exp();
        let (sin, cos) = self.config.theta(q, t).sin_cos();
        let fx = q - self.config.c0() * t - e * sin / k - x;
        let fz = r + e * cos / k - z;
        (fx, fz, e, sin, cos)
    }

    fn newton(&self, x: f64, z: f64, t: f64) -> Option<LagrangianLabel> {
        let k = self.config.k();
        let scale = (1.0 / k).max(z.abs());
        let target = 1e-13 * scale + 4.0 * f64::EPSILON * x.abs();
        let accept = 1e-12 * scale + 4.0 * f64::EPSILON * x.abs();
        // the label of any point under the surface lies below the surface label
        let r_cap = self.f - SURFACE_SLACK / k;
        let mut q = x + self.config.c0() * t;
        let mut r = z.min(self.surface);
        let (mut fx, mut fz, mut e, mut sin, mut cos) = self.residual(q, r, x, z, t);
        let mut norm = fx.abs().max(fz.abs());
        for _ in 0..NEWTON_MAX_ITER {
            if norm <= target {
                break;
            }
            let det = 1.0 - e * e;
            let dq = -((1.0 + e * cos) * fx + e * sin * fz) / det;
            let dr = -(e * sin * fx + (1.0 - e * cos) * fz) / det;
            let mut step = 1.0;
            let mut improved = false;
            for _ in 0..40 {
                let (qn, rn) = (q + step * dq, r + step * dr);
                if rn < r_cap {
                    let trial = self.residual(qn, rn, x, z, t);
                    let tn = trial.0.abs().max(trial.1.abs());
                    if tn < norm {
                        (q, r) = (qn, rn);
                        (fx, fz, e, sin, cos) = trial;
                        norm = tn;
                        improved = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        (norm <= accept).then_some(LagrangianLabel::new(q, r, self.s))
    }

    // Restart: along the station x the height z(r) is strictly increasing in
    // r, so bisect on r with q = gamma(r, t) solved at each trial.
    fn column_solve(&self, x: f64, z: f64, t: f64) -> Result<LagrangianLabel> {
        let k = self.config.k();
        let station = FixedStation::new(&self.config, x, self.s);
        let height = |r: f64| -> Result<f64> {
            let q = station.label(r, t, None)?;
            let e = (k * (r - self.f)).exp();
            Ok(r + e * self.config.theta(q, t).cos() / k - z)
        };
        let lo = z - 1.0 / k;
        let hi = (z + 1.0 / k).min(self.f - SURFACE_SLACK / k);
        if !(lo < hi) || height(hi)? < 0.0 {
            return Err(Error::AboveSurface { x, z, r: hi, surface: self.surface });
        }
        let mut failure = None;
        let root = bisect(
            |r| match height(r) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            },
            lo,
            hi,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let root = root?;
        let q = station.label(root.x, t, None)?;
        let (fx, fz, ..) = self.residual(q, root.x, x, z, t);
        let accept = 1e-12 * (1.0 / k).max(z.abs()) + 4.0 * f64::EPSILON * x.abs();
        if fx.abs().max(fz.abs()) > accept {
            return Err(Error::NoConvergence {
                solver: "map inversion",
                iterations: NEWTON_MAX_ITER + root.iterations,
                residual: fx.abs().max(fz.abs()),
            });
        }
        Ok(LagrangianLabel::new(q, root.x, self.s))
    }

    pub fn velocity(&self, x: f64, z: f64, t: f64) -> Result<PlaneVelocity> {
        let label = self.invert(x, z, t)?;
        let v = label_velocity(&label, t, &self.config)?;
        Ok(PlaneVelocity { u: v.u, w: v.w })
    }

    fn velocity_extended(&self, x: f64, z: f64, t: f64) -> Result<(PlaneVelocity, LagrangianLabel)> {
        let label = self.invert_extended(x, z, t)?;
        let v = label_velocity(&label, t, &self.config)?;
        Ok((PlaneVelocity { u: v.u, w: v.w }, label))
    }

    /// Central-difference `u_x + w_z` with spacing `h` (`v_y` vanishes).
    pub fn divergence(&self, x: f64, z: f64, t: f64, h: f64) -> Result<f64> {
        let ue = self.velocity(x + h, z, t)?.u;
        let uw = self.velocity(x - h, z, t)?.u;
        let wu = self.velocity(x, z + h, t)?.w;
        let wd = self.velocity(x, z - h, t)?.w;
        Ok((ue - uw) / (2.0 * h) + (wu - wd) / (2.0 * h))
    }
}

pub fn invert_map(query: &EulerianQuery, config: &WaveConfig) -> Result<LagrangianLabel> {
    Field::new(config, query.s)?.invert(query.x, query.z, query.t)
}

pub fn eulerian_velocity(query: &EulerianQuery, config: &WaveConfig) -> Result<PlaneVelocity> {
    Field::new(config, query.s)?.velocity(query.x, query.z, query.t)
}

pub fn divergence(query: &EulerianQuery, config: &WaveConfig, h: f64) -> Result<f64> {
    Field::new(config, query.s)?.divergence(query.x, query.z, query.t, h)
}

/// Residual `w - (eta_t + u eta_x)` at the surface particle `q`, with the
/// surface slopes taken by central differences of the surface
/// parameterisation (spacing `h` in `q`, `h / c` in `t`).
pub fn kinematic_surface_check(q: f64, s: f64, t: f64, config: &WaveConfig, h: f64) -> Result<f64> {
    let r0s = surface_label(s, config)?;
    let at = |q: f64, t: f64| label_to_position(&LagrangianLabel::new(q, r0s, s), t, config);
    let ht = h / config.c();
    let (qp, qm) = (at(q + h, t)?, at(q - h, t)?);
    let (tp, tm) = (at(q, t + ht)?, at(q, t - ht)?);
    let x_q = (qp.x - qm.x) / (2.0 * h);
    let z_q = (qp.z - qm.z) / (2.0 * h);
    let x_t = (tp.x - tm.x) / (2.0 * ht);
    let z_t = (tp.z - tm.z) / (2.0 * ht);
    let eta_x = z_q / x_q;
    let eta_t = z_t - x_t * eta_x;
    let v = label_velocity(&LagrangianLabel::new(q, r0s, s), t, config)?;
    Ok(v.w - (eta_t + v.u * eta_x))
}

/// Integrated particle path.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<FlowSample>,
    pub dt: f64,
    /// Labels of the starting point.
    pub label: LagrangianLabel,
}

impl Trajectory {
    pub fn last(&self) -> &FlowSample {
        self.samples.last().expect("trajectory has a starting sample")
    }

    /// Zonal displacement from the start.
    pub fn displacement(&self) -> f64 {
        self.last().x - self.samples[0].x
    }
}

/// Classical fixed-step RK4 integration of `(dx/dt, dz/dt) = (u, w)` from
/// `start` to time `t1`. The step is adjusted to divide the interval evenly
/// and must not exceed `T/200`.
pub fn integrate_particle(start: &EulerianQuery, t1: f64, dt: f64, config: &WaveConfig) -> Result<Trajectory> {
    let span = t1 - start.t;
    if !(dt > 0.0 && span > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("need dt > 0 and t1 > t0, got dt = {dt}, span = {span}"),
        });
    }
    let steps = (span / dt).round().max(1.0) as usize;
    let h = span / steps as f64;
    if h > config.period() / 200.0 * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("step {h} s exceeds T/200 = {} s", config.period() / 200.0),
        });
    }
    let field = Field::new(config, start.s)?;
    let label = field.invert(start.x, start.z, start.t)?;
    let crossing = field.surface + TRAJECTORY_SLACK / config.k();

    let sample = |x: f64, z: f64, t: f64, v: PlaneVelocity| FlowSample { x, y: start.s, z, u: v.u, v: 0.0, w: v.w, t };
    let (mut x, mut z) = (start.x, start.z);
    let (mut v, _) = field.velocity_extended(x, z, start.t)?;
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(sample(x, z, start.t, v));

    for n in 0..steps {
        let t = start.t + h * n as f64;
        let k1 = v;
        let (k2, _) = field.velocity_extended(x + 0.5 * h * k1.u, z + 0.5 * h * k1.w, t + 0.5 * h)?;
        let (k3, _) = field.velocity_extended(x + 0.5 * h * k2.u, z + 0.5 * h * k2.w, t + 0.5 * h)?;
        let (k4, _) = field.velocity_extended(x + h * k3.u, z + h * k3.w, t + h)?;
        x += h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
        z += h / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
        let t_next = start.t + h * (n + 1) as f64;
        let (vn, l) = field
            .velocity_extended(x, z, t_next)
            .map_err(|_| Error::LeftDomain { t: t_next })?;
        if l.r > crossing {
            return Err(Error::LeftDomain { t: t_next });
        }
        v = vn;
        samples.push(sample(x, z, t_next, v));
    }
    Ok(Trajectory { samples, dt: h, label })
}
