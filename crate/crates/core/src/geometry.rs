//! Implicit geometry: free-surface label, trapping region, crest and trough
//! levels, and the label curve `r = R(q)` of a fixed depth `z0`.

use crate::error::{Error, Result};
use crate::model::{LagrangianLabel, WaveConfig};
use crate::roots::{bisect, newton_bracketed, RootOptions};

/// Latitudes at which the free-surface equation has a solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrappingRegion {
    AllLatitudes,
    /// `|s| < s_max`.
    Finite { s_max: f64 },
}

impl TrappingRegion {
    pub fn contains(&self, s: f64) -> bool {
        match *self {
            TrappingRegion::AllLatitudes => s.is_finite(),
            TrappingRegion::Finite { s_max } => s.abs() < s_max,
        }
    }

    pub fn s_max(&self) -> Option<f64> {
        match *self {
            TrappingRegion::AllLatitudes => None,
            TrappingRegion::Finite { s_max } => Some(s_max),
        }
    }
}

impl std::fmt::Display for TrappingRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TrappingRegion::AllLatitudes => write!(f, "all-latitudes"),
            TrappingRegion::Finite { s_max } => write!(f, "finite (|s| < {s_max} m)"),
        }
    }
}

/// Left side minus right side of the existence condition
///
/// ```text
/// exp(2k(r0 - f(s)))/(2k) + c0 beta s²/(2 gamma) < exp(2 k r0)/(2k)
/// ```
///
/// Negative exactly where a surface label exists (for `s != 0`).
pub fn trapping_margin(s: f64, config: &WaveConfig) -> f64 {
    let k = config.k();
    let f = config.decay_f(s);
    let current = config.c0() * config.constants().beta * s * s / (2.0 * config.gamma());
    (2.0 * k * config.r0()).exp() * (-2.0 * k * f).exp_m1() / (2.0 * k) + current
}

/// Trapping region of the configuration. For an adverse current the edge
/// `s_max` is found by geometric bracket growth from 1 m followed by
/// bisection down to adjacent floats.
pub fn trapping_region(config: &WaveConfig) -> Result<TrappingRegion> {
    if config.c0() <= 0.0 {
        return Ok(TrappingRegion::AllLatitudes);
    }
    let margin = |s: f64| trapping_margin(s, config);
    let (mut lo, mut hi) = (0.0, 1.0);
    if margin(hi) >= 0.0 {
        // edge closer than 1 m: shrink until inside
        let mut inner = hi;
        for _ in 0..1100 {
            inner *= 0.5;
            if margin(inner) < 0.0 {
                break;
            }
        }
        if !(margin(inner) < 0.0) {
            return Err(Error::NoBracket { lo: 0.0, hi, flo: margin(inner), fhi: margin(hi) });
        }
        lo = inner;
    } else {
        let mut grown = 0;
        while margin(hi) < 0.0 {
            lo = hi;
            hi *= 2.0;
            grown += 1;
            if grown > 1100 || !hi.is_finite() {
                return Err(Error::NoBracket { lo, hi, flo: margin(lo), fhi: margin(hi) });
            }
        }
    }
    let root = bisect(margin, lo, hi)?;
    // classify the returned edge as outside: pick the smallest float with
    // margin >= 0
    let mut s_max = root.x;
    for _ in 0..64 {
        if margin(s_max) >= 0.0 {
            break;
        }
        s_max = next_up(s_max);
    }
    Ok(TrappingRegion::Finite { s_max })
}

fn next_up(x: f64) -> f64 {
    f64::from_bits(x.to_bits() + 1)
}

/// Surface label `r0(s)`: the unique root below `r0` of
///
/// ```text
/// exp(2k(r - f(s)))/(2k) - r + c0 beta s²/(2 gamma) - exp(2 k r0)/(2k) + r0 = 0.
/// ```
pub fn surface_label(s: f64, config: &WaveConfig) -> Result<f64> {
    let f = config.decay_f(s);
    let r0 = config.r0();
    if f == 0.0 {
        return Ok(r0);
    }
    let margin = trapping_margin(s, config);
    if !(margin < 0.0) {
        return Err(Error::OutsideTrappingRegion { s });
    }
    let k = config.k();
    let current = config.c0() * config.constants().beta * s * s / (2.0 * config.gamma());
    let e0 = (2.0 * k * r0).exp();
    let residual = |r: f64| {
        let e = (2.0 * k * (r - f)).exp();
        ((e - e0) / (2.0 * k) - (r - r0) + current, e - 1.0)
    };
    // residual(r0) = margin < 0 and the residual decreases in r below f
    let mut depth = 10.0 / k;
    let mut lo = r0 - depth;
    let mut tries = 0;
    while residual(lo).0 <= 0.0 {
        depth *= 2.0;
        lo = r0 - depth;
        tries += 1;
        if tries > 60 {
            return Err(Error::NoBracket { lo, hi: r0, flo: residual(lo).0, fhi: margin });
        }
    }
    let opts = RootOptions::with_residual_tol(1e-12 * r0.abs().max(1.0));
    Ok(newton_bracketed(residual, lo, r0, None, opts)?.x)
}

/// Free-surface levels at one latitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceLevels {
    pub s: f64,
    pub surface_label: f64,
    pub z_plus: f64,
    pub z_minus: f64,
}

impl SurfaceLevels {
    pub fn new(s: f64, config: &WaveConfig) -> Result<Self> {
        let r0s = surface_label(s, config)?;
        let half = config.xi(r0s, s).exp() / config.k();
        Ok(Self { s, surface_label: r0s, z_plus: r0s + half, z_minus: r0s - half })
    }

    pub fn wave_height(&self) -> f64 {
        self.z_plus - self.z_minus
    }
}

/// Crest and trough levels `(z_plus, z_minus)` at latitude `s`.
pub fn crest_trough(s: f64, config: &WaveConfig) -> Result<(f64, f64)> {
    let l = SurfaceLevels::new(s, config)?;
    Ok((l.z_plus, l.z_minus))
}

/// Point `(x, eta)` of the free surface traced by label `q` at latitude `s`.
pub fn surface_elevation(q: f64, s: f64, t: f64, config: &WaveConfig) -> Result<(f64, f64)> {
    let r0s = surface_label(s, config)?;
    surface_point(q, s, r0s, t, config)
}

fn surface_point(q: f64, s: f64, r0s: f64, t: f64, config: &WaveConfig) -> Result<(f64, f64)> {
    let p = crate::model::label_to_position(&LagrangianLabel::new(q, r0s, s), t, config)?;
    Ok((p.x, p.z))
}

/// Sampled free surface at one latitude and time.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceProfile {
    pub s: f64,
    pub t: f64,
    pub surface_label: f64,
    pub z_plus: f64,
    pub z_minus: f64,
    /// `(q, x, eta)` for `q` evenly spaced over one wavelength.
    pub samples: Vec<(f64, f64, f64)>,
}

pub fn surface_profile(s: f64, t: f64, n: usize, config: &WaveConfig) -> Result<SurfaceProfile> {
    let levels = SurfaceLevels::new(s, config)?;
    let l = config.wavelength();
    let samples = (0..n)
        .map(|i| {
            let q = l * i as f64 / n as f64;
            surface_point(q, s, levels.surface_label, t, config).map(|(x, eta)| (q, x, eta))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SurfaceProfile {
        s,
        t,
        surface_label: levels.surface_label,
        z_plus: levels.z_plus,
        z_minus: levels.z_minus,
        samples,
    })
}

/// The curve of labels occupying the fixed depth `z0` at latitude `s`.
///
/// For each `q` the label `R` solves `z0 = R + exp(k(R - f)) cos(theta)/k`.
/// The right side is strictly increasing in `R` wherever `exp(xi) < 1`, and
/// the root lies in `[z0 - 1/k, z0 + 1/k]`, below the surface label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthColumn {
    config: WaveConfig,
    s: f64,
    z0: f64,
    f: f64,
    levels: SurfaceLevels,
}

impl DepthColumn {
    pub fn new(config: &WaveConfig, s: f64, z0: f64) -> Result<Self> {
        let levels = SurfaceLevels::new(s, config)?;
        if !(z0 < levels.z_minus) {
            return Err(Error::NotBelowTrough { z0, trough: levels.z_minus });
        }
        Ok(Self { config: *config, s, z0, f: config.decay_f(s), levels })
    }

    pub fn config(&self) -> &WaveConfig {
        &self.config
    }
    pub fn s(&self) -> f64 {
        self.s
    }
    pub fn z0(&self) -> f64 {
        self.z0
    }
    pub fn decay(&self) -> f64 {
        self.f
    }
    pub fn levels(&self) -> &SurfaceLevels {
        &self.levels
    }

    /// `exp(xi(R))`.
    pub fn amplitude(&self, r: f64) -> f64 {
        (self.config.k() * (r - self.f)).exp()
    }

    /// Solve for `R(q)` at time `t`, optionally warm-started.
    pub fn label(&self, q: f64, t: f64, warm: Option<f64>) -> Result<f64> {
        let cos = self.config.theta(q, t).cos();
        self.label_for_cos(cos, warm)
    }

    fn label_for_cos(&self, cos: f64, warm: Option<f64>) -> Result<f64> {
        let k = self.config.k();
        let z0 = self.z0;
        let residual = |r: f64| {
            let ec = self.amplitude(r) * cos;
            (r + ec / k - z0, 1.0 + ec)
        };
        let lo = z0 - 1.0 / k;
        let hi = (z0 + 1.0 / k).min(self.levels.surface_label);
        let opts = RootOptions::with_residual_tol(1e-12 * z0.abs().max(1.0));
        Ok(newton_bracketed(residual, lo, hi, warm, opts)?.x)
    }

    /// `R_q = exp(xi) sin(theta) / (1 + exp(xi) cos(theta))` at a solved `R`.
    pub fn slope_at(&self, q: f64, t: f64, r: f64) -> f64 {
        let (sin, cos) = self.config.theta(q, t).sin_cos();
        let e = self.amplitude(r);
        e * sin / (1.0 + e * cos)
    }

    /// `(R_min, R_max)`: the labels at the crest phase (`cos = 1`) and the
    /// trough phase (`cos = -1`).
    pub fn extremes(&self) -> Result<(f64, f64)> {
        Ok((self.label_for_cos(1.0, None)?, self.label_for_cos(-1.0, None)?))
    }
}

/// Label `R` on the fixed-depth curve `z = z0` at label `q` and time `t`.
pub fn depth_label(q: f64, s: f64, z0: f64, t: f64, config: &WaveConfig) -> Result<f64> {
    DepthColumn::new(config, s, z0)?.label(q, t, None)
}

/// `dR/dq` on the fixed-depth curve.
pub fn depth_label_slope(q: f64, s: f64, z0: f64, t: f64, config: &WaveConfig) -> Result<f64> {
    let col = DepthColumn::new(config, s, z0)?;
    let r = col.label(q, t, None)?;
    Ok(col.slope_at(q, t, r))
}
