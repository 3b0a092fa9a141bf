//! Parameters and closed-form parts of the wave: dispersion, latitudinal
//! decay, flow map, velocity and Jacobian.
//!
//! Notation used throughout the crate: for a label `(q, r, s)` at time `t`,
//! `xi = k (r - f(s))` and `theta = k (q - c t)`. The flow map is
//!
//! ```text
//! x = q - c0 t - exp(xi) sin(theta) / k
//! y = s
//! z = r + exp(xi) cos(theta) / k
//! ```
//!
//! and is only admissible for `xi < 0`.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Planetary constants entering the equatorial beta-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Earth's angular speed, rad/s.
    pub omega: f64,
    /// Gravitational acceleration, m/s².
    pub g: f64,
    /// Earth radius, m.
    pub earth_radius: f64,
    /// Beta-plane parameter 2Ω/R, 1/(m·s).
    pub beta: f64,
}

impl PhysicalConstants {
    pub const OMEGA: f64 = 7.3e-5;
    pub const G: f64 = 9.8;
    pub const EARTH_RADIUS: f64 = 6.378e6;
    /// Rounded beta quoted alongside the constants above.
    pub const BETA_ROUNDED: f64 = 2.28e-11;
    /// Relative mismatch between a supplied beta and 2Ω/R that triggers a warning.
    pub const BETA_WARN_RELATIVE: f64 = 0.01;

    /// Default equatorial constants, with beta recomputed from Ω and R.
    pub fn equatorial() -> Self {
        Self::new(Self::OMEGA, Self::G, Self::EARTH_RADIUS).expect("default constants are positive")
    }

    pub fn new(omega: f64, g: f64, earth_radius: f64) -> Result<Self> {
        let c = Self { omega, g, earth_radius, beta: 2.0 * omega / earth_radius };
        c.check_positive()?;
        Ok(c)
    }

    /// Constants with a user-supplied beta. Beta is always recomputed as
    /// 2Ω/R; a warning is returned when the supplied value differs from it
    /// by more than [`Self::BETA_WARN_RELATIVE`].
    pub fn with_supplied_beta(
        omega: f64,
        g: f64,
        earth_radius: f64,
        supplied_beta: f64,
    ) -> Result<(Self, Option<BetaWarning>)> {
        let c = Self::new(omega, g, earth_radius)?;
        let rel = (supplied_beta - c.beta).abs() / c.beta;
        let warning = (rel > Self::BETA_WARN_RELATIVE)
            .then_some(BetaWarning { supplied: supplied_beta, recomputed: c.beta });
        Ok((c, warning))
    }

    fn check_positive(&self) -> Result<()> {
        for (name, v) in [
            ("omega", self.omega),
            ("g", self.g),
            ("earth_radius", self.earth_radius),
            ("beta", self.beta),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter { name, reason: format!("must be positive, got {v}") });
            }
        }
        Ok(())
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::equatorial()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaWarning {
    pub supplied: f64,
    pub recomputed: f64,
}

impl fmt::Display for BetaWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "supplied beta {:e} differs from 2*omega/R = {:e} by more than 1%; using the recomputed value",
            self.supplied, self.recomputed
        )
    }
}

/// A constraint a [`WaveConfig`] fails to satisfy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Violation {
    NonpositiveWavenumber { k: f64 },
    ReferenceLabelNotNegative { r0: f64 },
    GammaNonpositive { gamma: f64 },
    PhaseSpeedNotPositive { c: f64 },
    /// An adverse current must satisfy `c0 < c exp(2 k r0)`.
    CurrentBoundFails { c0: f64, bound: f64 },
    NonpositiveConstant { name: &'static str, value: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::NonpositiveWavenumber { k } => write!(f, "wavenumber k = {k} is not positive"),
            Violation::ReferenceLabelNotNegative { r0 } => {
                write!(f, "reference label r0 = {r0} m is not negative")
            }
            Violation::GammaNonpositive { gamma } => {
                write!(f, "gamma nonpositive: 2*omega*c0 + g = {gamma} m/s^2")
            }
            Violation::PhaseSpeedNotPositive { c } => write!(f, "phase speed c = {c} m/s is not positive"),
            Violation::CurrentBoundFails { c0, bound } => write!(
                f,
                "current bound c0 < c*exp(2*k*r0) fails: c0 = {c0} m/s, c*exp(2*k*r0) = {bound} m/s"
            ),
            Violation::NonpositiveConstant { name, value } => {
                write!(f, "constant {name} = {value} is not positive")
            }
        }
    }
}

/// Wave and current parameters with the derived modified gravity and phase
/// speed. Both derived values are computed once, here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveConfig {
    wavelength: f64,
    k: f64,
    c0: f64,
    r0: f64,
    constants: PhysicalConstants,
    gamma: f64,
    c: f64,
}

impl WaveConfig {
    /// Build and validate a configuration.
    pub fn new(wavelength: f64, c0: f64, r0: f64, constants: PhysicalConstants) -> Result<Self> {
        let cfg = Self::unchecked(wavelength, c0, r0, constants);
        let violations = cfg.validate();
        if violations.is_empty() {
            Ok(cfg)
        } else {
            Err(Error::InvalidConfig(violations.iter().map(ToString::to_string).collect()))
        }
    }

    /// Build without validation; derived values may be meaningless. Use
    /// [`WaveConfig::validate`] to list what is wrong.
    pub fn unchecked(wavelength: f64, c0: f64, r0: f64, constants: PhysicalConstants) -> Self {
        let k = TAU / wavelength;
        let gamma = 2.0 * constants.omega * c0 + constants.g;
        let c = dispersion(k, gamma, constants.omega);
        Self { wavelength, k, c0, r0, constants, gamma, c }
    }

    /// Same wave with a different current; derived values are recomputed.
    pub fn with_current(&self, c0: f64) -> Result<Self> {
        Self::new(self.wavelength, c0, self.r0, self.constants)
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_config(self)
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }
    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn c0(&self) -> f64 {
        self.c0
    }
    pub fn r0(&self) -> f64 {
        self.r0
    }
    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    /// Wave period L / c.
    pub fn period(&self) -> f64 {
        self.wavelength / self.c
    }
    /// Upper bound on an adverse current, `c exp(2 k r0)`.
    pub fn current_bound(&self) -> f64 {
        self.c * (2.0 * self.k * self.r0).exp()
    }

    /// Latitudinal decay `f(s) = c beta s² / (2 gamma)`.
    pub fn decay_f(&self, s: f64) -> f64 {
        decay(s, self.c, self.constants.beta, self.gamma)
    }

    /// `df/ds`.
    pub fn decay_f_slope(&self, s: f64) -> f64 {
        self.c * self.constants.beta * s / self.gamma
    }

    /// `xi = k (r - f(s))`.
    pub fn xi(&self, r: f64, s: f64) -> f64 {
        self.k * (r - self.decay_f(s))
    }

    /// `theta = k (q - c t)`.
    pub fn theta(&self, q: f64, t: f64) -> f64 {
        self.k * (q - self.c * t)
    }

    pub(crate) fn wave_terms(&self, label: &LagrangianLabel, t: f64) -> Result<WaveTerms> {
        let xi = self.xi(label.r, label.s);
        if !(xi < 0.0) {
            return Err(Error::OutsideDomain { xi });
        }
        let (sin, cos) = self.theta(label.q, t).sin_cos();
        Ok(WaveTerms { xi, amp: xi.exp(), sin, cos })
    }
}

/// Per-call quantities `exp(xi)`, `sin(theta)`, `cos(theta)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct WaveTerms {
    pub xi: f64,
    pub amp: f64,
    pub sin: f64,
    pub cos: f64,
}

/// Labels identifying a fluid particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagrangianLabel {
    pub q: f64,
    pub r: f64,
    pub s: f64,
}

impl LagrangianLabel {
    pub fn new(q: f64, r: f64, s: f64) -> Self {
        Self { q, r, s }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Velocity {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

/// Eulerian position and velocity of one particle or field point at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowSample {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub t: f64,
}

/// Jacobian of the flow map.
///
/// Laid out as `entries[i][j] = d(x, y, z)[j] / d(q, s, r)[i]`: each row is
/// the derivative of the position with respect to one label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian {
    pub entries: [[f64; 3]; 3],
    /// Closed form `1 - exp(2 xi)`.
    pub determinant: f64,
}

impl Jacobian {
    /// Determinant of `entries` by cofactor expansion along the middle column.
    pub fn numeric_determinant(&self) -> f64 {
        det3(&self.entries)
    }
}

pub(crate) fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Modified gravity `gamma = 2 Ω c0 + g`.
pub fn modified_gravity(c0: f64, constants: &PhysicalConstants) -> Result<f64> {
    let gamma = 2.0 * constants.omega * c0 + constants.g;
    if gamma > 0.0 {
        Ok(gamma)
    } else {
        Err(Error::GammaNonpositive { c0, gamma })
    }
}

/// Phase speed from the dispersion relation `k c² + 2 Ω c - gamma = 0`,
/// positive root.
pub fn phase_speed(k: f64, gamma: f64, constants: &PhysicalConstants) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::InvalidParameter { name: "k", reason: format!("must be positive, got {k}") });
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: format!("must be positive, got {gamma}"),
        });
    }
    Ok(dispersion(k, gamma, constants.omega))
}

// (sqrt(Ω² + kγ) - Ω)/k, rationalised to avoid cancellation.
fn dispersion(k: f64, gamma: f64, omega: f64) -> f64 {
    let root = (omega * omega + k * gamma).sqrt();
    gamma / (root + omega)
}

/// `f(s) = c beta s² / (2 gamma)`.
pub fn decay(s: f64, c: f64, beta: f64, gamma: f64) -> f64 {
    c * beta * s * s / (2.0 * gamma)
}

pub fn decay_f(s: f64, config: &WaveConfig) -> f64 {
    config.decay_f(s)
}

/// Eulerian position of `label` at time `t`.
pub fn label_to_position(label: &LagrangianLabel, t: f64, config: &WaveConfig) -> Result<Position> {
    let w = config.wave_terms(label, t)?;
    let a = w.amp / config.k;
    Ok(Position { x: label.q - config.c0 * t - a * w.sin, y: label.s, z: label.r + a * w.cos })
}

/// Velocity of the particle `label` at time `t`.
pub fn label_velocity(label: &LagrangianLabel, t: f64, config: &WaveConfig) -> Result<Velocity> {
    let w = config.wave_terms(label, t)?;
    Ok(Velocity { u: config.c * w.amp * w.cos - config.c0, v: 0.0, w: config.c * w.amp * w.sin })
}

pub fn flow_sample(label: &LagrangianLabel, t: f64, config: &WaveConfig) -> Result<FlowSample> {
    let p = label_to_position(label, t, config)?;
    let v = label_velocity(label, t, config)?;
    Ok(FlowSample { x: p.x, y: p.y, z: p.z, u: v.u, v: v.v, w: v.w, t })
}

pub fn jacobian(label: &LagrangianLabel, t: f64, config: &WaveConfig) -> Result<Jacobian> {
    let w = config.wave_terms(label, t)?;
    let fs = config.decay_f_slope(label.s);
    let (ec, es) = (w.amp * w.cos, w.amp * w.sin);
    Ok(Jacobian {
        entries: [[1.0 - ec, 0.0, -es], [fs * es, 1.0, -fs * ec], [-es, 0.0, 1.0 + ec]],
        determinant: -(2.0 * w.xi).exp_m1(),
    })
}

/// Every constraint the configuration violates; empty iff it is admissible.
pub fn validate_config(config: &WaveConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    let pc = &config.constants;
    for (name, value) in [("omega", pc.omega), ("g", pc.g), ("earth_radius", pc.earth_radius), ("beta", pc.beta)]
    {
        if !(value > 0.0) {
            out.push(Violation::NonpositiveConstant { name, value });
        }
    }
    if !(config.k > 0.0 && config.k.is_finite()) {
        out.push(Violation::NonpositiveWavenumber { k: config.k });
    }
    if !(config.r0 < 0.0) {
        out.push(Violation::ReferenceLabelNotNegative { r0: config.r0 });
    }
    if !(config.gamma > 0.0) {
        out.push(Violation::GammaNonpositive { gamma: config.gamma });
    }
    if !(config.c > 0.0) {
        out.push(Violation::PhaseSpeedNotPositive { c: config.c });
    }
    if config.c0 > 0.0 && !(config.c0 < config.current_bound()) {
        out.push(Violation::CurrentBoundFails { c0: config.c0, bound: config.current_bound() });
    }
    out
}
