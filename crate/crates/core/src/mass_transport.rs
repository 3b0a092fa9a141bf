//! Vertical mass flux through a fixed Eulerian station `x = x0`.
//!
//! Along the station the label `q = gamma(r, t)` solves
//! `x0 = q - c0 t - exp(xi) sin(theta)/k`; the residual is strictly
//! increasing in `q` (slope `1 - exp(xi) cos(theta)`), so the label is unique
//! in `[x0 + c0 t - 1/k, x0 + c0 t + 1/k]`. In labels the flux density is
//!
//! ```text
//! (-c0 + c exp(xi) cos(theta)) (1 - exp(2 xi)) / (1 - exp(xi) cos(theta))
//! ```
//!
//! per unit `r`.

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::surface_label;
use crate::model::WaveConfig;
use crate::quad::{integrate, QuadOptions, QuadResult};
use crate::roots::{newton_bracketed, RootOptions};
use crate::sweep;

/// Default truncation depths for the divergence demonstration, in
/// wavelengths.
pub const DEFAULT_DEPTHS_IN_WAVELENGTHS: [f64; 4] = [5.0, 10.0, 20.0, 50.0];

/// A vertical column at a fixed Eulerian station and latitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedStation {
    config: WaveConfig,
    x0: f64,
    s: f64,
    f: f64,
}

impl FixedStation {
    pub fn new(config: &WaveConfig, x0: f64, s: f64) -> Self {
        Self { config: *config, x0, s, f: config.decay_f(s) }
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }
    pub fn s(&self) -> f64 {
        self.s
    }

    fn amplitude(&self, r: f64) -> Result<f64> {
        let xi = self.config.k() * (r - self.f);
        if !(xi < 0.0) {
            return Err(Error::OutsideDomain { xi });
        }
        Ok(xi.exp())
    }

    /// Label `q = gamma(r, t)` of the particle at the station.
    pub fn label(&self, r: f64, t: f64, warm: Option<f64>) -> Result<f64> {
        let e = self.amplitude(r)?;
        let cfg = &self.config;
        let k = cfg.k();
        let centre = self.x0 + cfg.c0() * t;
        let residual = |q: f64| {
            let (sin, cos) = cfg.theta(q, t).sin_cos();
            (q - centre - e * sin / k, 1.0 - e * cos)
        };
        let opts = RootOptions::with_residual_tol(1e-12 * cfg.wavelength().max(centre.abs()));
        Ok(newton_bracketed(residual, centre - 1.0 / k, centre + 1.0 / k, warm, opts)?.x)
    }

    fn terms(&self, r: f64, t: f64, warm: Option<f64>) -> Result<(f64, f64, f64, f64)> {
        let e = self.amplitude(r)?;
        let q = self.label(r, t, warm)?;
        let (sin, cos) = self.config.theta(q, t).sin_cos();
        Ok((q, e, sin, cos))
    }

    /// `gamma_r = exp(xi) sin(theta) / (1 - exp(xi) cos(theta))`.
    pub fn gamma_r(&self, r: f64, t: f64) -> Result<f64> {
        let (_, e, sin, cos) = self.terms(r, t, None)?;
        Ok(e * sin / (1.0 - e * cos))
    }

    /// `gamma_t = -c exp(xi) cos(theta) / (1 - exp(xi) cos(theta))`, defined
    /// for the current-free wave only.
    pub fn gamma_t(&self, r: f64, t: f64) -> Result<f64> {
        if self.config.c0() != 0.0 {
            return Err(Error::RequiresNoCurrent { op: "gamma_t", c0: self.config.c0() });
        }
        let (_, e, _, cos) = self.terms(r, t, None)?;
        Ok(-self.config.c() * e * cos / (1.0 - e * cos))
    }

    /// `dz/dr` along the station: `(1 - exp(2 xi)) / (1 - exp(xi) cos(theta))`.
    pub fn dz_dr(&self, r: f64, t: f64) -> Result<f64> {
        let (_, e, _, cos) = self.terms(r, t, None)?;
        Ok((1.0 - e * e) / (1.0 - e * cos))
    }

    /// Flux density at label depth `r`; also returns the solved `q` for warm
    /// starts.
    pub fn flux_density(&self, r: f64, t: f64, warm: Option<f64>) -> Result<(f64, f64)> {
        let (q, e, _, cos) = self.terms(r, t, warm)?;
        let c = &self.config;
        let ec = e * cos;
        Ok((q, (-c.c0() + c.c() * ec) * (1.0 - e * e) / (1.0 - ec)))
    }

    /// Flux between labels `r_lower` and `r_upper` at time `t`.
    pub fn flux(&self, r_lower: f64, r_upper: f64, t: f64, tol: f64) -> Result<QuadResult> {
        let mut warm = None;
        integrate(
            |r| {
                let (q, v) = self.flux_density(r, t, warm)?;
                warm = Some(q);
                Ok(v)
            },
            r_lower,
            r_upper,
            tol,
            QuadOptions::default(),
        )
    }
}

/// Label `q` of the particle at station `x0` with label depth `r` at time `t`.
pub fn fixed_x_label(r: f64, t: f64, x0: f64, s: f64, config: &WaveConfig) -> Result<f64> {
    FixedStation::new(config, x0, s).label(r, t, None)
}

pub fn gamma_r(r: f64, t: f64, x0: f64, s: f64, config: &WaveConfig) -> Result<f64> {
    FixedStation::new(config, x0, s).gamma_r(r, t)
}

pub fn gamma_t(r: f64, t: f64, x0: f64, s: f64, config: &WaveConfig) -> Result<f64> {
    FixedStation::new(config, x0, s).gamma_t(r, t)
}

/// Station aligned with the crest or the trough at a given instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Station {
    Crest,
    Trough,
}

impl Station {
    /// `x0` such that every particle in the column has `theta = 0` (crest)
    /// or `theta = pi` (trough) at time `t`.
    pub fn x0(self, t: f64, config: &WaveConfig) -> f64 {
        let shift = match self {
            Station::Crest => 0.0,
            Station::Trough => 0.5 * config.wavelength(),
        };
        config.c() * t + shift - config.c0() * t
    }
}

impl fmt::Display for Station {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Station::Crest => "crest",
            Station::Trough => "trough",
        })
    }
}

impl std::str::FromStr for Station {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "crest" => Ok(Station::Crest),
            "trough" => Ok(Station::Trough),
            other => Err(Error::InvalidParameter {
                name: "station",
                reason: format!("expected `crest` or `trough`, got `{other}`"),
            }),
        }
    }
}

/// Truncated flux request: column `x0` at latitude `s` and time `t`,
/// integrated over labels `[r_lower, r_upper]` (`r_upper` defaults to the
/// surface label).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxRequest {
    pub x0: f64,
    pub s: f64,
    pub t: f64,
    pub r_lower: f64,
    pub r_upper: Option<f64>,
}

pub fn truncated_flux(req: &FluxRequest, config: &WaveConfig, tol: f64) -> Result<QuadResult> {
    let surface = surface_label(req.s, config)?;
    let upper = req.r_upper.unwrap_or(surface);
    if !(req.r_lower < upper && upper <= surface) {
        return Err(Error::BadColumn { lower: req.r_lower, upper, surface });
    }
    FixedStation::new(config, req.x0, req.s).flux(req.r_lower, upper, req.t, tol)
}

/// Truncated total fluxes `m_D` over `[-D, r0(s)]` and their linear fit
/// against `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxDivergence {
    pub samples: Vec<(f64, QuadResult)>,
    pub slope: f64,
    pub intercept: f64,
}

pub fn full_flux_divergence(
    x0: f64,
    s: f64,
    t: f64,
    config: &WaveConfig,
    depths: &[f64],
    tol: f64,
) -> Result<FluxDivergence> {
    if depths.len() < 2 || depths.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter {
            name: "depths",
            reason: "need at least two strictly increasing depths".into(),
        });
    }
    let surface = surface_label(s, config)?;
    if !(-depths[0] < surface) {
        return Err(Error::BadColumn { lower: -depths[0], upper: surface, surface });
    }
    let station = FixedStation::new(config, x0, s);
    let values = sweep::map(depths, |&d| station.flux(-d, surface, t, tol));
    let samples = depths
        .iter()
        .zip(values)
        .map(|(&d, v)| v.map(|v| (d, v)))
        .collect::<Result<Vec<_>>>()?;
    let (slope, intercept) = least_squares(samples.iter().map(|(d, v)| (*d, v.value)));
    Ok(FluxDivergence { samples, slope, intercept })
}

fn least_squares(points: impl Iterator<Item = (f64, f64)> + Clone) -> (f64, f64) {
    let n = points.clone().count() as f64;
    let (sx, sy) = points.clone().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) =
        points.fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Period average of the truncated flux for the current-free wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodAverage {
    pub value: f64,
    pub error_estimate: f64,
    /// Bound on the flux magnitude neglected below `-D`:
    /// `c exp(xi_D) / (k (1 - exp(xi_D)))`.
    pub truncation_bound: f64,
}

/// `(1/T) ∫_0^T m(t) dt` for the column at `x0` truncated at depth `D`.
pub fn period_averaged_flux(x0: f64, s: f64, config: &WaveConfig, depth: f64, tol: f64) -> Result<PeriodAverage> {
    if config.c0() != 0.0 {
        return Err(Error::RequiresNoCurrent { op: "period_averaged_flux", c0: config.c0() });
    }
    let surface = surface_label(s, config)?;
    if !(-depth < surface) {
        return Err(Error::BadColumn { lower: -depth, upper: surface, surface });
    }
    let station = FixedStation::new(config, x0, s);
    let period = config.period();
    let avg = integrate(
        |t| Ok(station.flux(-depth, surface, t, 0.5 * tol)?.value / period),
        0.0,
        period,
        0.5 * tol,
        QuadOptions::default(),
    )?;
    let e = config.xi(-depth, s).exp();
    Ok(PeriodAverage {
        value: avg.value,
        error_estimate: avg.error_estimate + 0.5 * tol,
        truncation_bound: config.c() * e / (config.k() * (1.0 - e)),
    })
}

/// Sign regime of the near-surface flux above `r_tilde`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxRegime {
    /// `|c0| <= c exp(k(r~ - f))`: forward at the crest, backward at the trough.
    Normal,
    /// `c0 < -c exp(k(r~ - f))`: forward at both.
    Anomalous,
    Unclassified,
}

impl fmt::Display for FluxRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FluxRegime::Normal => "normal",
            FluxRegime::Anomalous => "anomalous",
            FluxRegime::Unclassified => "unclassified",
        })
    }
}

/// `c exp(k(r~ - f(s)))`, the current magnitude separating the regimes.
pub fn regime_threshold(r_tilde: f64, s: f64, config: &WaveConfig) -> f64 {
    config.c() * config.xi(r_tilde, s).exp()
}

pub fn flux_sign_condition(r_tilde: f64, s: f64, config: &WaveConfig) -> Result<FluxRegime> {
    let surface = surface_label(s, config)?;
    if !(r_tilde < surface) {
        return Err(Error::BadColumn { lower: r_tilde, upper: surface, surface });
    }
    let bound = regime_threshold(r_tilde, s, config);
    let c0 = config.c0();
    Ok(if c0.abs() <= bound {
        FluxRegime::Normal
    } else if c0 < -bound {
        FluxRegime::Anomalous
    } else {
        FluxRegime::Unclassified
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PhysicalConstants;

    fn cfg(c0: f64) -> WaveConfig {
        WaveConfig::new(100.0, c0, -5.0, PhysicalConstants::equatorial()).unwrap()
    }

    #[test]
    fn deep_label_follows_the_current() {
        let c = cfg(0.2);
        let q = fixed_x_label(-3000.0, 7.0, 12.0, 0.0, &c).unwrap();
        assert!((q - (12.0 + 0.2 * 7.0)).abs() < 1e-12);
    }

    #[test]
    fn crest_and_trough_columns_are_aligned() {
        let c = cfg(-0.4);
        let t = 3.3;
        for (station, cos) in [(Station::Crest, 1.0), (Station::Trough, -1.0)] {
            let st = FixedStation::new(&c, station.x0(t, &c), 1e4);
            for r in [-5.5, -8.0, -20.0, -60.0] {
                let q = st.label(r, t, None).unwrap();
                assert!((c.theta(q, t).cos() - cos).abs() < 1e-12);
                assert!(st.gamma_r(r, t).unwrap().abs() < 1e-10);
            }
        }
    }

    #[test]
    fn gamma_r_quarter_phase() {
        // choose x0 so that theta = pi/2 at the solved label
        let c = cfg(0.0);
        let r = -9.0;
        let q = 0.25 * c.wavelength();
        let x0 = q - (c.k() * r).exp() / c.k();
        let st = FixedStation::new(&c, x0, 0.0);
        assert!((st.label(r, 0.0, None).unwrap() - q).abs() < 1e-10);
        assert!((st.gamma_r(r, 0.0).unwrap() - (c.k() * r).exp()).abs() < 1e-10);
        assert!(st.gamma_t(r, 0.0).unwrap().abs() < 1e-9);
    }

    #[test]
    fn gamma_t_needs_zero_current() {
        let c = cfg(0.1);
        assert!(matches!(gamma_t(-9.0, 0.0, 0.0, 0.0, &c), Err(Error::RequiresNoCurrent { .. })));
        let c = cfg(0.0);
        let r = -9.0;
        let e = (c.k() * r).exp();
        let g = gamma_t(r, 0.0, 0.0, 0.0, &c).unwrap();
        assert!((g - -c.c() * e / (1.0 - e)).abs() < 1e-12);
    }

    #[test]
    fn regimes() {
        let c = cfg(0.0);
        assert_eq!(flux_sign_condition(-10.0, 0.0, &c).unwrap(), FluxRegime::Normal);
        let bound = regime_threshold(-10.0, 0.0, &c);
        let c = cfg(-2.0 * bound);
        assert_eq!(flux_sign_condition(-10.0, 0.0, &c).unwrap(), FluxRegime::Anomalous);
        assert!(flux_sign_condition(-4.0, 0.0, &c).is_err());
    }

    #[test]
    fn least_squares_recovers_line() {
        let pts = [(1.0, 3.0), (2.0, 5.0), (4.0, 9.0)];
        let (m, b) = least_squares(pts.iter().copied());
        assert!((m - 2.0).abs() < 1e-14 && (b - 1.0).abs() < 1e-14);
    }

    #[test]
    fn depths_must_increase() {
        let c = cfg(0.1);
        assert!(full_flux_divergence(0.0, 0.0, 0.0, &c, &[1000.0, 500.0], 1e-9).is_err());
    }
}
