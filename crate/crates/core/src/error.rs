use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma nonpositive: 2*omega*c0 + g = {gamma} for c0 = {c0} m/s")]
    GammaNonpositive { c0: f64, gamma: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid configuration: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),

    #[error("label outside admissible domain: xi = k(r - f(s)) = {xi} >= 0")]
    OutsideDomain { xi: f64 },

    #[error("latitude s = {s} m is outside the trapping region")]
    OutsideTrappingRegion { s: f64 },

    #[error("z0 = {z0} m is not below the trough level {trough} m")]
    NotBelowTrough { z0: f64, trough: f64 },

    #[error("point (x = {x}, z = {z}) lies above the free surface (label r = {r} > {surface})")]
    AboveSurface { x: f64, z: f64, r: f64, surface: f64 },

    #[error("r range [{lower}, {upper}] is not below the surface label {surface}")]
    BadColumn { lower: f64, upper: f64, surface: f64 },

    #[error("{op} requires c0 = 0 (got c0 = {c0} m/s)")]
    RequiresNoCurrent { op: &'static str, c0: f64 },

    #[error("no sign change on bracket [{lo}, {hi}] (f = {flo}, {fhi})")]
    NoBracket { lo: f64, hi: f64, flo: f64, fhi: f64 },

    #[error("{solver} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { solver: &'static str, iterations: usize, residual: f64 },

    #[error("quadrature failure: error estimate {estimate:e} above tolerance {tol:e} at {nodes} nodes")]
    Quadrature { estimate: f64, tol: f64, nodes: usize },

    #[error("particle left the admissible domain at t = {t} s")]
    LeftDomain { t: f64 },
}

impl Error {
    /// True for failures of an iterative numerical method, as opposed to
    /// inputs that violate a precondition.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoBracket { .. } | Error::NoConvergence { .. } | Error::Quadrature { .. }
        )
    }
}
