//! Bracketed scalar root finding.
//!
//! Every implicit relation in this crate is a strictly monotone function on a
//! known bracket, so the solver keeps a sign-change bracket at all times and
//! only accepts Newton steps that land strictly inside it.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Absolute residual at which iteration stops.
    pub residual_tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self { residual_tol: 1e-12, max_iter: 200 }
    }
}

impl RootOptions {
    pub fn with_residual_tol(residual_tol: f64) -> Self {
        Self { residual_tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Safeguarded Newton iteration on `[lo, hi]`.
///
/// `f` returns the residual and its derivative. The endpoints must bracket a
/// sign change. When a Newton step leaves the current bracket (or the
/// derivative is unusable) the iteration falls back to bisection. Iteration
/// ends when the residual drops below `residual_tol` (followed by one
/// polishing step) or the bracket has collapsed to adjacent floating-point
/// numbers; in the latter case the best point seen is returned.
pub fn newton_bracketed<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    guess: Option<f64>,
    opts: RootOptions,
) -> Result<Root>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let (flo, _) = f(lo);
    if flo.abs() <= opts.residual_tol {
        return Ok(Root { x: lo, residual: flo.abs(), iterations: 0 });
    }
    let (fhi, _) = f(hi);
    if fhi.abs() <= opts.residual_tol {
        return Ok(Root { x: hi, residual: fhi.abs(), iterations: 0 });
    }
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return Err(Error::NoBracket { lo, hi, flo, fhi });
    }
    let lo_negative = flo < 0.0;

    let mut x = match guess {
        Some(g) if g > lo && g < hi => g,
        _ => 0.5 * (lo + hi),
    };
    let mut best = Root { x, residual: f64::INFINITY, iterations: 0 };

    for it in 1..=opts.max_iter {
        let (fx, dfx) = f(x);
        if !fx.is_finite() {
            return Err(Error::NoConvergence {
                solver: "safeguarded Newton",
                iterations: it,
                residual: fx,
            });
        }
        if fx.abs() < best.residual {
            best = Root { x, residual: fx.abs(), iterations: it };
        }
        if fx.abs() <= opts.residual_tol {
            // one polishing step so the result does not depend on the start
            let polished = x - fx / dfx;
            if polished.is_finite() && polished > lo && polished < hi && polished != x {
                let (fp, _) = f(polished);
                if fp.abs() < best.residual {
                    best = Root { x: polished, residual: fp.abs(), iterations: it + 1 };
                }
            }
            return Ok(best);
        }
        if (fx < 0.0) == lo_negative {
            lo = x;
        } else {
            hi = x;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // bracket is two adjacent floats
            best.iterations = it;
            return Ok(best);
        }
        let newton = x - fx / dfx;
        x = if newton.is_finite() && newton > lo && newton < hi { newton } else { mid };
    }
    Err(Error::NoConvergence {
        solver: "safeguarded Newton",
        iterations: opts.max_iter,
        residual: best.residual,
    })
}

/// Plain bisection for the sign change of `f` on `[lo, hi]`, run until the
/// bracket collapses to adjacent floats. Returns the endpoint with the
/// smaller residual.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == 0.0 {
        return Ok(Root { x: lo, residual: 0.0, iterations: 0 });
    }
    if fhi == 0.0 {
        return Ok(Root { x: hi, residual: 0.0, iterations: 0 });
    }
    if flo.signum() == fhi.signum() || !(flo.is_finite() && fhi.is_finite()) {
        return Err(Error::NoBracket { lo, hi, flo, fhi });
    }
    let mut iterations = 0;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || iterations >= 2100 {
            break;
        }
        iterations += 1;
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(Root { x: mid, residual: 0.0, iterations });
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    let (x, residual) = if flo.abs() <= fhi.abs() { (lo, flo.abs()) } else { (hi, fhi.abs()) };
    Ok(Root { x, residual, iterations })
}
