//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! The integrand may return several components at once; they share the node
//! set, which keeps pointwise inequalities between components intact after
//! integration (all Kronrod weights are positive). Each component carries
//! its own absolute tolerance.

use crate::error::{Error, Result};

/// Value of a scalar integral with its error estimate and node count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub nodes: usize,
}

/// Vector-valued counterpart of [`QuadResult`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadVec<const N: usize> {
    pub values: [f64; N],
    pub errors: [f64; N],
    pub nodes: usize,
}

impl<const N: usize> QuadVec<N> {
    pub fn component(&self, i: usize) -> QuadResult {
        QuadResult { value: self.values[i], error_estimate: self.errors[i], nodes: self.nodes }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub max_nodes: usize,
    pub initial_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { max_nodes: 1 << 20, initial_intervals: 4 }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

pub const NODES_PER_PANEL: usize = 15;

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    kronrod: [f64; N],
    err: [f64; N],
}

fn gk15<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Result<Panel<N>>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = [0.0; N];
    let mut gauss = [0.0; N];
    // ascending node order so that stateful integrands can warm-start
    for j in 0..15 {
        let (idx, sign) = if j < 7 { (j, -1.0) } else if j == 7 { (7, 0.0) } else { (14 - j, 1.0) };
        let x = center + sign * half * XGK[idx];
        let fx = f(x)?;
        for c in 0..N {
            kronrod[c] += WGK[idx] * fx[c];
            if idx % 2 == 1 {
                gauss[c] += WG[idx / 2] * fx[c];
            }
        }
    }
    let mut err = [0.0; N];
    for c in 0..N {
        kronrod[c] *= half;
        gauss[c] *= half;
        err[c] = (kronrod[c] - gauss[c]).abs();
    }
    Ok(Panel { a, b, kronrod, err })
}

/// Integrate a vector-valued function over `[a, b]`.
///
/// Refinement stops when the summed error estimate of every component is
/// within its tolerance. The panel with the largest error relative to its
/// tolerance is bisected next.
pub fn integrate_vec<const N: usize, F>(
    mut f: F,
    a: f64,
    b: f64,
    tol: [f64; N],
    opts: QuadOptions,
) -> Result<QuadVec<N>>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    if a == b {
        return Ok(QuadVec { values: [0.0; N], errors: [0.0; N], nodes: 0 });
    }
    let n0 = opts.initial_intervals.max(1);
    let width = (b - a) / n0 as f64;
    let mut panels = Vec::with_capacity(64);
    for i in 0..n0 {
        let lo = a + width * i as f64;
        let hi = if i + 1 == n0 { b } else { a + width * (i + 1) as f64 };
        panels.push(gk15(&mut f, lo, hi)?);
    }
    let mut nodes = n0 * NODES_PER_PANEL;

    loop {
        let mut values = [0.0; N];
        let mut errors = [0.0; N];
        for p in &panels {
            for c in 0..N {
                values[c] += p.kronrod[c];
                errors[c] += p.err[c];
            }
        }
        let worst_ratio = (0..N)
            .map(|c| errors[c] / tol[c])
            .fold(0.0_f64, |m, r| if r.is_nan() { m } else { m.max(r) });
        if worst_ratio <= 1.0 {
            return Ok(QuadVec { values, errors, nodes });
        }
        if nodes + 2 * NODES_PER_PANEL > opts.max_nodes {
            let (c, _) = (0..N)
                .map(|c| (c, errors[c] / tol[c]))
                .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            return Err(Error::Quadrature { estimate: errors[c], tol: tol[c], nodes });
        }

        let (worst, _) = panels
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let r = (0..N).map(|c| p.err[c] / tol[c]).fold(0.0_f64, f64::max);
                (i, r)
            })
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            let (c, _) = (0..N)
                .map(|c| (c, errors[c] / tol[c]))
                .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            return Err(Error::Quadrature { estimate: errors[c], tol: tol[c], nodes });
        }
        panels.push(gk15(&mut f, p.a, mid)?);
        panels.push(gk15(&mut f, mid, p.b)?);
        nodes += 2 * NODES_PER_PANEL;
    }
}

/// Scalar adaptive quadrature with absolute tolerance `tol`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: f64, opts: QuadOptions) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let r = integrate_vec(|x| f(x).map(|v| [v]), a, b, [tol], opts)?;
    Ok(r.component(0))
}
