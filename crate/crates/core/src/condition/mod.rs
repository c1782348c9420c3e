//! Junction conditions: flux limiters `A(p')`, general junction functions
//! `F(p', p_1..p_N)`, the limited flux `F_A` and the reduction of a monotone
//! `F` to its effective limiter `A_F`.

mod functions;
mod limiters;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;

pub use functions::{FluxLimitedFunction, FnJunction, JunctionSpec, LinearJunction};
pub use limiters::{
    ConstantLimiter, FnLimiter, LatticeLimiter, LimiterSpec, QuadraticLimiter, ReducedLimiter, LATTICE_QUANTUM,
};

use crate::error::Result;
use crate::hamiltonian::{branch_min, envelope, pi_pm, Hamiltonian, Side};
use crate::numeric::{bisect, expand_until, ARG_TOL, VALUE_TOL};

/// A flux limiter `p' -> A(p')`.
pub trait FluxLimiter: Send + Sync + fmt::Debug {
    /// Tangential dimension `d`.
    fn dim(&self) -> usize;

    /// `A(p')`. Limiters backed by a numerical reduction return NaN when the
    /// reduction fails; the solver reports non-finite updates as errors.
    fn eval(&self, p_tan: &[f64]) -> f64;

    /// Declared quasi-convex.
    fn is_quasi_convex(&self) -> bool {
        false
    }
}

impl<L: FluxLimiter + ?Sized> FluxLimiter for std::sync::Arc<L> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, p_tan: &[f64]) -> f64 {
        (**self).eval(p_tan)
    }
    fn is_quasi_convex(&self) -> bool {
        (**self).is_quasi_convex()
    }
}

/// A junction function `F(p', p_1, .., p_N)`, expected to be continuous and
/// non-increasing in every `p_i`.
pub trait JunctionFunction: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn branches(&self) -> usize;

    fn eval(&self, p_tan: &[f64], slopes: &[f64]) -> Result<f64>;

    /// Declared quasi-convex in `(p', p_1..p_N)`.
    fn is_quasi_convex(&self) -> bool {
        false
    }
}

impl<F: JunctionFunction + ?Sized> JunctionFunction for std::sync::Arc<F> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn branches(&self) -> usize {
        (**self).branches()
    }
    fn eval(&self, p_tan: &[f64], slopes: &[f64]) -> Result<f64> {
        (**self).eval(p_tan, slopes)
    }
    fn is_quasi_convex(&self) -> bool {
        (**self).is_quasi_convex()
    }
}

/// `A_0(p') = max_i min_p H_i(p', p)`.
pub fn a0<H: Hamiltonian>(hamiltonians: &[H], p_tan: &[f64]) -> Result<f64> {
    let mut m = f64::NEG_INFINITY;
    for h in hamiltonians {
        m = m.max(branch_min(h, p_tan)?);
    }
    Ok(m)
}

/// `F_A(p', p_1..p_N) = max(A(p'), max_i H_i^-(p', p_i))`.
pub fn flux_limited_value<H: Hamiltonian>(
    limit: f64,
    hamiltonians: &[H],
    p_tan: &[f64],
    slopes: &[f64],
) -> Result<f64> {
    let mut m = limit;
    for (h, &p) in hamiltonians.iter().zip(slopes) {
        m = m.max(envelope(h, p_tan, p, Side::Minus)?);
    }
    Ok(m)
}

/// Effective limiter `A_F(p')` of a monotone junction function.
///
/// With `p_i^0 = pi_i^+(p', A_0)`, returns `A_0` when `F(p', p^0) <= A_0`;
/// otherwise the root `lambda > A_0` of `F(p', pi^+(p', lambda)) = lambda`,
/// bracketed by doubling `[A_0, A_0 + 1]` and found by bisection.
pub fn reduce_to_limiter<F, H>(f: &F, hamiltonians: &[H], p_tan: &[f64]) -> Result<f64>
where
    F: JunctionFunction + ?Sized,
    H: Hamiltonian,
{
    let base = a0(hamiltonians, p_tan)?;
    let slopes_at = |lambda: f64| -> Result<Vec<f64>> {
        hamiltonians.iter().map(|h| pi_pm(h, p_tan, lambda, Side::Plus)).collect()
    };
    if f.eval(p_tan, &slopes_at(base)?)? <= base {
        return Ok(base);
    }
    let mut failure = None;
    let mut g = |lambda: f64| match slopes_at(lambda).and_then(|s| f.eval(p_tan, &s)) {
        Ok(v) => v - lambda,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let hi = expand_until(base, 1.0, |l| g(l) < 0.0, "bracketing the effective flux limiter")?;
    let root = bisect(&mut g, base, hi, VALUE_TOL, ARG_TOL);
    match failure {
        Some(e) => Err(e),
        None => Ok(root),
    }
}

/// Sampled check of the junction-function assumptions.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct JunctionReport {
    pub samples: usize,
    /// `(point, i)`: increasing `p_i` by the step increased `F` at `point`
    /// (`point = (p', p_1..p_N)`).
    pub monotonicity_violations: Vec<(Vec<f64>, usize)>,
    /// Only filled for functions declared quasi-convex.
    pub quasi_convexity_violations: Vec<(Vec<f64>, Vec<f64>)>,
    /// Evaluation errors met while sampling.
    pub evaluation_errors: usize,
}

impl JunctionReport {
    pub fn passed(&self) -> bool {
        self.monotonicity_violations.is_empty()
            && self.quasi_convexity_violations.is_empty()
            && self.evaluation_errors == 0
    }
}

/// Step of the monotonicity finite differences.
pub const MONOTONICITY_STEP: f64 = 1e-3;

/// Samples `F` on `[-radius, radius]^{d+N}`: one random coordinate
/// difference per sample for monotonicity and, if declared quasi-convex,
/// one random midpoint test. Report-only.
pub fn validate<F: JunctionFunction + ?Sized>(f: &F, samples: usize, radius: f64, seed: u64) -> JunctionReport {
    let d = f.dim();
    let n = f.branches();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = JunctionReport { samples, ..Default::default() };
    let eval = |x: &[f64]| f.eval(&x[..d], &x[d..]);
    for _ in 0..samples {
        let x: Vec<f64> = (0..d + n).map(|_| rng.gen_range(-radius..radius)).collect();
        let i = rng.gen_range(0..n);
        let mut y = x.clone();
        y[d + i] += MONOTONICITY_STEP;
        match (eval(&x), eval(&y)) {
            (Ok(fx), Ok(fy)) => {
                if fy > fx + 1e-12 * fx.abs().max(1.0) {
                    report.monotonicity_violations.push((x.clone(), i));
                }
            }
            _ => report.evaluation_errors += 1,
        }
        if f.is_quasi_convex() {
            let q: Vec<f64> = (0..d + n).map(|_| rng.gen_range(-radius..radius)).collect();
            let mid: Vec<f64> = x.iter().zip(&q).map(|(a, b)| 0.5 * (a + b)).collect();
            match (eval(&x), eval(&q), eval(&mid)) {
                (Ok(a), Ok(b), Ok(m)) => {
                    let top = a.max(b);
                    if m > top + 1e-9 * top.abs().max(1.0) {
                        report.quasi_convexity_violations.push((x, q));
                    }
                }
                _ => report.evaluation_errors += 1,
            }
        }
    }
    report
}

/// Midpoint quasi-convexity report of a function on a box.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QuasiConvexityReport {
    pub segments: usize,
    pub violations: Vec<(Vec<f64>, Vec<f64>)>,
    /// Largest `f(mid) - max(f(p), f(q))` seen.
    pub worst_excess: f64,
}

impl QuasiConvexityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Tests `f((p+q)/2) <= max(f(p), f(q)) + tol` on random segments with
/// endpoints uniform in the box `[lo_k, hi_k]`. `tol` is relative to
/// `max(1, |max(f(p), f(q))|)`.
pub fn check_quasiconvex<F>(
    mut f: F,
    bounds: &[(f64, f64)],
    segments: usize,
    tol: f64,
    seed: u64,
) -> QuasiConvexityReport
where
    F: FnMut(&[f64]) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = QuasiConvexityReport { segments, worst_excess: f64::NEG_INFINITY, ..Default::default() };
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        bounds.iter().map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..hi) } else { lo }).collect()
    };
    for _ in 0..segments {
        let p = draw(&mut rng);
        let q = draw(&mut rng);
        let mid: Vec<f64> = p.iter().zip(&q).map(|(a, b)| 0.5 * (a + b)).collect();
        let top = f(&p).max(f(&q));
        let excess = f(&mid) - top;
        report.worst_excess = report.worst_excess.max(excess);
        if !(excess <= tol * top.abs().max(1.0)) {
            report.violations.push((p, q));
        }
    }
    report
}
