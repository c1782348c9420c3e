//! Derivative-free scalar and low-dimensional search routines shared by the
//! Hamiltonian, limiter and vertex-function code.

use crate::error::{Error, Result};

/// Bracket expansion doubles the width at most this many times (width 1 up
/// to 2^60).
pub const MAX_DOUBLINGS: u32 = 60;

/// Default stopping tolerance on function values for root bisection.
pub const VALUE_TOL: f64 = 1e-10;

/// Default stopping tolerance on arguments for root bisection.
pub const ARG_TOL: f64 = 1e-12;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Finds the first `start + w` (w = 1, 2, 4, ...) that satisfies `pred`.
pub fn expand_until<F>(start: f64, direction: f64, mut pred: F, context: &'static str) -> Result<f64>
where
    F: FnMut(f64) -> bool,
{
    let mut width = 1.0;
    for _ in 0..=MAX_DOUBLINGS {
        let x = start + direction * width;
        if pred(x) {
            return Ok(x);
        }
        width *= 2.0;
    }
    Err(Error::BracketExpansion(context))
}

/// Bisection for a root of `g` on `[lo, hi]`, where `g(lo)` and `g(hi)` have
/// opposite signs (either orientation). Stops when `|g| <= value_tol` or the
/// bracket is narrower than `arg_tol`, returning the endpoint with the
/// smaller residual in the latter case.
pub fn bisect<F>(mut g: F, mut lo: f64, mut hi: f64, value_tol: f64, arg_tol: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    let mut g_lo = g(lo);
    let mut g_hi = g(hi);
    if g_lo.abs() <= value_tol {
        return lo;
    }
    if g_hi.abs() <= value_tol {
        return hi;
    }
    let increasing = g_lo < g_hi;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= arg_tol || mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid.abs() <= value_tol {
            return mid;
        }
        if (g_mid < 0.0) == increasing {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
    }
    if g_lo.abs() <= g_hi.abs() {
        lo
    } else {
        hi
    }
}

/// Bisection on a predicate that is false at `lo` and true at `hi`; returns
/// a point where it is true, within `arg_tol` of the switch.
pub fn bisect_switch<F>(mut pred: F, mut lo: f64, mut hi: f64, arg_tol: f64) -> f64
where
    F: FnMut(f64) -> bool,
{
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= arg_tol || mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Golden-section maximization of a unimodal function on `[a, b]`. Both
/// endpoints are evaluated as well, so boundary maxima are returned exactly.
pub fn golden_max<F>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let fa = f(a);
    let fb = f(b);
    let (mut best_x, mut best_f) = if fa >= fb { (a, fa) } else { (b, fb) };

    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a) <= tol * (1.0 + 0.5 * (a.abs() + b.abs())) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    for (x, fx) in [(c, fc), (d, fd)] {
        if fx > best_f {
            best_x = x;
            best_f = fx;
        }
    }
    (best_x, best_f)
}

/// Maximizes a concave function on `[lo, +inf)`. Returns `(argmax, max)`.
pub fn maximize_concave_halfline<F>(mut f: F, lo: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let f_lo = f(lo);
    let scale = 1.0 + lo.abs();
    let probe = lo + 1e-9 * scale;
    if f(probe) <= f_lo {
        return Ok((lo, f_lo));
    }
    // t_k = lo + w 2^k; stop once the objective decreases.
    let mut prev2 = lo;
    let mut prev = lo;
    let mut f_prev = f_lo;
    let mut width = 1e-3 * scale;
    for _ in 0..=(MAX_DOUBLINGS + 10) {
        let t = lo + width;
        let ft = f(t);
        if !ft.is_finite() {
            return Err(Error::Divergence("objective became non-finite".into()));
        }
        if ft < f_prev {
            let (x, fx) = golden_max(&mut f, prev2, t, tol);
            return Ok(if fx >= f_lo { (x, fx) } else { (lo, f_lo) });
        }
        prev2 = prev;
        prev = t;
        f_prev = ft;
        width *= 2.0;
    }
    Err(Error::Divergence("objective still increasing at the expansion bound".into()))
}

/// Settings for [`maximize_concave`].
#[derive(Clone, Debug)]
pub struct ConcaveSearch {
    /// Half-width of the initial seeding interval on every axis.
    pub radius: f64,
    /// Seeds per axis (odd).
    pub seeds: usize,
    /// Relative argument tolerance of the golden-section refinement.
    pub tol: f64,
    /// How often a seeding interval may double before divergence is reported.
    pub max_doublings: usize,
}

impl ConcaveSearch {
    pub fn with_radius(radius: f64) -> Self {
        ConcaveSearch { radius, seeds: 9, tol: 1e-10, max_doublings: 60 }
    }
}

/// Maximizes a concave function of one variable: seeds on `centre ± r`,
/// doubling and recentring `r` while the best seed is an endpoint, then
/// golden section on the two cells around the best seed.
pub fn maximize_concave_1d<F>(mut f: F, centre: f64, search: &ConcaveSearch) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let k = search.seeds.max(3);
    let mut c = centre;
    let mut r = search.radius;
    for _ in 0..=search.max_doublings {
        let h = 2.0 * r / (k - 1) as f64;
        let mut best = (0usize, f64::NEG_INFINITY);
        for i in 0..k {
            let v = f(c - r + i as f64 * h);
            if v.is_nan() {
                return Err(Error::Divergence("objective is NaN".into()));
            }
            if v > best.1 {
                best = (i, v);
            }
        }
        let x = c - r + best.0 as f64 * h;
        if best.0 == 0 || best.0 == k - 1 {
            c = x;
            r *= 2.0;
            continue;
        }
        let (xm, fm) = golden_max(&mut f, x - h, x + h, search.tol);
        return Ok(if fm >= best.1 { (xm, fm) } else { (x, best.1) });
    }
    Err(Error::Divergence("maximizer escapes every search interval".into()))
}

/// Maximizes a concave function on `R^n` by nested one-dimensional searches:
/// the partial maximum over the trailing coordinates is again concave in
/// the leading one, so each level is a [`maximize_concave_1d`]. Robust on
/// kinks and ridges; the cost grows like `(evaluations per axis)^n`, which
/// is meant for `n <= 3`.
pub fn maximize_concave<F>(mut f: F, centre: &[f64], search: &ConcaveSearch) -> Result<(Vec<f64>, f64)>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut x = centre.to_vec();
    let value = nested_max(&mut f, &mut x, 0, search)?;
    Ok((x, value))
}

fn nested_max<F>(f: &mut F, x: &mut Vec<f64>, axis: usize, search: &ConcaveSearch) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x.len();
    if axis == n {
        return Ok(f(x));
    }
    let centre = x[axis];
    let mut failure = None;
    let (best, value) = {
        let mut partial = |t: f64| {
            let mut y = x.clone();
            y[axis] = t;
            match nested_max(f, &mut y, axis + 1, search) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        };
        match maximize_concave_1d(&mut partial, centre, search) {
            Ok(r) => r,
            Err(e) => return Err(failure.unwrap_or(e)),
        }
    };
    if let Some(e) = failure {
        return Err(e);
    }
    x[axis] = best;
    // re-solve the trailing coordinates at the chosen leading value
    if axis + 1 < n {
        nested_max(f, x, axis + 1, search)?;
    }
    Ok(value)
}

/// Central finite-difference derivative with a step relative to `|x|`.
pub fn central_diff<F>(mut f: F, x: f64, h: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    let step = h * x.abs().max(1.0);
    (f(x + step) - f(x - step)) / (2.0 * step)
}

/// Euclidean norm.
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Dot product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
