//! Sampled Lipschitz bounds of Hamiltonians and limiters over boxes of
//! discrete gradients, used for the CFL step and the Lax-Friedrichs
//! dissipation.

use crate::condition::FluxLimiter;
use crate::error::Result;
use crate::hamiltonian::{pi0, Hamiltonian};

/// Multiplier applied to every sampled bound.
pub const LIPSCHITZ_SAFETY: f64 = 1.2;

const FD_STEP: f64 = 1e-6;

/// Range of discrete gradients: one normal interval and one interval per
/// tangential axis.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientBox {
    pub normal: (f64, f64),
    pub tangential: Vec<(f64, f64)>,
}

impl GradientBox {
    pub fn empty(d: usize) -> Self {
        GradientBox { normal: (0.0, 0.0), tangential: vec![(0.0, 0.0); d] }
    }
}

/// Grows `(lo, hi)` to contain `v`.
pub fn include(range: &mut (f64, f64), v: f64) {
    range.0 = range.0.min(v);
    range.1 = range.1.max(v);
}

fn samples_per_axis(dims: usize) -> usize {
    match dims {
        0 | 1 => 17,
        2 => 9,
        3 => 5,
        _ => 3,
    }
}

fn axis_samples(range: (f64, f64), k: usize) -> Vec<f64> {
    if range.1 <= range.0 {
        return vec![range.0];
    }
    (0..k).map(|i| range.0 + (range.1 - range.0) * i as f64 / (k - 1) as f64).collect()
}

fn for_each_point<F: FnMut(&[f64])>(axes: &[Vec<f64>], mut f: F) {
    let mut idx = vec![0usize; axes.len()];
    let mut point: Vec<f64> = axes.iter().map(|a| a[0]).collect();
    loop {
        f(&point);
        let mut a = axes.len();
        loop {
            if a == 0 {
                return;
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < axes[a].len() {
                point[a] = axes[a][idx[a]];
                break;
            }
            idx[a] = 0;
            point[a] = axes[a][0];
        }
    }
}

fn derivative<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let h = FD_STEP * x.abs().max(1.0);
    ((f(x + h) - f(x - h)) / (2.0 * h)).abs()
}

/// `(max |dH/dp|, max |dH/dp'_k|)` over a tensor sample of the box, with
/// the normal interval widened to contain the minimizers `pi0(p')` so the
/// bounds also cover the envelopes `H^-` and `H^+`. Safety factor included.
pub fn hamiltonian_bounds<H: Hamiltonian + ?Sized>(h: &H, bx: &GradientBox) -> Result<(f64, Vec<f64>)> {
    let d = bx.tangential.len();
    let k = samples_per_axis(d + 1);
    let tan_axes: Vec<Vec<f64>> = bx.tangential.iter().map(|&r| axis_samples(r, k)).collect();
    let mut normal = bx.normal;
    let mut err = None;
    for_each_point(&tan_axes, |pt| match pi0(h, pt) {
        Ok(p) => include(&mut normal, p),
        Err(e) => {
            err.get_or_insert(e);
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let mut axes = tan_axes;
    axes.push(axis_samples(normal, k));
    let mut ln = 0.0f64;
    let mut lt = vec![0.0f64; d];
    for_each_point(&axes, |pt| {
        let (pt_tan, p) = (&pt[..d], pt[d]);
        ln = ln.max(derivative(|s| h.eval(pt_tan, s), p));
        for (a, l) in lt.iter_mut().enumerate() {
            *l = l.max(derivative(
                |s| {
                    let mut q = pt_tan.to_vec();
                    q[a] = s;
                    h.eval(&q, p)
                },
                pt_tan[a],
            ));
        }
    });
    Ok((ln * LIPSCHITZ_SAFETY, lt.into_iter().map(|l| l * LIPSCHITZ_SAFETY).collect()))
}

/// `max |dA/dp'_k|` over a tensor sample of the tangential box, safety
/// factor included.
pub fn limiter_bounds<L: FluxLimiter + ?Sized>(a: &L, tangential: &[(f64, f64)]) -> Vec<f64> {
    let d = tangential.len();
    if d == 0 {
        return Vec::new();
    }
    let k = samples_per_axis(d);
    let axes: Vec<Vec<f64>> = tangential.iter().map(|&r| axis_samples(r, k)).collect();
    let mut lt = vec![0.0f64; d];
    for_each_point(&axes, |pt| {
        for (ax, l) in lt.iter_mut().enumerate() {
            *l = l.max(derivative(
                |s| {
                    let mut q = pt.to_vec();
                    q[ax] = s;
                    a.eval(&q)
                },
                pt[ax],
            ));
        }
    });
    lt.into_iter().map(|l| l * LIPSCHITZ_SAFETY).collect()
}
