//! Hopf-Lax formula `u(t, X) = min_Y u0(Y) + t H^*((X - Y) / t)` for a
//! convex superlinear Hamiltonian on the whole space.

use crate::error::{Error, Result};
use crate::hamiltonian::{hamiltonian_conjugate, Hamiltonian};
use crate::numeric::golden_max;

const MAX_DOUBLINGS: usize = 40;

/// Hopf-Lax evaluator around a conjugate `z -> H^*(z)`.
///
/// The minimization scans a tensor grid on `X + [-R, R]^n`, doubling `R`
/// while the best grid point sits on the boundary of the box, then refines
/// inside the best cell by coordinate golden sections. The scan protects
/// against the local minima of non-convex initial data.
pub struct HopfLax<C> {
    conjugate: C,
    dim: usize,
    pub points_per_axis: usize,
    pub radius: f64,
    pub sweeps: usize,
    pub tol: f64,
}

impl<C> HopfLax<C>
where
    C: Fn(&[f64]) -> Result<f64>,
{
    /// `dim` is the full dimension `d + 1`.
    pub fn new(dim: usize, conjugate: C) -> Self {
        let points_per_axis = match dim {
            1 => 4001,
            2 => 161,
            _ => 25,
        };
        HopfLax { conjugate, dim, points_per_axis, radius: 1.0, sweeps: 4, tol: 1e-12 }
    }

    pub fn value<U>(&self, u0: U, t: f64, x: &[f64]) -> Result<f64>
    where
        U: Fn(&[f64]) -> f64,
    {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        if t <= 0.0 {
            return Ok(u0(x));
        }
        let objective = |y: &[f64]| -> Result<f64> {
            let z: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - b) / t).collect();
            Ok(u0(y) + t * (self.conjugate)(&z)?)
        };
        let k = self.points_per_axis.max(3);
        let n = self.dim;
        let mut r = self.radius;
        for _ in 0..=MAX_DOUBLINGS {
            let h = 2.0 * r / (k - 1) as f64;
            let mut best = (vec![0usize; n], f64::INFINITY);
            let mut idx = vec![0usize; n];
            loop {
                let y: Vec<f64> = idx.iter().zip(x).map(|(&i, c)| c - r + i as f64 * h).collect();
                let v = objective(&y)?;
                if v < best.1 {
                    best = (idx.clone(), v);
                }
                let mut a = n;
                let done = loop {
                    if a == 0 {
                        break true;
                    }
                    a -= 1;
                    idx[a] += 1;
                    if idx[a] < k {
                        break false;
                    }
                    idx[a] = 0;
                };
                if done {
                    break;
                }
            }
            if best.0.iter().any(|&i| i == 0 || i == k - 1) {
                r *= 2.0;
                continue;
            }
            let mut y: Vec<f64> = best.0.iter().zip(x).map(|(&i, c)| c - r + i as f64 * h).collect();
            let centre = y.clone();
            let mut value = best.1;
            let mut failure = None;
            for _ in 0..self.sweeps {
                for a in 0..n {
                    let (ya, fa) = golden_max(
                        |s| {
                            let mut q = y.clone();
                            q[a] = s;
                            match objective(&q) {
                                Ok(v) => -v,
                                Err(e) => {
                                    failure.get_or_insert(e);
                                    f64::NAN
                                }
                            }
                        },
                        centre[a] - h,
                        centre[a] + h,
                        self.tol,
                    );
                    if -fa < value {
                        value = -fa;
                        y[a] = ya;
                    }
                }
                if n == 1 {
                    break;
                }
            }
            if let Some(e) = failure {
                return Err(e);
            }
            return Ok(value);
        }
        Err(Error::Divergence("Hopf-Lax minimizer escapes every search box".into()))
    }
}

/// Hopf-Lax value with the conjugate of `h` computed numerically.
pub fn hopf_lax<H, U>(h: &H, u0: U, t: f64, x: &[f64]) -> Result<f64>
where
    H: Hamiltonian + ?Sized,
    U: Fn(&[f64]) -> f64,
{
    let mut evaluator = HopfLax::new(h.dim() + 1, |z: &[f64]| hamiltonian_conjugate(h, z).map(|r| r.value));
    if evaluator.dim > 1 {
        evaluator.points_per_axis = 41;
    } else {
        evaluator.points_per_axis = 801;
    }
    evaluator.value(u0, t, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::Quadratic;

    fn cone(y: &[f64]) -> f64 {
        y[0].abs().min(1.0)
    }

    #[test]
    fn matches_dense_scan_for_quadratic() {
        let hl = HopfLax::new(1, |z: &[f64]| Ok(z[0] * z[0] / 4.0));
        let t = 0.5;
        for x in [-1.7, -0.4, 0.0, 0.3, 0.95, 1.2, 3.0] {
            let v = hl.value(cone, t, &[x]).unwrap();
            let scan = (0..=400_000)
                .map(|k| -6.0 + k as f64 * 3e-5)
                .map(|y| cone(&[y]) + (x - y) * (x - y) / (4.0 * t))
                .fold(f64::INFINITY, f64::min);
            assert!(v <= scan + 1e-12 && scan - v < 1e-8, "x={x}: {v} vs {scan}");
        }
    }

    #[test]
    fn small_time_and_constant_data() {
        let hl = HopfLax::new(1, |z: &[f64]| Ok(z[0] * z[0] / 4.0));
        assert_eq!(hl.value(cone, 0.0, &[0.4]).unwrap(), 0.4);
        assert!((hl.value(cone, 1e-6, &[0.4]).unwrap() - 0.4).abs() < 1e-5);
        assert!((hl.value(|_| 2.5, 0.7, &[0.1]).unwrap() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn numeric_conjugate_agrees_in_two_dimensions() {
        let h = Quadratic::standard(1);
        let u0 = |y: &[f64]| (y[0] * y[0] + y[1] * y[1]).sqrt().min(1.0);
        let v = hopf_lax(&h, u0, 0.25, &[0.8, 0.1]).unwrap();
        let exact =
            HopfLax::new(2, |z: &[f64]| Ok((z[0] * z[0] + z[1] * z[1]) / 4.0)).value(u0, 0.25, &[0.8, 0.1]).unwrap();
        assert!((v - exact).abs() < 1e-6, "{v} vs {exact}");
    }
}
