use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Hamiltonian;

/// Outcome of the sampled checks of continuity, quasi-convexity and
/// coercivity. Empty violation lists mean no violation was observed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AssumptionReport {
    pub samples: usize,
    /// Points `P` where a `1e-7` perturbation moved `H` by more than `1e-3`.
    pub continuity_violations: Vec<Vec<f64>>,
    /// Segments `(P, Q)` with `H((P+Q)/2) > max(H(P), H(Q)) + tol`.
    pub quasi_convexity_violations: Vec<(Vec<f64>, Vec<f64>)>,
    /// `(R, min_{|P|=R} H)` for doubling radii.
    pub sphere_minima: Vec<(f64, f64)>,
    pub coercive: bool,
}

impl AssumptionReport {
    pub fn passed(&self) -> bool {
        self.continuity_violations.is_empty() && self.quasi_convexity_violations.is_empty() && self.coercive
    }
}

fn random_direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 1e-3 && r <= 1.0 {
            return v.into_iter().map(|x| x / r).collect();
        }
    }
}

/// Sampled checks of the standing assumptions on a Hamiltonian over the
/// ball of radius `radius` in `R^{d+1}`. This can find violations but never
/// prove the assumptions.
pub fn check_assumptions<H: Hamiltonian + ?Sized>(h: &H, samples: usize, radius: f64, seed: u64) -> AssumptionReport {
    let n = h.dim() + 1;
    let d = h.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eval = |p: &[f64]| h.eval(&p[..d], p[d]);
    let mut report = AssumptionReport { samples, ..Default::default() };
    for _ in 0..samples {
        let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-radius..radius)).collect();
        let q: Vec<f64> = (0..n).map(|_| rng.gen_range(-radius..radius)).collect();
        let (hp, hq) = (eval(&p), eval(&q));

        let dir = random_direction(&mut rng, n);
        let near: Vec<f64> = p.iter().zip(&dir).map(|(a, b)| a + 1e-7 * b).collect();
        if (eval(&near) - hp).abs() > 1e-3 * hp.abs().max(1.0) {
            report.continuity_violations.push(p.clone());
        }

        let mid: Vec<f64> = p.iter().zip(&q).map(|(a, b)| 0.5 * (a + b)).collect();
        let top = hp.max(hq);
        if eval(&mid) > top + 1e-9 * top.abs().max(1.0) {
            report.quasi_convexity_violations.push((p, q));
        }
    }

    // coordinate directions first: flat directions are typically axis-aligned
    let mut directions: Vec<Vec<f64>> = Vec::new();
    for k in 0..n {
        for s in [-1.0, 1.0] {
            let mut e = vec![0.0; n];
            e[k] = s;
            directions.push(e);
        }
    }
    directions.extend((0..64.max(8 * n)).map(|_| random_direction(&mut rng, n)));
    let mut r = radius.max(1.0);
    for _ in 0..6 {
        let m = directions
            .iter()
            .map(|u| {
                let p: Vec<f64> = u.iter().map(|x| r * x).collect();
                eval(&p)
            })
            .fold(f64::INFINITY, f64::min);
        report.sphere_minima.push((r, m));
        r *= 2.0;
    }
    report.coercive = report.sphere_minima.windows(2).skip(2).all(|w| w[1].1 > w[0].1);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{ConvexityClass, FnHamiltonian, Quadratic};

    #[test]
    fn quadratic_passes() {
        let r = check_assumptions(&Quadratic::new(vec![0.5], -1.0, 2.0), 2000, 5.0, 1);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn detects_non_quasi_convex_and_non_coercive() {
        let wavy = FnHamiltonian::new(0, ConvexityClass::QuasiConvex, |_, p| p * p + 3.0 * (3.0 * p).sin());
        assert!(!check_assumptions(&wavy, 2000, 3.0, 2).quasi_convexity_violations.is_empty());
        let flat = FnHamiltonian::new(1, ConvexityClass::QuasiConvex, |pt, _| pt[0] * pt[0]);
        assert!(!check_assumptions(&flat, 200, 2.0, 3).coercive);
        let jump = FnHamiltonian::new(0, ConvexityClass::QuasiConvex, |_, p| if p > 0.0 { p + 1.0 } else { -p });
        let r = check_assumptions(&jump, 100_000, 1e-6, 4);
        assert!(!r.continuity_violations.is_empty());
    }
}
