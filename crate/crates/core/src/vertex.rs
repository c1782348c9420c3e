//! The vertex test function `G^0` of the smooth convex case.
//!
//! For `X = (x', x)` on branch `i` and `Y = (y', y)` on branch `j`,
//!
//! ```text
//! G^0(X, Y) = sup { p'.(x'-y') + pi_i^+(p', l) x - pi_j^-(p', l) y - l :
//!                   l >= max(A, A_i, A_j)(p') }              (i != j)
//! ```
//!
//! and for `i = j` the conjugate `(H_i v A)^*(X - Y)`, written the same way
//! with `pi_i^+` or `pi_i^-` depending on the sign of `x - y`. The objective
//! is jointly concave in `(p', l)`; the supremum over `l` is taken on the
//! half-line and the outer supremum over `p'` by nested golden sections.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::condition::{a0, flux_limited_value, FluxLimiter};
use crate::error::{Error, Result};
use crate::hamiltonian::{branch_min, pi_pm, Hamiltonian, Side};
use crate::junction::{junction_distance, JunctionPoint};
use crate::numeric::{central_diff, dot, maximize_concave, maximize_concave_halfline, norm, ConcaveSearch};

/// Germ membership tolerance used for the `converged` flag.
pub const GERM_TOL: f64 = 1e-8;

/// Result of one evaluation of `G^0`.
#[derive(Clone, Debug, PartialEq)]
pub struct VtfEvaluation {
    pub value: f64,
    /// Branch pair `(i, j)` the formula was evaluated with.
    pub branches: (usize, usize),
    /// Maximizing tangential momentum `p'`.
    pub p_tan: Vec<f64>,
    /// Maximizing level `lambda`.
    pub level: f64,
    /// Reconstructed normal momenta `(pi_i^+(p', l), pi_j^-(p', l))`.
    pub p_hat: (f64, f64),
    /// Least-squares multipliers of `Z = D(alpha . H)(P)` over
    /// `(H_i, H_j, A)` (or `(H_i, A)` when `i = j`); empty when singular.
    pub multipliers: Vec<f64>,
    /// The maximizer satisfies `H_i(p', p_i) = l = H_j(p', p_j)` and
    /// `l >= A(p')` within [`GERM_TOL`].
    pub converged: bool,
}

impl VtfEvaluation {
    /// Multipliers lie in the simplex within `tol`.
    pub fn multipliers_in_simplex(&self, tol: f64) -> bool {
        !self.multipliers.is_empty()
            && self.multipliers.iter().all(|&a| a >= -tol)
            && (self.multipliers.iter().sum::<f64>() - 1.0).abs() <= tol
    }
}

/// A momentum at a junction point: `(p', p)` on a branch, or `(p', p_1..p_N)`
/// at an interface point.
#[derive(Clone, Debug, PartialEq)]
pub enum Momentum {
    Branch { branch: usize, p_tan: Vec<f64>, p: f64 },
    Interface { p_tan: Vec<f64>, slopes: Vec<f64> },
}

impl Momentum {
    pub fn p_tan(&self) -> &[f64] {
        match self {
            Momentum::Branch { p_tan, .. } | Momentum::Interface { p_tan, .. } => p_tan,
        }
    }

    pub fn negated(&self) -> Momentum {
        match self {
            Momentum::Branch { branch, p_tan, p } => {
                Momentum::Branch { branch: *branch, p_tan: p_tan.iter().map(|x| -x).collect(), p: -p }
            }
            Momentum::Interface { p_tan, slopes } => Momentum::Interface {
                p_tan: p_tan.iter().map(|x| -x).collect(),
                slopes: slopes.iter().map(|x| -x).collect(),
            },
        }
    }
}

/// `G^0` for given branch Hamiltonians and a flux limiter, which should be
/// convex, smooth and above `A_0`.
#[derive(Clone, Debug)]
pub struct VertexTestFunction {
    pub hamiltonians: Vec<Arc<dyn Hamiltonian>>,
    pub limiter: Arc<dyn FluxLimiter>,
    /// Relative argument tolerance of the golden-section searches.
    pub tol: f64,
}

impl VertexTestFunction {
    pub fn new(hamiltonians: Vec<Arc<dyn Hamiltonian>>, limiter: Arc<dyn FluxLimiter>) -> Result<Self> {
        if hamiltonians.is_empty() {
            return Err(Error::InvalidProblem("at least one branch Hamiltonian is required".into()));
        }
        let d = limiter.dim();
        for h in &hamiltonians {
            if h.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: h.dim() });
            }
        }
        Ok(VertexTestFunction { hamiltonians, limiter, tol: 1e-12 })
    }

    pub fn dim(&self) -> usize {
        self.limiter.dim()
    }

    /// Sampled `p'` in `[-radius, radius]^d` where `A(p') < A_0(p') - 1e-12`.
    pub fn a0_violations(&self, samples: usize, radius: f64, seed: u64) -> Result<Vec<Vec<f64>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bad = Vec::new();
        for _ in 0..samples {
            let p: Vec<f64> = (0..self.dim()).map(|_| rng.gen_range(-radius..radius)).collect();
            if self.limiter.eval(&p) < a0(&self.hamiltonians, &p)? - 1e-12 {
                bad.push(p);
            }
        }
        Ok(bad)
    }

    fn pair(&self, x: &JunctionPoint, y: &JunctionPoint) -> (usize, usize) {
        match (x.on_interface(), y.on_interface()) {
            (true, true) => (0, 0),
            (true, false) => (y.branch, y.branch),
            (false, true) => (x.branch, x.branch),
            (false, false) => (x.branch, y.branch),
        }
    }

    fn floor(&self, p_tan: &[f64], i: usize, j: usize) -> Result<f64> {
        let mut m = self.limiter.eval(p_tan);
        m = m.max(branch_min(&self.hamiltonians[i], p_tan)?);
        if j != i {
            m = m.max(branch_min(&self.hamiltonians[j], p_tan)?);
        }
        if !m.is_finite() {
            return Err(Error::Divergence(format!("limiter is not finite at p' = {p_tan:?}")));
        }
        Ok(m)
    }

    /// Normal momenta `(p_i, p_j)` of the germ at level `l`.
    fn normal_momenta(&self, p_tan: &[f64], level: f64, i: usize, j: usize, x: f64, y: f64) -> Result<(f64, f64)> {
        let (hi, hj) = (&self.hamiltonians[i], &self.hamiltonians[j]);
        if i == j {
            let side = if x >= y { Side::Plus } else { Side::Minus };
            let p = pi_pm(hi, p_tan, level, side)?;
            Ok((p, p))
        } else {
            Ok((pi_pm(hi, p_tan, level, Side::Plus)?, pi_pm(hj, p_tan, level, Side::Minus)?))
        }
    }

    fn objective(&self, p_tan: &[f64], z_tan: &[f64], level: f64, ij: (usize, usize), x: f64, y: f64) -> Result<f64> {
        let (pi, pj) = self.normal_momenta(p_tan, level, ij.0, ij.1, x, y)?;
        let normal = if ij.0 == ij.1 { pi * (x - y) } else { pi * x - pj * y };
        Ok(dot(p_tan, z_tan) + normal - level)
    }

    /// `sup_l` of the objective at fixed `p'`: `(l*, value)`.
    fn inner(&self, p_tan: &[f64], z_tan: &[f64], ij: (usize, usize), x: f64, y: f64) -> Result<(f64, f64)> {
        let lo = self.floor(p_tan, ij.0, ij.1)?;
        if x == 0.0 && y == 0.0 {
            return Ok((lo, dot(p_tan, z_tan) - lo));
        }
        let mut failure = None;
        let r = maximize_concave_halfline(
            |l| match self.objective(p_tan, z_tan, l, ij, x, y) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            },
            lo,
            self.tol,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        r
    }

    /// Evaluates `G^0(X, Y)` with its maximizer.
    pub fn eval(&self, x: &JunctionPoint, y: &JunctionPoint) -> Result<VtfEvaluation> {
        let d = self.dim();
        if x.dim() != d || y.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: x.dim().max(y.dim()) });
        }
        let ij = self.pair(x, y);
        let (xn, yn) = (x.normal, y.normal);
        let z_tan: Vec<f64> = x.tangential.iter().zip(&y.tangential).map(|(a, b)| a - b).collect();

        let mut search = ConcaveSearch::with_radius(8.0 * (1.0 + norm(&z_tan)));
        search.tol = self.tol;
        let mut failure = None;
        let (p_tan, value) = maximize_concave(
            |p: &[f64]| match self.inner(p, &z_tan, ij, xn, yn) {
                Ok((_, v)) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            },
            &vec![0.0; d],
            &search,
        )
        .map_err(|e| failure.take().unwrap_or(e))?;
        if let Some(e) = failure {
            return Err(e);
        }
        let (level, _) = self.inner(&p_tan, &z_tan, ij, xn, yn)?;
        let p_hat = self.normal_momenta(&p_tan, level, ij.0, ij.1, xn, yn)?;

        let (hi, hj) = (&self.hamiltonians[ij.0], &self.hamiltonians[ij.1]);
        let a = self.limiter.eval(&p_tan);
        let on_level =
            |h: &Arc<dyn Hamiltonian>, p: f64| (h.eval(&p_tan, p) - level).abs() <= GERM_TOL * level.abs().max(1.0);
        let converged = on_level(hi, p_hat.0) && on_level(hj, p_hat.1) && level >= a - GERM_TOL;
        let z_normal = if ij.0 == ij.1 { vec![xn - yn] } else { vec![xn, -yn] };
        let multipliers = self.multipliers(&p_tan, p_hat, ij, &z_tan, &z_normal);

        Ok(VtfEvaluation { value, branches: ij, p_tan, level, p_hat, multipliers, converged })
    }

    fn multipliers(
        &self,
        p_tan: &[f64],
        p_hat: (f64, f64),
        ij: (usize, usize),
        z_tan: &[f64],
        z_normal: &[f64],
    ) -> Vec<f64> {
        const H: f64 = 1e-6;
        let d = p_tan.len();
        let grad_h = |h: &Arc<dyn Hamiltonian>, p: f64| -> (Vec<f64>, f64) {
            let tan = (0..d)
                .map(|a| {
                    central_diff(
                        |t| {
                            let mut q = p_tan.to_vec();
                            q[a] = t;
                            h.eval(&q, p)
                        },
                        p_tan[a],
                        H,
                    )
                })
                .collect();
            (tan, central_diff(|t| h.eval(p_tan, t), p, H))
        };
        let grad_a: Vec<f64> = (0..d)
            .map(|a| {
                central_diff(
                    |t| {
                        let mut q = p_tan.to_vec();
                        q[a] = t;
                        self.limiter.eval(&q)
                    },
                    p_tan[a],
                    H,
                )
            })
            .collect();
        let rows = d + z_normal.len();
        let mut columns: Vec<Vec<f64>> = Vec::new();
        let (ti, ni) = grad_h(&self.hamiltonians[ij.0], p_hat.0);
        let mut col = ti;
        col.push(ni);
        if ij.0 != ij.1 {
            col.push(0.0);
            let (tj, nj) = grad_h(&self.hamiltonians[ij.1], p_hat.1);
            let mut cj = tj;
            cj.push(0.0);
            cj.push(nj);
            columns.push(col);
            columns.push(cj);
        } else {
            columns.push(col);
        }
        let mut ca = grad_a;
        ca.resize(rows, 0.0);
        columns.push(ca);
        let mut rhs: Vec<f64> = z_tan.iter().chain(z_normal).copied().collect();
        // the multipliers sum to one
        for c in columns.iter_mut() {
            c.push(1.0);
        }
        rhs.push(1.0);
        least_squares(&columns, &rhs).unwrap_or_default()
    }

    /// `(D_X G^0, D_Y G^0)` from the maximizer. Refuses the singular set
    /// `{x = y > 0}` on a common branch.
    pub fn gradient(&self, x: &JunctionPoint, y: &JunctionPoint) -> Result<(Momentum, Momentum)> {
        let same_branch = x.branch == y.branch || x.on_interface() || y.on_interface();
        if same_branch && x.normal == y.normal && x.normal > 0.0 {
            return Err(Error::SingularSet);
        }
        let ev = self.eval(x, y)?;
        self.gradient_from(x, y, &ev)
    }

    /// Gradients assembled from an existing evaluation.
    pub fn gradient_from(
        &self,
        x: &JunctionPoint,
        y: &JunctionPoint,
        ev: &VtfEvaluation,
    ) -> Result<(Momentum, Momentum)> {
        let p_tan = ev.p_tan.clone();
        let minus_tan: Vec<f64> = p_tan.iter().map(|v| -v).collect();
        let level = ev.level;
        let (i, j) = ev.branches;
        let n = self.hamiltonians.len();
        let pi = |k: usize, side: Side| pi_pm(&self.hamiltonians[k], &p_tan, level, side);

        let dx = if x.on_interface() {
            let slopes = (0..n)
                .map(|k| {
                    if !y.on_interface() && k == y.branch && y.normal > 0.0 {
                        pi(k, Side::Minus)
                    } else {
                        pi(k, Side::Plus)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Momentum::Interface { p_tan: p_tan.clone(), slopes }
        } else {
            Momentum::Branch { branch: x.branch, p_tan: p_tan.clone(), p: ev.p_hat.0 }
        };
        let dy = if y.on_interface() {
            let slopes = (0..n)
                .map(|k| {
                    let side =
                        if !x.on_interface() && k == x.branch && x.normal > 0.0 { Side::Plus } else { Side::Minus };
                    pi(k, side).map(|p| -p)
                })
                .collect::<Result<Vec<_>>>()?;
            Momentum::Interface { p_tan: minus_tan, slopes }
        } else {
            let p = if i == j { ev.p_hat.0 } else { ev.p_hat.1 };
            Momentum::Branch { branch: y.branch, p_tan: minus_tan, p: -p }
        };
        Ok((dx, dy))
    }

    /// `H(X, q)`: `H_i(q)` on branch `i`, `F_A(q)` at interface points.
    pub fn hamiltonian_at(&self, q: &Momentum) -> Result<f64> {
        match q {
            Momentum::Branch { branch, p_tan, p } => Ok(self.hamiltonians[*branch].eval(p_tan, *p)),
            Momentum::Interface { p_tan, slopes } => {
                flux_limited_value(self.limiter.eval(p_tan), &self.hamiltonians, p_tan, slopes)
            }
        }
    }

    /// `H(Y, -D_Y G^0) - H(X, D_X G^0)`.
    pub fn compatibility_residual(&self, x: &JunctionPoint, y: &JunctionPoint) -> Result<f64> {
        let (dx, dy) = self.gradient(x, y)?;
        Ok(self.hamiltonian_at(&dy.negated())? - self.hamiltonian_at(&dx)?)
    }

    /// For each radius `r`, the minimum of `G^0` over `samples` random pairs
    /// at junction distance `r` with `x'` in `[-1, 1]^d`.
    pub fn superlinearity_probe(&self, radii: &[f64], samples: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut table = Vec::with_capacity(radii.len());
        for &r in radii {
            let mut m = f64::INFINITY;
            for _ in 0..samples {
                let (x, y) = random_pair_at_distance(&mut rng, self.hamiltonians.len(), self.dim(), r);
                debug_assert!((junction_distance(&x, &y) - r).abs() <= 1e-9 * r.max(1.0));
                m = m.min(self.eval(&x, &y)?.value);
            }
            table.push((r, m));
        }
        Ok(table)
    }
}

/// Random pair `(X, Y)` with `d(X, Y) = r`, `x'` uniform in `[-1, 1]^d`.
pub fn random_pair_at_distance(
    rng: &mut ChaCha8Rng,
    branches: usize,
    d: usize,
    r: f64,
) -> (JunctionPoint, JunctionPoint) {
    let i = rng.gen_range(0..branches);
    let j = rng.gen_range(0..branches);
    let xt: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let tan_share = if d == 0 { 0.0 } else { rng.gen_range(0.0..1.0) };
    let dir: Vec<f64> = loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = norm(&v);
        if d == 0 {
            break v;
        }
        if n > 1e-3 && n <= 1.0 {
            break v.into_iter().map(|c| c / n).collect();
        }
    };
    let yt: Vec<f64> = xt.iter().zip(&dir).map(|(a, u)| a - tan_share * r * u).collect();
    let rest = (1.0 - tan_share) * r;
    let (xn, yn) = if i != j {
        let s = rng.gen_range(0.0..=1.0);
        (s * rest, (1.0 - s) * rest)
    } else {
        let low = rng.gen_range(0.0..=r);
        if rng.gen_bool(0.5) {
            (low + rest, low)
        } else {
            (low, low + rest)
        }
    };
    (JunctionPoint::new(i, xt, xn), JunctionPoint::new(j, yt, yn))
}

/// Solves `min |sum_k c_k columns[k] - rhs|` by the normal equations.
#[allow(clippy::needless_range_loop)]
fn least_squares(columns: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let k = columns.len();
    let mut m = vec![vec![0.0; k + 1]; k];
    for a in 0..k {
        for b in 0..k {
            m[a][b] = dot(&columns[a], &columns[b]);
        }
        m[a][k] = dot(&columns[a], rhs);
    }
    for c in 0..k {
        let piv = (c..k).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))?;
        if m[piv][c].abs() < 1e-14 {
            return None;
        }
        m.swap(c, piv);
        for r in 0..k {
            if r != c {
                let f = m[r][c] / m[c][c];
                for q in c..=k {
                    m[r][q] -= f * m[c][q];
                }
            }
        }
    }
    Some((0..k).map(|c| m[c][k] / m[c][c]).collect())
}
