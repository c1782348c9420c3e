//! Two-domain problems `U_t + H_L(DU) = 0` on `x_{d+1} < 0`,
//! `U_t + H_R(DU) = 0` on `x_{d+1} > 0`, seen as a two-branch junction:
//! branch 0 is the left half-space with `H_1(p', p) = H_L(p', -p)`, branch 1
//! the right one with `H_2 = H_R`. The minimal and maximal Ishii solutions
//! are the flux-limited solutions for `A_I^+` and `A_I^-`.

use std::sync::Arc;

use crate::condition::{FluxLimiter, LatticeLimiter};
use crate::error::{Error, Result};
use crate::hamiltonian::{branch_min, pi0, Hamiltonian, Mirrored};
use crate::junction::{EuclideanField, EuclideanGrid, Field};
use crate::numeric::golden_max;
use crate::solver::{solve_lockstep, EuclideanTrajectory, Problem, TimeSettings, Trajectory};

/// Points of the dense scan in [`a_star`].
pub const A_STAR_SCAN: usize = 1 << 12;

/// Folds a whole-space field onto the two-branch junction:
/// `u(0, x', x) = U(x', -x)` and `u(1, x', x) = U(x', x)`.
pub fn fold(field: &EuclideanField) -> Field {
    let g = &field.grid;
    let jg = Arc::new(g.folded());
    let mut values = vec![0.0; jg.node_count()];
    for t in 0..g.layer_size() {
        values[jg.index(0, 0, t)] = field.values[g.index(0, t)];
        for n in 1..=g.half_layers() {
            values[jg.index(0, n, t)] = field.values[g.index(-(n as isize), t)];
            values[jg.index(1, n, t)] = field.values[g.index(n as isize, t)];
        }
    }
    Field { grid: jg, values, time: field.time }
}

/// Inverse of [`fold`].
pub fn unfold(field: &Field) -> Result<EuclideanField> {
    let jg = &field.grid;
    if jg.branches() != 2 {
        return Err(Error::InvalidGrid(format!("only two-branch junctions unfold, got {}", jg.branches())));
    }
    let g = Arc::new(EuclideanGrid::unfolding(jg));
    let mut values = vec![0.0; g.node_count()];
    for t in 0..g.layer_size() {
        values[g.index(0, t)] = field.values[jg.index(0, 0, t)];
        for n in 1..=g.half_layers() {
            values[g.index(-(n as isize), t)] = field.values[jg.index(0, n, t)];
            values[g.index(n as isize, t)] = field.values[jg.index(1, n, t)];
        }
    }
    Ok(EuclideanField { grid: g, values, time: field.time })
}

/// `(H_1, H_2) = (H_L(p', -p), H_R)`.
pub fn mirrored_hamiltonians(left: Arc<dyn Hamiltonian>, right: Arc<dyn Hamiltonian>) -> Vec<Arc<dyn Hamiltonian>> {
    vec![Arc::new(Mirrored::new(left)), right]
}

/// `A^*(p') = max { min(H_L, H_R)(p', p) : p between pi_L^0(p') and pi_R^0(p') }`,
/// by a dense scan followed by golden section around the best scan point.
pub fn a_star<L, R>(left: &L, right: &R, p_tan: &[f64]) -> Result<f64>
where
    L: Hamiltonian + ?Sized,
    R: Hamiltonian + ?Sized,
{
    let (a, b) = (pi0(left, p_tan)?, pi0(right, p_tan)?);
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let f = |p: f64| left.eval(p_tan, p).min(right.eval(p_tan, p));
    if hi <= lo {
        return Ok(f(lo));
    }
    let n = A_STAR_SCAN;
    let h = (hi - lo) / (n - 1) as f64;
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for i in 0..n {
        let v = f(lo + i as f64 * h);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let c = lo + best_i as f64 * h;
    let (_, refined) = golden_max(f, (c - h).max(lo), (c + h).min(hi), 1e-14);
    Ok(best.max(refined))
}

/// `A_0`, `A^*` and the Ishii limiters at one `p'`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IshiiLimiters {
    pub a0: f64,
    pub a_star: f64,
    /// Limiter of the maximal Ishii solution.
    pub minus: f64,
    /// Limiter of the minimal Ishii solution.
    pub plus: f64,
}

/// `A_I^+ = max(A_0, A^*)`; `A_I^- = A_I^+` when `pi_R^0 < pi_L^0`, else
/// `A_0`.
pub fn ishii_limiters<L, R>(left: &L, right: &R, p_tan: &[f64]) -> Result<IshiiLimiters>
where
    L: Hamiltonian + ?Sized,
    R: Hamiltonian + ?Sized,
{
    let a0 = branch_min(left, p_tan)?.max(branch_min(right, p_tan)?);
    let a_star = a_star(left, right, p_tan)?;
    let plus = a0.max(a_star);
    let minus = if pi0(right, p_tan)? < pi0(left, p_tan)? { plus } else { a0 };
    Ok(IshiiLimiters { a0, a_star, minus, plus })
}

/// Which Ishii limiter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IshiiSide {
    Minus,
    Plus,
}

/// `A_I^-` or `A_I^+` as a flux limiter (NaN where the evaluation fails).
#[derive(Clone, Debug)]
pub struct IshiiLimiter {
    pub left: Arc<dyn Hamiltonian>,
    pub right: Arc<dyn Hamiltonian>,
    pub side: IshiiSide,
}

impl FluxLimiter for IshiiLimiter {
    fn dim(&self) -> usize {
        self.left.dim()
    }

    fn eval(&self, p_tan: &[f64]) -> f64 {
        match ishii_limiters(&self.left, &self.right, p_tan) {
            Ok(l) => match self.side {
                IshiiSide::Minus => l.minus,
                IshiiSide::Plus => l.plus,
            },
            Err(_) => f64::NAN,
        }
    }
}

/// A two-domain Cauchy problem.
#[derive(Clone, Debug)]
pub struct TwoDomainProblem {
    pub left: Arc<dyn Hamiltonian>,
    pub right: Arc<dyn Hamiltonian>,
    pub initial: EuclideanField,
    pub settings: TimeSettings,
}

impl TwoDomainProblem {
    pub fn new(
        left: Arc<dyn Hamiltonian>,
        right: Arc<dyn Hamiltonian>,
        initial: EuclideanField,
        final_time: f64,
    ) -> Self {
        TwoDomainProblem {
            left,
            right,
            initial,
            settings: TimeSettings {
                final_time,
                snapshots: Vec::new(),
                cfl: crate::solver::DEFAULT_CFL,
                dt_max: crate::solver::DEFAULT_DT_MAX,
                fixed: None,
            },
        }
    }

    fn junction_problem(&self, side: IshiiSide) -> Result<Problem> {
        let limiter = IshiiLimiter { left: self.left.clone(), right: self.right.clone(), side };
        let mut p = Problem::new(
            mirrored_hamiltonians(self.left.clone(), self.right.clone()),
            Arc::new(LatticeLimiter::new(Arc::new(limiter))),
            fold(&self.initial),
            self.settings.final_time,
        )?;
        p.settings = self.settings.clone();
        p.validate()?;
        Ok(p)
    }
}

/// The two extremal Ishii solutions, unfolded.
#[derive(Clone, Debug)]
pub struct ExtremalSolutions {
    /// Minimal Ishii solution `U^-`, flux-limited by `A_I^+`.
    pub minimal: EuclideanTrajectory,
    /// Maximal Ishii solution `U^+`, flux-limited by `A_I^-`.
    pub maximal: EuclideanTrajectory,
}

fn unfold_trajectory(t: &Trajectory) -> Result<EuclideanTrajectory> {
    Ok(EuclideanTrajectory { fields: t.fields.iter().map(unfold).collect::<Result<_>>()?, steps: t.steps })
}

/// Runs the junction problem with `A_I^+` and with `A_I^-` in lockstep and
/// unfolds both runs.
pub fn extremal_solutions(problem: &TwoDomainProblem) -> Result<ExtremalSolutions> {
    let runs =
        solve_lockstep(&[problem.junction_problem(IshiiSide::Plus)?, problem.junction_problem(IshiiSide::Minus)?])?;
    Ok(ExtremalSolutions { minimal: unfold_trajectory(&runs[0])?, maximal: unfold_trajectory(&runs[1])? })
}
