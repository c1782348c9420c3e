//! Explicit monotone finite-difference solver for `u_t + H_i(Du) = 0` on the
//! branches with the flux-limited condition `u_t + F_A(Du) = 0` on the
//! interface, plus a whole-space solver and the Hopf-Lax oracle.
//!
//! The normal direction uses the Godunov flux `max(H^-(p^+), H^+(p^-))`, the
//! tangential directions local Lax-Friedrichs with one dissipation
//! coefficient per axis, and the interface node `F_A` of the one-sided
//! normal slopes. Outer and tangential boundaries copy the boundary value
//! into the ghost node.

mod driver;
mod euclidean;
mod hopf_lax;
mod lipschitz;
mod scheme;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use driver::{cfl_step, TimeSettings, MAX_STEPS};
pub use euclidean::{solve_euclidean, EuclideanProblem, EuclideanTrajectory};
pub use hopf_lax::{hopf_lax, HopfLax};
pub use lipschitz::{hamiltonian_bounds, limiter_bounds, GradientBox, LIPSCHITZ_SAFETY};
pub use scheme::{Estimate, JunctionScheme, Scheme, TangentialStencil};

use crate::condition::{FluxLimiter, JunctionFunction, LatticeLimiter, ReducedLimiter};
use crate::error::{Error, Result};
use crate::hamiltonian::{envelope, Hamiltonian, Side};
use crate::junction::{Field, JunctionGrid};

/// Default CFL factor.
pub const DEFAULT_CFL: f64 = 0.9;

/// Default cap on the time step.
pub const DEFAULT_DT_MAX: f64 = 0.1;

/// Godunov flux of `p -> H(p', p)`: the minimum of `H` over
/// `[p_minus, p_plus]` when `p_minus <= p_plus`, else the maximum over
/// `[p_plus, p_minus]`; computed as `max(H^-(p_plus), H^+(p_minus))`.
pub fn godunov_flux<H: Hamiltonian + ?Sized>(h: &H, p_tan: &[f64], p_minus: f64, p_plus: f64) -> Result<f64> {
    Ok(envelope(h, p_tan, p_plus, Side::Minus)?.max(envelope(h, p_tan, p_minus, Side::Plus)?))
}

/// Coefficients of one explicit step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepCoefficients {
    pub dt: f64,
    /// Bound on `|dH/dp|` over the normal gradients.
    pub normal_lipschitz: f64,
    /// Lax-Friedrichs coefficient per tangential axis.
    pub tangential_dissipation: Vec<f64>,
}

/// A Cauchy problem on the junction.
#[derive(Clone, Debug)]
pub struct Problem {
    pub grid: Arc<JunctionGrid>,
    pub hamiltonians: Vec<Arc<dyn Hamiltonian>>,
    pub limiter: Arc<dyn FluxLimiter>,
    pub initial: Field,
    pub settings: TimeSettings,
}

impl Problem {
    pub fn new(
        hamiltonians: Vec<Arc<dyn Hamiltonian>>,
        limiter: Arc<dyn FluxLimiter>,
        initial: Field,
        final_time: f64,
    ) -> Result<Self> {
        let p = Problem {
            grid: initial.grid.clone(),
            hamiltonians,
            limiter,
            initial,
            settings: TimeSettings {
                final_time,
                snapshots: Vec::new(),
                cfl: DEFAULT_CFL,
                dt_max: DEFAULT_DT_MAX,
                fixed: None,
            },
        };
        p.validate()?;
        Ok(p)
    }

    /// Problem with a general junction function, reduced to its effective
    /// limiter on the lattice `1e-6 Z^d`.
    pub fn with_junction_function(
        hamiltonians: Vec<Arc<dyn Hamiltonian>>,
        function: Arc<dyn JunctionFunction>,
        initial: Field,
        final_time: f64,
    ) -> Result<Self> {
        let reduced = Arc::new(ReducedLimiter::new(function, hamiltonians.clone()));
        Problem::new(hamiltonians, Arc::new(LatticeLimiter::new(reduced)), initial, final_time)
    }

    pub fn with_snapshots(mut self, times: Vec<f64>) -> Result<Self> {
        self.settings.snapshots = times;
        self.validate()?;
        Ok(self)
    }

    pub fn with_cfl(mut self, cfl: f64) -> Result<Self> {
        self.settings.cfl = cfl;
        self.validate()?;
        Ok(self)
    }

    pub fn with_dt_max(mut self, dt_max: f64) -> Result<Self> {
        self.settings.dt_max = dt_max;
        self.validate()?;
        Ok(self)
    }

    /// Runs with the given coefficients at every step (still clipped at
    /// snapshot times). Every step checks that they dominate the sampled
    /// bounds and satisfy the CFL condition.
    pub fn with_fixed_coefficients(mut self, coefficients: StepCoefficients) -> Result<Self> {
        self.settings.fixed = Some(coefficients);
        self.validate()?;
        Ok(self)
    }

    pub fn with_initial(&self, initial: Field) -> Result<Self> {
        let mut p = self.clone();
        p.initial = initial;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        if self.hamiltonians.len() != g.branches() {
            return Err(Error::InvalidProblem(format!(
                "{} Hamiltonians for {} branches",
                self.hamiltonians.len(),
                g.branches()
            )));
        }
        for h in &self.hamiltonians {
            if h.dim() != g.dim() {
                return Err(Error::DimensionMismatch { expected: g.dim(), got: h.dim() });
            }
        }
        if self.limiter.dim() != g.dim() {
            return Err(Error::DimensionMismatch { expected: g.dim(), got: self.limiter.dim() });
        }
        if g.normal_layers() == 0 {
            return Err(Error::InvalidGrid("each branch needs at least one normal layer".into()));
        }
        if *self.initial.grid != **g || self.initial.values.len() != g.node_count() {
            return Err(Error::InvalidProblem("initial field lives on another grid".into()));
        }
        if let Some(i) = self.initial.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem(format!("initial value at node {i} is not finite")));
        }
        self.settings.validate()
    }

    fn scheme(&self) -> JunctionScheme<'_> {
        JunctionScheme::new(&self.grid, &self.hamiltonians, self.limiter.as_ref())
    }
}

/// Snapshots of a run; `fields[k].time` is the `k`-th output time.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub fields: Vec<Field>,
    pub steps: usize,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.fields.iter().map(|f| f.time).collect()
    }

    pub fn last(&self) -> &Field {
        self.fields.last().expect("a trajectory holds at least the initial field")
    }
}

/// Sampled bounds and CFL step for `field`.
pub fn coefficients(problem: &Problem, field: &Field) -> Result<StepCoefficients> {
    let scheme = problem.scheme();
    let est = scheme.estimate(&field.values)?;
    Ok(StepCoefficients {
        dt: cfl_step(problem.settings.cfl, problem.settings.dt_max, &est, &scheme.spacings()),
        normal_lipschitz: est.normal,
        tangential_dissipation: est.tangential,
    })
}

/// CFL time step for `field`.
pub fn cfl_dt(problem: &Problem, field: &Field) -> Result<f64> {
    Ok(coefficients(problem, field)?.dt)
}

/// One explicit step of size `dt` with coefficients sampled on `field`.
pub fn step(problem: &Problem, field: &Field, dt: f64) -> Result<Field> {
    let c = coefficients(problem, field)?;
    let bound = cfl_step(
        problem.settings.cfl,
        f64::INFINITY,
        &Estimate { normal: c.normal_lipschitz, tangential: c.tangential_dissipation.clone() },
        &problem.scheme().spacings(),
    );
    if dt > bound * (1.0 + 1e-12) {
        return Err(Error::CflViolation { dt, bound });
    }
    let values = problem.scheme().update(&field.values, dt, &c.tangential_dissipation)?;
    Ok(Field { grid: field.grid.clone(), values, time: field.time + dt })
}

fn to_trajectory(grid: &Arc<JunctionGrid>, snaps: Vec<(f64, Vec<f64>)>, steps: usize) -> Trajectory {
    Trajectory {
        fields: snaps.into_iter().map(|(time, values)| Field { grid: grid.clone(), values, time }).collect(),
        steps,
    }
}

/// Runs the problem to its final time.
pub fn solve(problem: &Problem) -> Result<Trajectory> {
    Ok(solve_lockstep(std::slice::from_ref(problem))?.pop().expect("one trajectory per problem"))
}

fn check_compatible(problems: &[Problem]) -> Result<()> {
    let first = problems.first().ok_or_else(|| Error::InvalidProblem("no problem to run".into()))?;
    for p in problems {
        p.validate()?;
        if *p.grid != *first.grid {
            return Err(Error::InvalidProblem("lockstep problems must share the grid".into()));
        }
        if p.settings.final_time != first.settings.final_time
            || p.settings.output_times() != first.settings.output_times()
        {
            return Err(Error::InvalidProblem("lockstep problems must share final and output times".into()));
        }
    }
    Ok(())
}

fn lockstep_settings(problems: &[Problem]) -> TimeSettings {
    let mut s = problems[0].settings.clone();
    for p in problems {
        s.cfl = s.cfl.min(p.settings.cfl);
        s.dt_max = s.dt_max.min(p.settings.dt_max);
    }
    s
}

/// Runs several problems on one grid with shared coefficients: at every
/// step the largest sampled bounds and the smallest step of all runs. The
/// scheme is monotone for each of them, so nodewise orderings between the
/// runs are preserved exactly.
pub fn solve_lockstep(problems: &[Problem]) -> Result<Vec<Trajectory>> {
    check_compatible(problems)?;
    let settings = lockstep_settings(problems);
    let schemes: Vec<_> = problems.iter().map(|p| p.scheme()).collect();
    let initial = problems.iter().map(|p| p.initial.values.clone()).collect();
    let run = driver::run_lockstep(&schemes, initial, &settings, |_, _| {})?;
    Ok(run.snapshots.into_iter().map(|s| to_trajectory(&problems[0].grid, s, run.steps)).collect())
}

/// Outcome of [`discrete_comparison`].
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    /// `max (u - v)_+` over all steps and nodes, the initial data included.
    pub max_violation: f64,
    /// `min (v - u)` over all steps and nodes.
    pub min_gap: f64,
    pub steps: usize,
}

/// Runs the problem from `u0` and from `v0` in lockstep and records the
/// largest positive part of `u - v`.
pub fn discrete_comparison(problem: &Problem, u0: &Field, v0: &Field) -> Result<ComparisonReport> {
    let pu = problem.with_initial(u0.clone())?;
    let pv = problem.with_initial(v0.clone())?;
    let probs = [pu, pv];
    check_compatible(&probs)?;
    let settings = lockstep_settings(&probs);
    let schemes: Vec<_> = probs.iter().map(|p| p.scheme()).collect();
    let mut max_violation = 0.0f64;
    let mut min_gap = f64::INFINITY;
    let mut record = |u: &[f64], v: &[f64]| {
        for (a, b) in u.iter().zip(v) {
            max_violation = max_violation.max(a - b);
            min_gap = min_gap.min(b - a);
        }
    };
    record(&u0.values, &v0.values);
    let run = driver::run_lockstep(&schemes, vec![u0.values.clone(), v0.values.clone()], &settings, |_, s| {
        record(&s[0], &s[1])
    })?;
    Ok(ComparisonReport { max_violation: max_violation.max(0.0), min_gap, steps: run.steps })
}
