//! The explicit time loop shared by all schemes: CFL step from sampled
//! bounds (or fixed coefficients), exact snapshot hits, lockstep runs.

use super::scheme::{Estimate, Scheme};
use super::StepCoefficients;
use crate::error::{Error, Result};

/// Time-loop settings.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSettings {
    pub final_time: f64,
    /// Output times in `(0, final_time]`; 0 and `final_time` are always
    /// recorded.
    pub snapshots: Vec<f64>,
    pub cfl: f64,
    pub dt_max: f64,
    pub fixed: Option<StepCoefficients>,
}

/// Upper bound on the number of time steps of one run.
pub const MAX_STEPS: usize = 50_000_000;

impl TimeSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.final_time >= 0.0) || !self.final_time.is_finite() {
            return Err(Error::InvalidProblem(format!("final time must be finite and >= 0, got {}", self.final_time)));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidProblem(format!("CFL factor must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.dt_max > 0.0) {
            return Err(Error::InvalidProblem(format!("dt_max must be positive, got {}", self.dt_max)));
        }
        if let Some(&t) = self.snapshots.iter().find(|&&t| !(t >= 0.0 && t <= self.final_time)) {
            return Err(Error::InvalidProblem(format!("snapshot time {t} lies outside [0, {}]", self.final_time)));
        }
        if let Some(c) = &self.fixed {
            if !(c.dt > 0.0) {
                return Err(Error::InvalidProblem("fixed time step must be positive".into()));
            }
        }
        Ok(())
    }

    /// `0`, the requested snapshots and `final_time`, sorted and deduplicated.
    pub fn output_times(&self) -> Vec<f64> {
        let mut times = vec![0.0];
        let mut rest: Vec<f64> = self.snapshots.iter().copied().filter(|&t| t > 0.0).collect();
        rest.push(self.final_time);
        rest.sort_by(f64::total_cmp);
        for t in rest {
            if t > *times.last().unwrap() {
                times.push(t);
            }
        }
        times
    }
}

/// `theta / (L / dx + sum_k alpha_k / dx_k)`, capped at `dt_max`.
pub fn cfl_step(cfl: f64, dt_max: f64, est: &Estimate, spacings: &(f64, Vec<Option<f64>>)) -> f64 {
    let mut rate = est.normal / spacings.0;
    for (a, dx) in est.tangential.iter().zip(&spacings.1) {
        if let Some(dx) = dx {
            rate += a / dx;
        }
    }
    if rate > 0.0 {
        (cfl / rate).min(dt_max)
    } else {
        dt_max
    }
}

/// Coefficients for one step of several schemes run together: the largest
/// bounds and the smallest admissible step.
pub fn shared_coefficients<S: Scheme>(
    schemes: &[S],
    states: &[Vec<f64>],
    settings: &TimeSettings,
) -> Result<StepCoefficients> {
    let mut est: Option<Estimate> = None;
    for (s, v) in schemes.iter().zip(states) {
        let e = s.estimate(v)?;
        est = Some(match est {
            None => e,
            Some(prev) => prev.merge(&e),
        });
    }
    let est = est.ok_or_else(|| Error::InvalidProblem("no scheme to run".into()))?;
    let spacings = schemes[0].spacings();
    match &settings.fixed {
        None => Ok(StepCoefficients {
            dt: cfl_step(settings.cfl, settings.dt_max, &est, &spacings),
            normal_lipschitz: est.normal,
            tangential_dissipation: est.tangential,
        }),
        Some(fixed) => {
            let covered = fixed.normal_lipschitz >= est.normal
                && fixed.tangential_dissipation.len() == est.tangential.len()
                && fixed.tangential_dissipation.iter().zip(&est.tangential).all(|(f, e)| f >= e);
            let bound = cfl_step(
                settings.cfl,
                f64::INFINITY,
                &Estimate { normal: fixed.normal_lipschitz, tangential: fixed.tangential_dissipation.clone() },
                &spacings,
            );
            if !covered {
                let sampled = cfl_step(settings.cfl, f64::INFINITY, &est, &spacings);
                return Err(Error::CflViolation { dt: fixed.dt, bound: sampled.min(bound) });
            }
            if fixed.dt > bound * (1.0 + 1e-12) {
                return Err(Error::CflViolation { dt: fixed.dt, bound });
            }
            Ok(fixed.clone())
        }
    }
}

/// Snapshots `(time, values)` of each scheme, plus the step count.
pub struct LockstepRun {
    pub snapshots: Vec<Vec<(f64, Vec<f64>)>>,
    pub steps: usize,
}

/// Advances all schemes with shared coefficients. `observe` sees the
/// states after every step.
pub fn run_lockstep<S, O>(
    schemes: &[S],
    initial: Vec<Vec<f64>>,
    settings: &TimeSettings,
    mut observe: O,
) -> Result<LockstepRun>
where
    S: Scheme,
    O: FnMut(f64, &[Vec<f64>]),
{
    settings.validate()?;
    let times = settings.output_times();
    let mut states = initial;
    let mut snapshots: Vec<Vec<(f64, Vec<f64>)>> = states.iter().map(|s| vec![(0.0, s.clone())]).collect();
    let mut t = 0.0;
    let mut steps = 0;
    let mut next = 1;
    while next < times.len() {
        if steps >= MAX_STEPS {
            return Err(Error::NonConvergence(format!("time loop exceeded {MAX_STEPS} steps at t = {t}")));
        }
        let coeffs = shared_coefficients(schemes, &states, settings)?;
        let target = times[next];
        let hit = t + coeffs.dt >= target - 1e-12 * target.max(1.0);
        let dt = if hit { target - t } else { coeffs.dt };
        states = schemes
            .iter()
            .zip(&states)
            .map(|(s, v)| s.update(v, dt, &coeffs.tangential_dissipation))
            .collect::<Result<_>>()?;
        t = if hit { target } else { t + dt };
        steps += 1;
        observe(t, &states);
        if hit {
            for (snap, s) in snapshots.iter_mut().zip(&states) {
                snap.push((t, s.clone()));
            }
            next += 1;
        }
    }
    Ok(LockstepRun { snapshots, steps })
}
