//! The same monotone scheme on the whole space `R^{d+1}`, with `H_L` on
//! `x_{d+1} < 0`, `H_R` on `x_{d+1} > 0` and the Godunov flux
//! `max(H_L^+(p^-), H_R^-(p^+))` on the layer `x_{d+1} = 0`.

use std::sync::Arc;

use super::driver::{run_lockstep, TimeSettings};
use super::lipschitz::{hamiltonian_bounds, include, GradientBox};
use super::scheme::{axis_spacings, finite, map_nodes, Estimate, Scheme, TangentialStencil};
use super::{godunov_flux, StepCoefficients, DEFAULT_CFL, DEFAULT_DT_MAX};
use crate::error::{Error, Result};
use crate::hamiltonian::{envelope, Hamiltonian, Side};
use crate::junction::{EuclideanField, EuclideanGrid};

/// A Cauchy problem on the whole space.
#[derive(Clone, Debug)]
pub struct EuclideanProblem {
    pub grid: Arc<EuclideanGrid>,
    pub left: Arc<dyn Hamiltonian>,
    pub right: Arc<dyn Hamiltonian>,
    pub initial: EuclideanField,
    pub settings: TimeSettings,
}

impl EuclideanProblem {
    pub fn new(
        left: Arc<dyn Hamiltonian>,
        right: Arc<dyn Hamiltonian>,
        initial: EuclideanField,
        final_time: f64,
    ) -> Result<Self> {
        let p = EuclideanProblem {
            grid: initial.grid.clone(),
            left,
            right,
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

    pub fn with_snapshots(mut self, times: Vec<f64>) -> Result<Self> {
        self.settings.snapshots = times;
        self.validate()?;
        Ok(self)
    }

    pub fn with_fixed_coefficients(mut self, coefficients: StepCoefficients) -> Result<Self> {
        self.settings.fixed = Some(coefficients);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.grid.dim();
        for h in [&self.left, &self.right] {
            if h.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: h.dim() });
            }
        }
        if self.grid.half_layers() == 0 {
            return Err(Error::InvalidGrid("the normal axis needs at least one layer per side".into()));
        }
        if self.initial.values.len() != self.grid.node_count() {
            return Err(Error::DimensionMismatch { expected: self.grid.node_count(), got: self.initial.values.len() });
        }
        if self.initial.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem("initial values must be finite".into()));
        }
        self.settings.validate()
    }
}

/// Snapshots of a whole-space run.
#[derive(Clone, Debug, PartialEq)]
pub struct EuclideanTrajectory {
    pub fields: Vec<EuclideanField>,
    pub steps: usize,
}

struct EuclideanScheme<'a> {
    problem: &'a EuclideanProblem,
    stencil: TangentialStencil,
}

impl EuclideanScheme<'_> {
    fn gradient_box(&self, values: &[f64]) -> GradientBox {
        let g = &*self.problem.grid;
        let m = g.half_layers() as isize;
        let dx = g.normal_spacing();
        let mut bx = GradientBox::empty(g.dim());
        for k in -m..=m {
            self.stencil.extend_ranges(values, g.index(k, 0), &mut bx.tangential);
            if k > -m {
                for t in 0..g.layer_size() {
                    include(&mut bx.normal, (values[g.index(k, t)] - values[g.index(k - 1, t)]) / dx);
                }
            }
        }
        bx
    }
}

impl Scheme for EuclideanScheme<'_> {
    fn estimate(&self, values: &[f64]) -> Result<Estimate> {
        let bx = self.gradient_box(values);
        let (ll, lt) = hamiltonian_bounds(&self.problem.left, &bx)?;
        let (rl, rt) = hamiltonian_bounds(&self.problem.right, &bx)?;
        Ok(Estimate { normal: ll, tangential: lt }.merge(&Estimate { normal: rl, tangential: rt }))
    }

    fn spacings(&self) -> (f64, Vec<Option<f64>>) {
        (self.problem.grid.normal_spacing(), axis_spacings(self.problem.grid.tangential_axes()))
    }

    fn update(&self, values: &[f64], dt: f64, alpha: &[f64]) -> Result<Vec<f64>> {
        let g = &*self.problem.grid;
        let m = g.half_layers() as isize;
        let dx = g.normal_spacing();
        map_nodes(g.node_count(), |idx| {
            let (k, t) = g.locate(idx);
            let u = values[idx];
            let (p_bar, dissipation) = self.stencil.terms(values, idx - t, t, alpha);
            let below = if k > -m { values[g.index(k - 1, t)] } else { u };
            let above = if k < m { values[g.index(k + 1, t)] } else { u };
            let p_minus = (u - below) / dx;
            let p_plus = (above - u) / dx;
            let flux = if k < 0 {
                godunov_flux(&self.problem.left, &p_bar, p_minus, p_plus)?
            } else if k > 0 {
                godunov_flux(&self.problem.right, &p_bar, p_minus, p_plus)?
            } else {
                envelope(&self.problem.left, &p_bar, p_minus, Side::Plus)?.max(envelope(
                    &self.problem.right,
                    &p_bar,
                    p_plus,
                    Side::Minus,
                )?)
            };
            finite(u - dt * (flux - dissipation), idx)
        })
    }
}

/// Runs a whole-space problem to its final time.
pub fn solve_euclidean(problem: &EuclideanProblem) -> Result<EuclideanTrajectory> {
    problem.validate()?;
    let scheme = EuclideanScheme { problem, stencil: TangentialStencil::new(problem.grid.tangential_axes()) };
    let run = run_lockstep(
        std::slice::from_ref(&scheme),
        vec![problem.initial.values.clone()],
        &problem.settings,
        |_, _| {},
    )?;
    let snaps = run.snapshots.into_iter().next().expect("one run");
    Ok(EuclideanTrajectory {
        fields: snaps
            .into_iter()
            .map(|(time, values)| EuclideanField { grid: problem.grid.clone(), values, time })
            .collect(),
        steps: run.steps,
    })
}
