use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{flux_limited_value, FluxLimiter, JunctionFunction, LimiterSpec};
use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;

/// `F(p', p) = c - w . p`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearJunction {
    dim: usize,
    pub c: f64,
    pub w: Vec<f64>,
}

impl LinearJunction {
    pub fn new(dim: usize, c: f64, w: Vec<f64>) -> Self {
        LinearJunction { dim, c, w }
    }
}

impl JunctionFunction for LinearJunction {
    fn dim(&self) -> usize {
        self.dim
    }
    fn branches(&self) -> usize {
        self.w.len()
    }
    fn eval(&self, _p_tan: &[f64], slopes: &[f64]) -> Result<f64> {
        Ok(self.c - self.w.iter().zip(slopes).map(|(w, p)| w * p).sum::<f64>())
    }
    fn is_quasi_convex(&self) -> bool {
        true
    }
}

/// `F_A` as a junction function.
#[derive(Clone, Debug)]
pub struct FluxLimitedFunction {
    pub limiter: Arc<dyn FluxLimiter>,
    pub hamiltonians: Vec<Arc<dyn Hamiltonian>>,
}

impl FluxLimitedFunction {
    pub fn new(limiter: Arc<dyn FluxLimiter>, hamiltonians: Vec<Arc<dyn Hamiltonian>>) -> Self {
        FluxLimitedFunction { limiter, hamiltonians }
    }
}

impl JunctionFunction for FluxLimitedFunction {
    fn dim(&self) -> usize {
        self.limiter.dim()
    }
    fn branches(&self) -> usize {
        self.hamiltonians.len()
    }
    fn eval(&self, p_tan: &[f64], slopes: &[f64]) -> Result<f64> {
        flux_limited_value(self.limiter.eval(p_tan), &self.hamiltonians, p_tan, slopes)
    }
    fn is_quasi_convex(&self) -> bool {
        self.limiter.is_quasi_convex()
    }
}

type JunctionFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;

/// Junction function from a closure `(p', slopes) -> F`.
#[derive(Clone)]
pub struct FnJunction {
    dim: usize,
    branches: usize,
    quasi_convex: bool,
    f: Arc<JunctionFn>,
}

impl FnJunction {
    pub fn new<F>(dim: usize, branches: usize, quasi_convex: bool, f: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        FnJunction { dim, branches, quasi_convex, f: Arc::new(f) }
    }
}

impl fmt::Debug for FnJunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnJunction(d={}, N={})", self.dim, self.branches)
    }
}

impl JunctionFunction for FnJunction {
    fn dim(&self) -> usize {
        self.dim
    }
    fn branches(&self) -> usize {
        self.branches
    }
    fn eval(&self, p_tan: &[f64], slopes: &[f64]) -> Result<f64> {
        Ok((self.f)(p_tan, slopes))
    }
    fn is_quasi_convex(&self) -> bool {
        self.quasi_convex
    }
}

/// Configuration record for the built-in junction functions, e.g.
/// `{kind = "linear", c = 2.0, w = [1.0, 1.0]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum JunctionSpec {
    Linear { c: f64, w: Vec<f64> },
    FluxLimited { limiter: LimiterSpec },
}

impl JunctionSpec {
    pub fn build(&self, d: usize, hamiltonians: &[Arc<dyn Hamiltonian>]) -> Result<Arc<dyn JunctionFunction>> {
        Ok(match self {
            JunctionSpec::Linear { c, w } => {
                if w.len() != hamiltonians.len() {
                    return Err(Error::InvalidProblem(format!(
                        "w has {} weights for {} branches",
                        w.len(),
                        hamiltonians.len()
                    )));
                }
                if w.iter().any(|&x| x < 0.0) {
                    return Err(Error::InvalidProblem("negative weight makes F increasing".into()));
                }
                Arc::new(LinearJunction::new(d, *c, w.clone()))
            }
            JunctionSpec::FluxLimited { limiter } => {
                Arc::new(FluxLimitedFunction::new(limiter.build(d, hamiltonians)?, hamiltonians.to_vec()))
            }
        })
    }
}
