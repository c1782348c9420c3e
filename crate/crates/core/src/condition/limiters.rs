use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use super::{a0, reduce_to_limiter, FluxLimiter, JunctionFunction};
use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;

/// `A(p') = value`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantLimiter {
    dim: usize,
    pub value: f64,
}

impl ConstantLimiter {
    pub fn new(dim: usize, value: f64) -> Self {
        ConstantLimiter { dim, value }
    }
}

impl FluxLimiter for ConstantLimiter {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, _p_tan: &[f64]) -> f64 {
        self.value
    }
    fn is_quasi_convex(&self) -> bool {
        true
    }
}

/// `A(p') = base + curvature |p' - centre|^2`, convex for `curvature >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticLimiter {
    pub base: f64,
    pub curvature: f64,
    pub centre: Vec<f64>,
}

impl QuadraticLimiter {
    pub fn new(base: f64, curvature: f64, centre: Vec<f64>) -> Self {
        QuadraticLimiter { base, curvature, centre }
    }
}

impl FluxLimiter for QuadraticLimiter {
    fn dim(&self) -> usize {
        self.centre.len()
    }
    fn eval(&self, p_tan: &[f64]) -> f64 {
        self.base + self.curvature * p_tan.iter().zip(&self.centre).map(|(p, c)| (p - c) * (p - c)).sum::<f64>()
    }
    fn is_quasi_convex(&self) -> bool {
        self.curvature >= 0.0
    }
}

type LimiterFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Limiter from a closure.
#[derive(Clone)]
pub struct FnLimiter {
    dim: usize,
    quasi_convex: bool,
    f: Arc<LimiterFn>,
}

impl FnLimiter {
    pub fn new<F>(dim: usize, quasi_convex: bool, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        FnLimiter { dim, quasi_convex, f: Arc::new(f) }
    }

    /// `A_0` of the given branch Hamiltonians.
    pub fn branch_maximum(hamiltonians: Vec<Arc<dyn Hamiltonian>>) -> Self {
        let dim = hamiltonians.first().map_or(0, |h| h.dim());
        FnLimiter::new(dim, true, move |p| a0(&hamiltonians, p).unwrap_or(f64::NAN))
    }
}

impl fmt::Debug for FnLimiter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnLimiter(d={})", self.dim)
    }
}

impl FluxLimiter for FnLimiter {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, p_tan: &[f64]) -> f64 {
        (self.f)(p_tan)
    }
    fn is_quasi_convex(&self) -> bool {
        self.quasi_convex
    }
}

/// The effective limiter `A_F` of a junction function, evaluated on demand.
/// Returns NaN where the reduction fails.
#[derive(Clone, Debug)]
pub struct ReducedLimiter {
    pub function: Arc<dyn JunctionFunction>,
    pub hamiltonians: Vec<Arc<dyn Hamiltonian>>,
}

impl ReducedLimiter {
    pub fn new(function: Arc<dyn JunctionFunction>, hamiltonians: Vec<Arc<dyn Hamiltonian>>) -> Self {
        ReducedLimiter { function, hamiltonians }
    }

    pub fn try_eval(&self, p_tan: &[f64]) -> Result<f64> {
        reduce_to_limiter(&self.function, &self.hamiltonians, p_tan)
    }
}

impl FluxLimiter for ReducedLimiter {
    fn dim(&self) -> usize {
        self.function.dim()
    }
    fn eval(&self, p_tan: &[f64]) -> f64 {
        self.try_eval(p_tan).unwrap_or(f64::NAN)
    }
    fn is_quasi_convex(&self) -> bool {
        self.function.is_quasi_convex()
    }
}

/// Lattice spacing of [`LatticeLimiter`].
pub const LATTICE_QUANTUM: f64 = 1e-6;

const LATTICE_CACHE_CAP: usize = 1 << 20;

/// Caches an expensive limiter on the lattice `quantum * Z^d` and
/// interpolates multilinearly in between. The result is continuous in `p'`
/// and independent of evaluation order, which the monotone scheme needs.
pub struct LatticeLimiter {
    inner: Arc<dyn FluxLimiter>,
    quantum: f64,
    cache: RwLock<HashMap<Vec<i64>, f64>>,
}

impl LatticeLimiter {
    pub fn new(inner: Arc<dyn FluxLimiter>) -> Self {
        Self::with_quantum(inner, LATTICE_QUANTUM)
    }

    pub fn with_quantum(inner: Arc<dyn FluxLimiter>, quantum: f64) -> Self {
        LatticeLimiter { inner, quantum, cache: RwLock::new(HashMap::new()) }
    }

    fn node_value(&self, key: &[i64]) -> f64 {
        if let Some(&v) = self.cache.read().expect("lattice cache poisoned").get(key) {
            return v;
        }
        let p: Vec<f64> = key.iter().map(|&k| k as f64 * self.quantum).collect();
        let v = self.inner.eval(&p);
        let mut cache = self.cache.write().expect("lattice cache poisoned");
        if cache.len() >= LATTICE_CACHE_CAP {
            cache.clear();
        }
        cache.insert(key.to_vec(), v);
        v
    }

    pub fn cached_nodes(&self) -> usize {
        self.cache.read().expect("lattice cache poisoned").len()
    }
}

impl fmt::Debug for LatticeLimiter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LatticeLimiter").field("inner", &self.inner).field("quantum", &self.quantum).finish()
    }
}

impl FluxLimiter for LatticeLimiter {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, p_tan: &[f64]) -> f64 {
        let d = p_tan.len();
        let scaled: Vec<f64> = p_tan.iter().map(|p| p / self.quantum).collect();
        let base: Vec<i64> = scaled.iter().map(|s| s.floor() as i64).collect();
        let frac: Vec<f64> = scaled.iter().zip(&base).map(|(s, &b)| s - b as f64).collect();
        let mut total = 0.0;
        let mut key = base.clone();
        for mask in 0..(1usize << d) {
            let mut w = 1.0;
            for a in 0..d {
                let up = mask >> a & 1 == 1;
                w *= if up { frac[a] } else { 1.0 - frac[a] };
                key[a] = base[a] + up as i64;
            }
            if w != 0.0 {
                total += w * self.node_value(&key);
            }
        }
        total
    }

    fn is_quasi_convex(&self) -> bool {
        self.inner.is_quasi_convex()
    }
}

/// Configuration record for the built-in limiters, e.g.
/// `{kind = "quadratic", base = 0.2, curvature = 2.5}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LimiterSpec {
    Constant {
        value: f64,
    },
    Quadratic {
        base: f64,
        curvature: f64,
        #[serde(default)]
        center: Vec<f64>,
    },
    /// `A_0` of the configured branch Hamiltonians.
    A0,
}

impl LimiterSpec {
    pub fn build(&self, d: usize, hamiltonians: &[Arc<dyn Hamiltonian>]) -> Result<Arc<dyn FluxLimiter>> {
        Ok(match self {
            LimiterSpec::Constant { value } => Arc::new(ConstantLimiter::new(d, *value)),
            LimiterSpec::Quadratic { base, curvature, center } => {
                let centre = match center.len() {
                    0 => vec![0.0; d],
                    n if n == d => center.clone(),
                    n => {
                        return Err(Error::InvalidProblem(format!(
                            "center has {n} components but the tangential dimension is {d}"
                        )))
                    }
                };
                Arc::new(QuadraticLimiter::new(*base, *curvature, centre))
            }
            LimiterSpec::A0 => Arc::new(FnLimiter::branch_maximum(hamiltonians.to_vec())),
        })
    }
}
