use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{pi0, pi_pm, ConvexityClass, Hamiltonian, Side};
use crate::error::{Error, Result};

/// `H(p', p) = |p' - b'|^2 + (p - b)^2 + c`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadratic {
    pub b_tan: Vec<f64>,
    pub b: f64,
    pub c: f64,
}

impl Quadratic {
    pub fn new(b_tan: Vec<f64>, b: f64, c: f64) -> Self {
        Quadratic { b_tan, b, c }
    }

    /// `|P|^2` in dimension `d`.
    pub fn standard(d: usize) -> Self {
        Quadratic { b_tan: vec![0.0; d], b: 0.0, c: 0.0 }
    }

    fn tangential_part(&self, p_tan: &[f64]) -> f64 {
        p_tan.iter().zip(&self.b_tan).map(|(p, b)| (p - b) * (p - b)).sum::<f64>()
    }
}

impl Hamiltonian for Quadratic {
    fn dim(&self) -> usize {
        self.b_tan.len()
    }

    fn eval(&self, p_tan: &[f64], p: f64) -> f64 {
        self.tangential_part(p_tan) + (p - self.b) * (p - self.b) + self.c
    }

    fn class(&self) -> ConvexityClass {
        ConvexityClass::ConvexSmooth
    }

    fn minimizer_hint(&self, _p_tan: &[f64]) -> Option<f64> {
        Some(self.b)
    }

    fn level_inverse_hint(&self, p_tan: &[f64], level: f64, side: Side) -> Option<f64> {
        let r = (level - self.tangential_part(p_tan) - self.c).max(0.0).sqrt();
        Some(match side {
            Side::Minus => self.b - r,
            Side::Plus => self.b + r,
        })
    }
}

/// `H(p', p) = alpha |p'|^2 + beta p^2 + gamma' . p' + gamma p` with
/// `alpha, beta > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Anisotropic {
    pub alpha: f64,
    pub beta: f64,
    pub gamma_tan: Vec<f64>,
    pub gamma: f64,
}

impl Anisotropic {
    pub fn new(alpha: f64, beta: f64, gamma_tan: Vec<f64>, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0) {
            return Err(Error::InvalidProblem(format!(
                "anisotropic family needs alpha, beta > 0 (got {alpha}, {beta})"
            )));
        }
        Ok(Anisotropic { alpha, beta, gamma_tan, gamma })
    }

    fn tangential_part(&self, p_tan: &[f64]) -> f64 {
        p_tan.iter().zip(&self.gamma_tan).map(|(p, g)| self.alpha * p * p + g * p).sum::<f64>()
    }

    fn minimizer(&self) -> f64 {
        -self.gamma / (2.0 * self.beta)
    }
}

impl Hamiltonian for Anisotropic {
    fn dim(&self) -> usize {
        self.gamma_tan.len()
    }

    fn eval(&self, p_tan: &[f64], p: f64) -> f64 {
        self.tangential_part(p_tan) + self.beta * p * p + self.gamma * p
    }

    fn class(&self) -> ConvexityClass {
        ConvexityClass::ConvexSmooth
    }

    fn minimizer_hint(&self, _p_tan: &[f64]) -> Option<f64> {
        Some(self.minimizer())
    }

    fn level_inverse_hint(&self, p_tan: &[f64], level: f64, side: Side) -> Option<f64> {
        let p0 = self.minimizer();
        let minimum = self.eval(p_tan, p0);
        let r = ((level - minimum) / self.beta).max(0.0).sqrt();
        Some(match side {
            Side::Minus => p0 - r,
            Side::Plus => p0 + r,
        })
    }
}

/// Strictly increasing outer function of a [`Composed`] Hamiltonian.
#[derive(Clone)]
pub enum Outer {
    /// `sign(s) ln(1 + |s|)`.
    SignedLog,
    /// `s^3`.
    Cube,
    /// A user-supplied strictly increasing map, optionally with its inverse.
    Custom { f: Arc<dyn Fn(f64) -> f64 + Send + Sync>, inverse: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>> },
}

impl fmt::Debug for Outer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outer::SignedLog => write!(f, "SignedLog"),
            Outer::Cube => write!(f, "Cube"),
            Outer::Custom { inverse, .. } => write!(f, "Custom {{ invertible: {} }}", inverse.is_some()),
        }
    }
}

impl Outer {
    pub fn apply(&self, s: f64) -> f64 {
        match self {
            Outer::SignedLog => s.signum() * s.abs().ln_1p(),
            Outer::Cube => s * s * s,
            Outer::Custom { f, .. } => f(s),
        }
    }

    pub fn invert(&self, y: f64) -> Option<f64> {
        match self {
            Outer::SignedLog => Some(y.signum() * y.abs().exp_m1()),
            Outer::Cube => Some(y.cbrt()),
            Outer::Custom { inverse, .. } => inverse.as_ref().map(|g| g(y)),
        }
    }
}

/// `H = outer(core(P))` with `outer` strictly increasing: keeps the sublevel
/// sets (so quasi-convexity and the minimizer) of `core`. Also the wrapper
/// for composing a quasi-convex Hamiltonian with a user-chosen increasing
/// convex map to make it convex.
#[derive(Clone, Debug)]
pub struct Composed {
    pub core: Arc<dyn Hamiltonian>,
    pub outer: Outer,
    pub class: ConvexityClass,
}

impl Composed {
    pub fn new(core: Arc<dyn Hamiltonian>, outer: Outer) -> Self {
        Composed { core, outer, class: ConvexityClass::QuasiConvex }
    }

    /// Declares the composition convex and smooth (the caller's claim).
    pub fn declared_convex(mut self) -> Self {
        self.class = ConvexityClass::ConvexSmooth;
        self
    }
}

impl Hamiltonian for Composed {
    fn dim(&self) -> usize {
        self.core.dim()
    }

    fn eval(&self, p_tan: &[f64], p: f64) -> f64 {
        self.outer.apply(self.core.eval(p_tan, p))
    }

    fn class(&self) -> ConvexityClass {
        self.class
    }

    fn minimizer_hint(&self, p_tan: &[f64]) -> Option<f64> {
        pi0(&*self.core, p_tan).ok()
    }

    fn level_inverse_hint(&self, p_tan: &[f64], level: f64, side: Side) -> Option<f64> {
        let core_level = self.outer.invert(level)?;
        pi_pm(&*self.core, p_tan, core_level, side).ok()
    }
}

/// `H(p', p) = inner(p', -p)`.
#[derive(Clone, Debug)]
pub struct Mirrored {
    pub inner: Arc<dyn Hamiltonian>,
}

impl Mirrored {
    pub fn new(inner: Arc<dyn Hamiltonian>) -> Self {
        Mirrored { inner }
    }
}

impl Hamiltonian for Mirrored {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, p_tan: &[f64], p: f64) -> f64 {
        self.inner.eval(p_tan, -p)
    }

    fn class(&self) -> ConvexityClass {
        self.inner.class()
    }

    fn minimizer_hint(&self, p_tan: &[f64]) -> Option<f64> {
        // The minimal minimizer of the reflection is minus the maximal
        // minimizer of the inner slice; they agree for strictly
        // quasi-convex slices, which is all closed forms cover.
        match self.inner.minimizer_hint(p_tan) {
            Some(p) => Some(-p),
            None if self.inner.class() == ConvexityClass::ConvexSmooth => pi0(&*self.inner, p_tan).ok().map(|p| -p),
            None => None,
        }
    }

    fn level_inverse_hint(&self, p_tan: &[f64], level: f64, side: Side) -> Option<f64> {
        pi_pm(&*self.inner, p_tan, level, side.flip()).ok().map(|p| -p)
    }
}

type HamiltonianFn = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;

/// Hamiltonian given by a closure.
#[derive(Clone)]
pub struct FnHamiltonian {
    dim: usize,
    class: ConvexityClass,
    f: HamiltonianFn,
}

impl FnHamiltonian {
    pub fn new<F>(dim: usize, class: ConvexityClass, f: F) -> Self
    where
        F: Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
    {
        FnHamiltonian { dim, class, f: Arc::new(f) }
    }
}

impl fmt::Debug for FnHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnHamiltonian").field("dim", &self.dim).field("class", &self.class).finish()
    }
}

impl Hamiltonian for FnHamiltonian {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, p_tan: &[f64], p: f64) -> f64 {
        (self.f)(p_tan, p)
    }

    fn class(&self) -> ConvexityClass {
        self.class
    }
}

/// Configuration record for the built-in families, e.g.
/// `{family = "quadratic", b_prime = [0.0], b = 1.0, c = 0.0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianSpec {
    Quadratic {
        #[serde(default)]
        b_prime: Vec<f64>,
        #[serde(default)]
        b: f64,
        #[serde(default)]
        c: f64,
    },
    Anisotropic {
        alpha: f64,
        beta: f64,
        #[serde(default)]
        gamma_prime: Vec<f64>,
        #[serde(default)]
        gamma: f64,
    },
    /// `outer(core)` with `outer` one of `"signed_log"`, `"cube"`.
    QuasiConvex { outer: OuterSpec, core: Box<HamiltonianSpec> },
    /// `inner(p', -p)`.
    Mirrored { inner: Box<HamiltonianSpec> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterSpec {
    SignedLog,
    Cube,
}

fn tangential_vector(v: &[f64], d: usize, field: &str) -> Result<Vec<f64>> {
    match v.len() {
        0 => Ok(vec![0.0; d]),
        n if n == d => Ok(v.to_vec()),
        n => Err(Error::InvalidProblem(format!("{field} has {n} components but the tangential dimension is {d}"))),
    }
}

impl HamiltonianSpec {
    /// Instantiates the family in tangential dimension `d`. An empty
    /// `b_prime`/`gamma_prime` means the zero vector.
    pub fn build(&self, d: usize) -> Result<Arc<dyn Hamiltonian>> {
        Ok(match self {
            HamiltonianSpec::Quadratic { b_prime, b, c } => {
                Arc::new(Quadratic::new(tangential_vector(b_prime, d, "b_prime")?, *b, *c))
            }
            HamiltonianSpec::Anisotropic { alpha, beta, gamma_prime, gamma } => {
                Arc::new(Anisotropic::new(*alpha, *beta, tangential_vector(gamma_prime, d, "gamma_prime")?, *gamma)?)
            }
            HamiltonianSpec::QuasiConvex { outer, core } => {
                let outer = match outer {
                    OuterSpec::SignedLog => Outer::SignedLog,
                    OuterSpec::Cube => Outer::Cube,
                };
                Arc::new(Composed::new(core.build(d)?, outer))
            }
            HamiltonianSpec::Mirrored { inner } => Arc::new(Mirrored::new(inner.build(d)?)),
        })
    }
}
