//! Branch Hamiltonians `H(p', p)` and the scalar quantities derived from
//! them: the minimal minimizer `pi0(p')`, the branch minimum `A_i(p')`, the
//! monotone envelopes `H^-`/`H^+` and the partial inverses `pi^-`/`pi^+`.
//!
//! Everything here is derivative-free. Built-in families supply closed-form
//! minimizers and inverses; arbitrary evaluators fall back to bracketing and
//! bisection.

mod checks;
mod conjugate;
mod family;

use std::fmt;

pub use checks::{check_assumptions, AssumptionReport};
pub use conjugate::{convex_conjugate, hamiltonian_conjugate, ConjugateResult};
pub use family::{Anisotropic, Composed, FnHamiltonian, HamiltonianSpec, Mirrored, Outer, Quadratic};

use crate::error::{Error, Result};
use crate::numeric::{bisect, bisect_switch, expand_until, ARG_TOL, VALUE_TOL};

/// Step of the forward/backward comparison that locates flat minima.
pub const FLAT_MIN_STEP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvexityClass {
    /// `C^2`, strictly convex and superlinear.
    ConvexSmooth,
    QuasiConvex,
}

/// Which monotone branch of `p -> H(p', p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// Non-increasing part, `p <= pi0(p')`.
    Minus,
    /// Non-decreasing part, `p >= pi0(p')`.
    Plus,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Minus => Side::Plus,
            Side::Plus => Side::Minus,
        }
    }
}

/// A continuous, quasi-convex, coercive Hamiltonian on `R^d x R`.
pub trait Hamiltonian: Send + Sync + fmt::Debug {
    /// Tangential dimension `d`.
    fn dim(&self) -> usize;

    fn eval(&self, p_tan: &[f64], p: f64) -> f64;

    fn class(&self) -> ConvexityClass {
        ConvexityClass::QuasiConvex
    }

    /// Closed-form minimal minimizer of `p -> H(p', p)`, if known.
    fn minimizer_hint(&self, _p_tan: &[f64]) -> Option<f64> {
        None
    }

    /// Closed-form partial inverse at `level >= A(p')`, if known.
    fn level_inverse_hint(&self, _p_tan: &[f64], _level: f64, _side: Side) -> Option<f64> {
        None
    }
}

impl<H: Hamiltonian + ?Sized> Hamiltonian for std::sync::Arc<H> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, p_tan: &[f64], p: f64) -> f64 {
        (**self).eval(p_tan, p)
    }
    fn class(&self) -> ConvexityClass {
        (**self).class()
    }
    fn minimizer_hint(&self, p_tan: &[f64]) -> Option<f64> {
        (**self).minimizer_hint(p_tan)
    }
    fn level_inverse_hint(&self, p_tan: &[f64], level: f64, side: Side) -> Option<f64> {
        (**self).level_inverse_hint(p_tan, level, side)
    }
}

/// Minimal minimizer `pi0(p')` of `p -> H(p', p)`.
///
/// Without a closed form, bisects on the switch of `H(p + s) >= H(p - s)`
/// with `s = 1e-6 max(1, |p|)`. For strictly quasi-convex slices this is the
/// minimizer; on a flat bottom it lands within `s` of the left end of the
/// argmin set.
pub fn pi0<H: Hamiltonian + ?Sized>(h: &H, p_tan: &[f64]) -> Result<f64> {
    if let Some(p) = h.minimizer_hint(p_tan) {
        return Ok(p);
    }
    let not_decreasing = |p: f64| {
        let s = FLAT_MIN_STEP * p.abs().max(1.0);
        h.eval(p_tan, p + s) >= h.eval(p_tan, p - s)
    };
    let (lo, hi) = if not_decreasing(0.0) {
        let lo = expand_until(0.0, -1.0, |p| !not_decreasing(p), "locating the branch minimizer")?;
        (lo, 0.0)
    } else {
        let hi = expand_until(0.0, 1.0, not_decreasing, "locating the branch minimizer")?;
        (0.0, hi)
    };
    Ok(bisect_switch(not_decreasing, lo, hi, ARG_TOL))
}

/// Branch minimum `A_i(p') = min_p H(p', p)`.
pub fn branch_min<H: Hamiltonian + ?Sized>(h: &H, p_tan: &[f64]) -> Result<f64> {
    Ok(h.eval(p_tan, pi0(h, p_tan)?))
}

/// `H^-` (`Side::Minus`) or `H^+` (`Side::Plus`): `H` on the chosen
/// monotone part and the plateau value `A_i(p')` on the other.
pub fn envelope<H: Hamiltonian + ?Sized>(h: &H, p_tan: &[f64], p: f64, side: Side) -> Result<f64> {
    let p0 = pi0(h, p_tan)?;
    let keep = match side {
        Side::Minus => p <= p0,
        Side::Plus => p >= p0,
    };
    Ok(h.eval(p_tan, if keep { p } else { p0 }))
}

/// Partial inverse `pi^±(p', level)`: the point `p` on the chosen monotone
/// part with `H(p', p) = level`.
///
/// Fails with [`Error::LevelBelowMinimum`] when `level < A_i(p') - tol`.
/// Levels within `tol` of the minimum map to `pi0(p')`.
pub fn pi_pm<H: Hamiltonian + ?Sized>(h: &H, p_tan: &[f64], level: f64, side: Side) -> Result<f64> {
    let p0 = pi0(h, p_tan)?;
    let minimum = h.eval(p_tan, p0);
    if level < minimum - VALUE_TOL * minimum.abs().max(1.0) {
        return Err(Error::LevelBelowMinimum { level, minimum });
    }
    if level <= minimum {
        return Ok(p0);
    }
    if let Some(p) = h.level_inverse_hint(p_tan, level, side) {
        return Ok(p);
    }
    let direction = match side {
        Side::Minus => -1.0,
        Side::Plus => 1.0,
    };
    let far = expand_until(p0, direction, |p| h.eval(p_tan, p) >= level, "inverting a branch Hamiltonian")?;
    let (lo, hi) = if far < p0 { (far, p0) } else { (p0, far) };
    Ok(bisect(|p| h.eval(p_tan, p) - level, lo, hi, VALUE_TOL, ARG_TOL))
}
