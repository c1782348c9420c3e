use super::Hamiltonian;
use crate::error::Result;
use crate::numeric::{maximize_concave, norm, ConcaveSearch};

/// Value and maximizer of a Legendre-Fenchel transform evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjugateResult {
    pub value: f64,
    pub argmax: Vec<f64>,
}

/// `f*(z) = sup_P (P . z - f(P))` for a convex superlinear `f` on `R^n`.
///
/// The concave objective is maximized coordinate by coordinate, each axis
/// seeded on an interval of radius `8 (1 + |z|)` that doubles while the
/// best seed touches its boundary and then refined by golden section. An
/// objective that keeps
/// growing at the expansion bound yields [`crate::Error::Divergence`].
pub fn convex_conjugate<F>(f: F, z: &[f64]) -> Result<ConjugateResult>
where
    F: Fn(&[f64]) -> f64,
{
    let search = ConcaveSearch::with_radius(8.0 * (1.0 + norm(z)));
    let centre = vec![0.0; z.len()];
    let (argmax, value) =
        maximize_concave(|p: &[f64]| p.iter().zip(z).map(|(a, b)| a * b).sum::<f64>() - f(p), &centre, &search)?;
    Ok(ConjugateResult { value, argmax })
}

/// Conjugate of a Hamiltonian seen as a function of `P = (p', p)`.
pub fn hamiltonian_conjugate<H: Hamiltonian + ?Sized>(h: &H, z: &[f64]) -> Result<ConjugateResult> {
    let d = h.dim();
    convex_conjugate(|p: &[f64]| h.eval(&p[..d], p[d]), z)
}
