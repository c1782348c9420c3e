//! Node updates of the monotone scheme: Godunov in the normal direction,
//! local Lax-Friedrichs in the tangential directions, `F_A` at the
//! interface. Shared by the junction and the whole-space solver so that
//! both produce identical stencils.

use std::sync::Arc;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::godunov_flux;
use super::lipschitz::{hamiltonian_bounds, include, limiter_bounds, GradientBox};
use crate::condition::{flux_limited_value, FluxLimiter};
use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::junction::{Axis, JunctionGrid, NodeRef};

/// Sampled bounds `(L_normal, alpha_k)` for one field.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub normal: f64,
    pub tangential: Vec<f64>,
}

impl Estimate {
    pub fn merge(&self, other: &Estimate) -> Estimate {
        Estimate {
            normal: self.normal.max(other.normal),
            tangential: self.tangential.iter().zip(&other.tangential).map(|(a, b)| a.max(*b)).collect(),
        }
    }
}

/// A discretization the time loop can drive.
pub trait Scheme: Sync {
    fn estimate(&self, values: &[f64]) -> Result<Estimate>;

    /// `dx` of the normal axis and of every tangential axis with more than
    /// one node (others are `None`).
    fn spacings(&self) -> (f64, Vec<Option<f64>>);

    fn update(&self, values: &[f64], dt: f64, dissipation: &[f64]) -> Result<Vec<f64>>;
}

/// Copy-out tangential neighbours of every node of a tangential layer.
#[derive(Clone, Debug)]
pub struct TangentialStencil {
    /// `neighbours[t][a] = (t_minus, t_plus)`, equal to `t` at box edges.
    neighbours: Vec<Vec<(usize, usize)>>,
    spacing: Vec<f64>,
}

impl TangentialStencil {
    pub fn new(axes: &[Axis]) -> Self {
        let layer: usize = axes.iter().map(|a| a.count).product();
        let strides: Vec<usize> = (0..axes.len()).map(|a| axes[a + 1..].iter().map(|x| x.count).product()).collect();
        let neighbours = (0..layer)
            .map(|t| {
                axes.iter()
                    .enumerate()
                    .map(|(a, axis)| {
                        let k = t / strides[a] % axis.count;
                        let minus = if k == 0 { t } else { t - strides[a] };
                        let plus = if k + 1 == axis.count { t } else { t + strides[a] };
                        (minus, plus)
                    })
                    .collect()
            })
            .collect();
        TangentialStencil { neighbours, spacing: axes.iter().map(|a| a.spacing).collect() }
    }

    /// `(p_bar', sum_k alpha_k (q_k^+ - q_k^-) / 2)` at tangential index `t`
    /// of the layer starting at `offset`.
    pub fn terms(&self, values: &[f64], offset: usize, t: usize, alpha: &[f64]) -> (Vec<f64>, f64) {
        let u = values[offset + t];
        let mut p_bar = Vec::with_capacity(self.spacing.len());
        let mut dissipation = 0.0;
        for (a, &(m, p)) in self.neighbours[t].iter().enumerate() {
            let q_minus = (u - values[offset + m]) / self.spacing[a];
            let q_plus = (values[offset + p] - u) / self.spacing[a];
            p_bar.push(0.5 * (q_minus + q_plus));
            dissipation += alpha[a] * (q_plus - q_minus) * 0.5;
        }
        (p_bar, dissipation)
    }

    /// Grows the tangential ranges with the forward differences of a layer.
    pub fn extend_ranges(&self, values: &[f64], offset: usize, ranges: &mut [(f64, f64)]) {
        for (t, nb) in self.neighbours.iter().enumerate() {
            for (a, &(_, p)) in nb.iter().enumerate() {
                include(&mut ranges[a], (values[offset + p] - values[offset + t]) / self.spacing[a]);
            }
        }
    }
}

/// Applies `f` to every node index, in parallel when enabled. The result
/// does not depend on the split.
pub fn map_nodes<F>(n: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(usize) -> Result<f64> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

pub(crate) fn finite(v: f64, idx: usize) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Divergence(format!("non-finite value at node {idx}")))
    }
}

pub(crate) fn axis_spacings(axes: &[Axis]) -> Vec<Option<f64>> {
    axes.iter().map(|a| if a.count > 1 { Some(a.spacing) } else { None }).collect()
}

/// The junction scheme.
pub struct JunctionScheme<'a> {
    pub grid: &'a JunctionGrid,
    pub hamiltonians: &'a [Arc<dyn Hamiltonian>],
    pub limiter: &'a dyn FluxLimiter,
    pub stencil: TangentialStencil,
}

impl<'a> JunctionScheme<'a> {
    pub fn new(grid: &'a JunctionGrid, hamiltonians: &'a [Arc<dyn Hamiltonian>], limiter: &'a dyn FluxLimiter) -> Self {
        JunctionScheme { grid, hamiltonians, limiter, stencil: TangentialStencil::new(grid.tangential_axes()) }
    }

    /// Per-branch gradient boxes of a field. Every range contains 0, the
    /// slope produced by the copy-out ghost nodes.
    pub fn gradient_boxes(&self, values: &[f64]) -> Vec<GradientBox> {
        let g = self.grid;
        let d = g.dim();
        let dx = g.normal_spacing();
        let mut tangential = vec![(0.0, 0.0); d];
        self.stencil.extend_ranges(values, 0, &mut tangential);
        let mut normals = Vec::with_capacity(g.branches());
        for b in 0..g.branches() {
            let mut normal = (0.0, 0.0);
            for n in 1..=g.normal_layers() {
                let offset = g.index(b, n, 0);
                self.stencil.extend_ranges(values, offset, &mut tangential);
                for t in 0..g.layer_size() {
                    include(&mut normal, (values[g.index(b, n, t)] - values[g.index(b, n - 1, t)]) / dx);
                }
            }
            normals.push(normal);
        }
        normals.into_iter().map(|normal| GradientBox { normal, tangential: tangential.clone() }).collect()
    }
}

impl Scheme for JunctionScheme<'_> {
    fn estimate(&self, values: &[f64]) -> Result<Estimate> {
        let boxes = self.gradient_boxes(values);
        let d = self.grid.dim();
        let mut est = Estimate { normal: 0.0, tangential: limiter_bounds(self.limiter, &boxes[0].tangential) };
        for (h, bx) in self.hamiltonians.iter().zip(&boxes) {
            let (ln, lt) = hamiltonian_bounds(h, bx)?;
            est = est.merge(&Estimate { normal: ln, tangential: lt });
        }
        debug_assert_eq!(est.tangential.len(), d);
        Ok(est)
    }

    fn spacings(&self) -> (f64, Vec<Option<f64>>) {
        (self.grid.normal_spacing(), axis_spacings(self.grid.tangential_axes()))
    }

    fn update(&self, values: &[f64], dt: f64, alpha: &[f64]) -> Result<Vec<f64>> {
        let g = self.grid;
        let dx = g.normal_spacing();
        let m = g.normal_layers();
        map_nodes(g.node_count(), |idx| {
            let u = values[idx];
            let flux = match g.locate(idx) {
                NodeRef::Interface { t } => {
                    let (p_bar, dissipation) = self.stencil.terms(values, 0, t, alpha);
                    let slopes: Vec<f64> = (0..g.branches()).map(|b| (values[g.index(b, 1, t)] - u) / dx).collect();
                    let a = self.limiter.eval(&p_bar);
                    flux_limited_value(a, self.hamiltonians, &p_bar, &slopes)? - dissipation
                }
                NodeRef::Branch { branch, normal, t } => {
                    let (p_bar, dissipation) = self.stencil.terms(values, idx - t, t, alpha);
                    let below = values[g.index(branch, normal - 1, t)];
                    let above = if normal < m { values[g.index(branch, normal + 1, t)] } else { u };
                    let p_minus = (u - below) / dx;
                    let p_plus = (above - u) / dx;
                    godunov_flux(&self.hamiltonians[branch], &p_bar, p_minus, p_plus)? - dissipation
                }
            };
            finite(u - dt * flux, idx)
        })
    }
}
