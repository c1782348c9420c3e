use serde::{Deserialize, Serialize};

use super::JunctionPoint;
use crate::error::{Error, Result};

/// Extent and spacing of one tangential axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisConfig {
    pub min: f64,
    pub max: f64,
    pub spacing: f64,
}

/// Grid description as it appears in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub branches: usize,
    #[serde(default)]
    pub tangential: Vec<AxisConfig>,
    pub normal_extent: f64,
    pub normal_spacing: f64,
}

/// Uniform axis `min + k * spacing`, `k < count`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub spacing: f64,
    pub count: usize,
}

impl Axis {
    pub fn coord(&self, k: usize) -> f64 {
        self.min + k as f64 * self.spacing
    }
}

fn node_count(extent: f64, spacing: f64, what: &str) -> Result<usize> {
    if !(spacing > 0.0) || !spacing.is_finite() {
        return Err(Error::InvalidGrid(format!("{what} spacing must be positive, got {spacing}")));
    }
    if !(extent > 0.0) || !extent.is_finite() {
        return Err(Error::InvalidGrid(format!("{what} extent must be positive, got {extent}")));
    }
    let ratio = extent / spacing;
    let cells = ratio.round();
    if cells < 1.0 || (ratio - cells).abs() > 1e-6 * ratio.max(1.0) {
        return Err(Error::InvalidGrid(format!(
            "{what} extent {extent} is not a positive multiple of the spacing {spacing}"
        )));
    }
    Ok(cells as usize)
}

fn tangential_axes(configs: &[AxisConfig]) -> Result<Vec<Axis>> {
    configs
        .iter()
        .enumerate()
        .map(|(a, c)| {
            let cells = node_count(c.max - c.min, c.spacing, &format!("tangential axis {a}"))?;
            Ok(Axis { min: c.min, spacing: c.spacing, count: cells + 1 })
        })
        .collect()
}

/// Position of a node in a [`JunctionGrid`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeRef {
    /// Interface node with flat tangential index `t`.
    Interface { t: usize },
    /// Node on `branch` (0-based) at normal index `normal >= 1`.
    Branch { branch: usize, normal: usize, t: usize },
}

/// Tensor grid on the junction. The interface layer is stored once and
/// shared by all branches.
///
/// Node ordering: the interface layer first, then branch 0 normal layers
/// `1..=M`, then branch 1, and so on; inside a layer the tangential
/// multi-index runs lexicographically with axis 0 slowest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JunctionGrid {
    branches: usize,
    tangential: Vec<Axis>,
    normal_spacing: f64,
    normal_layers: usize,
    layer_size: usize,
}

impl JunctionGrid {
    pub fn build(config: &GridConfig) -> Result<Self> {
        if config.branches == 0 {
            return Err(Error::InvalidGrid("at least one branch is required".into()));
        }
        let tangential = tangential_axes(&config.tangential)?;
        let normal_layers = node_count(config.normal_extent, config.normal_spacing, "normal")?;
        let layer_size = tangential.iter().map(|a| a.count).product();
        Ok(JunctionGrid {
            branches: config.branches,
            tangential,
            normal_spacing: config.normal_spacing,
            normal_layers,
            layer_size,
        })
    }

    pub fn branches(&self) -> usize {
        self.branches
    }

    /// Tangential dimension `d`.
    pub fn dim(&self) -> usize {
        self.tangential.len()
    }

    pub fn tangential_axes(&self) -> &[Axis] {
        &self.tangential
    }

    pub fn normal_spacing(&self) -> f64 {
        self.normal_spacing
    }

    /// Number of normal layers `M` per branch, not counting the interface.
    pub fn normal_layers(&self) -> usize {
        self.normal_layers
    }

    /// Nodes per tangential layer.
    pub fn layer_size(&self) -> usize {
        self.layer_size
    }

    pub fn node_count(&self) -> usize {
        self.layer_size * (1 + self.branches * self.normal_layers)
    }

    pub fn interface_nodes(&self) -> std::ops::Range<usize> {
        0..self.layer_size
    }

    /// Flat index of a node; `normal == 0` addresses the shared interface
    /// node whatever the branch.
    pub fn index(&self, branch: usize, normal: usize, t: usize) -> usize {
        debug_assert!(branch < self.branches && normal <= self.normal_layers && t < self.layer_size);
        if normal == 0 {
            t
        } else {
            self.layer_size * (1 + branch * self.normal_layers + normal - 1) + t
        }
    }

    pub fn locate(&self, index: usize) -> NodeRef {
        let t = index % self.layer_size;
        let layer = index / self.layer_size;
        if layer == 0 {
            NodeRef::Interface { t }
        } else {
            let k = layer - 1;
            NodeRef::Branch { branch: k / self.normal_layers, normal: k % self.normal_layers + 1, t }
        }
    }

    /// Splits a flat tangential index into per-axis indices.
    pub fn tangential_multi_index(&self, mut t: usize) -> Vec<usize> {
        let mut idx = vec![0; self.tangential.len()];
        for (a, axis) in self.tangential.iter().enumerate().rev() {
            idx[a] = t % axis.count;
            t /= axis.count;
        }
        idx
    }

    /// Stride of tangential axis `a` in the flat tangential index.
    pub fn tangential_stride(&self, a: usize) -> usize {
        self.tangential[a + 1..].iter().map(|x| x.count).product()
    }

    pub fn tangential_coords(&self, t: usize) -> Vec<f64> {
        self.tangential_multi_index(t).iter().zip(&self.tangential).map(|(&k, axis)| axis.coord(k)).collect()
    }

    pub fn point(&self, index: usize) -> JunctionPoint {
        match self.locate(index) {
            NodeRef::Interface { t } => JunctionPoint::interface(self.tangential_coords(t)),
            NodeRef::Branch { branch, normal, t } => {
                JunctionPoint::new(branch, self.tangential_coords(t), normal as f64 * self.normal_spacing)
            }
        }
    }
}

/// Grid on the whole space `R^{d+1}`: tangential axes as in the junction
/// grid plus a symmetric normal axis `k * dx`, `-M <= k <= M`.
///
/// Node ordering: normal index ascending (slowest), then the tangential
/// multi-index lexicographically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EuclideanGrid {
    tangential: Vec<Axis>,
    normal_spacing: f64,
    half_layers: usize,
    layer_size: usize,
}

impl EuclideanGrid {
    /// Whole-space grid whose halves `x_{d+1} <= 0` and `x_{d+1} >= 0` are
    /// the two branches of `config` (which must have two branches).
    pub fn build(config: &GridConfig) -> Result<Self> {
        let junction = JunctionGrid::build(config)?;
        if junction.branches() != 2 {
            return Err(Error::InvalidGrid(format!(
                "a whole-space grid unfolds a two-branch junction, got {} branches",
                junction.branches()
            )));
        }
        Ok(Self::unfolding(&junction))
    }

    pub fn unfolding(junction: &JunctionGrid) -> Self {
        EuclideanGrid {
            tangential: junction.tangential.clone(),
            normal_spacing: junction.normal_spacing,
            half_layers: junction.normal_layers,
            layer_size: junction.layer_size,
        }
    }

    /// The two-branch junction grid this grid folds onto.
    pub fn folded(&self) -> JunctionGrid {
        JunctionGrid {
            branches: 2,
            tangential: self.tangential.clone(),
            normal_spacing: self.normal_spacing,
            normal_layers: self.half_layers,
            layer_size: self.layer_size,
        }
    }

    pub fn dim(&self) -> usize {
        self.tangential.len()
    }

    pub fn tangential_axes(&self) -> &[Axis] {
        &self.tangential
    }

    pub fn normal_spacing(&self) -> f64 {
        self.normal_spacing
    }

    pub fn half_layers(&self) -> usize {
        self.half_layers
    }

    pub fn layer_size(&self) -> usize {
        self.layer_size
    }

    pub fn node_count(&self) -> usize {
        self.layer_size * (2 * self.half_layers + 1)
    }

    /// Flat index of the node at signed normal index `k` and tangential `t`.
    pub fn index(&self, k: isize, t: usize) -> usize {
        let layer = (k + self.half_layers as isize) as usize;
        layer * self.layer_size + t
    }

    /// `(k, t)` for a flat index.
    pub fn locate(&self, index: usize) -> (isize, usize) {
        let layer = index / self.layer_size;
        (layer as isize - self.half_layers as isize, index % self.layer_size)
    }

    pub fn tangential_multi_index(&self, t: usize) -> Vec<usize> {
        self.folded().tangential_multi_index(t)
    }

    pub fn tangential_stride(&self, a: usize) -> usize {
        self.tangential[a + 1..].iter().map(|x| x.count).product()
    }

    /// Coordinates `(x', x_{d+1})` of a node.
    pub fn coords(&self, index: usize) -> (Vec<f64>, f64) {
        let (k, t) = self.locate(index);
        let idx = self.tangential_multi_index(t);
        let tangential = idx.iter().zip(&self.tangential).map(|(&i, a)| a.coord(i)).collect();
        (tangential, k as f64 * self.normal_spacing)
    }
}

/// Nodal values on a [`EuclideanGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct EuclideanField {
    pub grid: std::sync::Arc<EuclideanGrid>,
    pub values: Vec<f64>,
    pub time: f64,
}

impl EuclideanField {
    pub fn from_fn<F>(grid: std::sync::Arc<EuclideanGrid>, mut f: F) -> Self
    where
        F: FnMut(&[f64], f64) -> f64,
    {
        let values = (0..grid.node_count())
            .map(|i| {
                let (xt, xn) = grid.coords(i);
                f(&xt, xn)
            })
            .collect();
        EuclideanField { grid, values, time: 0.0 }
    }
}
