use std::sync::Arc;

use super::{JunctionGrid, JunctionPoint, NodeRef};
use crate::error::{Error, Result};

/// Nodal values on a [`JunctionGrid`] at time `time`.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    pub grid: Arc<JunctionGrid>,
    pub values: Vec<f64>,
    pub time: f64,
}

impl Field {
    pub fn new(grid: Arc<JunctionGrid>, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::DimensionMismatch { expected: grid.node_count(), got: values.len() });
        }
        Ok(Field { grid, values, time })
    }

    pub fn from_fn<F>(grid: Arc<JunctionGrid>, mut f: F) -> Self
    where
        F: FnMut(&JunctionPoint) -> f64,
    {
        let values = (0..grid.node_count()).map(|i| f(&grid.point(i))).collect();
        Field { grid, values, time: 0.0 }
    }

    pub fn constant(grid: Arc<JunctionGrid>, c: f64) -> Self {
        let values = vec![c; grid.node_count()];
        Field { grid, values, time: 0.0 }
    }

    /// Value on `branch` at normal index `normal` (0 = interface).
    pub fn at(&self, branch: usize, normal: usize, t: usize) -> f64 {
        self.values[self.grid.index(branch, normal, t)]
    }
}

/// Discrete junction gradient at an interface node: tangential differences
/// and one one-sided normal slope per branch.
#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceGradient {
    pub tangential: Vec<f64>,
    pub slopes: Vec<f64>,
}

/// Tangential gradient by central differences (one-sided at the edges of the
/// tangential box) and the one-sided normal slopes
/// `p_i = (f(i, x', dx) - f(x', 0)) / dx`.
pub fn interface_gradient(field: &Field, node: usize) -> Result<InterfaceGradient> {
    let grid = &field.grid;
    let t = match grid.locate(node) {
        NodeRef::Interface { t } => t,
        NodeRef::Branch { .. } => return Err(Error::NotInterface(node)),
    };
    let idx = grid.tangential_multi_index(t);
    let tangential = grid
        .tangential_axes()
        .iter()
        .enumerate()
        .map(|(a, axis)| {
            let stride = grid.tangential_stride(a);
            let k = idx[a];
            let v = |tt: usize| field.values[grid.index(0, 0, tt)];
            if axis.count == 1 {
                0.0
            } else if k == 0 {
                (v(t + stride) - v(t)) / axis.spacing
            } else if k + 1 == axis.count {
                (v(t) - v(t - stride)) / axis.spacing
            } else {
                (v(t + stride) - v(t - stride)) / (2.0 * axis.spacing)
            }
        })
        .collect();
    let dx = grid.normal_spacing();
    let centre = field.values[t];
    let slopes = (0..grid.branches()).map(|b| (field.at(b, 1, t) - centre) / dx).collect();
    Ok(InterfaceGradient { tangential, slopes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::junction::{AxisConfig, GridConfig};

    fn grid(branches: usize, d: usize) -> Arc<JunctionGrid> {
        let tangential = (0..d).map(|_| AxisConfig { min: -1.0, max: 1.0, spacing: 0.25 }).collect();
        Arc::new(
            JunctionGrid::build(&GridConfig { branches, tangential, normal_extent: 1.0, normal_spacing: 0.25 })
                .unwrap(),
        )
    }

    #[test]
    fn linear_field_gives_unit_slopes() {
        let f = Field::from_fn(grid(3, 0), |p| p.normal);
        let g = interface_gradient(&f, 0).unwrap();
        assert!(g.tangential.is_empty());
        assert_eq!(g.slopes, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn constant_field_has_zero_gradient() {
        let f = Field::constant(grid(2, 1), 4.5);
        for node in f.grid.interface_nodes() {
            let g = interface_gradient(&f, node).unwrap();
            assert_eq!(g.tangential, vec![0.0]);
            assert_eq!(g.slopes, vec![0.0, 0.0]);
        }
    }

    #[test]
    fn per_branch_affine_slopes() {
        let f = Field::from_fn(grid(2, 2), |p| {
            let s = [1.0, 2.0][p.branch];
            0.5 * p.tangential[0] - 3.0 * p.tangential[1] + s * p.normal
        });
        for node in f.grid.interface_nodes() {
            let g = interface_gradient(&f, node).unwrap();
            assert!((g.slopes[0] - 1.0).abs() < 1e-12 && (g.slopes[1] - 2.0).abs() < 1e-12);
            assert!((g.tangential[0] - 0.5).abs() < 1e-12 && (g.tangential[1] + 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn branch_node_is_rejected() {
        let f = Field::constant(grid(2, 0), 0.0);
        assert!(matches!(interface_gradient(&f, 1), Err(Error::NotInterface(1))));
    }
}
