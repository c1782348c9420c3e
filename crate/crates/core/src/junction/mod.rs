//! Geometry of the junction: N half-spaces `R^d x [0, inf)` glued along the
//! common interface `R^d x {0}`, the junction metric, tensor grids with a
//! single shared interface layer, and discrete fields on them.

mod field;
mod grid;
mod io;
mod point;

pub use field::{interface_gradient, Field, InterfaceGradient};
pub use grid::{Axis, AxisConfig, EuclideanField, EuclideanGrid, GridConfig, JunctionGrid, NodeRef};
pub use io::{euclidean_csv, field_csv, field_json, write_euclidean_csv, write_field_csv, FieldRecord};
pub use point::{junction_distance, JunctionPoint};
