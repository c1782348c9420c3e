//! Plain-text field serialization. Numbers use Rust's shortest round-trip
//! decimal form; lines end with `\n`.
//!
//! Junction CSV header: `branch,normal_index,i_0..i_{d-1},x_0..x_{d-1},x,value`.
//! The `branch` column is 1-based and 0 marks interface nodes. Rows follow
//! the grid's node order.

use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use super::{EuclideanField, Field, NodeRef};
use crate::error::Result;

fn header(d: usize, leading: &str) -> String {
    let mut h = String::from(leading);
    for a in 0..d {
        write!(h, ",i_{a}").unwrap();
    }
    for a in 0..d {
        write!(h, ",x_{a}").unwrap();
    }
    h.push_str(",x,value\n");
    h
}

/// One row of the JSON mirror of the junction CSV.
#[derive(Clone, Debug, Serialize)]
pub struct FieldRecord {
    pub branch: usize,
    pub normal_index: usize,
    pub tangential_indices: Vec<usize>,
    /// Tangential coordinates followed by the normal coordinate.
    pub x: Vec<f64>,
    pub value: f64,
}

fn records(field: &Field) -> impl Iterator<Item = FieldRecord> + '_ {
    let grid = &field.grid;
    (0..grid.node_count()).map(move |i| {
        let (branch, normal_index, t) = match grid.locate(i) {
            NodeRef::Interface { t } => (0, 0, t),
            NodeRef::Branch { branch, normal, t } => (branch + 1, normal, t),
        };
        let p = grid.point(i);
        let mut x = p.tangential;
        x.push(p.normal);
        FieldRecord {
            branch,
            normal_index,
            tangential_indices: grid.tangential_multi_index(t),
            x,
            value: field.values[i],
        }
    })
}

pub fn field_csv(field: &Field) -> String {
    let mut out = header(field.grid.dim(), "branch,normal_index");
    for r in records(field) {
        write!(out, "{},{}", r.branch, r.normal_index).unwrap();
        for k in &r.tangential_indices {
            write!(out, ",{k}").unwrap();
        }
        for x in &r.x {
            write!(out, ",{x}").unwrap();
        }
        writeln!(out, ",{}", r.value).unwrap();
    }
    out
}

pub fn write_field_csv<W: Write>(field: &Field, mut w: W) -> Result<()> {
    w.write_all(field_csv(field).as_bytes())?;
    Ok(())
}

pub fn field_json(field: &Field) -> Result<String> {
    let rows: Vec<FieldRecord> = records(field).collect();
    Ok(serde_json::to_string(&rows)?)
}

/// Whole-space CSV: `normal_index,i_0..,x_0..,x,value` with a signed normal
/// index.
pub fn euclidean_csv(field: &EuclideanField) -> String {
    let grid = &field.grid;
    let mut out = header(grid.dim(), "normal_index");
    for (i, v) in field.values.iter().enumerate() {
        let (k, t) = grid.locate(i);
        write!(out, "{k}").unwrap();
        for idx in grid.tangential_multi_index(t) {
            write!(out, ",{idx}").unwrap();
        }
        let (xt, xn) = grid.coords(i);
        for x in xt {
            write!(out, ",{x}").unwrap();
        }
        writeln!(out, ",{xn},{v}").unwrap();
    }
    out
}

pub fn write_euclidean_csv<W: Write>(field: &EuclideanField, mut w: W) -> Result<()> {
    w.write_all(euclidean_csv(field).as_bytes())?;
    Ok(())
}
