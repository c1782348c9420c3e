//! Hamilton-Jacobi equations on multi-dimensional junctions.
//!
//! The crate is organised bottom-up:
//!
//! * [`junction`]: points, the junction metric, grids and fields;
//! * [`hamiltonian`]: branch Hamiltonians and their minimizers, monotone
//!   envelopes, partial inverses and convex conjugates;
//! * [`condition`]: flux limiters, `F_A`, and the reduction of a general
//!   monotone junction function to its effective limiter;
//! * [`vertex`]: the vertex test function of the smooth convex case;
//! * [`solver`]: a monotone explicit scheme on the junction and on the
//!   whole space, a Hopf-Lax oracle and a discrete comparison harness;
//! * [`ishii`]: minimal and maximal Ishii solutions of two-domain problems.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod condition;
pub mod error;
pub mod hamiltonian;
pub mod ishii;
pub mod junction;
pub mod numeric;
pub mod solver;
pub mod vertex;

pub use error::{Error, Result};
