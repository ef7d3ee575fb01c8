//! Exact computer-algebra workbench for rank invariants of multilinear maps
//! and homogeneous polynomials: geometric rank, analytic-rank and
//! partition-rank intervals, strength intervals, and Birch rank, together
//! with a stratified codimension formula and constructive rational families
//! of solutions, all certified over ℚ and prime fields.

pub mod error;
pub mod exact_arith;
pub mod linalg;
pub mod multipoly;
pub mod groebner;
pub mod tensor_core;
pub mod strata;
pub mod families;
pub mod invariants;
pub mod json;

pub use error::{Error, Result};
