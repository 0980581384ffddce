//! Exact and high-precision tools for the hexahedron recurrence and its relatives.
//!
//! The crate is organised bottom-up: [`lattice`] names points of the half-integer
//! lattice, [`laurent`] is the sparse Laurent polynomial engine, [`real`] wraps an
//! arbitrary-precision float, and the remaining modules build the recurrences, the
//! stepped-surface graphs, the taut double-dimer enumeration, the Ising
//! specialisation and the limit-shape computations on top of them.

pub mod dimer;
pub mod error;
pub mod homogeneity;
pub mod ising;
pub mod lattice;
pub mod laurent;
pub mod limitshape;
pub mod real;
pub mod recurrence;
pub mod surface;

pub use error::{Error, Result};
pub use lattice::{Axis, HalfLatticePoint, PointKind};
pub use laurent::{LaurentPoly, Monomial, VarName, VarTable};
pub use real::Real;
