//! Exact rational scalars and sparse linear algebra over ℚ.
//!
//! Everything here is immutable once built and free of floating point.

mod matrix;
mod rational;
mod sparse;

pub use matrix::{
    find_solution, kernel, quotient, rref, solve, Quotient, RatMatrix, Solvability, Solve, Subspace,
};
pub use rational::{ParseRationalError, Rational};
pub use sparse::SparseVec;
