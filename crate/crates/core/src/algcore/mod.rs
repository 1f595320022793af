//! Graded vector spaces, Koszul signs and multilinear operations on the
//! suspension `sA`, in planar (associative) and graded-symmetric (Lie) form.

mod op;
mod sign;
mod space;

pub(crate) use op::compose_into;
pub use op::{compose, compose_planar, convolve_symmetric, insert_planar, Key, MultilinearOp, PreparedOp};
pub use sign::{koszul_parity, koszul_sign, sort_with_parity};
pub use space::{BasisElement, GradedSpace, ShiftConvention, SymmetryType};
