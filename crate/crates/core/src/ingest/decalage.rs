//! The dictionary between classical operations `m_n : A^{⊗n} → A` of degree
//! `2 − n` and the uniform-degree maps `b_n : (sA)^{⊗n} → sA` of degree 1:
//!
//! `b_n(sa_1, …, sa_n) = (−1)^{Σ_j (n − j)(|a_j| − 1)} s m_n(a_1, …, a_n)`.
//!
//! The sign only depends on the inputs, so the same formula converts back.
//! For Lie input it turns graded antisymmetric brackets into graded symmetric
//! operations on `sA`.

use crate::algcore::GradedSpace;

/// `true` when the décalage sign for the tuple `inputs` is −1.
pub fn decalage_parity(space: &GradedSpace, inputs: &[usize]) -> bool {
    let n = inputs.len();
    inputs
        .iter()
        .enumerate()
        .fold(false, |acc, (j, &a)| acc ^ (((n - 1 - j) as i64 * space.shifted_degree(a)) & 1 != 0))
}
