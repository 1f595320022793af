use crate::exactla::Rational;

/// Koszul sign of rearranging `(x_0, …, x_{n-1})` into `(x_{perm[0]}, …, x_{perm[n-1]})`
/// where `x_i` has degree `degrees[i]`.
///
/// Panics if `perm` is not a permutation of `0..degrees.len()`.
pub fn koszul_sign(perm: &[usize], degrees: &[i64]) -> Rational {
    Rational::sign(koszul_parity(perm, degrees))
}

/// `true` when the Koszul sign of `perm` is −1.
pub fn koszul_parity(perm: &[usize], degrees: &[i64]) -> bool {
    assert_eq!(perm.len(), degrees.len(), "permutation and degree list differ in length");
    let n = perm.len();
    let mut seen = vec![false; n];
    for &p in perm {
        assert!(p < n && !seen[p], "not a permutation: {perm:?}");
        seen[p] = true;
    }
    let mut odd = false;
    // Each pair of inputs that ends up in reversed order contributes (−1)^{d_a d_b}.
    for j in 0..n {
        for i in 0..j {
            if perm[i] > perm[j] && degrees[perm[i]] & 1 != 0 && degrees[perm[j]] & 1 != 0 {
                odd = !odd;
            }
        }
    }
    odd
}

/// Stable sort of `key` by basis index. Returns the parity of the Koszul sign
/// of the sorting permutation, or `None` if the sorted tuple repeats an odd
/// element (such tuples vanish in a graded-symmetric power).
pub fn sort_with_parity(key: &mut [usize], is_odd: impl Fn(usize) -> bool) -> Option<bool> {
    let mut odd = false;
    for j in 1..key.len() {
        let mut i = j;
        while i > 0 && key[i - 1] > key[i] {
            if is_odd(key[i - 1]) && is_odd(key[i]) {
                odd = !odd;
            }
            key.swap(i - 1, i);
            i -= 1;
        }
    }
    if key.windows(2).any(|w| w[0] == w[1] && is_odd(w[0])) {
        return None;
    }
    Some(odd)
}

/// Parity of the sum of the given degrees.
pub(crate) fn degree_parity(degrees: impl IntoIterator<Item = i64>) -> bool {
    degrees.into_iter().fold(false, |acc, d| acc ^ (d & 1 != 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_positive() {
        assert_eq!(koszul_sign(&[0, 1, 2], &[1, 3, 5]), Rational::ONE);
    }

    #[test]
    fn swap_of_odd_elements() {
        assert_eq!(koszul_sign(&[1, 0], &[1, 1]), -Rational::ONE);
        assert_eq!(koszul_sign(&[1, 0], &[1, 2]), Rational::ONE);
    }

    #[test]
    fn sort_detects_repeated_odd() {
        let mut k = vec![2, 0, 2];
        assert_eq!(sort_with_parity(&mut k, |i| i == 2), None);
        let mut k = vec![1, 0];
        assert_eq!(sort_with_parity(&mut k, |_| true), Some(true));
        assert_eq!(k, vec![0, 1]);
    }
}
