//! Independent oracles and generators shared by the integration tests.
//!
//! The oracles here recompute quantities from their defining formulas by
//! brute force over basis tuples, without touching the fast paths they check.
#![allow(dead_code)]

use std::sync::Arc;

use operformal::algcore::{koszul_sign, GradedSpace, MultilinearOp, SymmetryType};
use operformal::coder::Coderivation;
use operformal::exactla::{Rational, SparseVec};
use rand::Rng;

pub fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

/// Space with basis `e0, e1, …` of the given classical degrees.
pub fn space(degrees: &[i64]) -> Arc<GradedSpace> {
    Arc::new(GradedSpace::new(degrees.iter().enumerate().map(|(i, &d)| (format!("e{i}"), d))).unwrap())
}

/// All tuples of length `len` over `0..dim`, in lexicographic order.
pub fn all_tuples(dim: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..dim).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

/// Weakly increasing tuples with no repeated odd (suspended-degree) element.
pub fn sorted_tuples(space: &GradedSpace, len: usize) -> Vec<Vec<usize>> {
    all_tuples(space.dim(), len)
        .into_iter()
        .filter(|t| t.windows(2).all(|w| w[0] < w[1] || (w[0] == w[1] && !space.is_odd(w[0]))))
        .collect()
}

pub fn random_coeff<R: Rng>(rng: &mut R) -> Rational {
    let mut c = 0;
    while c == 0 {
        c = rng.gen_range(-3..=3);
    }
    q(c)
}

/// A random homogeneous operation; each admissible coefficient is nonzero with probability `density`.
pub fn random_op<R: Rng>(
    rng: &mut R,
    space: &Arc<GradedSpace>,
    arity: usize,
    degree: i64,
    symmetry: SymmetryType,
    density: f64,
) -> MultilinearOp {
    let mut op = MultilinearOp::zero(space.clone(), arity, degree, symmetry);
    let keys = match symmetry {
        SymmetryType::Planar => all_tuples(space.dim(), arity),
        SymmetryType::Symmetric => sorted_tuples(space, arity),
    };
    for key in keys {
        let target: i64 = key.iter().map(|&i| space.shifted_degree(i)).sum::<i64>() + degree;
        for o in 0..space.dim() {
            if space.shifted_degree(o) == target && rng.gen_bool(density) {
                op.add_term(&key, o, random_coeff(rng)).unwrap();
            }
        }
    }
    op
}

fn shifted(space: &GradedSpace, t: &[usize]) -> Vec<i64> {
    t.iter().map(|&i| space.shifted_degree(i)).collect()
}

/// `(f ∘_i g)(t)` straight from the definition, slots numbered from 1.
pub fn oracle_insert(f: &MultilinearOp, g: &MultilinearOp, i: usize, t: &[usize]) -> SparseVec {
    let space = f.space();
    let n = g.arity();
    let (pre, rest) = t.split_at(i - 1);
    let (mid, post) = rest.split_at(n);
    let left: i64 = shifted(space, pre).iter().sum();
    let sign = if (g.degree() * left) % 2 != 0 { q(-1) } else { q(1) };
    let inner = g.evaluate(mid).unwrap();
    let mut acc = SparseVec::new();
    for (o, c) in inner.iter() {
        let mut key = pre.to_vec();
        key.push(o);
        key.extend_from_slice(post);
        acc.axpy(&(c * &sign), &f.evaluate(&key).unwrap());
    }
    acc
}

/// `(f • g)(t)` as a sum over all `(n, m-1)`-unshuffles of the positions of `t`.
pub fn oracle_convolve(f: &MultilinearOp, g: &MultilinearOp, t: &[usize]) -> SparseVec {
    let space = f.space();
    let n = g.arity();
    let total = t.len();
    let degs = shifted(space, t);
    let mut acc = SparseVec::new();
    for mask in 0u32..(1 << total) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let chosen: Vec<usize> = (0..total).filter(|p| mask & (1 << p) != 0).collect();
        let rest: Vec<usize> = (0..total).filter(|p| mask & (1 << p) == 0).collect();
        let perm: Vec<usize> = chosen.iter().chain(&rest).copied().collect();
        let sign = koszul_sign(&perm, &degs);
        let inner = g.evaluate(&chosen.iter().map(|&p| t[p]).collect::<Vec<_>>()).unwrap();
        for (o, c) in inner.iter() {
            let mut key = vec![o];
            key.extend(rest.iter().map(|&p| t[p]));
            acc.axpy(&(c * &sign), &f.evaluate(&key).unwrap());
        }
    }
    acc
}

/// Checks `op` against a pointwise oracle on every basis tuple.
pub fn agrees_everywhere(op: &MultilinearOp, oracle: impl Fn(&[usize]) -> SparseVec) -> bool {
    all_tuples(op.space().dim(), op.arity()).iter().all(|t| op.evaluate(t).unwrap() == oracle(t))
}

/// A random coderivation with components in weights `0..=max_weight` (each present with probability 1/2).
pub fn random_coder<R: Rng>(
    rng: &mut R,
    space: &Arc<GradedSpace>,
    symmetry: SymmetryType,
    codegree: i64,
    cutoff: usize,
    max_weight: usize,
    density: f64,
) -> Coderivation {
    let mut x = Coderivation::zero(space.clone(), symmetry, codegree, cutoff);
    for w in 0..=max_weight.min(cutoff) {
        if rng.gen_bool(0.5) {
            x.set_component(w, random_op(rng, space, w + 1, codegree, symmetry, density)).unwrap();
        }
    }
    x
}

pub const SYMMETRIES: [SymmetryType; 2] = [SymmetryType::Planar, SymmetryType::Symmetric];
