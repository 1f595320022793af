mod common;

use common::*;
use operformal::algcore::{
    compose_planar, convolve_symmetric, insert_planar, koszul_sign, GradedSpace, MultilinearOp, ShiftConvention,
    SymmetryType,
};
use operformal::exactla::{Rational, SparseVec};
use operformal::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn perms(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in perms(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Sorts `perm` back to the identity by swapping a random adjacent inversion at
/// each step, multiplying the Koszul sign of every swap.
fn sign_by_random_decomposition(perm: &[usize], degrees: &[i64], rng: &mut ChaCha8Rng) -> i64 {
    let mut cur = perm.to_vec();
    let mut sign = 1;
    loop {
        let inversions: Vec<usize> = (0..cur.len().saturating_sub(1)).filter(|&i| cur[i] > cur[i + 1]).collect();
        if inversions.is_empty() {
            return sign;
        }
        let i = inversions[rng.gen_range(0..inversions.len())];
        if degrees[cur[i]] % 2 != 0 && degrees[cur[i + 1]] % 2 != 0 {
            sign = -sign;
        }
        cur.swap(i, i + 1);
    }
}

#[test]
fn koszul_sign_examples() {
    assert_eq!(koszul_sign(&[0, 1, 2, 3], &[1, 2, 3, 4]), q(1));
    assert_eq!(koszul_sign(&[1, 0], &[1, 3]), q(-1));

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cycle = [1, 2, 0];
    let degrees = [1, 1, 0];
    let expected = koszul_sign(&cycle, &degrees);
    for _ in 0..32 {
        assert_eq!(q(sign_by_random_decomposition(&cycle, &degrees, &mut rng)), expected);
    }
    assert_eq!(expected, q(-1));
}

#[test]
fn koszul_sign_matches_every_decomposition() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 0..=4 {
        for degs in all_tuples(2, n) {
            let degrees: Vec<i64> = degs.iter().map(|&d| d as i64).collect();
            for p in perms(n) {
                let s = koszul_sign(&p, &degrees);
                for _ in 0..4 {
                    assert_eq!(q(sign_by_random_decomposition(&p, &degrees, &mut rng)), s);
                }
            }
        }
    }
}

#[test]
fn koszul_sign_is_a_homomorphism() {
    for n in 0..=4 {
        for degs in all_tuples(2, n) {
            let d: Vec<i64> = degs.iter().map(|&x| x as i64).collect();
            for tau in perms(n) {
                let d_tau: Vec<i64> = tau.iter().map(|&i| d[i]).collect();
                for sigma in perms(n) {
                    let rho: Vec<usize> = sigma.iter().map(|&k| tau[k]).collect();
                    assert_eq!(koszul_sign(&rho, &d), koszul_sign(&sigma, &d_tau) * koszul_sign(&tau, &d));
                }
            }
        }
    }
}

#[test]
fn shift_convention_round_trips() {
    for d in -3..=3 {
        assert_eq!(ShiftConvention::classical(ShiftConvention::shifted(d)), d);
    }
    let s = GradedSpace::new([("a", 1), ("b", 0)]).unwrap();
    assert_eq!(s.shifted_degree(0), 0);
    assert_eq!(s.shifted_degree(1), -1);
}

#[test]
fn graded_space_rejects_bad_bases() {
    assert!(GradedSpace::new(Vec::<(String, i64)>::new()).is_err());
    assert!(GradedSpace::new([("a", 1), ("a", 2)]).is_err());
}

#[test]
fn evaluate_examples() {
    // Classical degree 2 gives odd suspended degree.
    let s = space(&[2, 2, 3]);
    let mut op = MultilinearOp::zero(s.clone(), 2, 0, SymmetryType::Symmetric);
    op.add_term(&[0, 1], 2, q(5)).unwrap();
    assert_eq!(op.evaluate(&[0, 1]).unwrap(), SparseVec::from_pairs([(2, q(5))]));
    assert_eq!(op.evaluate(&[1, 0]).unwrap(), SparseVec::from_pairs([(2, q(-5))]));

    let mut planar = MultilinearOp::zero(s.clone(), 2, 0, SymmetryType::Planar);
    planar.add_term(&[0, 1], 2, q(5)).unwrap();
    assert!(planar.evaluate(&[1, 0]).unwrap().is_empty());
    assert_eq!(planar.evaluate(&[0, 1]).unwrap(), SparseVec::from_pairs([(2, q(5))]));
    assert!(matches!(planar.evaluate(&[0]), Err(Error::Contract(_))));
}

#[test]
fn add_term_enforces_homogeneity() {
    let s = space(&[1, 2]);
    let mut op = MultilinearOp::zero(s, 2, 1, SymmetryType::Planar);
    assert!(matches!(op.add_term(&[0, 0], 0, q(1)), Err(Error::Degree { .. })));
    op.add_term(&[0, 0], 1, q(1)).unwrap();
}

#[test]
fn symmetric_storage_is_canonical() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = space(&[1, 2, 0]);
    for arity in 1..=4 {
        for degree in -2..=2 {
            let op = random_op(&mut rng, &s, arity, degree, SymmetryType::Symmetric, 0.7);
            for t in all_tuples(3, arity) {
                let mut sorted = t.clone();
                let mut order: Vec<usize> = (0..arity).collect();
                order.sort_by_key(|&i| (t[i], i));
                sorted.sort();
                let degs: Vec<i64> = t.iter().map(|&i| s.shifted_degree(i)).collect();
                let expected = op.evaluate(&sorted).unwrap().scaled(&koszul_sign(&order, &degs));
                assert_eq!(op.evaluate(&t).unwrap(), expected, "tuple {t:?}");
            }
        }
    }
}

#[test]
fn insert_identity_is_a_unit() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s = space(&[1, 2]);
    let id = MultilinearOp::identity(s.clone(), SymmetryType::Planar);
    let g = random_op(&mut rng, &s, 2, 1, SymmetryType::Planar, 0.8);
    assert_eq!(insert_planar(&id, &g, 1).unwrap(), g);
    for i in 1..=2 {
        assert_eq!(insert_planar(&g, &id, i).unwrap(), g);
    }
}

#[test]
fn insert_planar_matches_expansion_on_two_dims() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let s = space(&[1, 2]);
    for _ in 0..20 {
        let f = random_op(&mut rng, &s, 2, 1, SymmetryType::Planar, 0.9);
        let g = random_op(&mut rng, &s, 2, 1, SymmetryType::Planar, 0.9);
        for i in 1..=2 {
            let h = insert_planar(&f, &g, i).unwrap();
            assert_eq!(all_tuples(2, 3).len(), 8);
            assert!(agrees_everywhere(&h, |t| oracle_insert(&f, &g, i, t)));
            h.check_homogeneity().unwrap();
        }
    }
}

#[test]
fn insert_planar_contract() {
    let s = space(&[1]);
    let f = MultilinearOp::identity(s.clone(), SymmetryType::Planar);
    let g = MultilinearOp::identity(s, SymmetryType::Symmetric);
    assert!(matches!(insert_planar(&f, &g, 1), Err(Error::Contract(_))));
    assert!(matches!(insert_planar(&f, &f, 2), Err(Error::Contract(_))));
}

#[test]
fn convolve_with_identity_counts_slots() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let s = space(&[1, 2, 0]);
    let id = MultilinearOp::identity(s.clone(), SymmetryType::Symmetric);
    for arity in 1..=3 {
        for degree in -1..=1 {
            let f = random_op(&mut rng, &s, arity, degree, SymmetryType::Symmetric, 0.7);
            let fg = convolve_symmetric(&f, &id).unwrap();
            assert_eq!(fg, f.scaled(&Rational::from_int(arity as i64)));
            assert!(agrees_everywhere(&fg, |t| oracle_convolve(&f, &id, t)));
            assert_eq!(convolve_symmetric(&id, &f).unwrap(), f);
        }
    }
}

#[test]
fn convolve_arity_one_is_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let s = space(&[1, 2, 2]);
    let f = random_op(&mut rng, &s, 1, 0, SymmetryType::Symmetric, 0.9);
    let g = random_op(&mut rng, &s, 2, 1, SymmetryType::Symmetric, 0.9);
    let fg = convolve_symmetric(&f, &g).unwrap();
    for t in all_tuples(3, 2) {
        let inner = g.evaluate(&t).unwrap();
        let mut expected = SparseVec::new();
        for (o, c) in inner.iter() {
            expected.axpy(c, &f.evaluate(&[o]).unwrap());
        }
        assert_eq!(fg.evaluate(&t).unwrap(), expected);
    }
}

#[test]
fn convolve_matches_expansion_on_two_dims() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for degrees in [[1, 2], [0, 1], [2, 2], [1, 1]] {
        let s = space(&degrees);
        for deg in -1..=1 {
            let f = random_op(&mut rng, &s, 2, deg, SymmetryType::Symmetric, 0.9);
            let g = random_op(&mut rng, &s, 2, 1, SymmetryType::Symmetric, 0.9);
            let h = convolve_symmetric(&f, &g).unwrap();
            assert!(agrees_everywhere(&h, |t| oracle_convolve(&f, &g, t)));
            h.check_homogeneity().unwrap();
        }
    }
}

fn arb_case() -> impl Strategy<Value = (Vec<i64>, usize, usize, i64, i64, u64)> {
    (
        prop::collection::vec(-1i64..=2, 1..=3),
        1usize..=3,
        1usize..=3,
        -2i64..=2,
        -2i64..=2,
        any::<u64>(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn planar_composition_matches_oracle((degs, m, n, df, dg, seed) in arb_case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = space(&degs);
        let f = random_op(&mut rng, &s, m, df, SymmetryType::Planar, 0.6);
        let g = random_op(&mut rng, &s, n, dg, SymmetryType::Planar, 0.6);
        let total = compose_planar(&f, &g).unwrap();
        total.check_homogeneity().unwrap();
        prop_assert_eq!(total.degree(), df + dg);
        let sum_of_slots = |t: &[usize]| {
            let mut acc = SparseVec::new();
            for i in 1..=m {
                acc.axpy(&Rational::ONE, &oracle_insert(&f, &g, i, t));
            }
            acc
        };
        prop_assert!(agrees_everywhere(&total, sum_of_slots));
    }

    #[test]
    fn symmetric_convolution_matches_oracle((degs, m, n, df, dg, seed) in arb_case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = space(&degs);
        let f = random_op(&mut rng, &s, m, df, SymmetryType::Symmetric, 0.6);
        let g = random_op(&mut rng, &s, n, dg, SymmetryType::Symmetric, 0.6);
        let h = convolve_symmetric(&f, &g).unwrap();
        h.check_homogeneity().unwrap();
        prop_assert!(agrees_everywhere(&h, |t| oracle_convolve(&f, &g, t)));
    }
}
