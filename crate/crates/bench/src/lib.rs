//! Inputs shared by the benchmarks.

use operformal::coder::{Coderivation, PInfStructure};
use operformal::exactla::{RatMatrix, Rational};
use operformal::fixtures;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sparse matrix with small integer entries.
pub fn random_matrix(rows: usize, cols: usize, density: f64, seed: u64) -> RatMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if rng.gen_bool(density) {
                let v: i64 = rng.gen_range(-3..=3);
                if v != 0 {
                    entries.push((r, c, Rational::from_int(v)));
                }
            }
        }
    }
    RatMatrix::from_triplets(rows, cols, entries).expect("entries are in range")
}

/// Codegree-0 coderivation in the weights gauge steps act on.
pub fn random_tau(q: &PInfStructure, seed: u64) -> Coderivation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    fixtures::random_gauge(q, &mut rng, 0.5).expect("fixture spaces are valid")
}
