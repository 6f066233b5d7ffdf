//! Seeded workloads shared by the criterion benches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stencilmat::DenseMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

/// Random square matrix whose spectrum is pushed right by `shift`, so pairs
/// built with positive shifts keep `A` and `-B` spectrally separated.
pub fn shifted_matrix(rng: &mut impl Rng, n: usize, shift: f64) -> DenseMatrix {
    let mut a = random_matrix(rng, n, n);
    for i in 0..n {
        a[(i, i)] += shift;
    }
    a
}
