//! Shared fixtures for the solver benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robust_pomdp::benchmarks::{gen_rocksample, Formulation, Placement, RockConstants, RockSampleModel, RockSampleParams};
use robust_pomdp::model::AbPomdp;

pub fn rocksample_ab(grid: usize, good: usize, rocks: usize) -> AbPomdp {
    let p = RockSampleParams {
        grid,
        good,
        rocks,
        placement: Placement::Nearby,
        formulation: Formulation::Ab,
        constants: RockConstants::default(),
    };
    match gen_rocksample(&p).expect("valid parameters") {
        RockSampleModel::Ab(m) => m,
        RockSampleModel::Me(_) => unreachable!(),
    }
}

/// `count` vectors over `dim` states with entries in `[-10, 10)`.
pub fn random_vectors(count: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..dim).map(|_| rng.gen_range(-10.0..10.0)).collect()).collect()
}
