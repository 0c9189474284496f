//! Instance generators: the bird management problem, RockSample, a
//! two-action matrix game and small random models.

mod bird;
mod pennies;
pub mod random;
mod rocksample;

pub use bird::{bird_fixture, gen_bird, BirdParams, BirdVariant, BIRD_DISCOUNT, ORDERING_RETRIES};
pub use pennies::pennies_fixture;
pub use rocksample::{
    combinations, gen_rocksample, rock_positions, sensor_accuracy, Formulation, Placement, RockConstants,
    RockSampleModel, RockSampleParams, ROCK_DISCOUNT,
};
