//! Target-search simulations that plan with expected-cost orderings.
//!
//! [`bayes`] covers lifelong search on a known graph with a noisy detector;
//! [`grid`] covers exploration of an unknown occupancy grid. Both choose
//! their next goal with a [`planner::PlannerKind`].

pub mod bayes;
mod error;
pub mod grid;
pub mod planner;

use hpppt_core::Seed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use error::{Result, SimError};
pub use planner::{PlannerConfig, PlannerKind};

/// Uniform draw in `[0, 1)` determined by `(seed, counter)` alone.
pub fn counter_uniform(seed: Seed, counter: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    rng.set_stream(counter);
    rng.random::<f64>()
}
