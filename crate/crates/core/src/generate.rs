//! Seeded synthetic instances and probability assignment.

use rand::Rng;

use crate::error::{Error, Result};
use crate::instance::{euclidean, Instance, Seed};

/// Default upper bound for sampled termination probabilities.
pub const DEFAULT_P_MAX: f64 = 0.9;
/// Default minimum pairwise separation between sampled points.
pub const DEFAULT_MIN_SEPARATION: f64 = 5.0;
/// Rejection-sampling attempts allowed per point before giving up.
pub const MAX_ATTEMPTS_PER_POINT: usize = 10_000;

/// Side of the square sampling region: 500 for up to 40 vertices, 5000 above.
pub fn default_extent(n: usize) -> f64 {
    if n <= 40 {
        500.0
    } else {
        5000.0
    }
}

/// Replaces the probabilities with independent draws, uniform on `[0, p_max)`.
pub fn assign_probabilities(inst: &Instance, seed: Seed, p_max: f64) -> Result<Instance> {
    if !(0.0..1.0).contains(&p_max) {
        return Err(Error::InvalidArgument(format!(
            "p_max = {p_max}, must lie in [0, 1)"
        )));
    }
    let prob = sample_probabilities(inst.n(), seed, p_max);
    Ok(inst.clone().with_probabilities(prob)?.with_seed(Some(seed)))
}

pub(crate) fn sample_probabilities(n: usize, seed: Seed, p_max: f64) -> Vec<f64> {
    let mut rng = seed.derive(1).rng();
    (0..n).map(|_| rng.random::<f64>() * p_max).collect()
}

/// Uniform random points in `[0, extent]^2` whose pairwise distances all
/// exceed `min_sep`, with exact Euclidean costs. Probabilities are sampled on
/// `[0, p_max)` from the same seed.
pub fn generate_random(
    n: usize,
    extent: f64,
    min_sep: f64,
    p_max: f64,
    seed: Seed,
) -> Result<Instance> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !(extent > 0.0 && extent.is_finite()) || !(min_sep >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "extent = {extent}, min_sep = {min_sep}"
        )));
    }
    if !(0.0..1.0).contains(&p_max) {
        return Err(Error::InvalidArgument(format!(
            "p_max = {p_max}, must lie in [0, 1)"
        )));
    }
    let mut rng = seed.derive(0).rng();
    let mut points: Vec<[f64; 2]> = Vec::with_capacity(n);
    while points.len() < n {
        let mut attempts = 0;
        let p = loop {
            if attempts == MAX_ATTEMPTS_PER_POINT {
                return Err(Error::Generation(format!(
                    "could not place point {} of {n} with separation {min_sep} in a {extent} square",
                    points.len() + 1
                )));
            }
            attempts += 1;
            let cand = [rng.random::<f64>() * extent, rng.random::<f64>() * extent];
            if points.iter().all(|&q| euclidean(q, cand) > min_sep) {
                break cand;
            }
        };
        points.push(p);
    }
    let prob = sample_probabilities(n, seed, p_max);
    Ok(Instance::from_coords(format!("rand{n}_s{}", seed.0), points, prob, 0)?.with_seed(Some(seed)))
}

/// [`generate_random`] with the default extent, separation and `p_max`.
pub fn generate_default(n: usize, seed: Seed) -> Result<Instance> {
    generate_random(
        n,
        default_extent(n),
        DEFAULT_MIN_SEPARATION,
        DEFAULT_P_MAX,
        seed,
    )
}
