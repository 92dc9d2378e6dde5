//! Planning over graphs with probabilistic terminals.
//!
//! Every vertex of a complete graph carries a probability that the walk ends
//! there (a target is found). The task is to order all vertices from a start
//! vertex so that the *expected* travelled cost is minimal. The crate
//! provides:
//!
//! - [`Instance`] and the expected-cost evaluators in [`cost`];
//! - instance I/O ([`io`]: a native `.hpt` format and a TSPLIB subset) and
//!   seeded generators ([`generate`]);
//! - the exact best-first search and its bounded-suboptimal focal variant
//!   ([`solver`]);
//! - reference baselines ([`baselines`]).
//!
//! ```
//! use hpppt_core::{solve, Instance, SolverConfig};
//!
//! let inst = Instance::from_matrix(
//!     "three",
//!     vec![vec![0.0, 1.0, 4.0], vec![1.0, 0.0, 2.0], vec![4.0, 2.0, 0.0]],
//!     vec![0.2, 0.5, 0.3],
//!     0,
//! )
//! .unwrap();
//! let best = solve(&inst, &SolverConfig::default()).unwrap();
//! assert_eq!(best.path.as_slice(), &[0, 1, 2]);
//! assert!((best.cost - 1.6).abs() < 1e-12);
//! ```

pub mod baselines;
pub mod cost;
mod error;
pub mod generate;
mod instance;
pub mod io;
pub mod solver;

pub use cost::{expected_cost_direct, expected_cost_q};
pub use error::{Error, Result};
pub use instance::{Instance, Path, Seed, METRIC_TOLERANCE};
pub use solver::{solve, SolveError, SolveResult, SolverConfig};
