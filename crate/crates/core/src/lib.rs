//! Fixed-budget best-arm identification: complexity quantities, the
//! successive-rejects strategy and its companions, closed-form bounds on the
//! misidentification error rate, and a Monte Carlo harness that checks
//! empirical error decay against those bounds.
//!
//! ```
//! use bai::{dist::Distribution, info::pair_rate};
//!
//! let worse = Distribution::bernoulli(0.25).unwrap();
//! let better = Distribution::bernoulli(0.75).unwrap();
//! let rate = pair_rate(&worse, &better).unwrap();
//! assert!((rate.value - 0.2876821).abs() < 1e-7);
//! ```

pub mod bounds;
pub mod dist;
pub mod error;
pub mod info;
pub mod problem;
pub mod rate_json;
pub mod schedule;
pub mod sim;
pub mod stream;
pub mod strategy;
pub mod verify;

pub use bounds::{compute_bounds, BoundReport};
pub use dist::{kl_divergence, Distribution, Family};
pub use error::{Error, Result};
pub use problem::{analyze_problem, BanditProblem, ProblemSpec};
pub use strategy::{run_strategy, StrategyKind, StrategyTrace};
