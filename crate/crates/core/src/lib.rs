//! Multi-target tracking and multi-sensor planning.
//!
//! The crate is organised bottom-up:
//!
//! - [`gospa`]: the GOSPA metric (p = 2, α = 2) with an exact assignment solver.
//! - [`filter`]: a Gaussian multi-Bernoulli filter with sequential per-sensor
//!   updates, association marginals (exact enumeration or loopy belief
//!   propagation) and Bernoulli merging.
//! - [`planner`]: the MSGOSPA upper-bound cost, hypothetical detection updates,
//!   detection-pattern merging and a reduced-tree Monte Carlo tree search.
//! - [`world`]: ground-truth scenario engine (targets, sensors, obstacles,
//!   clutter).
//! - [`experiment`]: seeded Monte-Carlo closed-loop runs, aggregation and
//!   CSV/JSON output.

pub mod error;
pub mod experiment;
pub mod filter;
pub mod gospa;
pub mod linalg;
pub mod planner;
pub mod rng;
pub mod world;

pub use error::{Error, Result};
