//! Online selection under temporal constraints: greedy online contention
//! resolution schemes, a wrapper that lifts them to time-windowed packing
//! constraints, regret-minimization loops built on top of the selector, and
//! a batched bipartite matching pipeline with stochastically reusable
//! resources.
//!
//! Start with the `examples/` directory: each example exercises one major
//! capability end to end. The `dynsel` binary drives the same machinery from
//! JSON experiment configurations.

pub mod adversaries;
pub mod batched;
pub mod coins;
pub mod constraints;
pub mod error;
pub mod experiments;
pub mod lp;
pub mod ocrs;
pub mod regret;
pub mod stats;
pub mod temporal;

pub use error::{Error, Result};

