//! Hash Chemistry: a spatial artificial-chemistry model in which groups of
//! particles are evaluated as multisets by a universal fitness function
//! (a bit-exact FNV-1a hash mapped to `[0,1)`), replicated or deleted as a
//! unit, and tracked with novelty metrics and growth-curve fits.
//!
//! The crate is organized as:
//! - [`core`]: domain types (particles, multiset keys, parameters, world)
//! - [`rng`]: deterministic, splittable random streams
//! - [`spatial`]: fixed-radius neighbor queries on the unit square
//! - [`fitness`]: hash and random-control fitness evaluators
//! - [`engine`]: the per-tick update rule and the run loop
//! - [`metrics`]: per-tick records and cumulative novelty registries
//! - [`harness`]: extinction-filtered Monte Carlo campaigns
//! - [`analysis`]: series averaging and bounded/unbounded growth fits
//! - [`verify`]: self-contained oracle checks (grid vs. brute force, OLS
//!   vs. normal equations, hash determinism, population bookkeeping)

pub mod analysis;
pub mod core;
pub mod engine;
pub mod fitness;
pub mod harness;
pub mod metrics;
pub mod rng;
pub mod spatial;
pub mod verify;

pub use crate::core::{init_world, multiset_key, MultisetKey, Params, Particle, TypeId, World};
pub use crate::engine::{run, step, RunSummary, StepOutcome};
pub use crate::harness::{run_campaign, CampaignResult, CampaignSpec, RunResult};
pub use crate::rng::RngStream;
