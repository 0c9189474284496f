//! Max–min robust planning for multi-environment POMDPs.
//!
//! Multi-environment models are reduced to adversarial-belief POMDPs whose
//! initial belief ranges over a simplex `Δ(Q)`. Those are solved either
//! exactly at a finite horizon or with a point-based heuristic search whose
//! restarts come from a matrix game between nature (choosing the belief) and
//! the agent (mixing α-vector policies).

pub mod benchmarks;
pub mod bounds;
pub mod error;
pub mod format;
pub mod hsvi;
pub mod lp;
pub mod model;
pub mod policy;
pub mod transforms;

pub use error::Error;
