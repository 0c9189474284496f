//! Controllers extracted from α-vectors, mixtures of them, their behavioral
//! form, and exact and sampled evaluation.

mod eval;
mod graph;
mod mixed;
mod simulate;

pub use eval::{evaluate_fsc_exact, evaluate_fsc_nodes, evaluate_mixed_exact, expected_value};
pub use graph::{agent_policy, extract_policy, MixedPolicy, PolicyGraph, PolicyNode};
pub use mixed::{mixed_to_behavioral, BehavioralRunner, FALLBACK_ACTION};
pub use simulate::{episode_rng, simulate, Agent, PolicySource, SimStats};
