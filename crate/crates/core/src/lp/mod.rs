//! Linear programming: a small simplex kernel and the two matrix-game LPs
//! over beliefs and α-vector mixtures.

mod game;
mod simplex;

pub use game::{agent_lp, nature_lp, prune_on_support, AgentSolution, NatureSolution};
pub use simplex::{lp_solve, Constraint, LinearProgram, LpSolution, Objective, Sense};
