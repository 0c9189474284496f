//! α-vector lower bounds, exact finite-horizon sets, point backups and the
//! sawtooth upper bound.

mod alpha;
mod backup;
mod exact;
mod init;
mod lark;
mod upper;

pub use alpha::{prune_pointwise, AlphaVector, Insertion, LowerBound, Successors};
pub use backup::{backup, backup_action};
pub use exact::{exact_gamma, exact_gamma_with, ExactOptions, GammaStack, DEFAULT_BLOWUP_CAP};
pub use init::{blind_bound, blind_bound_iters, fib_bound, DEFAULT_BOUND_TOL};
pub use upper::{sawtooth_value, state_blocks, ub_insert, UpperBound};

