//! Tabular model families: POMDPs, multi-environment POMDPs, adversarial-belief
//! POMDPs and one-sided POSGs.
//!
//! All families share the same storage conventions:
//!
//! * transition rows are indexed by `s * |A| + a` and hold a sparse
//!   distribution over successor states;
//! * observation rows are indexed by `s' * |A| + a`, i.e. they are keyed by the
//!   *successor* state and the action that was taken (`O(s', a)(z)`);
//! * rewards are a dense `s * |A| + a` table.
//!
//! Models are plain data. Nothing is checked on construction; call
//! [`Validate::validate`] to obtain the list of violated invariants.

mod belief;
mod validate;

pub use belief::{belief_update, pr_obs, successor_beliefs, Belief, Successor, MIN_OBS_PROB};
pub(crate) use belief::joint_next;
pub use validate::{Validate, Violation};

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Tolerance on the sum of every stored probability distribution.
pub const PROB_TOL: f64 = 1e-9;

/// `|sum - 1| ≤ PROB_TOL`, allowing for the rounding of the sum itself.
#[inline]
pub(crate) fn sums_to_one(sum: f64) -> bool {
    (sum - 1.0).abs() <= PROB_TOL + 4.0 * f64::EPSILON
}

/// Planning horizon: a positive number of decision steps or infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Horizon {
    Finite(u32),
    Infinite,
}

impl Horizon {
    pub fn is_finite(self) -> bool {
        matches!(self, Horizon::Finite(_))
    }

    pub fn steps(self) -> Option<u32> {
        match self {
            Horizon::Finite(h) => Some(h),
            Horizon::Infinite => None,
        }
    }

    /// `H + k`, with `∞ + k = ∞`.
    pub fn shifted(self, k: u32) -> Horizon {
        match self {
            Horizon::Finite(h) => Horizon::Finite(h + k),
            Horizon::Infinite => Horizon::Infinite,
        }
    }
}

impl std::fmt::Display for Horizon {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Horizon::Finite(h) => write!(f, "{h}"),
            Horizon::Infinite => write!(f, "inf"),
        }
    }
}

/// Compressed sparse rows of `(column, probability)` pairs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseRows {
    offsets: Vec<usize>,
    entries: Vec<(usize, f64)>,
}

impl SparseRows {
    /// Builds rows from arbitrary `(index, value)` lists. Entries are sorted by
    /// index, duplicate indices are summed and exact zeros are dropped.
    pub fn from_rows<I>(rows: I) -> Self
    where
        I: IntoIterator<Item = Vec<(usize, f64)>>,
    {
        let mut offsets = vec![0];
        let mut entries = Vec::new();
        for mut row in rows {
            row.sort_by_key(|&(i, _)| i);
            let start = entries.len();
            for (i, p) in row {
                let len = entries.len();
                match entries.last_mut() {
                    Some((j, q)) if len > start && *j == i => *q += p,
                    _ => entries.push((i, p)),
                }
            }
            let mut k = start;
            for idx in start..entries.len() {
                if entries[idx].1 != 0.0 {
                    entries[k] = entries[idx];
                    k += 1;
                }
            }
            entries.truncate(k);
            offsets.push(entries.len());
        }
        SparseRows { offsets, entries }
    }

    pub fn num_rows(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.entries[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[(usize, f64)]> + '_ {
        (0..self.num_rows()).map(move |i| self.row(i))
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).iter().map(|&(_, p)| p).sum()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Rescales rows whose sum is off by more than `1e-12` but within
    /// [`PROB_TOL`]; rows outside the tolerance are left for validation to
    /// reject.
    pub fn renormalize_within_tolerance(&mut self) {
        for i in 0..self.num_rows() {
            let sum = self.row_sum(i);
            let off = (sum - 1.0).abs();
            if off > 1e-12 && sums_to_one(sum) {
                for e in &mut self.entries[self.offsets[i]..self.offsets[i + 1]] {
                    e.1 /= sum;
                }
            }
        }
    }
}

/// Names of the state, action and observation index spaces.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Spaces {
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub observations: Vec<String>,
}

impl Spaces {
    pub fn new(states: Vec<String>, actions: Vec<String>, observations: Vec<String>) -> Self {
        Spaces { states, actions, observations }
    }

    /// Spaces named `s0.., a0.., z0..`.
    pub fn indexed(num_states: usize, num_actions: usize, num_observations: usize) -> Self {
        let names = |p: &str, n: usize| (0..n).map(|i| format!("{p}{i}")).collect();
        Spaces {
            states: names("s", num_states),
            actions: names("a", num_actions),
            observations: names("z", num_observations),
        }
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }
    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }
    pub fn num_observations(&self) -> usize {
        self.observations.len()
    }
}

/// One set of dynamics: transitions, observations, rewards and the initial
/// belief. A POMDP has one; a multi-environment POMDP has one per environment.
#[derive(Clone, Debug, PartialEq)]
pub struct Environment {
    pub transition: SparseRows,
    pub observation: SparseRows,
    pub reward: Vec<f64>,
    pub initial_belief: Belief,
}

impl Environment {
    /// Builds the tables from closures over `(s, a)` for transitions and
    /// rewards and over `(s', a)` for observations.
    pub fn tabulate<T, O, R>(spaces: &Spaces, t: T, o: O, r: R, initial_belief: Belief) -> Self
    where
        T: Fn(usize, usize) -> Vec<(usize, f64)>,
        O: Fn(usize, usize) -> Vec<(usize, f64)>,
        R: Fn(usize, usize) -> f64,
    {
        let (ns, na) = (spaces.num_states(), spaces.num_actions());
        let pairs = || (0..ns).flat_map(move |s| (0..na).map(move |a| (s, a)));
        Environment {
            transition: SparseRows::from_rows(pairs().map(|(s, a)| t(s, a))),
            observation: SparseRows::from_rows(pairs().map(|(s, a)| o(s, a))),
            reward: pairs().map(|(s, a)| r(s, a)).collect(),
            initial_belief,
        }
    }
}

/// A finite POMDP.
#[derive(Clone, Debug, PartialEq)]
pub struct Pomdp {
    pub spaces: Spaces,
    pub env: Environment,
    pub discount: f64,
    pub horizon: Horizon,
    /// Per-state admissible actions; `None` means every action everywhere.
    pub available_actions: Option<Vec<Vec<usize>>>,
}

impl Pomdp {
    pub fn new(spaces: Spaces, env: Environment, discount: f64, horizon: Horizon) -> Self {
        Pomdp { spaces, env, discount, horizon, available_actions: None }
    }

    /// Convenience constructor, see [`Environment::tabulate`].
    #[allow(clippy::too_many_arguments)]
    pub fn tabulate<T, O, R>(
        spaces: Spaces,
        t: T,
        o: O,
        r: R,
        initial_belief: Belief,
        discount: f64,
        horizon: Horizon,
    ) -> Self
    where
        T: Fn(usize, usize) -> Vec<(usize, f64)>,
        O: Fn(usize, usize) -> Vec<(usize, f64)>,
        R: Fn(usize, usize) -> f64,
    {
        let env = Environment::tabulate(&spaces, t, o, r, initial_belief);
        Pomdp::new(spaces, env, discount, horizon)
    }

    #[inline]
    pub fn num_states(&self) -> usize {
        self.spaces.num_states()
    }
    #[inline]
    pub fn num_actions(&self) -> usize {
        self.spaces.num_actions()
    }
    #[inline]
    pub fn num_observations(&self) -> usize {
        self.spaces.num_observations()
    }

    #[inline]
    pub fn transition(&self, s: usize, a: usize) -> &[(usize, f64)] {
        self.env.transition.row(s * self.num_actions() + a)
    }

    #[inline]
    pub fn observation(&self, next: usize, a: usize) -> &[(usize, f64)] {
        self.env.observation.row(next * self.num_actions() + a)
    }

    #[inline]
    pub fn reward(&self, s: usize, a: usize) -> f64 {
        self.env.reward[s * self.num_actions() + a]
    }

    /// Probability of moving to `next` and emitting `z` from `s` under `a`.
    pub fn step_prob(&self, s: usize, a: usize, next: usize, z: usize) -> f64 {
        let t = self.transition(s, a).iter().find(|&&(j, _)| j == next).map_or(0.0, |e| e.1);
        if t == 0.0 {
            return 0.0;
        }
        t * self.observation(next, a).iter().find(|&&(k, _)| k == z).map_or(0.0, |e| e.1)
    }

    pub fn is_available(&self, s: usize, a: usize) -> bool {
        match &self.available_actions {
            None => true,
            Some(av) => av[s].contains(&a),
        }
    }

    /// Actions admissible in every state of `states`. Falls back to all
    /// actions when the intersection is empty.
    pub fn admissible_actions<I: IntoIterator<Item = usize>>(&self, states: I) -> Vec<usize> {
        let all: Vec<usize> = (0..self.num_actions()).collect();
        let Some(av) = &self.available_actions else {
            return all;
        };
        let mut keep = vec![true; self.num_actions()];
        for s in states {
            for (a, k) in keep.iter_mut().enumerate() {
                if !av[s].contains(&a) {
                    *k = false;
                }
            }
        }
        let adm: Vec<usize> = all.iter().copied().filter(|&a| keep[a]).collect();
        if adm.is_empty() {
            all
        } else {
            adm
        }
    }

    /// `(min, max)` over the reward table.
    pub fn reward_bounds(&self) -> (f64, f64) {
        self.env
            .reward
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(r), hi.max(r)))
    }
}

/// A multi-environment POMDP: `n` POMDPs over shared index spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct MePomdp {
    pub spaces: Spaces,
    pub envs: Vec<Environment>,
    pub discount: f64,
    pub horizon: Horizon,
    pub available_actions: Option<Vec<Vec<usize>>>,
}

impl MePomdp {
    pub fn new(spaces: Spaces, envs: Vec<Environment>, discount: f64, horizon: Horizon) -> Self {
        MePomdp { spaces, envs, discount, horizon, available_actions: None }
    }

    /// Wraps a single POMDP as a one-environment model.
    pub fn from_pomdp(m: &Pomdp) -> Self {
        MePomdp {
            spaces: m.spaces.clone(),
            envs: vec![m.env.clone()],
            discount: m.discount,
            horizon: m.horizon,
            available_actions: m.available_actions.clone(),
        }
    }

    pub fn num_envs(&self) -> usize {
        self.envs.len()
    }

    /// All environments share the observation function (PO-MEMDP).
    pub fn is_po_memdp(&self) -> bool {
        self.envs.windows(2).all(|w| w[0].observation == w[1].observation)
    }

    /// All environments share transitions and initial belief (MO-POMDP).
    pub fn is_mo_pomdp(&self) -> bool {
        self.envs
            .windows(2)
            .all(|w| w[0].transition == w[1].transition && w[0].initial_belief == w[1].initial_belief)
    }

    /// The `i`-th environment (zero-based) as a standalone POMDP.
    pub fn env_slice(&self, i: usize) -> Result<Pomdp, ModelError> {
        let env = self.envs.get(i).ok_or(ModelError::IndexOutOfRange {
            what: "environment",
            index: i,
            len: self.envs.len(),
        })?;
        Ok(Pomdp {
            spaces: self.spaces.clone(),
            env: env.clone(),
            discount: self.discount,
            horizon: self.horizon,
            available_actions: self.available_actions.clone(),
        })
    }
}

/// A POMDP whose initial belief is chosen adversarially from `Δ(Q)`.
///
/// `base.env.initial_belief` is kept as the uniform distribution over `Q`;
/// robust solvers ignore it.
#[derive(Clone, Debug, PartialEq)]
pub struct AbPomdp {
    pub base: Pomdp,
    pub belief_support: Vec<usize>,
}

impl AbPomdp {
    pub fn new(mut base: Pomdp, mut belief_support: Vec<usize>) -> Result<Self, ModelError> {
        belief_support.sort_unstable();
        belief_support.dedup();
        if belief_support.is_empty() {
            return Err(ModelError::EmptyBeliefSupport);
        }
        if let Some(&q) = belief_support.iter().find(|&&q| q >= base.num_states()) {
            return Err(ModelError::IndexOutOfRange {
                what: "belief support state",
                index: q,
                len: base.num_states(),
            });
        }
        base.env.initial_belief = Belief::uniform_over(base.num_states(), &belief_support);
        Ok(AbPomdp { base, belief_support })
    }
}

/// A zero-sum one-sided partially observable stochastic game.
///
/// Rows are indexed by `(s * |A1| + a1) * |A2| + a2`; observation rows are
/// keyed by the successor state.
#[derive(Clone, Debug, PartialEq)]
pub struct Posg {
    pub states: Vec<String>,
    pub agent_actions: Vec<String>,
    pub nature_actions: Vec<String>,
    pub observations: Vec<String>,
    pub transition: SparseRows,
    pub observation: SparseRows,
    pub reward: Vec<f64>,
    pub initial_belief: Belief,
    pub discount: f64,
    pub horizon: Horizon,
    pub agent_available_actions: Option<Vec<Vec<usize>>>,
}

impl Posg {
    #[inline]
    pub fn row_index(&self, s: usize, a1: usize, a2: usize) -> usize {
        (s * self.agent_actions.len() + a1) * self.nature_actions.len() + a2
    }

    pub fn transition(&self, s: usize, a1: usize, a2: usize) -> &[(usize, f64)] {
        self.transition.row(self.row_index(s, a1, a2))
    }

    pub fn observation(&self, next: usize, a1: usize, a2: usize) -> &[(usize, f64)] {
        self.observation.row(self.row_index(next, a1, a2))
    }

    pub fn reward(&self, s: usize, a1: usize, a2: usize) -> f64 {
        self.reward[self.row_index(s, a1, a2)]
    }
}
