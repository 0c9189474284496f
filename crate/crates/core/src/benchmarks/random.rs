//! Small random models for oracle and property tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Belief, Environment, Horizon, MePomdp, Pomdp, Spaces};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomParams {
    pub num_states: usize,
    pub num_actions: usize,
    pub num_observations: usize,
    pub num_envs: usize,
    pub discount: f64,
    pub horizon: Horizon,
    pub seed: u64,
    /// Share the observation table across environments.
    pub shared_observations: bool,
}

/// Distribution with weights drawn from `0..=4`, at least one positive.
fn random_row(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, f64)> {
    loop {
        let w: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
        let total: u32 = w.iter().sum();
        if total > 0 {
            return w.iter().enumerate().filter(|(_, &k)| k > 0).map(|(i, &k)| (i, k as f64 / total as f64)).collect();
        }
    }
}

/// Reward in `{-3, -2.5, …, 3}`.
fn random_reward(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-6..=6) as f64 * 0.5
}

fn table(rng: &mut ChaCha8Rng, rows: usize, n: usize) -> Vec<Vec<(usize, f64)>> {
    (0..rows).map(|_| random_row(rng, n)).collect()
}

fn random_env(rng: &mut ChaCha8Rng, spaces: &Spaces, obs: Option<&[Vec<(usize, f64)>]>) -> Environment {
    let (ns, na, nz) = (spaces.num_states(), spaces.num_actions(), spaces.num_observations());
    let t = table(rng, ns * na, ns);
    let o = match obs {
        Some(o) => o.to_vec(),
        None => table(rng, ns * na, nz),
    };
    let r: Vec<f64> = (0..ns * na).map(|_| random_reward(rng)).collect();
    let b = random_row(rng, ns);
    Environment::tabulate(
        spaces,
        |s, a| t[s * na + a].clone(),
        |s2, a| o[s2 * na + a].clone(),
        |s, a| r[s * na + a],
        Belief::from_sparse(ns, &b).expect("row is a distribution"),
    )
}

pub fn random_me_pomdp(p: &RandomParams) -> MePomdp {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let spaces = Spaces::indexed(p.num_states, p.num_actions, p.num_observations);
    let shared = p.shared_observations.then(|| table(&mut rng, p.num_states * p.num_actions, p.num_observations));
    let envs = (0..p.num_envs).map(|_| random_env(&mut rng, &spaces, shared.as_deref())).collect();
    MePomdp::new(spaces, envs, p.discount, p.horizon)
}

pub fn random_pomdp(p: &RandomParams) -> Pomdp {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let spaces = Spaces::indexed(p.num_states, p.num_actions, p.num_observations);
    let env = random_env(&mut rng, &spaces, None);
    Pomdp::new(spaces, env, p.discount, p.horizon)
}

/// Sizes drawn per seed within the given maxima.
pub fn random_small_me(seed: u64, max: (usize, usize, usize, usize), discount: f64, horizon: Horizon) -> MePomdp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let p = RandomParams {
        num_states: rng.gen_range(1..=max.0),
        num_actions: rng.gen_range(1..=max.1),
        num_observations: rng.gen_range(1..=max.2),
        num_envs: rng.gen_range(1..=max.3),
        discount,
        horizon,
        seed,
        shared_observations: false,
    };
    random_me_pomdp(&p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Validate;

    #[test]
    fn valid_and_deterministic() {
        for seed in 0..20 {
            let m = random_small_me(seed, (3, 2, 2, 3), 0.9, Horizon::Finite(3));
            assert!(m.validate().is_empty());
            assert_eq!(m, random_small_me(seed, (3, 2, 2, 3), 0.9, Horizon::Finite(3)));
        }
    }

    #[test]
    fn shared_observations_flag() {
        let p = RandomParams {
            num_states: 3,
            num_actions: 2,
            num_observations: 2,
            num_envs: 3,
            discount: 0.9,
            horizon: Horizon::Infinite,
            seed: 4,
            shared_observations: true,
        };
        assert!(random_me_pomdp(&p).is_po_memdp());
    }
}
