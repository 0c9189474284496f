//! Endangered-bird population management with disagreeing experts.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::GenError;
use crate::model::{Belief, Environment, Horizon, MePomdp, Spaces};

pub const BIRD_DISCOUNT: f64 = 0.95;

/// Draws allowed before giving up on pairwise distinct expert orderings.
pub const ORDERING_RETRIES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BirdVariant {
    /// Transitions and observations vary across experts.
    MePomdp,
    /// Only transitions vary.
    PoMemdp,
    /// Only observations vary.
    MoPomdp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BirdParams {
    pub num_states: usize,
    pub num_actions: usize,
    pub num_experts: usize,
    pub seed: u64,
    pub variant: BirdVariant,
}

fn state_names(ns: usize) -> Vec<String> {
    (0..ns)
        .map(|i| match i {
            0 => "sL".to_string(),
            i if i == ns - 1 => "sH".to_string(),
            1 if ns == 3 => "sM".to_string(),
            i => format!("s{i}"),
        })
        .collect()
}

fn action_names(na: usize) -> Vec<String> {
    let mut v: Vec<String> = if na == 2 { vec!["C".into()] } else { (1..na).map(|i| format!("C{i}")).collect() };
    v.push("DN".into());
    v
}

/// The successor states of rank `i`: itself and its two nearest ranks.
fn slots(ns: usize, i: usize) -> Vec<usize> {
    if ns <= 3 {
        return (0..ns).collect();
    }
    if i == 0 {
        vec![0, 1, 2]
    } else if i == ns - 1 {
        vec![ns - 3, ns - 2, ns - 1]
    } else {
        vec![i - 1, i, i + 1]
    }
}

/// Do-nothing row: mostly stay, drift toward the middle.
fn dn_row(ns: usize, i: usize) -> Vec<(usize, f64)> {
    if ns == 2 {
        return if i == 0 { vec![(0, 0.8), (1, 0.2)] } else { vec![(0, 0.2), (1, 0.8)] };
    }
    if i == 0 {
        vec![(0, 0.8), (1, 0.15), (2, 0.05)]
    } else if i == ns - 1 {
        vec![(ns - 3, 0.05), (ns - 2, 0.15), (ns - 1, 0.8)]
    } else {
        vec![(i - 1, 0.1), (i, 0.8), (i + 1, 0.1)]
    }
}

/// `5·rank`, minus 5 for anything but doing nothing (the last action).
fn reward(na: usize) -> impl Fn(usize, usize) -> f64 {
    move |s, a| 5.0 * s as f64 - if a == na - 1 { 0.0 } else { 5.0 }
}

fn obs_row(ns: usize, s2: usize, z_low: &[f64]) -> Vec<(usize, f64)> {
    if s2 == 0 {
        vec![(0, 1.0)]
    } else if s2 == ns - 1 {
        vec![(1, 1.0)]
    } else {
        let p = z_low[s2 - 1];
        vec![(0, p), (1, 1.0 - p)]
    }
}

/// The three-state, three-expert instance with uniform initial belief.
pub fn bird_fixture() -> MePomdp {
    let spaces = Spaces::new(
        vec!["sL".into(), "sM".into(), "sH".into()],
        vec!["C".into(), "DN".into()],
        vec!["oL".into(), "oH".into()],
    );
    // control rows per expert, from sL, sM, sH
    let c1 = [[0.6, 0.35, 0.05], [0.1, 0.5, 0.4], [0.0, 0.1, 0.9]];
    let c2 = [[0.2, 0.6, 0.2], [0.1, 0.75, 0.15], [0.05, 0.15, 0.8]];
    let experts = [(c1, 0.5), (c2, 0.5), (c1, 0.4)];
    let envs = experts
        .iter()
        .map(|&(c, z)| {
            Environment::tabulate(
                &spaces,
                move |s, a| if a == 0 { (0..3).map(|k| (k, c[s][k])).collect() } else { dn_row(3, s) },
                move |s2, _| obs_row(3, s2, &[z]),
                reward(2),
                Belief::uniform(3),
            )
        })
        .collect();
    MePomdp::new(spaces, envs, BIRD_DISCOUNT, Horizon::Infinite)
}

/// Random composition of 20 twentieths into `k` parts.
fn random_dist(rng: &mut ChaCha8Rng, k: usize) -> Vec<u32> {
    let mut cuts: Vec<u32> = (0..k - 1).map(|_| rng.gen_range(0..=20)).collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(k);
    let mut prev = 0;
    for c in cuts {
        out.push(c - prev);
        prev = c;
    }
    out.push(20 - prev);
    out
}

fn check(p: &BirdParams) -> Result<(), GenError> {
    if p.num_states < 2 {
        return Err(GenError::Param { name: "num_states", reason: "need at least 2".into() });
    }
    if p.num_actions < 1 {
        return Err(GenError::Param { name: "num_actions", reason: "need at least 1".into() });
    }
    if p.num_experts < 1 {
        return Err(GenError::Param { name: "num_experts", reason: "need at least 1".into() });
    }
    Ok(())
}

/// Randomized family: shared effectiveness distributions, per-expert action
/// rankings and per-expert observation rows for the middle ranks.
pub fn gen_bird(p: &BirdParams) -> Result<MePomdp, GenError> {
    check(p)?;
    let (ns, na, n) = (p.num_states, p.num_actions, p.num_experts);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let k = ns.min(3);
    let nc = na - 1;

    // least effective first: most mass on the lowest slot
    let mut dists: Vec<Vec<u32>> = (0..nc).map(|_| random_dist(&mut rng, k)).collect();
    dists.sort_by(|a, b| b.cmp(a));

    let vary_t = p.variant != BirdVariant::MoPomdp;
    let vary_o = p.variant != BirdVariant::PoMemdp;

    // ranking[e][s][a] = effectiveness rank of control action a at state s
    let draw_ranking = |rng: &mut ChaCha8Rng| -> Vec<Vec<usize>> {
        (0..ns)
            .map(|_| {
                let mut perm: Vec<usize> = (0..nc).collect();
                perm.shuffle(rng);
                perm
            })
            .collect()
    };
    let rankings: Vec<Vec<Vec<usize>>> = if vary_t && n > 1 {
        let mut attempt = 0;
        loop {
            attempt += 1;
            let r: Vec<_> = (0..n).map(|_| draw_ranking(&mut rng)).collect();
            let distinct = (0..n).all(|i| (i + 1..n).all(|j| r[i] != r[j]));
            if distinct {
                break r;
            }
            if attempt >= ORDERING_RETRIES {
                return Err(GenError::GenerationFailure(attempt));
            }
        }
    } else {
        let r = draw_ranking(&mut rng);
        vec![r; n]
    };

    let draw_obs = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        let mut ks: Vec<u32> = (0..ns - 2).map(|_| rng.gen_range(0..=20)).collect();
        ks.sort_by(|a, b| b.cmp(a));
        ks.into_iter().map(|k| k as f64 / 20.0).collect()
    };
    let obs: Vec<Vec<f64>> = if vary_o {
        (0..n).map(|_| draw_obs(&mut rng)).collect()
    } else {
        let o = draw_obs(&mut rng);
        vec![o; n]
    };

    let spaces = Spaces::new(state_names(ns), action_names(na), vec!["oL".into(), "oH".into()]);
    let envs = (0..n)
        .map(|e| {
            let ranking = rankings[e].clone();
            let dists = dists.clone();
            let z = obs[e].clone();
            Environment::tabulate(
                &spaces,
                move |s, a| {
                    if a == nc {
                        dn_row(ns, s)
                    } else {
                        let d = &dists[ranking[s][a]];
                        slots(ns, s).into_iter().zip(d).map(|(s2, &w)| (s2, w as f64 / 20.0)).collect()
                    }
                },
                move |s2, _| obs_row(ns, s2, &z),
                reward(na),
                Belief::uniform(ns),
            )
        })
        .collect();
    Ok(MePomdp::new(spaces, envs, BIRD_DISCOUNT, Horizon::Infinite))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Validate;

    #[test]
    fn fixture_entries() {
        let m = bird_fixture();
        assert!(m.validate().is_empty());
        assert_eq!(m.envs[1].transition.row(0), &[(0, 0.2), (1, 0.6), (2, 0.2)]);
        assert_eq!(m.envs[2].observation.row(1 * 2 + 0), &[(0, 0.4), (1, 0.6)]);
        assert_eq!(m.envs[0].transition, m.envs[2].transition);
        assert_eq!(m.envs[0].reward, vec![-5.0, 0.0, 0.0, 5.0, 5.0, 10.0]);
        assert!(!m.is_po_memdp() && !m.is_mo_pomdp());
    }

    fn params(variant: BirdVariant) -> BirdParams {
        BirdParams { num_states: 5, num_actions: 3, num_experts: 3, seed: 7, variant }
    }

    #[test]
    fn variants_share_the_right_tables() {
        let po = gen_bird(&params(BirdVariant::PoMemdp)).unwrap();
        assert!(po.is_po_memdp());
        let mo = gen_bird(&params(BirdVariant::MoPomdp)).unwrap();
        assert!(mo.is_mo_pomdp());
        for m in [po, mo, gen_bird(&params(BirdVariant::MePomdp)).unwrap()] {
            assert!(m.validate().is_empty(), "{:?}", m.validate());
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let p = params(BirdVariant::MePomdp);
        assert_eq!(gen_bird(&p).unwrap(), gen_bird(&p).unwrap());
        let q = BirdParams { seed: 8, ..p };
        assert_ne!(gen_bird(&p).unwrap(), gen_bird(&q).unwrap());
    }

    #[test]
    fn dn_rows_stay_local() {
        let m = gen_bird(&BirdParams { num_states: 6, ..params(BirdVariant::MePomdp) }).unwrap();
        let na = 3;
        for s in 0..6 {
            let near = slots(6, s);
            for env in &m.envs {
                assert!(env.transition.row(s * na + 2).iter().all(|(s2, _)| near.contains(s2)));
            }
        }
    }

    #[test]
    fn impossible_orderings_fail() {
        let p = BirdParams { num_states: 2, num_actions: 2, num_experts: 2, seed: 1, variant: BirdVariant::MePomdp };
        assert!(matches!(gen_bird(&p), Err(GenError::GenerationFailure(_))));
    }
}
