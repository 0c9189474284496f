//! Value-preserving reductions between the model families, and the policy
//! lifting they induce.
//!
//! The sentinel reductions prepend one stage: from a bottom state `⊥` the only
//! admissible action is `◊` (action 0), the next state is drawn from the
//! initial uncertainty and the agent observes the fresh symbol `⊤`. Rewards
//! after that stage are divided by `γ` so the extra discount cancels.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::TransformError;
use crate::model::{AbPomdp, Belief, Environment, Horizon, MePomdp, Pomdp, Posg, SparseRows, Spaces};
use crate::policy::{MixedPolicy, PolicyGraph};

/// Default cap on materialized product states.
pub const DEFAULT_PRODUCT_CAP: usize = 1_000_000;

/// Index of the action forced at bottom states.
pub const DIAMOND: usize = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransformKind {
    AbToPosg,
    MeToAb,
    AbToPomemdp,
    PomemdpToMo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SentinelInfo {
    pub bottom_states: Vec<usize>,
    pub top_observation: usize,
    pub diamond_action: usize,
    pub reward_scale: f64,
    pub horizon_shift: u32,
}

/// Where a state of the transformed model comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateOrigin {
    Bottom { env: Option<usize> },
    Copy { state: usize, env: Option<usize>, stage: u8 },
    Product(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformRecord {
    pub kind: TransformKind,
    pub state_map: Vec<StateOrigin>,
    pub sentinel: Option<SentinelInfo>,
}

fn unique_name(base: String, taken: &[String]) -> String {
    let mut name = base;
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

fn check_discount(gamma: f64) -> Result<(), TransformError> {
    if gamma > 0.0 {
        Ok(())
    } else {
        Err(TransformError::InvalidDiscount)
    }
}

/// Observation row `δ_⊤` or the original row.
fn obs_rows(rows: &SparseRows, top: usize) -> impl Fn(Option<usize>) -> Vec<(usize, f64)> + '_ {
    move |orig| match orig {
        None => vec![(top, 1.0)],
        Some(row) => rows.row(row).to_vec(),
    }
}

/// Tables of the two-copy construction shared by the AB reductions: states
/// `(s,1)` at `s`, `(s,2)` at `|S| + s`, `⊥` at `2|S|`.
struct TwoCopy {
    spaces: Spaces,
    transition_tail: Vec<Vec<(usize, f64)>>,
    observation: SparseRows,
    reward: Vec<f64>,
    available: Vec<Vec<usize>>,
    state_map: Vec<StateOrigin>,
}

fn two_copy(m: &Pomdp) -> TwoCopy {
    let (ns, na, nz) = (m.num_states(), m.num_actions(), m.num_observations());
    let mut states = Vec::with_capacity(2 * ns + 1);
    for j in 1..=2 {
        for s in &m.spaces.states {
            states.push(format!("{s}#{j}"));
        }
    }
    let bottom = unique_name("bot".into(), &states);
    states.push(bottom);
    let mut observations = m.spaces.observations.clone();
    observations.push(unique_name("top".into(), &observations));
    let spaces = Spaces::new(states, m.spaces.actions.clone(), observations);

    // rows for the copies; ⊥ rows are filled in by the caller
    let mut transition_tail = Vec::with_capacity(2 * ns * na);
    for _j in 0..2 {
        for s in 0..ns {
            for a in 0..na {
                transition_tail.push(m.transition(s, a).iter().map(|&(s2, p)| (ns + s2, p)).collect());
            }
        }
    }
    let obs = obs_rows(&m.env.observation, nz);
    let observation = SparseRows::from_rows((0..2 * ns + 1).flat_map(|hat| {
        let obs = &obs;
        (0..na).map(move |a| if hat >= ns && hat < 2 * ns { obs(Some((hat - ns) * na + a)) } else { obs(None) })
    }));
    let mut reward = Vec::with_capacity((2 * ns + 1) * na);
    for _j in 0..2 {
        for s in 0..ns {
            for a in 0..na {
                reward.push(m.reward(s, a) / m.discount);
            }
        }
    }
    reward.extend(std::iter::repeat(0.0).take(na));
    let mut available: Vec<Vec<usize>> = Vec::with_capacity(2 * ns + 1);
    for _j in 0..2 {
        for s in 0..ns {
            available.push((0..na).filter(|&a| m.is_available(s, a)).collect());
        }
    }
    available.push(vec![DIAMOND]);
    let mut state_map: Vec<StateOrigin> = Vec::with_capacity(2 * ns + 1);
    for stage in 1..=2u8 {
        for s in 0..ns {
            state_map.push(StateOrigin::Copy { state: s, env: None, stage });
        }
    }
    state_map.push(StateOrigin::Bottom { env: None });
    TwoCopy { spaces, transition_tail, observation, reward, available, state_map }
}

fn sentinel(bottom_states: Vec<usize>, top: usize, gamma: f64) -> SentinelInfo {
    SentinelInfo { bottom_states, top_observation: top, diamond_action: DIAMOND, reward_scale: 1.0 / gamma, horizon_shift: 1 }
}

/// One-sided game in which nature picks the initial state from `Q`.
pub fn ab_to_posg(m: &AbPomdp) -> Result<(Posg, TransformRecord), TransformError> {
    let base = &m.base;
    check_discount(base.discount)?;
    let (ns, na, nz) = (base.num_states(), base.num_actions(), base.num_observations());
    let nq = m.belief_support.len();
    let tc = two_copy(base);
    let nhat = 2 * ns + 1;
    let bot = 2 * ns;
    let mut t_rows = Vec::with_capacity(nhat * na * nq);
    let mut o_rows = Vec::with_capacity(nhat * na * nq);
    let mut reward = Vec::with_capacity(nhat * na * nq);
    for hat in 0..nhat {
        for a in 0..na {
            for &q in &m.belief_support {
                t_rows.push(if hat == bot { vec![(q, 1.0)] } else { tc.transition_tail[hat * na + a].clone() });
                o_rows.push(tc.observation.row(hat * na + a).to_vec());
                reward.push(tc.reward[hat * na + a]);
            }
        }
    }
    let posg = Posg {
        states: tc.spaces.states.clone(),
        agent_actions: tc.spaces.actions.clone(),
        nature_actions: m.belief_support.iter().map(|&q| base.spaces.states[q].clone()).collect(),
        observations: tc.spaces.observations.clone(),
        transition: SparseRows::from_rows(t_rows),
        observation: SparseRows::from_rows(o_rows),
        reward,
        initial_belief: Belief::point(nhat, bot),
        discount: base.discount,
        horizon: base.horizon.shifted(1),
        agent_available_actions: Some(tc.available),
    };
    let record = TransformRecord {
        kind: TransformKind::AbToPosg,
        state_map: tc.state_map,
        sentinel: Some(sentinel(vec![bot], nz, base.discount)),
    };
    Ok((posg, record))
}

/// Adversarial-belief POMDP whose belief set ranges over one bottom state per
/// environment.
pub fn me_to_ab(m: &MePomdp) -> Result<(AbPomdp, TransformRecord), TransformError> {
    check_discount(m.discount)?;
    let (ns, na, nz) = (m.spaces.num_states(), m.spaces.num_actions(), m.spaces.num_observations());
    let n = m.num_envs();
    let copy = |i: usize, j: usize, s: usize| (i * 2 + j - 1) * ns + s;
    let bot = |i: usize| 2 * n * ns + i;
    let nhat = 2 * n * ns + n;

    let mut states = Vec::with_capacity(nhat);
    let mut state_map = Vec::with_capacity(nhat);
    for i in 0..n {
        for j in 1..=2u8 {
            for (s, name) in m.spaces.states.iter().enumerate() {
                states.push(format!("{name}#e{}#{j}", i + 1));
                state_map.push(StateOrigin::Copy { state: s, env: Some(i), stage: j });
            }
        }
    }
    for i in 0..n {
        let name = unique_name(format!("bot#e{}", i + 1), &states);
        states.push(name);
        state_map.push(StateOrigin::Bottom { env: Some(i) });
    }
    let mut observations = m.spaces.observations.clone();
    observations.push(unique_name("top".into(), &observations));
    let spaces = Spaces::new(states, m.spaces.actions.clone(), observations);

    let mut t_rows = vec![Vec::new(); nhat * na];
    let mut o_rows = vec![vec![(nz, 1.0)]; nhat * na];
    let mut reward = vec![0.0; nhat * na];
    let mut available = vec![Vec::new(); nhat];
    for (i, env) in m.envs.iter().enumerate() {
        for j in 1..=2 {
            for s in 0..ns {
                let hat = copy(i, j, s);
                for a in 0..na {
                    let row = hat * na + a;
                    t_rows[row] = env.transition.row(s * na + a).iter().map(|&(s2, p)| (copy(i, 2, s2), p)).collect();
                    if j == 2 {
                        o_rows[row] = env.observation.row(s * na + a).to_vec();
                    }
                    reward[row] = env.reward[s * na + a] / m.discount;
                }
                available[hat] = match &m.available_actions {
                    Some(av) => av[s].clone(),
                    None => (0..na).collect(),
                };
            }
        }
        for a in 0..na {
            t_rows[bot(i) * na + a] = env.initial_belief.iter().map(|(s, p)| (copy(i, 1, s), p)).collect();
        }
        available[bot(i)] = vec![DIAMOND];
    }
    let env = Environment {
        transition: SparseRows::from_rows(t_rows),
        observation: SparseRows::from_rows(o_rows),
        reward,
        initial_belief: Belief::uniform(nhat),
    };
    let mut base = Pomdp::new(spaces, env, m.discount, m.horizon.shifted(1));
    base.available_actions = Some(available);
    let bottoms: Vec<usize> = (0..n).map(bot).collect();
    let ab = AbPomdp::new(base, bottoms.clone())?;
    let record = TransformRecord {
        kind: TransformKind::MeToAb,
        state_map,
        sentinel: Some(sentinel(bottoms, nz, m.discount)),
    };
    Ok((ab, record))
}

/// PO-MEMDP with one environment per state of `Q`.
pub fn ab_to_pomemdp(m: &AbPomdp) -> Result<(MePomdp, TransformRecord), TransformError> {
    let base = &m.base;
    check_discount(base.discount)?;
    let (ns, na, nz) = (base.num_states(), base.num_actions(), base.num_observations());
    let tc = two_copy(base);
    let nhat = 2 * ns + 1;
    let bot = 2 * ns;
    let envs = m
        .belief_support
        .iter()
        .map(|&q| {
            let rows = (0..nhat).flat_map(|hat| {
                let tc = &tc;
                (0..na).map(move |a| if hat == bot { vec![(q, 1.0)] } else { tc.transition_tail[hat * na + a].clone() })
            });
            Environment {
                transition: SparseRows::from_rows(rows.collect::<Vec<_>>()),
                observation: tc.observation.clone(),
                reward: tc.reward.clone(),
                initial_belief: Belief::point(nhat, bot),
            }
        })
        .collect();
    let mut me = MePomdp::new(tc.spaces, envs, base.discount, base.horizon.shifted(1));
    me.available_actions = Some(tc.available);
    let record = TransformRecord {
        kind: TransformKind::AbToPomemdp,
        state_map: tc.state_map,
        sentinel: Some(sentinel(vec![bot], nz, base.discount)),
    };
    Ok((me, record))
}

/// MO-POMDP over tuples of per-environment states, with the default cap.
pub fn pomemdp_to_mo(m: &MePomdp) -> Result<(MePomdp, TransformRecord), TransformError> {
    pomemdp_to_mo_with_cap(m, DEFAULT_PRODUCT_CAP)
}

/// Cartesian product of sparse rows, entries in lexicographic order.
fn product_row(rows: &[&[(usize, f64)]]) -> Vec<(Vec<usize>, f64)> {
    let mut out: Vec<(Vec<usize>, f64)> = vec![(Vec::new(), 1.0)];
    for row in rows {
        let mut next = Vec::with_capacity(out.len() * row.len());
        for (tuple, p) in &out {
            for &(s, q) in row.iter() {
                let mut t = tuple.clone();
                t.push(s);
                next.push((t, p * q));
            }
        }
        out = next;
    }
    out
}

pub fn pomemdp_to_mo_with_cap(m: &MePomdp, cap: usize) -> Result<(MePomdp, TransformRecord), TransformError> {
    if !m.is_po_memdp() {
        return Err(TransformError::NotPoMemdp);
    }
    let n = m.num_envs();
    let (na, _nz) = (m.spaces.num_actions(), m.spaces.num_observations());
    let supports: Vec<Vec<(usize, f64)>> = m.envs.iter().map(|e| e.initial_belief.iter().collect()).collect();
    let support_refs: Vec<&[(usize, f64)]> = supports.iter().map(|v| v.as_slice()).collect();
    let init = product_row(&support_refs);

    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut tuples: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut visit = |t: Vec<usize>, tuples: &mut Vec<Vec<usize>>, queue: &mut VecDeque<usize>| -> Result<usize, TransformError> {
        if let Some(&i) = index.get(&t) {
            return Ok(i);
        }
        if tuples.len() >= cap {
            return Err(TransformError::StateSpaceOverflow { cap });
        }
        let i = tuples.len();
        index.insert(t.clone(), i);
        tuples.push(t);
        queue.push_back(i);
        Ok(i)
    };
    let mut init_probs = Vec::new();
    for (t, p) in init {
        let i = visit(t, &mut tuples, &mut queue)?;
        init_probs.push((i, p));
    }
    let mut t_rows: Vec<Vec<Vec<(usize, f64)>>> = Vec::new();
    while let Some(i) = queue.pop_front() {
        let tuple = tuples[i].clone();
        let mut per_action = Vec::with_capacity(na);
        for a in 0..na {
            let rows: Vec<&[(usize, f64)]> =
                tuple.iter().enumerate().map(|(k, &s)| m.envs[k].transition.row(s * na + a)).collect();
            let mut row = Vec::new();
            for (t2, p) in product_row(&rows) {
                row.push((visit(t2, &mut tuples, &mut queue)?, p));
            }
            per_action.push(row);
        }
        if t_rows.len() <= i {
            t_rows.resize(i + 1, Vec::new());
        }
        t_rows[i] = per_action;
    }
    let nhat = tuples.len();
    let transition = SparseRows::from_rows(t_rows.into_iter().flatten());
    let init_belief = Belief::from_sparse(nhat, &init_probs)?;
    let envs = (0..n)
        .map(|k| {
            let env = &m.envs[k];
            Environment {
                transition: transition.clone(),
                observation: SparseRows::from_rows(
                    tuples.iter().flat_map(|t| (0..na).map(move |a| env.observation.row(t[k] * na + a).to_vec())),
                ),
                reward: tuples.iter().flat_map(|t| (0..na).map(move |a| env.reward[t[k] * na + a])).collect(),
                initial_belief: init_belief.clone(),
            }
        })
        .collect();
    let states: Vec<String> = tuples
        .iter()
        .map(|t| format!("({})", t.iter().map(|&s| m.spaces.states[s].as_str()).collect::<Vec<_>>().join(",")))
        .collect();
    let spaces = Spaces::new(states, m.spaces.actions.clone(), m.spaces.observations.clone());
    let mut out = MePomdp::new(spaces, envs, m.discount, m.horizon);
    if let Some(av) = &m.available_actions {
        out.available_actions = Some(
            tuples
                .iter()
                .map(|t| {
                    let acts: Vec<usize> = (0..na).filter(|a| t.iter().all(|&s| av[s].contains(a))).collect();
                    if acts.is_empty() {
                        (0..na).collect()
                    } else {
                        acts
                    }
                })
                .collect(),
        );
    }
    let record = TransformRecord {
        kind: TransformKind::PomemdpToMo,
        state_map: tuples.into_iter().map(StateOrigin::Product).collect(),
        sentinel: None,
    };
    Ok((out, record))
}

/// Policy for the original model: what `g` does after the sentinel step.
/// Product records transfer policies unchanged.
pub fn lift_policy(record: &TransformRecord, g: &PolicyGraph) -> Result<PolicyGraph, TransformError> {
    let Some(sent) = &record.sentinel else {
        return Ok(g.clone());
    };
    let top = sent.top_observation;
    if g.root >= g.nodes.len() || g.nodes.iter().any(|n| n.next.len() != top + 1) {
        return Err(TransformError::BadPolicy("observation count does not include the sentinel".into()));
    }
    let start = g.nodes[g.root].next[top];
    let mut stripped = g.clone();
    for n in &mut stripped.nodes {
        n.next.remove(top);
    }
    Ok(stripped.rerooted(start))
}

pub fn lift_mixed(record: &TransformRecord, mp: &MixedPolicy) -> Result<MixedPolicy, TransformError> {
    let components = mp
        .components
        .iter()
        .map(|(g, p)| Ok((lift_policy(record, g)?, *p)))
        .collect::<Result<Vec<_>, TransformError>>()?;
    Ok(MixedPolicy { components })
}

/// Horizon of the transformed model for an original horizon.
pub fn shifted_horizon(h: Horizon) -> Horizon {
    h.shifted(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Validate;
    use crate::policy::PolicyNode;

    fn small_me(n: usize) -> MePomdp {
        let spaces = Spaces::indexed(3, 2, 2);
        let envs = (0..n)
            .map(|i| {
                Environment::tabulate(
                    &spaces,
                    move |s, a| if a == 0 { vec![(s, 0.5), ((s + 1 + i) % 3, 0.5)] } else { vec![(0, 1.0)] },
                    move |s2, _| if s2 == i % 3 { vec![(0, 0.9), (1, 0.1)] } else { vec![(0, 0.3), (1, 0.7)] },
                    move |s, a| (s as f64) - (a as f64) + i as f64,
                    Belief::uniform(3),
                )
            })
            .collect();
        MePomdp::new(spaces, envs, 0.9, Horizon::Finite(2))
    }

    #[test]
    fn me_to_ab_shape() {
        let (ab, rec) = me_to_ab(&small_me(2)).unwrap();
        assert_eq!(ab.base.num_states(), 14);
        assert_eq!(ab.belief_support, vec![12, 13]);
        assert_eq!(ab.base.num_observations(), 3);
        assert_eq!(ab.base.horizon, Horizon::Finite(3));
        assert!(ab.validate().is_empty(), "{:?}", ab.validate());
        assert_eq!(rec.state_map[13], StateOrigin::Bottom { env: Some(1) });
        // reward correction
        assert!((ab.base.reward(0, 0) - 0.0 / 0.9).abs() < 1e-15);
        assert!((ab.base.reward(2, 0) - 2.0 / 0.9).abs() < 1e-15);
        assert_eq!(ab.base.reward(12, 1), 0.0);
    }

    #[test]
    fn ab_to_posg_shape() {
        let base3 = Pomdp::tabulate(
            Spaces::indexed(3, 2, 2),
            |s, _| vec![(s, 1.0)],
            |_, _| vec![(0, 1.0)],
            |s, a| (s * 2 + a) as f64,
            Belief::uniform(3),
            0.5,
            Horizon::Finite(2),
        );
        let ab3 = AbPomdp::new(base3, vec![0, 2]).unwrap();
        let (g, rec) = ab_to_posg(&ab3).unwrap();
        assert_eq!(g.states.len(), 7);
        assert_eq!(g.nature_actions.len(), 2);
        assert_eq!(g.observations.len(), 3);
        assert!(g.validate().is_empty(), "{:?}", g.validate());
        let bot = 6;
        for a in 0..2 {
            for q in 0..2 {
                assert_eq!(g.reward(bot, a, q), 0.0);
            }
        }
        // state 4 is the second-stage copy of state 1
        assert_eq!(g.reward(4, 1, 0), 3.0 / 0.5);
        assert_eq!(g.transition(bot, 0, 1), &[(2, 1.0)]);
        assert_eq!(rec.sentinel.unwrap().bottom_states, vec![6]);
    }

    #[test]
    fn ab_to_pomemdp_shape() {
        let base = Pomdp::tabulate(
            Spaces::indexed(3, 2, 2),
            |s, a| vec![((s + a) % 3, 1.0)],
            |s2, _| vec![(s2 % 2, 1.0)],
            |s, _| s as f64,
            Belief::uniform(3),
            0.9,
            Horizon::Finite(2),
        );
        let ab = AbPomdp::new(base, vec![0, 1, 2]).unwrap();
        let (me, _) = ab_to_pomemdp(&ab).unwrap();
        assert_eq!(me.num_envs(), 3);
        assert!(me.is_po_memdp());
        assert!(me.validate().is_empty());
        for q in 0..3 {
            for a in 0..2 {
                assert_eq!(me.envs[q].transition.row(6 * 2 + a), &[(q, 1.0)]);
            }
        }
    }

    #[test]
    fn product_counts() {
        let spaces = Spaces::indexed(3, 1, 1);
        let sp = spaces.clone();
        let env = |k: usize| {
            Environment::tabulate(&sp, move |s, _| vec![((s + k) % 3, 1.0)], |_, _| vec![(0, 1.0)], |_, _| 0.0, Belief::uniform(3))
        };
        let me = MePomdp::new(spaces.clone(), vec![env(1), env(2)], 0.9, Horizon::Finite(2));
        let (mo, rec) = pomemdp_to_mo(&me).unwrap();
        assert!(mo.num_envs() == 2 && mo.spaces.num_states() <= 9);
        assert!(mo.is_mo_pomdp());
        assert!(mo.validate().is_empty());
        assert_eq!(rec.state_map.len(), mo.spaces.num_states());
        let single = MePomdp::new(spaces, vec![env(1)], 0.9, Horizon::Finite(2));
        let (mo1, _) = pomemdp_to_mo(&single).unwrap();
        assert_eq!(mo1.spaces.num_states(), 3);
        assert!(matches!(pomemdp_to_mo_with_cap(&me, 4), Err(TransformError::StateSpaceOverflow { .. })));
    }

    #[test]
    fn differing_observations_rejected() {
        assert_eq!(pomemdp_to_mo(&small_me(2)).unwrap_err(), TransformError::NotPoMemdp);
    }

    #[test]
    fn zero_discount_rejected() {
        let mut me = small_me(1);
        me.discount = 0.0;
        assert_eq!(me_to_ab(&me).unwrap_err(), TransformError::InvalidDiscount);
    }

    #[test]
    fn lift_strips_prefix() {
        let (_, rec) = me_to_ab(&small_me(1)).unwrap();
        // root plays ◊ and moves to node 2 on ⊤
        let g = PolicyGraph {
            nodes: vec![
                PolicyNode { action: 0, next: vec![0, 0, 2] },
                PolicyNode { action: 1, next: vec![1, 1, 1] },
                PolicyNode { action: 1, next: vec![1, 2, 2] },
            ],
            root: 0,
        };
        let lifted = lift_policy(&rec, &g).unwrap();
        assert_eq!(lifted.nodes[lifted.root].action, 1);
        assert_eq!(lifted.nodes.len(), 2);
        assert!(lifted.nodes.iter().all(|n| n.next.len() == 2));
    }
}
