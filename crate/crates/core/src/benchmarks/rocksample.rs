//! RockSample with a known number of good rocks whose identity is uncertain.
//!
//! Grid cells are `(x, y)` with the agent starting at `(0, 0)`, the bottom
//! left corner. Moving east from the last column exits to an absorbing
//! terminal state.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::GenError;
use crate::model::{AbPomdp, Belief, Environment, Horizon, MePomdp, Pomdp, Spaces};

pub const ROCK_DISCOUNT: f64 = 0.95;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Placement {
    Random(u64),
    Nearby,
    FarAway,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formulation {
    Ab,
    Me,
}

/// Sensor and reward constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RockConstants {
    /// Half-efficiency distance; `None` means `m / 2`.
    pub half_distance: Option<f64>,
    pub exit_reward: f64,
    pub good_reward: f64,
    pub bad_reward: f64,
    pub discount: f64,
}

impl Default for RockConstants {
    fn default() -> Self {
        RockConstants { half_distance: None, exit_reward: 10.0, good_reward: 10.0, bad_reward: -10.0, discount: ROCK_DISCOUNT }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RockSampleParams {
    pub grid: usize,
    pub good: usize,
    pub rocks: usize,
    pub placement: Placement,
    pub formulation: Formulation,
    #[serde(default)]
    pub constants: RockConstants,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RockSampleModel {
    Ab(AbPomdp),
    Me(MePomdp),
}

const ACTIONS: [&str; 5] = ["north", "south", "east", "west", "sample"];
const GOOD: usize = 0;
const BAD: usize = 1;
const NONE: usize = 2;

fn check(p: &RockSampleParams) -> Result<(), GenError> {
    let bad = |name, reason: &str| Err(GenError::Param { name, reason: reason.into() });
    if p.grid < 1 {
        return bad("grid", "must be at least 1");
    }
    if p.good < 1 || p.good > p.rocks {
        return bad("good", "need 1 <= good <= rocks");
    }
    if p.rocks > p.grid * p.grid {
        return bad("rocks", "more rocks than cells");
    }
    if matches!(p.placement, Placement::Nearby | Placement::FarAway) {
        if !(2..=3).contains(&p.rocks) {
            return bad("rocks", "fixed placements need 2 or 3 rocks");
        }
        if p.grid < 2 {
            return bad("grid", "fixed placements need a grid of at least 2");
        }
    }
    if !(p.constants.discount > 0.0 && p.constants.discount < 1.0) {
        return bad("discount", "must lie in (0,1)");
    }
    Ok(())
}

/// Rock cells for the given placement.
pub fn rock_positions(p: &RockSampleParams) -> Result<Vec<(usize, usize)>, GenError> {
    check(p)?;
    let m = p.grid;
    let mut cells = match p.placement {
        Placement::Nearby => vec![(1, 0), (0, 1), (1, 1)],
        Placement::FarAway => vec![(m - 1, 0), (0, m - 1), (m - 1, m - 1)],
        Placement::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            return Ok(sample(&mut rng, m * m, p.rocks).into_iter().map(|c| (c % m, c / m)).collect());
        }
    };
    cells.truncate(p.rocks);
    Ok(cells)
}

/// Lexicographic `k`-subsets of `0..n`.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Probability that checking reads the true state at distance `d`.
pub fn sensor_accuracy(d: f64, half_distance: f64) -> f64 {
    0.5 * (1.0 + 2f64.powf(-d / half_distance))
}

/// Grid mechanics shared by both formulations. A "status" is a bitmask of
/// tracked slots that are still good; `rock_slot[r]` maps rock `r` to its
/// slot, if tracked.
struct Grid {
    m: usize,
    rocks: Vec<(usize, usize)>,
    k: RockConstants,
}

impl Grid {
    fn half(&self) -> f64 {
        self.k.half_distance.unwrap_or(self.m as f64 / 2.0)
    }

    fn actions(&self) -> Vec<String> {
        let mut a: Vec<String> = ACTIONS.iter().map(|s| s.to_string()).collect();
        a.extend((0..self.rocks.len()).map(|r| format!("check{}", r + 1)));
        a
    }

    fn rock_at(&self, x: usize, y: usize) -> Option<usize> {
        self.rocks.iter().position(|&c| c == (x, y))
    }

    /// Next `(position, status)` or `None` for the terminal, plus reward.
    fn step(&self, x: usize, y: usize, status: usize, a: usize, slot: &dyn Fn(usize) -> Option<usize>) -> (Option<(usize, usize, usize)>, f64) {
        let m = self.m;
        match a {
            0 => (Some((x, (y + 1).min(m - 1), status)), 0.0),
            1 => (Some((x, y.saturating_sub(1), status)), 0.0),
            2 if x + 1 == m => (None, self.k.exit_reward),
            2 => (Some((x + 1, y, status)), 0.0),
            3 => (Some((x.saturating_sub(1), y, status)), 0.0),
            4 => match self.rock_at(x, y).and_then(slot) {
                Some(k) if status & (1 << k) != 0 => (Some((x, y, status & !(1 << k))), self.k.good_reward),
                _ => (Some((x, y, status)), self.k.bad_reward),
            },
            _ => (Some((x, y, status)), 0.0),
        }
    }

    fn check_obs(&self, x: usize, y: usize, status: usize, a: usize, slot: &dyn Fn(usize) -> Option<usize>) -> Vec<(usize, f64)> {
        if a < ACTIONS.len() {
            return vec![(NONE, 1.0)];
        }
        let r = a - ACTIONS.len();
        let (rx, ry) = self.rocks[r];
        let d = ((x as f64 - rx as f64).powi(2) + (y as f64 - ry as f64).powi(2)).sqrt();
        let acc = sensor_accuracy(d, self.half());
        let good = slot(r).is_some_and(|k| status & (1 << k) != 0);
        let (right, wrong) = if good { (GOOD, BAD) } else { (BAD, GOOD) };
        vec![(right, acc), (wrong, 1.0 - acc)]
    }
}

fn observations() -> Vec<String> {
    vec!["good".into(), "bad".into(), "none".into()]
}

/// Builds one environment over states `pos * 2^bits + status`, terminal last.
fn build_env(g: &Grid, bits: usize, slot: &dyn Fn(usize) -> Option<usize>, spaces: &Spaces, init: Belief) -> Environment {
    let m = g.m;
    let nstat = 1usize << bits;
    let term = m * m * nstat;
    let idx = |x: usize, y: usize, st: usize| (y * m + x) * nstat + st;
    let decode = |s: usize| {
        let pos = s / nstat;
        (pos % m, pos / m, s % nstat)
    };
    Environment::tabulate(
        spaces,
        |s, a| {
            if s == term {
                return vec![(term, 1.0)];
            }
            let (x, y, st) = decode(s);
            match g.step(x, y, st, a, slot).0 {
                Some((x2, y2, st2)) => vec![(idx(x2, y2, st2), 1.0)],
                None => vec![(term, 1.0)],
            }
        },
        |s2, a| {
            if s2 == term {
                return vec![(NONE, 1.0)];
            }
            let (x, y, st) = decode(s2);
            g.check_obs(x, y, st, a, slot)
        },
        |s, a| {
            if s == term {
                return 0.0;
            }
            let (x, y, st) = decode(s);
            g.step(x, y, st, a, slot).1
        },
        init,
    )
}

fn state_names(m: usize, bits: usize) -> Vec<String> {
    let nstat = 1usize << bits;
    let mut names = Vec::with_capacity(m * m * nstat + 1);
    for pos in 0..m * m {
        for st in 0..nstat {
            let flags: String = (0..bits).map(|k| if st & (1 << k) != 0 { 'G' } else { 'B' }).collect();
            names.push(format!("x{}y{}{}{flags}", pos % m, pos / m, if bits > 0 { "-" } else { "" }));
        }
    }
    names.push("exit".into());
    names
}

/// Instance in the requested formulation. The AB form tracks every rock
/// and keeps all statuses reachable from the `g`-good starts; the ME form
/// tracks only the good slots, one environment per choice of good rocks.
pub fn gen_rocksample(p: &RockSampleParams) -> Result<RockSampleModel, GenError> {
    let rocks = rock_positions(p)?;
    let grid = Grid { m: p.grid, rocks, k: p.constants };
    let combos = combinations(p.rocks, p.good);
    let m = p.grid;
    match p.formulation {
        Formulation::Me => {
            let bits = p.good;
            let spaces = Spaces::new(state_names(m, bits), grid.actions(), observations());
            let start = (1usize << bits) - 1;
            let ns = spaces.num_states();
            let envs = combos
                .iter()
                .map(|combo| {
                    let slot = |r: usize| combo.iter().position(|&c| c == r);
                    build_env(&grid, bits, &slot, &spaces, Belief::point(ns, start))
                })
                .collect();
            Ok(RockSampleModel::Me(MePomdp::new(spaces, envs, p.constants.discount, Horizon::Infinite)))
        }
        Formulation::Ab => {
            let bits = p.rocks;
            let nstat = 1usize << bits;
            // statuses with at most g good rocks
            let keep: Vec<usize> = (0..nstat).filter(|st| st.count_ones() as usize <= p.good).collect();
            let full_names = state_names(m, bits);
            let full_spaces = Spaces::new(full_names.clone(), grid.actions(), observations());
            let slot = |r: usize| Some(r);
            let full = build_env(&grid, bits, &slot, &full_spaces, Belief::point(full_names.len(), 0));
            // restrict to kept statuses
            let term_full = m * m * nstat;
            let mut map = vec![usize::MAX; term_full + 1];
            let mut names = Vec::new();
            for pos in 0..m * m {
                for &st in &keep {
                    map[pos * nstat + st] = names.len();
                    names.push(full_names[pos * nstat + st].clone());
                }
            }
            map[term_full] = names.len();
            names.push("exit".into());
            let na = full_spaces.num_actions();
            let spaces = Spaces::new(names, grid.actions(), observations());
            let ns = spaces.num_states();
            let old: Vec<usize> = (0..=term_full).filter(|&s| map[s] != usize::MAX).collect();
            let q: Vec<usize> = combos.iter().map(|c| map[c.iter().map(|&r| 1usize << r).sum::<usize>()]).collect();
            let env = Environment::tabulate(
                &spaces,
                |s, a| full.transition.row(old[s] * na + a).iter().map(|&(s2, pr)| (map[s2], pr)).collect(),
                |s2, a| full.observation.row(old[s2] * na + a).to_vec(),
                |s, a| full.reward[old[s] * na + a],
                Belief::uniform_over(ns, &q),
            );
            let base = Pomdp::new(spaces, env, p.constants.discount, Horizon::Infinite);
            Ok(RockSampleModel::Ab(AbPomdp::new(base, q).map_err(|e| GenError::Param {
                name: "rocks",
                reason: e.to_string(),
            })?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Validate;

    fn params(formulation: Formulation) -> RockSampleParams {
        RockSampleParams {
            grid: 2,
            good: 1,
            rocks: 2,
            placement: Placement::Nearby,
            formulation,
            constants: RockConstants::default(),
        }
    }

    #[test]
    fn small_me_sizes() {
        let RockSampleModel::Me(me) = gen_rocksample(&params(Formulation::Me)).unwrap() else { panic!() };
        assert_eq!(me.spaces.num_states(), 9);
        assert_eq!(me.num_envs(), 2);
        assert_eq!(me.spaces.num_actions(), 7);
        assert_eq!(me.spaces.num_observations(), 3);
        assert!(me.validate().is_empty(), "{:?}", me.validate());
    }

    #[test]
    fn small_ab_support() {
        let RockSampleModel::Ab(ab) = gen_rocksample(&params(Formulation::Ab)).unwrap() else { panic!() };
        assert_eq!(ab.belief_support.len(), 2);
        assert_eq!(ab.base.num_states(), 13);
        assert!(ab.validate().is_empty(), "{:?}", ab.validate());
    }

    #[test]
    fn sampling_a_good_rock() {
        let RockSampleModel::Me(me) = gen_rocksample(&params(Formulation::Me)).unwrap() else { panic!() };
        // env 0: rock 1 at (1,0) is good; state x1y0-G is index (0*2+1)*2+1 = 3
        let na = 7;
        let s = 3;
        assert_eq!(me.spaces.states[s], "x1y0-G");
        assert_eq!(me.envs[0].reward[s * na + 4], 10.0);
        assert_eq!(me.envs[0].transition.row(s * na + 4), &[(2, 1.0)]);
        assert_eq!(me.envs[1].reward[s * na + 4], -10.0);
    }

    #[test]
    fn placements() {
        let mut p = params(Formulation::Me);
        p.grid = 4;
        assert_eq!(rock_positions(&p).unwrap(), vec![(1, 0), (0, 1)]);
        p.placement = Placement::FarAway;
        p.rocks = 3;
        assert_eq!(rock_positions(&p).unwrap(), vec![(3, 0), (0, 3), (3, 3)]);
        p.rocks = 4;
        assert!(rock_positions(&p).is_err());
        p.placement = Placement::Random(3);
        let a = rock_positions(&p).unwrap();
        assert_eq!(a, rock_positions(&p).unwrap());
        assert_eq!(a.len(), 4);
    }

    #[test]
    fn sensor_is_perfect_on_top_of_rock() {
        assert_eq!(sensor_accuracy(0.0, 1.0), 1.0);
        assert!((sensor_accuracy(1.0, 1.0) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn combination_counts() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 1), vec![vec![0], vec![1], vec![2]]);
    }
}
