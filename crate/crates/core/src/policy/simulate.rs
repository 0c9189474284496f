use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::graph::{MixedPolicy, PolicyGraph};
use super::mixed::BehavioralRunner;
use crate::error::PolicyError;
use crate::model::{Horizon, Pomdp};

/// A policy that can be executed step by step.
pub trait Agent {
    fn act(&mut self, rng: &mut ChaCha8Rng) -> usize;
    fn observe(&mut self, action: usize, observation: usize);
}

/// Something that produces a fresh [`Agent`] per episode.
pub trait PolicySource {
    fn start<'a>(&'a self, rng: &mut ChaCha8Rng) -> Box<dyn Agent + 'a>;
}

struct GraphAgent<'a> {
    g: &'a PolicyGraph,
    node: usize,
}

impl Agent for GraphAgent<'_> {
    fn act(&mut self, _rng: &mut ChaCha8Rng) -> usize {
        self.g.nodes[self.node].action
    }

    fn observe(&mut self, _action: usize, observation: usize) {
        self.node = self.g.nodes[self.node].next[observation];
    }
}

impl PolicySource for PolicyGraph {
    fn start<'a>(&'a self, _rng: &mut ChaCha8Rng) -> Box<dyn Agent + 'a> {
        Box::new(GraphAgent { g: self, node: self.root })
    }
}

/// Samples one component up front and follows it.
impl PolicySource for MixedPolicy {
    fn start<'a>(&'a self, rng: &mut ChaCha8Rng) -> Box<dyn Agent + 'a> {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut pick = self.components.len() - 1;
        for (i, (_, p)) in self.components.iter().enumerate() {
            acc += p;
            if u < acc {
                pick = i;
                break;
            }
        }
        let g = &self.components[pick].0;
        Box::new(GraphAgent { g, node: g.root })
    }
}

impl Agent for BehavioralRunner {
    fn act(&mut self, rng: &mut ChaCha8Rng) -> usize {
        self.sample_action(rng)
    }

    fn observe(&mut self, action: usize, observation: usize) {
        self.step(action, observation);
    }
}

impl PolicySource for BehavioralRunner {
    fn start<'a>(&'a self, _rng: &mut ChaCha8Rng) -> Box<dyn Agent + 'a> {
        let mut r = self.clone();
        r.reset();
        Box::new(r)
    }
}

/// Mean discounted return and its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimStats {
    pub mean: f64,
    pub std_err: f64,
    pub episodes: usize,
}

fn sample_row(row: &[(usize, f64)], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for &(i, p) in row {
        acc += p;
        if u < acc {
            return i;
        }
    }
    row.last().map_or(0, |e| e.0)
}

/// Generator for episode `episode`: independent of how episodes are scheduled.
pub fn episode_rng(seed: u64, episode: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(episode);
    rng
}

/// Monte-Carlo estimate of the policy's discounted return from the model's
/// initial belief, truncated after `horizon_cap` steps.
pub fn simulate<P: PolicySource + ?Sized>(
    m: &Pomdp,
    policy: &P,
    episodes: usize,
    horizon_cap: usize,
    seed: u64,
) -> Result<SimStats, PolicyError> {
    if episodes == 0 {
        return Err(PolicyError::InvalidArgument("episodes must be positive".into()));
    }
    let steps = match m.horizon {
        Horizon::Finite(h) => horizon_cap.min(h as usize),
        Horizon::Infinite => horizon_cap,
    };
    let init: Vec<(usize, f64)> = m.env.initial_belief.iter().collect();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for ep in 0..episodes {
        let mut rng = episode_rng(seed, ep as u64);
        let mut agent = policy.start(&mut rng);
        let mut s = sample_row(&init, &mut rng);
        let mut ret = 0.0;
        let mut disc = 1.0;
        for _ in 0..steps {
            let a = agent.act(&mut rng);
            if a >= m.num_actions() {
                return Err(PolicyError::Mismatch(format!("policy played action {a}")));
            }
            ret += disc * m.reward(s, a);
            disc *= m.discount;
            let s2 = sample_row(m.transition(s, a), &mut rng);
            let z = sample_row(m.observation(s2, a), &mut rng);
            agent.observe(a, z);
            s = s2;
        }
        sum += ret;
        sum_sq += ret * ret;
    }
    let n = episodes as f64;
    let mean = sum / n;
    let var = if episodes > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    Ok(SimStats { mean, std_err: (var / n).sqrt(), episodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Belief, Spaces};

    #[test]
    fn deterministic_has_zero_error() {
        let m = Pomdp::tabulate(
            Spaces::indexed(2, 1, 1),
            |s, _| vec![(1 - s, 1.0)],
            |_, _| vec![(0, 1.0)],
            |s, _| s as f64,
            Belief::point(2, 0),
            0.9,
            Horizon::Infinite,
        );
        let st = simulate(&m, &PolicyGraph::constant(0, 1), 10, 5, 3).unwrap();
        assert_eq!(st.std_err, 0.0);
        assert!((st.mean - (0.9 + 0.9f64.powi(3))).abs() < 1e-12);
    }

    #[test]
    fn zero_episodes_rejected() {
        let m = Pomdp::tabulate(
            Spaces::indexed(1, 1, 1),
            |_, _| vec![(0, 1.0)],
            |_, _| vec![(0, 1.0)],
            |_, _| 1.0,
            Belief::point(1, 0),
            0.9,
            Horizon::Infinite,
        );
        assert!(simulate(&m, &PolicyGraph::constant(0, 1), 0, 5, 3).is_err());
    }

    #[test]
    fn seeds_are_reproducible() {
        let m = Pomdp::tabulate(
            Spaces::indexed(2, 1, 2),
            |_, _| vec![(0, 0.5), (1, 0.5)],
            |s2, _| vec![(s2, 1.0)],
            |s, _| s as f64,
            Belief::uniform(2),
            0.9,
            Horizon::Infinite,
        );
        let a = simulate(&m, &PolicyGraph::constant(0, 2), 200, 10, 42).unwrap();
        let b = simulate(&m, &PolicyGraph::constant(0, 2), 200, 10, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.std_err > 0.0);
    }
}
