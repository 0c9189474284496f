use rand::Rng;

use super::graph::MixedPolicy;

/// Fallback action once no component is consistent with the history.
pub const FALLBACK_ACTION: usize = 0;

/// Behavioral form of a mixed policy: tracks which components could have
/// produced the history so far and randomizes over their next actions.
#[derive(Clone, Debug)]
pub struct BehavioralRunner {
    policy: MixedPolicy,
    node: Vec<usize>,
    alive: Vec<bool>,
}

pub fn mixed_to_behavioral(mp: &MixedPolicy) -> BehavioralRunner {
    BehavioralRunner::new(mp.clone())
}

impl BehavioralRunner {
    pub fn new(policy: MixedPolicy) -> Self {
        let node = policy.components.iter().map(|(g, _)| g.root).collect();
        let alive = policy.components.iter().map(|(_, p)| *p > 0.0).collect();
        BehavioralRunner { policy, node, alive }
    }

    pub fn reset(&mut self) {
        *self = BehavioralRunner::new(std::mem::take(&mut self.policy.components).into());
    }

    /// `(action, probability)` pairs sorted by action.
    pub fn action_probs(&self) -> Vec<(usize, f64)> {
        let mut mass: Vec<(usize, f64)> = Vec::new();
        let mut total = 0.0;
        for (i, (g, p)) in self.policy.components.iter().enumerate() {
            if !self.alive[i] {
                continue;
            }
            let a = g.nodes[self.node[i]].action;
            total += p;
            match mass.iter_mut().find(|(b, _)| *b == a) {
                Some(e) => e.1 += p,
                None => mass.push((a, *p)),
            }
        }
        if total <= 0.0 {
            return vec![(FALLBACK_ACTION, 1.0)];
        }
        mass.sort_by_key(|e| e.0);
        for e in &mut mass {
            e.1 /= total;
        }
        mass
    }

    pub fn sample_action<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let probs = self.action_probs();
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for &(a, p) in &probs {
            acc += p;
            if u < acc {
                return a;
            }
        }
        probs.last().unwrap().0
    }

    /// Records that `a` was played and `z` observed.
    pub fn step(&mut self, a: usize, z: usize) {
        for (i, (g, _)) in self.policy.components.iter().enumerate() {
            if !self.alive[i] {
                continue;
            }
            let n = &g.nodes[self.node[i]];
            if n.action == a {
                self.node[i] = n.next[z];
            } else {
                self.alive[i] = false;
            }
        }
    }

    pub fn num_alive(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }
}

impl From<Vec<(super::PolicyGraph, f64)>> for MixedPolicy {
    fn from(components: Vec<(super::PolicyGraph, f64)>) -> Self {
        MixedPolicy { components }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::{PolicyGraph, PolicyNode};

    #[test]
    fn root_split_is_uniform() {
        let mp = MixedPolicy { components: vec![(PolicyGraph::constant(0, 2), 0.5), (PolicyGraph::constant(1, 2), 0.5)] };
        let r = mixed_to_behavioral(&mp);
        assert_eq!(r.action_probs(), vec![(0, 0.5), (1, 0.5)]);
    }

    #[test]
    fn history_filters_components() {
        let a = PolicyGraph {
            nodes: vec![PolicyNode { action: 0, next: vec![1, 1] }, PolicyNode { action: 1, next: vec![1, 1] }],
            root: 0,
        };
        let b = PolicyGraph::constant(0, 2);
        let c = PolicyGraph::constant(1, 2);
        let mut r = mixed_to_behavioral(&MixedPolicy { components: vec![(a, 0.2), (b, 0.3), (c, 0.5)] });
        assert_eq!(r.action_probs(), vec![(0, 0.5), (1, 0.5)]);
        r.step(0, 1);
        assert_eq!(r.num_alive(), 2);
        let p = r.action_probs();
        assert!((p[0].1 - 0.6).abs() < 1e-12 && (p[1].1 - 0.4).abs() < 1e-12);
        // an action no surviving component plays leads to the fallback
        r.step(2, 0);
        assert_eq!(r.action_probs(), vec![(FALLBACK_ACTION, 1.0)]);
        r.reset();
        assert_eq!(r.num_alive(), 3);
    }
}
