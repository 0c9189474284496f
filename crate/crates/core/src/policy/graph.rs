use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::bounds::{LowerBound, Successors};
use crate::error::PolicyError;
use crate::lp::AgentSolution;

/// One controller state: the action it plays and where each observation
/// leads.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyNode {
    pub action: usize,
    pub next: Vec<usize>,
}

/// A deterministic finite-state controller.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyGraph {
    pub nodes: Vec<PolicyNode>,
    pub root: usize,
}

impl PolicyGraph {
    /// Single node repeating `action`.
    pub fn constant(action: usize, num_observations: usize) -> Self {
        PolicyGraph { nodes: vec![PolicyNode { action, next: vec![0; num_observations] }], root: 0 }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Checks node references and the action/observation ranges.
    pub fn check(&self, num_actions: usize, num_observations: usize) -> Result<(), PolicyError> {
        if self.root >= self.nodes.len() {
            return Err(PolicyError::Mismatch(format!("root {} out of range", self.root)));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if n.action >= num_actions {
                return Err(PolicyError::Mismatch(format!("node {i} plays action {}", n.action)));
            }
            if n.next.len() != num_observations {
                return Err(PolicyError::Mismatch(format!(
                    "node {i} has {} successors, expected {num_observations}",
                    n.next.len()
                )));
            }
            if let Some(&k) = n.next.iter().find(|&&k| k >= self.nodes.len()) {
                return Err(PolicyError::Mismatch(format!("node {i} points to missing node {k}")));
            }
        }
        Ok(())
    }

    /// Copy rooted at `root` keeping only reachable nodes, numbered in
    /// breadth-first order.
    pub fn rerooted(&self, root: usize) -> PolicyGraph {
        let mut map: HashMap<usize, usize> = HashMap::new();
        let mut order = vec![root];
        map.insert(root, 0);
        let mut queue = VecDeque::from([root]);
        while let Some(n) = queue.pop_front() {
            for &k in &self.nodes[n].next {
                if let std::collections::hash_map::Entry::Vacant(e) = map.entry(k) {
                    e.insert(order.len());
                    order.push(k);
                    queue.push_back(k);
                }
            }
        }
        let nodes = order
            .iter()
            .map(|&n| PolicyNode { action: self.nodes[n].action, next: self.nodes[n].next.iter().map(|k| map[k]).collect() })
            .collect();
        PolicyGraph { nodes, root: 0 }
    }

    /// Action after following `observations` from the root.
    pub fn node_after(&self, observations: &[usize]) -> usize {
        observations.iter().fold(self.root, |n, &z| self.nodes[n].next[z])
    }
}

/// Controller for vector `alpha` of `lb`, one node per reachable vector.
/// Successors that were pruned are replaced by their recorded dominator.
pub fn extract_policy(lb: &LowerBound, alpha: usize, num_observations: usize) -> Result<PolicyGraph, PolicyError> {
    if alpha >= lb.len() {
        return Err(PolicyError::MissingProvenance(alpha));
    }
    let mut map: HashMap<usize, usize> = HashMap::new();
    let mut order = vec![alpha];
    map.insert(alpha, 0);
    let mut nodes: Vec<PolicyNode> = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        let node_id = i;
        let vec = lb.vector(v);
        let next = match &vec.successors {
            Successors::SelfLoop => vec![node_id; num_observations],
            Successors::Next(succ) => {
                if succ.len() != num_observations || succ.iter().any(|&k| k >= lb.len()) {
                    return Err(PolicyError::MissingProvenance(v));
                }
                succ.iter()
                    .map(|&k| {
                        let k = lb.resolve(k);
                        *map.entry(k).or_insert_with(|| {
                            order.push(k);
                            order.len() - 1
                        })
                    })
                    .collect()
            }
        };
        nodes.push(PolicyNode { action: vec.action, next });
        i += 1;
    }
    Ok(PolicyGraph { nodes, root: 0 })
}

/// Distribution over deterministic controllers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedPolicy {
    pub components: Vec<(PolicyGraph, f64)>,
}

impl MixedPolicy {
    pub fn single(g: PolicyGraph) -> Self {
        MixedPolicy { components: vec![(g, 1.0)] }
    }

    pub fn weights(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.1).collect()
    }
}

/// Mixture of the controllers of `candidates[k]` weighted by the agent LP
/// solution; zero weights are dropped.
pub fn agent_policy(
    lb: &LowerBound,
    candidates: &[usize],
    sol: &AgentSolution,
    num_observations: usize,
) -> Result<MixedPolicy, PolicyError> {
    if candidates.len() != sol.weights.len() {
        return Err(PolicyError::Mismatch("weights do not match candidate vectors".into()));
    }
    let mut components = Vec::new();
    for (&k, &w) in candidates.iter().zip(&sol.weights) {
        if w > 0.0 {
            components.push((extract_policy(lb, k, num_observations)?, w));
        }
    }
    let total: f64 = components.iter().map(|c| c.1).sum();
    for c in &mut components {
        c.1 /= total;
    }
    Ok(MixedPolicy { components })
}
