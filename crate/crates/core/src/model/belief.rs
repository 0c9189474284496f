use serde::{Deserialize, Serialize};

use super::Pomdp;
use crate::error::ModelError;

/// Normalizers at or below this value are treated as impossible observations.
pub const MIN_OBS_PROB: f64 = 1e-12;

/// A probability distribution over states with its support cached.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Belief {
    probs: Vec<f64>,
    support: Vec<usize>,
}

impl Belief {
    /// Validates and renormalizes a dense probability vector.
    pub fn new(probs: Vec<f64>) -> Result<Self, ModelError> {
        if probs.is_empty() {
            return Err(ModelError::InvalidBelief("empty probability vector".into()));
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !p.is_finite() || **p < 0.0) {
            return Err(ModelError::InvalidBelief(format!("entry {i} is {p}")));
        }
        let sum: f64 = probs.iter().sum();
        if !super::sums_to_one(sum) {
            return Err(ModelError::InvalidBelief(format!("entries sum to {sum}")));
        }
        Ok(Self::normalized(probs))
    }

    /// Builds from non-negative weights, dividing by their sum.
    pub(crate) fn normalized(mut probs: Vec<f64>) -> Self {
        let sum: f64 = probs.iter().sum();
        if sum != 1.0 {
            for p in &mut probs {
                *p /= sum;
            }
        }
        let support = probs.iter().enumerate().filter(|(_, p)| **p > 0.0).map(|(i, _)| i).collect();
        Belief { probs, support }
    }

    /// Keeps the entries exactly as given; validation checks the sum.
    pub(crate) fn as_written(probs: Vec<f64>) -> Self {
        let support = probs.iter().enumerate().filter(|(_, p)| **p > 0.0).map(|(i, _)| i).collect();
        Belief { probs, support }
    }

    pub fn point(num_states: usize, s: usize) -> Self {
        let mut probs = vec![0.0; num_states];
        probs[s] = 1.0;
        Belief { probs, support: vec![s] }
    }

    pub fn uniform(num_states: usize) -> Self {
        Self::normalized(vec![1.0; num_states])
    }

    pub fn uniform_over(num_states: usize, states: &[usize]) -> Self {
        let mut probs = vec![0.0; num_states];
        let w = 1.0 / states.len() as f64;
        for &s in states {
            probs[s] = w;
        }
        Self::normalized(probs)
    }

    /// Builds from `(state, probability)` pairs.
    pub fn from_sparse(num_states: usize, pairs: &[(usize, f64)]) -> Result<Self, ModelError> {
        let mut probs = vec![0.0; num_states];
        for &(s, p) in pairs {
            if s >= num_states {
                return Err(ModelError::IndexOutOfRange { what: "belief state", index: s, len: num_states });
            }
            probs[s] += p;
        }
        Self::new(probs)
    }

    #[inline]
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `Σ_s b(s) v(s)` over the support.
    #[inline]
    pub fn dot(&self, values: &[f64]) -> f64 {
        self.support.iter().map(|&s| self.probs[s] * values[s]).sum()
    }

    /// The Dirac state when the belief is a point mass.
    pub fn as_point(&self) -> Option<usize> {
        match self.support.as_slice() {
            [s] => Some(*s),
            _ => None,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.support.iter().map(move |&s| (s, self.probs[s]))
    }
}

/// One observation branch of a belief transition.
#[derive(Clone, Debug)]
pub struct Successor {
    pub observation: usize,
    pub prob: f64,
    pub belief: Belief,
}

/// Unnormalized next-state weights per observation: `ν_z(s') = Σ_s b(s) T(s,a)(s') O(s',a)(z)`.
pub(crate) fn joint_next(m: &Pomdp, b: &Belief, a: usize) -> Vec<Vec<f64>> {
    let ns = m.num_states();
    let mut pred = vec![0.0; ns];
    for (s, p) in b.iter() {
        for &(s2, t) in m.transition(s, a) {
            pred[s2] += p * t;
        }
    }
    let mut nu = vec![vec![0.0; ns]; m.num_observations()];
    for (s2, &p) in pred.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for &(z, o) in m.observation(s2, a) {
            nu[z][s2] += p * o;
        }
    }
    nu
}

/// `Pr(z | b, a)`.
pub fn pr_obs(m: &Pomdp, b: &Belief, a: usize, z: usize) -> f64 {
    let mut total = 0.0;
    for (s, p) in b.iter() {
        for &(s2, t) in m.transition(s, a) {
            if let Some(&(_, o)) = m.observation(s2, a).iter().find(|&&(k, _)| k == z) {
                total += p * t * o;
            }
        }
    }
    total
}

/// Bayes filter: `b'(s') ∝ Σ_s b(s) T(s,a)(s') O(s',a)(z)`.
pub fn belief_update(m: &Pomdp, b: &Belief, a: usize, z: usize) -> Result<Belief, ModelError> {
    let nu = joint_next(m, b, a).swap_remove(z);
    let norm: f64 = nu.iter().sum();
    if norm <= MIN_OBS_PROB {
        return Err(ModelError::ZeroProbabilityObservation { action: a, observation: z });
    }
    Ok(Belief::normalized(nu))
}

/// All observation branches with probability above [`MIN_OBS_PROB`].
pub fn successor_beliefs(m: &Pomdp, b: &Belief, a: usize) -> Vec<Successor> {
    joint_next(m, b, a)
        .into_iter()
        .enumerate()
        .filter_map(|(z, nu)| {
            let prob: f64 = nu.iter().sum();
            (prob > MIN_OBS_PROB).then(|| Successor { observation: z, prob, belief: Belief::normalized(nu) })
        })
        .collect()
}
