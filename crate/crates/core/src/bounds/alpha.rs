use crate::model::Belief;

/// Where a controller goes after this vector's action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Successors {
    /// Repeat the same vector forever (blind and one-step vectors).
    SelfLoop,
    /// Successor vector index per observation.
    Next(Vec<usize>),
}

/// A linear value function over states together with the first action and
/// per-observation continuation of the policy it represents.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaVector {
    pub values: Vec<f64>,
    pub action: usize,
    pub successors: Successors,
}

impl AlphaVector {
    pub fn new(values: Vec<f64>, action: usize, successors: Successors) -> Self {
        AlphaVector { values, action, successors }
    }

    #[inline]
    pub fn dot(&self, b: &Belief) -> f64 {
        b.dot(&self.values)
    }
}

impl AsRef<[f64]> for AlphaVector {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// `a ≥ b` on every coordinate of `coords`.
#[inline]
pub(crate) fn dominates_on(a: &[f64], b: &[f64], coords: &[usize]) -> bool {
    coords.iter().all(|&s| a[s] >= b[s])
}

#[inline]
pub(crate) fn dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y)
}

/// Removes vectors dominated on `coords` by another vector; of two equal
/// vectors the earlier one survives.
pub(crate) fn prune_on(vectors: Vec<AlphaVector>, coords: &[usize]) -> Vec<AlphaVector> {
    let mut kept: Vec<AlphaVector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        if kept.iter().any(|k| dominates_on(&k.values, &v.values, coords)) {
            continue;
        }
        kept.retain(|k| !dominates_on(&v.values, &k.values, coords));
        kept.push(v);
    }
    kept
}

/// Drops every vector that another one dominates pointwise. Survivors keep
/// their relative order.
pub fn prune_pointwise(vectors: Vec<AlphaVector>) -> Vec<AlphaVector> {
    let Some(first) = vectors.first() else {
        return vectors;
    };
    let coords: Vec<usize> = (0..first.values.len()).collect();
    let indexed: Vec<(usize, AlphaVector)> = vectors.into_iter().enumerate().collect();
    let mut kept: Vec<(usize, AlphaVector)> = Vec::new();
    for (i, v) in indexed {
        if kept.iter().any(|(_, k)| dominates_on(&k.values, &v.values, &coords)) {
            continue;
        }
        kept.retain(|(_, k)| !dominates_on(&v.values, &k.values, &coords));
        kept.push((i, v));
    }
    kept.sort_by_key(|(i, _)| *i);
    kept.into_iter().map(|(_, v)| v).collect()
}

/// Outcome of [`LowerBound::insert`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Insertion {
    /// Index of the new vector, or of the active vector that dominated it.
    pub index: usize,
    pub added: bool,
}

/// Append-only α-vector set. Vectors that become dominated are deactivated
/// and remember their dominator so controllers can be rewired later.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LowerBound {
    vectors: Vec<AlphaVector>,
    active: Vec<bool>,
    dominated_by: Vec<Option<usize>>,
}

impl LowerBound {
    pub fn new() -> Self {
        Self::default()
    }

    /// All vectors active, no pruning.
    pub fn from_vectors(vectors: Vec<AlphaVector>) -> Self {
        let n = vectors.len();
        LowerBound { vectors, active: vec![true; n], dominated_by: vec![None; n] }
    }

    /// Appends without any domination check.
    pub fn push(&mut self, v: AlphaVector) -> usize {
        self.vectors.push(v);
        self.active.push(true);
        self.dominated_by.push(None);
        self.vectors.len() - 1
    }

    /// Appends `v` unless an active vector dominates it; deactivates the
    /// active vectors `v` dominates.
    pub fn insert(&mut self, v: AlphaVector) -> Insertion {
        if let Some(k) = self.active_indices().find(|&k| dominates(&self.vectors[k].values, &v.values)) {
            return Insertion { index: k, added: false };
        }
        let idx = self.vectors.len();
        for k in 0..idx {
            if self.active[k] && dominates(&v.values, &self.vectors[k].values) {
                self.active[k] = false;
                self.dominated_by[k] = Some(idx);
            }
        }
        self.push(v);
        Insertion { index: idx, added: true }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, i: usize) -> &AlphaVector {
        &self.vectors[i]
    }

    pub fn vectors(&self) -> &[AlphaVector] {
        &self.vectors
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.active[i]
    }

    pub fn dominated_by(&self, i: usize) -> Option<usize> {
        self.dominated_by[i]
    }

    pub fn active_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vectors.len()).filter(move |&i| self.active[i])
    }

    pub fn num_active(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    /// Follows the domination chain from `i` to an active vector.
    pub fn resolve(&self, mut i: usize) -> usize {
        while let Some(j) = self.dominated_by[i] {
            i = j;
        }
        i
    }

    /// Best active vector at `b` and its value; ties go to the lowest index.
    pub fn best(&self, b: &Belief) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for i in self.active_indices() {
            let v = self.vectors[i].dot(b);
            if best.is_none_or(|(_, bv)| v > bv) {
                best = Some((i, v));
            }
        }
        best
    }

    /// Deactivates every active vector that is not the best at any of
    /// `witnesses`. Such vectors keep no dominator; controllers that point
    /// at them stay valid. Returns how many were dropped.
    pub fn retain_best_at<'b>(&mut self, witnesses: impl IntoIterator<Item = &'b Belief>) -> usize {
        let mut used = vec![false; self.vectors.len()];
        for b in witnesses {
            if let Some((i, _)) = self.best(b) {
                used[i] = true;
            }
        }
        let mut dropped = 0;
        for (i, keep) in used.into_iter().enumerate() {
            if self.active[i] && !keep {
                self.active[i] = false;
                dropped += 1;
            }
        }
        dropped
    }

    /// `max_α α·b` over active vectors (`-∞` when empty).
    pub fn value(&self, b: &Belief) -> f64 {
        self.best(b).map_or(f64::NEG_INFINITY, |(_, v)| v)
    }
}
