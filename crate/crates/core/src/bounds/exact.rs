use super::alpha::{dominates_on, AlphaVector, LowerBound, Successors};
use super::lark::lark_filter;
use crate::error::BoundsError;
use crate::model::{Belief, Pomdp};

/// Default cap on the size of any intermediate vector set.
pub const DEFAULT_BLOWUP_CAP: usize = 1_000_000;

/// Vector sets `Γ_1..Γ_H`; successors of `Γ_t` index into `Γ_{t-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaStack {
    pub levels: Vec<Vec<AlphaVector>>,
}

impl GammaStack {
    pub fn horizon(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, t: usize) -> &[AlphaVector] {
        &self.levels[t - 1]
    }

    /// `Γ_H`.
    pub fn top(&self) -> &[AlphaVector] {
        self.levels.last().map_or(&[], |l| l.as_slice())
    }

    pub fn value(&self, b: &Belief) -> f64 {
        self.top().iter().map(|a| a.dot(b)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Concatenates all levels into one [`LowerBound`] (all active) and
    /// returns the flat indices of `Γ_H`.
    pub fn flatten(&self) -> (LowerBound, Vec<usize>) {
        let mut lb = LowerBound::new();
        let mut prev_offset = 0;
        let mut top = Vec::new();
        for (t, level) in self.levels.iter().enumerate() {
            let offset = lb.len();
            top.clear();
            for a in level {
                let successors = match &a.successors {
                    Successors::Next(next) if t > 0 => Successors::Next(next.iter().map(|k| k + prev_offset).collect()),
                    _ => Successors::SelfLoop,
                };
                top.push(lb.push(AlphaVector::new(a.values.clone(), a.action, successors)));
            }
            prev_offset = offset;
        }
        (lb, top)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactOptions {
    pub prune: bool,
    pub cap: usize,
    /// Restrict pruning and action choice to what is reachable from these
    /// start states.
    pub support: Option<Vec<usize>>,
    /// Also drop vectors that are nowhere better than the rest by more than
    /// this margin (LP filter).
    pub lp_tol: Option<f64>,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions { prune: true, cap: DEFAULT_BLOWUP_CAP, support: None, lp_tol: None }
    }
}

/// Exact finite-horizon vector sets with discounting inside the backup.
pub fn exact_gamma(m: &Pomdp, horizon: u32, prune: bool) -> Result<GammaStack, BoundsError> {
    exact_gamma_with(m, horizon, &ExactOptions { prune, ..Default::default() })
}

/// States occupied at steps `1..=horizon` from `start`, with the actions
/// allowed on each step.
pub(crate) fn reachable_layers(m: &Pomdp, start: &[usize], horizon: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let ns = m.num_states();
    let mut layers = Vec::with_capacity(horizon);
    let mut cur: Vec<usize> = start.to_vec();
    for _ in 0..horizon {
        let acts = m.admissible_actions(cur.iter().copied());
        let mut next = vec![false; ns];
        for &s in &cur {
            for &a in &acts {
                for &(s2, _) in m.transition(s, a) {
                    next[s2] = true;
                }
            }
        }
        layers.push((cur, acts));
        cur = (0..ns).filter(|&s| next[s]).collect();
    }
    layers
}

/// Projected continuation `γ Σ_{s'} T(s,a)(s') O(s',a)(z) α(s')` for every
/// vector of `prev`.
fn project(m: &Pomdp, prev: &[AlphaVector], a: usize, z: usize) -> Vec<Vec<f64>> {
    let ns = m.num_states();
    let gamma = m.discount;
    // w[s] = list of (s', T·O) with nonzero weight
    let weights: Vec<Vec<(usize, f64)>> = (0..ns)
        .map(|s| {
            m.transition(s, a)
                .iter()
                .filter_map(|&(s2, t)| {
                    let o = m.observation(s2, a).iter().find(|&&(k, _)| k == z).map_or(0.0, |e| e.1);
                    (o > 0.0).then_some((s2, t * o))
                })
                .collect()
        })
        .collect();
    prev.iter()
        .map(|alpha| {
            weights.iter().map(|w| gamma * w.iter().map(|&(s2, p)| p * alpha.values[s2]).sum::<f64>()).collect()
        })
        .collect()
}

fn prune_indices(vectors: &[Vec<f64>], coords: &[usize]) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        if kept.iter().any(|&k| dominates_on(&vectors[k], v, coords)) {
            continue;
        }
        kept.retain(|&k| !dominates_on(v, &vectors[k], coords));
        kept.push(i);
    }
    kept.sort_unstable();
    kept
}

/// Adds a candidate to a pruned list, keeping older vectors on ties.
fn insert_pruned(kept: &mut Vec<(Vec<f64>, Vec<usize>)>, cand: (Vec<f64>, Vec<usize>), coords: &[usize]) {
    if kept.iter().any(|(k, _)| dominates_on(k, &cand.0, coords)) {
        return;
    }
    kept.retain(|(k, _)| !dominates_on(&cand.0, k, coords));
    kept.push(cand);
}

/// Exact vector sets under `opts`.
pub fn exact_gamma_with(m: &Pomdp, horizon: u32, opts: &ExactOptions) -> Result<GammaStack, BoundsError> {
    if horizon == 0 {
        return Err(BoundsError::BadHorizon);
    }
    let h = horizon as usize;
    let ns = m.num_states();
    let all_states: Vec<usize> = (0..ns).collect();
    let all_actions: Vec<usize> = (0..m.num_actions()).collect();
    // level t (1-based) is used at step h - t + 1
    let per_level: Vec<(Vec<usize>, Vec<usize>)> = match &opts.support {
        Some(start) => {
            let mut layers = reachable_layers(m, start, h);
            layers.reverse();
            layers
        }
        None => vec![(all_states.clone(), all_actions.clone()); h],
    };

    let (coords, acts) = &per_level[0];
    let mut level: Vec<AlphaVector> = acts
        .iter()
        .map(|&a| AlphaVector::new((0..ns).map(|s| m.reward(s, a)).collect(), a, Successors::SelfLoop))
        .collect();
    if opts.prune {
        level = super::alpha::prune_on(level, coords);
    }
    if let (true, Some(tol)) = (opts.prune, opts.lp_tol) {
        let keep = lark_filter(&level, coords, tol);
        level = keep.into_iter().map(|i| level[i].clone()).collect();
    }
    let mut levels = vec![level];

    for (coords, acts) in per_level.iter().skip(1) {
        let prev = levels.last().unwrap();
        let mut out: Vec<AlphaVector> = Vec::new();
        for &a in acts {
            let base: Vec<f64> = (0..ns).map(|s| m.reward(s, a)).collect();
            let mut partial: Vec<(Vec<f64>, Vec<usize>)> = vec![(base, Vec::new())];
            for z in 0..m.num_observations() {
                let proj = project(m, prev, a, z);
                let mut candidates: Vec<usize> =
                    if opts.prune { prune_indices(&proj, coords) } else { (0..proj.len()).collect() };
                if let (true, Some(tol)) = (opts.prune, opts.lp_tol) {
                    let sub: Vec<&[f64]> = candidates.iter().map(|&k| proj[k].as_slice()).collect();
                    candidates = lark_filter(&sub, coords, tol).into_iter().map(|i| candidates[i]).collect();
                }
                let size = partial.len().saturating_mul(candidates.len());
                if !opts.prune && out.len().saturating_add(size) > opts.cap {
                    return Err(BoundsError::BlowupGuard { size: out.len().saturating_add(size), cap: opts.cap });
                }
                let mut next: Vec<(Vec<f64>, Vec<usize>)> = Vec::new();
                for (vals, succ) in &partial {
                    for &k in &candidates {
                        let sum: Vec<f64> = vals.iter().zip(&proj[k]).map(|(x, y)| x + y).collect();
                        let mut s2 = succ.clone();
                        s2.push(k);
                        if opts.prune {
                            insert_pruned(&mut next, (sum, s2), coords);
                            if next.len() > opts.cap {
                                return Err(BoundsError::BlowupGuard { size: next.len(), cap: opts.cap });
                            }
                        } else {
                            next.push((sum, s2));
                        }
                    }
                }
                if let (true, Some(tol)) = (opts.prune, opts.lp_tol) {
                    let keep = lark_filter(&next.iter().map(|(v, _)| v.as_slice()).collect::<Vec<_>>(), coords, tol);
                    next = keep.into_iter().map(|i| std::mem::take(&mut next[i])).collect();
                }
                partial = next;
            }
            out.extend(partial.into_iter().map(|(v, s)| AlphaVector::new(v, a, Successors::Next(s))));
            if out.len() > opts.cap {
                return Err(BoundsError::BlowupGuard { size: out.len(), cap: opts.cap });
            }
        }
        if opts.prune {
            out = super::alpha::prune_on(out, coords);
            if let Some(tol) = opts.lp_tol {
                let keep = lark_filter(&out, coords, tol);
                out = keep.into_iter().map(|i| out[i].clone()).collect();
            }
        }
        levels.push(out);
    }
    Ok(GammaStack { levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Horizon, Spaces};

    fn two_by_two() -> Pomdp {
        Pomdp::tabulate(
            Spaces::indexed(2, 2, 2),
            |s, a| if a == 0 { vec![(s, 0.9), (1 - s, 0.1)] } else { vec![(0, 0.5), (1, 0.5)] },
            |s2, _| if s2 == 0 { vec![(0, 0.7), (1, 0.3)] } else { vec![(0, 0.2), (1, 0.8)] },
            |s, a| [[1.0, -1.0], [0.0, 0.5]][s][a],
            Belief::uniform(2),
            0.9,
            Horizon::Finite(2),
        )
    }

    #[test]
    fn one_step_is_rewards() {
        let m = two_by_two();
        let g = exact_gamma(&m, 1, false).unwrap();
        assert_eq!(g.top().len(), 2);
        assert_eq!(g.top()[0].values, vec![1.0, 0.0]);
        assert_eq!(g.top()[1].values, vec![-1.0, 0.5]);
    }

    #[test]
    fn unpruned_cross_sum_count() {
        let g = exact_gamma(&two_by_two(), 2, false).unwrap();
        assert_eq!(g.top().len(), 8);
    }

    #[test]
    fn blowup_guard() {
        let opts = ExactOptions { prune: false, cap: 7, ..ExactOptions::default() };
        assert!(matches!(exact_gamma_with(&two_by_two(), 2, &opts), Err(BoundsError::BlowupGuard { .. })));
    }

    #[test]
    fn pruning_keeps_envelope() {
        let m = two_by_two();
        let full = exact_gamma(&m, 3, false).unwrap();
        let pruned = exact_gamma(&m, 3, true).unwrap();
        assert!(pruned.top().len() <= full.top().len());
        for i in 0..=20 {
            let p = i as f64 / 20.0;
            let b = Belief::new(vec![p, 1.0 - p]).unwrap();
            assert!((full.value(&b) - pruned.value(&b)).abs() < 1e-12);
        }
    }

    #[test]
    fn lp_pruning_keeps_envelope() {
        let m = two_by_two();
        let plain = exact_gamma(&m, 5, true).unwrap();
        let opts = ExactOptions { lp_tol: Some(1e-12), ..ExactOptions::default() };
        let lp = exact_gamma_with(&m, 5, &opts).unwrap();
        assert!(lp.top().len() <= plain.top().len());
        for i in 0..=40 {
            let p = i as f64 / 40.0;
            let b = Belief::new(vec![p, 1.0 - p]).unwrap();
            assert!((plain.value(&b) - lp.value(&b)).abs() < 1e-9);
        }
    }

    #[test]
    fn flatten_offsets_successors() {
        let g = exact_gamma(&two_by_two(), 2, true).unwrap();
        let (lb, top) = g.flatten();
        let n1 = g.level(1).len();
        assert_eq!(lb.len(), n1 + g.level(2).len());
        for &i in &top {
            match &lb.vector(i).successors {
                Successors::Next(next) => assert!(next.iter().all(|&k| k < n1)),
                Successors::SelfLoop => panic!("top vector without successors"),
            }
        }
    }
}
