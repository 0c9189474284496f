use crate::lp::{lp_solve, Constraint, LinearProgram, Objective, Sense};
use crate::model::{Belief, Pomdp};

#[derive(Clone, Debug, PartialEq)]
struct Point {
    belief: Belief,
    value: f64,
    corner_dot: f64,
    mask: Vec<u64>,
}

fn support_mask(b: &Belief) -> Vec<u64> {
    let mut mask = vec![0u64; b.len().div_ceil(64)];
    for &s in b.support() {
        mask[s / 64] |= 1 << (s % 64);
    }
    mask
}

/// Whether the support behind `inner` lies inside the one behind `outer`.
fn covered(inner: &[u64], outer: &[u64]) -> bool {
    inner.iter().zip(outer).all(|(i, o)| i & !o == 0)
}

/// Corner values plus belief/value points, read through sawtooth
/// interpolation. With state blocks set, a belief spread over several
/// blocks is also bounded by the weighted bounds of its per-block parts.
#[derive(Clone, Debug, PartialEq)]
pub struct UpperBound {
    corner_values: Vec<f64>,
    points: Vec<Point>,
    pruned_at: usize,
    blocks: Option<Vec<usize>>,
    hull_face: Vec<usize>,
}

impl UpperBound {
    pub fn new(corner_values: Vec<f64>) -> Self {
        UpperBound { corner_values, points: Vec::new(), pruned_at: 0, blocks: None, hull_face: Vec::new() }
    }

    /// `blocks[s]` labels the block of state `s`; one block disables the
    /// decomposition.
    pub fn with_blocks(corner_values: Vec<f64>, blocks: Vec<usize>) -> Self {
        let many = blocks.iter().any(|&k| k != blocks[0]);
        UpperBound { blocks: many.then_some(blocks), ..UpperBound::new(corner_values) }
    }

    /// Beliefs supported inside `face` are also bounded by the convex hull of
    /// the stored points there, one small LP per query.
    pub fn set_hull_face(&mut self, face: Vec<usize>) {
        self.hull_face = face;
    }

    /// `(weight, conditional belief)` per block that `b` touches. Empty when
    /// `b` sits inside one block.
    pub fn components(&self, b: &Belief) -> Vec<(f64, Belief)> {
        let Some(blocks) = &self.blocks else {
            return Vec::new();
        };
        let mut labels: Vec<usize> = b.support().iter().map(|&s| blocks[s]).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() < 2 {
            return Vec::new();
        }
        labels
            .into_iter()
            .map(|k| {
                let mut probs = vec![0.0; b.len()];
                let mut w = 0.0;
                for (s, p) in b.iter().filter(|&(s, _)| blocks[s] == k) {
                    probs[s] = p;
                    w += p;
                }
                (w, Belief::normalized(probs))
            })
            .collect()
    }

    pub fn corner_values(&self) -> &[f64] {
        &self.corner_values
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> impl Iterator<Item = (&Belief, f64)> + '_ {
        self.points.iter().map(|p| (&p.belief, p.value))
    }

    fn interpolate(&self, b: &Belief, skip: Option<usize>) -> f64 {
        let cb = b.dot(&self.corner_values);
        let mask = support_mask(b);
        let mut best = cb;
        for (i, p) in self.points.iter().enumerate() {
            if Some(i) == skip || p.value >= p.corner_dot || !covered(&p.mask, &mask) {
                continue;
            }
            let mut phi = f64::INFINITY;
            for (s, q) in p.belief.iter() {
                phi = phi.min(b.probs()[s] / q);
                if phi == 0.0 {
                    break;
                }
            }
            if phi > 0.0 {
                best = best.min(cb + phi * (p.value - p.corner_dot));
            }
        }
        best
    }

    /// Lowest convex combination of the corners and stored points whose
    /// support lies inside that of `b`.
    fn hull(&self, b: &Belief) -> Option<f64> {
        let face = b.support();
        let mask = support_mask(b);
        let inside: Vec<&Point> =
            self.points.iter().filter(|p| p.value < p.corner_dot && covered(&p.mask, &mask)).collect();
        if inside.is_empty() {
            return None;
        }
        let mut cost: Vec<f64> = face.iter().map(|&s| self.corner_values[s]).collect();
        cost.extend(inside.iter().map(|p| p.value));
        let constraints = face
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let mut row = vec![0.0; face.len()];
                row[i] = 1.0;
                row.extend(inside.iter().map(|p| p.belief.probs()[s]));
                Constraint::new(row, Sense::Eq, b.probs()[s])
            })
            .collect();
        let n = cost.len();
        let lp = LinearProgram { objective: Objective::Minimize(cost), constraints, free: vec![false; n] };
        lp_solve(&lp).ok().map(|sol| sol.objective)
    }

    /// Sawtooth interpolation at `b`, tightened by the block split and, on
    /// the hull face, by the hull of the stored points.
    pub fn value(&self, b: &Belief) -> f64 {
        let mut direct = self.interpolate(b, None);
        if b.support().len() > 1 && b.support().iter().all(|s| self.hull_face.contains(s)) {
            if let Some(h) = self.hull(b) {
                direct = direct.min(h);
            }
        }
        let parts = self.components(b);
        if parts.is_empty() {
            return direct;
        }
        let split: f64 = parts.iter().map(|(w, c)| w * self.interpolate(c, None)).sum();
        direct.min(split)
    }

    /// Stores `(b, v)` unless the bound is already at most `v` there. Point
    /// masses tighten the corner values instead. Returns whether anything
    /// changed.
    pub fn insert(&mut self, b: &Belief, v: f64) -> bool {
        if self.value(b) <= v + 1e-12 {
            return false;
        }
        if let Some(s) = b.as_point() {
            self.corner_values[s] = v;
            let corners = &self.corner_values;
            for p in &mut self.points {
                p.corner_dot = p.belief.dot(corners);
            }
            self.points.retain(|p| p.value < p.corner_dot);
            return true;
        }
        let corner_dot = b.dot(&self.corner_values);
        self.points.push(Point { belief: b.clone(), value: v, corner_dot, mask: support_mask(b) });
        if self.points.len() >= 2 * self.pruned_at + 32 {
            self.prune();
        }
        true
    }

    /// Removes points the remaining ones already bound from below.
    pub fn prune(&mut self) {
        let mut i = 0;
        while i < self.points.len() {
            let p = &self.points[i];
            if self.interpolate(&p.belief, Some(i)) <= p.value {
                self.points.remove(i);
            } else {
                i += 1;
            }
        }
        self.pruned_at = self.points.len();
    }
}

/// Labels of the connected components of the transition graph, ignoring
/// edge direction. Labels count up from 0 in order of the lowest state.
pub fn state_blocks(m: &Pomdp) -> Vec<usize> {
    let n = m.num_states();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for s in 0..n {
        for a in 0..m.num_actions() {
            for &(s2, _) in m.transition(s, a) {
                let (x, y) = (root(&mut parent, s), root(&mut parent, s2));
                if x != y {
                    parent[x.max(y)] = x.min(y);
                }
            }
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    (0..n)
        .map(|s| {
            let r = root(&mut parent, s);
            if label[r] == usize::MAX {
                label[r] = next;
                next += 1;
            }
            label[r]
        })
        .collect()
}

pub fn sawtooth_value(ub: &UpperBound, b: &Belief) -> f64 {
    ub.value(b)
}

pub fn ub_insert(ub: &mut UpperBound, b: &Belief, v: f64) {
    ub.insert(b, v);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corners_only() {
        let ub = UpperBound::new(vec![4.0, 2.0]);
        let b = Belief::new(vec![0.25, 0.75]).unwrap();
        assert_eq!(sawtooth_value(&ub, &b), 2.5);
    }

    #[test]
    fn insert_above_is_noop() {
        let mut ub = UpperBound::new(vec![4.0, 2.0]);
        let b = Belief::uniform(2);
        assert!(!ub.insert(&b, 3.5));
        assert_eq!(ub.num_points(), 0);
    }

    #[test]
    fn insert_below_lowers_value() {
        let mut ub = UpperBound::new(vec![4.0, 2.0]);
        let b = Belief::uniform(2);
        ub_insert(&mut ub, &b, 1.0);
        assert!(sawtooth_value(&ub, &b) <= 1.0);
        // interpolation is linear between the point and a corner
        let c = Belief::new(vec![0.75, 0.25]).unwrap();
        assert!((ub.value(&c) - 2.5).abs() < 1e-12);
        for _ in 0..5 {
            ub_insert(&mut ub, &b, 1.0);
        }
        assert_eq!(ub.num_points(), 1);
    }

    #[test]
    fn point_mass_updates_corner() {
        let mut ub = UpperBound::new(vec![4.0, 2.0]);
        ub.insert(&Belief::point(2, 0), 1.0);
        assert_eq!(ub.corner_values(), &[1.0, 2.0]);
        assert_eq!(ub.num_points(), 0);
    }

    #[test]
    fn blocks_split_mixed_beliefs() {
        let mut ub = UpperBound::with_blocks(vec![4.0; 4], vec![0, 0, 1, 1]);
        ub.insert(&Belief::new(vec![0.5, 0.5, 0.0, 0.0]).unwrap(), 1.0);
        ub.insert(&Belief::new(vec![0.0, 0.0, 0.5, 0.5]).unwrap(), 2.0);
        let b = Belief::uniform(4);
        assert!((ub.value(&b) - 1.5).abs() < 1e-12);
        assert_eq!(ub.components(&b).len(), 2);
        let plain = UpperBound::with_blocks(vec![4.0; 4], vec![0; 4]);
        assert!(plain.components(&b).is_empty());
    }

    #[test]
    fn hull_beats_sawtooth_between_points() {
        let mut ub = UpperBound::new(vec![10.0, 10.0, 10.0]);
        ub.set_hull_face(vec![0, 1]);
        ub.insert(&Belief::new(vec![0.8, 0.2, 0.0]).unwrap(), 1.0);
        ub.insert(&Belief::new(vec![0.2, 0.8, 0.0]).unwrap(), 1.0);
        let mid = Belief::new(vec![0.5, 0.5, 0.0]).unwrap();
        assert!((ub.value(&mid) - 1.0).abs() < 1e-9);
        assert!(ub.interpolate(&mid, None) > 1.0);
    }

    #[test]
    fn prune_drops_useless_points() {
        let mut ub = UpperBound::new(vec![4.0, 4.0]);
        let b = Belief::uniform(2);
        ub.insert(&Belief::new(vec![0.4, 0.6]).unwrap(), 2.0);
        ub.insert(&b, 0.0);
        ub.prune();
        assert_eq!(ub.num_points(), 1);
        assert_eq!(ub.value(&b), 0.0);
    }
}
