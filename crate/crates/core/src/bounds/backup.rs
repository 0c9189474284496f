use super::alpha::{AlphaVector, LowerBound, Successors};
use crate::model::joint_next;
use crate::model::{Belief, Pomdp};

fn argmax_active(lb: &LowerBound, active: &[usize], w: &[f64]) -> usize {
    let mut best = (active[0], f64::NEG_INFINITY);
    for &k in active {
        let v: f64 = w.iter().zip(&lb.vector(k).values).filter(|(p, _)| **p != 0.0).map(|(p, a)| p * a).sum();
        if v > best.1 {
            best = (k, v);
        }
    }
    best.0
}

/// The α-vector that takes action `a` at `b` and continues with the best
/// active vector of `lb` per observation.
pub fn backup_action(m: &Pomdp, lb: &LowerBound, b: &Belief, a: usize) -> AlphaVector {
    let ns = m.num_states();
    let active: Vec<usize> = lb.active_indices().collect();
    assert!(!active.is_empty(), "backup needs a nonempty lower bound");
    let nu = joint_next(m, b, a);
    let succ: Vec<usize> = nu
        .iter()
        .enumerate()
        .map(|(z, w)| {
            if w.iter().any(|&p| p > 0.0) {
                argmax_active(lb, &active, w)
            } else {
                // unreachable from b: choose for the uniform prior instead
                let mut u = vec![0.0; ns];
                for s in 0..ns {
                    for &(s2, t) in m.transition(s, a) {
                        if let Some(&(_, o)) = m.observation(s2, a).iter().find(|&&(k, _)| k == z) {
                            u[s2] += t * o;
                        }
                    }
                }
                argmax_active(lb, &active, &u)
            }
        })
        .collect();
    let values = (0..ns)
        .map(|s| {
            let cont: f64 = m
                .transition(s, a)
                .iter()
                .map(|&(s2, t)| {
                    t * m.observation(s2, a).iter().map(|&(z, o)| o * lb.vector(succ[z]).values[s2]).sum::<f64>()
                })
                .sum();
            m.reward(s, a) + m.discount * cont
        })
        .collect();
    AlphaVector::new(values, a, Successors::Next(succ))
}

/// Point-based Bellman backup at `b` over the actions admissible on its
/// support. Ties go to the lowest action index.
pub fn backup(m: &Pomdp, lb: &LowerBound, b: &Belief) -> AlphaVector {
    let mut best: Option<(AlphaVector, f64)> = None;
    for a in m.admissible_actions(b.support().iter().copied()) {
        let v = backup_action(m, lb, b, a);
        let val = v.dot(b);
        if best.as_ref().is_none_or(|(_, bv)| val > *bv) {
            best = Some((v, val));
        }
    }
    best.unwrap().0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::blind_bound;
    use crate::model::{Horizon, Spaces};

    #[test]
    fn zero_continuation_is_myopic() {
        let m = Pomdp::tabulate(
            Spaces::indexed(2, 2, 1),
            |s, _| vec![(s, 1.0)],
            |_, _| vec![(0, 1.0)],
            |s, a| [[1.0, 0.0], [0.0, 3.0]][s][a],
            Belief::uniform(2),
            0.9,
            Horizon::Infinite,
        );
        let lb = LowerBound::from_vectors(vec![AlphaVector::new(vec![0.0, 0.0], 0, Successors::SelfLoop)]);
        let v = backup(&m, &lb, &Belief::uniform(2));
        assert_eq!(v.action, 1);
        assert_eq!(v.values, vec![0.0, 3.0]);
    }

    #[test]
    fn geometric_series() {
        let m = Pomdp::tabulate(
            Spaces::indexed(1, 1, 1),
            |_, _| vec![(0, 1.0)],
            |_, _| vec![(0, 1.0)],
            |_, _| 1.0,
            Belief::point(1, 0),
            0.5,
            Horizon::Infinite,
        );
        let mut lb = LowerBound::from_vectors(vec![AlphaVector::new(vec![0.0], 0, Successors::SelfLoop)]);
        let b = Belief::point(1, 0);
        for _ in 0..60 {
            let v = backup(&m, &lb, &b);
            lb.insert(v);
        }
        assert!((lb.value(&b) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn backup_improves_blind_bound() {
        let m = Pomdp::tabulate(
            Spaces::indexed(3, 2, 2),
            |s, a| if a == 0 { vec![((s + 1) % 3, 0.7), (s, 0.3)] } else { vec![(0, 0.4), (2, 0.6)] },
            |s2, _| if s2 == 2 { vec![(1, 0.9), (0, 0.1)] } else { vec![(0, 0.8), (1, 0.2)] },
            |s, a| [[0.0, 1.0], [2.0, -1.0], [-3.0, 4.0]][s][a],
            Belief::uniform(3),
            0.9,
            Horizon::Infinite,
        );
        let mut lb = LowerBound::from_vectors(blind_bound(&m, 1e-6));
        let beliefs = [vec![0.2, 0.3, 0.5], vec![1.0, 0.0, 0.0], vec![0.1, 0.8, 0.1]];
        for _ in 0..5 {
            for p in &beliefs {
                let b = Belief::new(p.clone()).unwrap();
                let before = lb.value(&b);
                let v = backup(&m, &lb, &b);
                assert!(v.dot(&b) >= before - 1e-12);
                lb.insert(v);
            }
        }
    }
}
