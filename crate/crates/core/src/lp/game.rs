use serde::{Deserialize, Serialize};

use super::simplex::{lp_solve, Constraint, LinearProgram, LpSolution, Objective, Sense};
use crate::error::LpError;
use crate::model::Belief;

/// Nature's minimizing belief over `Q` and the value it forces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NatureSolution {
    pub belief: Belief,
    pub value: f64,
}

/// Agent mixing weights, one per input vector, and the value they guarantee.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentSolution {
    pub weights: Vec<f64>,
    pub value: f64,
}

/// Indices of vectors not dominated on the coordinates `q`. Among equal
/// vectors the first one is kept.
pub fn prune_on_support<V: AsRef<[f64]>>(vectors: &[V], q: &[usize]) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        let v = v.as_ref();
        if kept.iter().any(|&k| q.iter().all(|&s| vectors[k].as_ref()[s] >= v[s])) {
            continue;
        }
        kept.retain(|&k| !q.iter().all(|&s| v[s] >= vectors[k].as_ref()[s]));
        kept.push(i);
    }
    kept.sort_unstable();
    kept
}

fn check_inputs<V: AsRef<[f64]>>(gamma: &[V], q: &[usize]) -> Result<usize, LpError> {
    let Some(first) = gamma.first() else {
        return Err(LpError::EmptyGame("no vectors"));
    };
    if q.is_empty() {
        return Err(LpError::EmptyGame("empty belief support"));
    }
    let n = first.as_ref().len();
    if gamma.iter().any(|v| v.as_ref().len() != n) || q.iter().any(|&s| s >= n) {
        return Err(LpError::NumericalFailure("inconsistent dimensions".into()));
    }
    Ok(n)
}

/// `max_{y ∈ Δ(kept)} v` subject to `Σ_k y_k α_k(s) ≥ v` for `s ∈ Q`; one
/// row per state of `Q`, so it stays small however many vectors there are.
fn mixture_lp<V: AsRef<[f64]>>(gamma: &[V], kept: &[usize], q: &[usize]) -> Result<LpSolution, LpError> {
    let nk = kept.len();
    let mut constraints: Vec<Constraint> = q
        .iter()
        .map(|&s| {
            let mut row: Vec<f64> = kept.iter().map(|&k| gamma[k].as_ref()[s]).collect();
            row.push(-1.0);
            Constraint::new(row, Sense::Ge, 0.0)
        })
        .collect();
    let mut simplex = vec![1.0; nk];
    simplex.push(0.0);
    constraints.push(Constraint::new(simplex, Sense::Eq, 1.0));
    let mut c = vec![0.0; nk];
    c.push(1.0);
    let mut free = vec![false; nk];
    free.push(true);
    lp_solve(&LinearProgram { objective: Objective::Maximize(c), constraints, free })
}

/// The same game with one row per vector.
fn belief_lp<V: AsRef<[f64]>>(gamma: &[V], kept: &[usize], q: &[usize]) -> Result<Vec<f64>, LpError> {
    let nq = q.len();
    let mut constraints: Vec<Constraint> = kept
        .iter()
        .map(|&k| {
            let a = gamma[k].as_ref();
            let mut row: Vec<f64> = q.iter().map(|&s| a[s]).collect();
            row.push(-1.0);
            Constraint::new(row, Sense::Le, 0.0)
        })
        .collect();
    let mut simplex = vec![1.0; nq];
    simplex.push(0.0);
    constraints.push(Constraint::new(simplex, Sense::Eq, 1.0));
    let mut c = vec![0.0; nq];
    c.push(1.0);
    let mut free = vec![false; nq];
    free.push(true);
    let sol = lp_solve(&LinearProgram { objective: Objective::Minimize(c), constraints, free })?;
    Ok(sol.x[..nq].to_vec())
}

fn belief_on(q: &[usize], weights: &[f64], n: usize) -> Result<Belief, LpError> {
    let mut probs = vec![0.0; n];
    for (&s, &w) in q.iter().zip(weights) {
        probs[s] = w.max(0.0);
    }
    if probs.iter().sum::<f64>() <= 0.0 {
        return Err(LpError::NumericalFailure("nature belief vanished".into()));
    }
    Ok(Belief::normalized(probs))
}

/// `min_{b ∈ Δ(Q)} max_{α ∈ Γ} α·b`. The belief is read off the row prices
/// of the agent's problem; the direct form is the fallback.
pub fn nature_lp<V: AsRef<[f64]>>(gamma: &[V], q: &[usize]) -> Result<NatureSolution, LpError> {
    let n = check_inputs(gamma, q)?;
    let kept = prune_on_support(gamma, q);
    let best = |b: &Belief| gamma.iter().map(|a| b.dot(a.as_ref())).fold(f64::NEG_INFINITY, f64::max);
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-6 * (1.0 + x.abs());

    let sol = mixture_lp(gamma, &kept, q)?;
    let prices: Vec<f64> = sol.duals[..q.len()].iter().map(|y| -y).collect();
    if let Ok(belief) = belief_on(q, &prices, n) {
        let value = best(&belief);
        if close(value, sol.objective) {
            return Ok(NatureSolution { belief, value });
        }
    }
    let belief = belief_on(q, &belief_lp(gamma, &kept, q)?, n)?;
    let value = best(&belief);
    if !close(value, sol.objective) {
        return Err(LpError::NumericalFailure(format!("nature value {value} vs game value {}", sol.objective)));
    }
    Ok(NatureSolution { belief, value })
}

/// `max_{y ∈ Δ(Γ)} min_{s ∈ Q} Σ_α y(α) α(s)`.
pub fn agent_lp<V: AsRef<[f64]>>(gamma: &[V], q: &[usize]) -> Result<AgentSolution, LpError> {
    check_inputs(gamma, q)?;
    let kept = prune_on_support(gamma, q);
    let sol = mixture_lp(gamma, &kept, q)?;
    let mut weights = vec![0.0; gamma.len()];
    for (i, &k) in kept.iter().enumerate() {
        weights[k] = sol.x[i].max(0.0);
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(LpError::NumericalFailure("agent weights vanished".into()));
    }
    for w in &mut weights {
        *w /= total;
    }
    let value = q
        .iter()
        .map(|&s| weights.iter().zip(gamma).map(|(w, a)| w * a.as_ref()[s]).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    if (value - sol.objective).abs() > 1e-6 * (1.0 + value.abs()) {
        return Err(LpError::NumericalFailure(format!("agent value {value} vs LP {}", sol.objective)));
    }
    Ok(AgentSolution { weights, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vector_nature() {
        let s = nature_lp(&[vec![2.0, 5.0]], &[0, 1]).unwrap();
        assert_eq!(s.belief, Belief::point(2, 0));
        assert!((s.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn single_vector_agent() {
        let s = agent_lp(&[vec![3.0, 3.0]], &[0, 1]).unwrap();
        assert_eq!(s.weights, vec![1.0]);
        assert!((s.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn matching_pennies() {
        let g = [vec![1.0, -1.0], vec![-1.0, 1.0]];
        let n = nature_lp(&g, &[0, 1]).unwrap();
        let a = agent_lp(&g, &[0, 1]).unwrap();
        assert!(n.value.abs() < 1e-12 && a.value.abs() < 1e-12);
        assert!((n.belief.probs()[0] - 0.5).abs() < 1e-12);
        assert!((a.weights[0] - 0.5).abs() < 1e-12 && (a.weights[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn restricted_support() {
        // state 2 is excluded from Q, so its large entries are irrelevant
        let g = [vec![4.0, 0.0, -9.0], vec![0.0, 4.0, -9.0]];
        let n = nature_lp(&g, &[0, 1]).unwrap();
        assert!((n.value - 2.0).abs() < 1e-12);
        assert_eq!(n.belief.probs()[2], 0.0);
    }

    #[test]
    fn dominated_on_support_dropped() {
        let g = [vec![1.0, 1.0, 9.0], vec![2.0, 2.0, 0.0], vec![2.0, 2.0, 5.0]];
        assert_eq!(prune_on_support(&g, &[0, 1]), vec![1]);
        assert_eq!(prune_on_support(&g, &[0, 1, 2]), vec![0, 2]);
    }

    #[test]
    fn empty_inputs_rejected() {
        let empty: [Vec<f64>; 0] = [];
        assert!(nature_lp(&empty, &[0]).is_err());
        assert!(agent_lp(&[vec![1.0]], &[]).is_err());
    }
}
