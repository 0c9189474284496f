use std::cmp::Ordering;
use std::collections::VecDeque;

use crate::lp::{lp_solve, Constraint, LinearProgram, Objective, Sense};

fn dot_on(v: &[f64], b: &[(usize, f64)]) -> f64 {
    b.iter().map(|&(s, p)| p * v[s]).sum()
}

/// Larger value at `b`, then lexicographically larger on `coords`.
fn better(a: &[f64], b: &[f64], at: &[(usize, f64)], coords: &[usize]) -> Ordering {
    dot_on(a, at).total_cmp(&dot_on(b, at)).then_with(|| {
        coords.iter().map(|&s| a[s].total_cmp(&b[s])).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
    })
}

/// Belief on `coords` where `phi` beats every vector of `kept` by the largest
/// margin, with that margin. Solved in the mixture form
/// `min_{λ ∈ Δ(kept)} max_c (φ_c − Σ λ_w w_c)`, which has one row per
/// coordinate; the belief is read off the row prices.
fn witness(phi: &[f64], kept: &[&[f64]], coords: &[usize]) -> Option<(Vec<(usize, f64)>, f64)> {
    let nk = kept.len();
    let mut constraints: Vec<Constraint> = coords
        .iter()
        .map(|&s| {
            let mut row: Vec<f64> = kept.iter().map(|w| w[s]).collect();
            row.push(1.0);
            Constraint::new(row, Sense::Ge, phi[s])
        })
        .collect();
    let mut simplex = vec![1.0; nk];
    simplex.push(0.0);
    constraints.push(Constraint::new(simplex, Sense::Eq, 1.0));
    let mut c = vec![0.0; nk];
    c.push(1.0);
    let mut free = vec![false; nk];
    free.push(true);
    let sol = lp_solve(&LinearProgram { objective: Objective::Minimize(c), constraints, free }).ok()?;
    let prices: Vec<f64> = sol.duals[..coords.len()].iter().map(|&y| y.max(0.0)).collect();
    let total: f64 = prices.iter().sum();
    let b = if total > 0.0 {
        coords.iter().zip(&prices).filter(|(_, &p)| p > 0.0).map(|(&s, &p)| (s, p / total)).collect()
    } else {
        coords.iter().map(|&s| (s, 1.0 / coords.len() as f64)).collect()
    };
    Some((b, sol.objective))
}

/// Indices of the vectors that are strictly best, by more than `tol`,
/// somewhere on the simplex over `coords` (Lark's filter). Survivors keep
/// their input order.
pub(crate) fn lark_filter<V: AsRef<[f64]>>(vectors: &[V], coords: &[usize], tol: f64) -> Vec<usize> {
    if vectors.is_empty() || coords.is_empty() {
        return (0..vectors.len().min(1)).collect();
    }
    let v = |i: usize| vectors[i].as_ref();
    let mut pending: VecDeque<usize> = (0..vectors.len()).collect();
    let mut kept: Vec<usize> = Vec::new();
    let take_best = |pending: &mut VecDeque<usize>, at: &[(usize, f64)]| -> usize {
        let pos = (0..pending.len())
            .max_by(|&i, &j| better(v(pending[i]), v(pending[j]), at, coords).then(j.cmp(&i)))
            .unwrap();
        pending.remove(pos).unwrap()
    };
    // corners first: their maximizers are always useful
    for &s in coords {
        if pending.is_empty() {
            break;
        }
        let at = [(s, 1.0)];
        let best_val = pending.iter().map(|&i| v(i)[s]).fold(f64::NEG_INFINITY, f64::max);
        let kept_val = kept.iter().map(|&i| v(i)[s]).fold(f64::NEG_INFINITY, f64::max);
        if best_val > kept_val + tol {
            kept.push(take_best(&mut pending, &at));
        }
    }
    while let Some(phi) = pending.pop_front() {
        let refs: Vec<&[f64]> = kept.iter().map(|&i| v(i)).collect();
        match witness(v(phi), &refs, coords) {
            Some((b, delta)) if delta > tol => {
                pending.push_front(phi);
                kept.push(take_best(&mut pending, &b));
            }
            Some(_) => {}
            // no verdict: keeping a spare vector is harmless
            None => kept.push(phi),
        }
    }
    kept.sort_unstable();
    kept
}
