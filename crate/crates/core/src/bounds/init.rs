use super::alpha::{AlphaVector, Successors};
use crate::model::Pomdp;

/// Default sup-norm tolerance for the bound iterations.
pub const DEFAULT_BOUND_TOL: f64 = 1e-6;

const MAX_SWEEPS: usize = 1_000_000;

/// Fast informed bound corner values, iterated down from `max R / (1-γ)`.
pub fn fib_bound(m: &Pomdp, tol: f64) -> Vec<f64> {
    let (ns, na, nz) = (m.num_states(), m.num_actions(), m.num_observations());
    let gamma = m.discount;
    let (_, rmax) = m.reward_bounds();
    // (s,a,z) → [(s', T·O)]
    let kernel: Vec<Vec<Vec<(usize, f64)>>> = (0..ns * na)
        .map(|row| {
            let (s, a) = (row / na, row % na);
            let mut per_z = vec![Vec::new(); nz];
            for &(s2, t) in m.transition(s, a) {
                for &(z, o) in m.observation(s2, a) {
                    per_z[z].push((s2, t * o));
                }
            }
            per_z
        })
        .collect();
    let mut q = vec![rmax / (1.0 - gamma); ns * na];
    for _ in 0..MAX_SWEEPS {
        let mut next = vec![0.0; ns * na];
        let mut residual: f64 = 0.0;
        for row in 0..ns * na {
            let (s, a) = (row / na, row % na);
            let mut cont = 0.0;
            for w in &kernel[row] {
                if w.is_empty() {
                    continue;
                }
                let best = (0..na)
                    .map(|a2| w.iter().map(|&(s2, p)| p * q[s2 * na + a2]).sum::<f64>())
                    .fold(f64::NEG_INFINITY, f64::max);
                cont += best;
            }
            next[row] = m.reward(s, a) + gamma * cont;
            residual = residual.max((next[row] - q[row]).abs());
        }
        q = next;
        if residual <= tol {
            break;
        }
    }
    (0..ns)
        .map(|s| {
            let acts: Vec<usize> = (0..na).filter(|&a| m.is_available(s, a)).collect();
            let acts = if acts.is_empty() { (0..na).collect() } else { acts };
            acts.iter().map(|&a| q[s * na + a]).fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// One vector per action for the policy that repeats it forever, iterated up
/// from `min_s R(s,a) / (1-γ)`.
pub fn blind_bound(m: &Pomdp, tol: f64) -> Vec<AlphaVector> {
    blind_bound_iters(m, tol, MAX_SWEEPS)
}

/// As [`blind_bound`] with an explicit sweep limit; every iterate is a valid
/// lower bound.
pub fn blind_bound_iters(m: &Pomdp, tol: f64, max_sweeps: usize) -> Vec<AlphaVector> {
    let ns = m.num_states();
    let gamma = m.discount;
    (0..m.num_actions())
        .map(|a| {
            let rmin = (0..ns).map(|s| m.reward(s, a)).fold(f64::INFINITY, f64::min);
            let mut alpha = vec![rmin / (1.0 - gamma); ns];
            for _ in 0..max_sweeps {
                let next: Vec<f64> = (0..ns)
                    .map(|s| {
                        m.reward(s, a) + gamma * m.transition(s, a).iter().map(|&(s2, t)| t * alpha[s2]).sum::<f64>()
                    })
                    .collect();
                let residual = next.iter().zip(&alpha).fold(0.0f64, |r, (x, y)| r.max((x - y).abs()));
                alpha = next;
                if residual <= tol {
                    break;
                }
            }
            AlphaVector::new(alpha, a, Successors::SelfLoop)
        })
        .collect()
}
