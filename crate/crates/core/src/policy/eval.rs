use super::graph::{MixedPolicy, PolicyGraph};
use crate::error::PolicyError;
use crate::model::{Horizon, Pomdp};

const DENSE_LIMIT: usize = 1500;

/// Per-(node, state) one-step data: `(s', z, T·O)` triples.
fn kernel(m: &Pomdp, a: usize, s: usize) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for &(s2, t) in m.transition(s, a) {
        for &(z, o) in m.observation(s2, a) {
            out.push((s2, z, t * o));
        }
    }
    out
}

/// Value of running `g` from its root, per start state. Finite horizons are
/// unrolled; infinite horizons solve the controller's linear system.
pub fn evaluate_fsc_exact(m: &Pomdp, g: &PolicyGraph) -> Result<Vec<f64>, PolicyError> {
    let all = evaluate_fsc_nodes(m, g)?;
    Ok(all[g.root].clone())
}

/// Values for every node of `g`, indexed `[node][state]`.
pub fn evaluate_fsc_nodes(m: &Pomdp, g: &PolicyGraph) -> Result<Vec<Vec<f64>>, PolicyError> {
    g.check(m.num_actions(), m.num_observations())?;
    let ns = m.num_states();
    let nn = g.nodes.len();
    let kernels: Vec<Vec<Vec<(usize, usize, f64)>>> =
        g.nodes.iter().map(|n| (0..ns).map(|s| kernel(m, n.action, s)).collect()).collect();
    let gamma = m.discount;
    let backup = |v: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        (0..nn)
            .map(|n| {
                let node = &g.nodes[n];
                (0..ns)
                    .map(|s| {
                        m.reward(s, node.action)
                            + gamma * kernels[n][s].iter().map(|&(s2, z, p)| p * v[node.next[z]][s2]).sum::<f64>()
                    })
                    .collect()
            })
            .collect()
    };
    match m.horizon {
        Horizon::Finite(h) => {
            let mut v = vec![vec![0.0; ns]; nn];
            for _ in 0..h {
                v = backup(&v);
            }
            Ok(v)
        }
        Horizon::Infinite if gamma >= 1.0 => Err(PolicyError::SingularSystem),
        Horizon::Infinite if nn * ns <= DENSE_LIMIT => solve_dense(m, g, &kernels),
        Horizon::Infinite => {
            let (lo, hi) = m.reward_bounds();
            let span = (hi - lo).abs().max(1e-300) / (1.0 - gamma);
            let mut v = vec![vec![0.0; ns]; nn];
            // contraction: stop once the remaining error is below 1e-12 relative
            loop {
                let next = backup(&v);
                let diff = next
                    .iter()
                    .zip(&v)
                    .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
                    .fold(0.0f64, f64::max);
                v = next;
                if diff * gamma / (1.0 - gamma) <= 1e-12 * (1.0 + span) {
                    return Ok(v);
                }
            }
        }
    }
}

fn solve_dense(
    m: &Pomdp,
    g: &PolicyGraph,
    kernels: &[Vec<Vec<(usize, usize, f64)>>],
) -> Result<Vec<Vec<f64>>, PolicyError> {
    let ns = m.num_states();
    let nn = g.nodes.len();
    let n = nn * ns;
    let idx = |node: usize, s: usize| node * ns + s;
    let mut a = vec![0.0; n * (n + 1)];
    let w = n + 1;
    for node in 0..nn {
        let act = g.nodes[node].action;
        for s in 0..ns {
            let r = idx(node, s);
            a[r * w + r] += 1.0;
            for &(s2, z, p) in &kernels[node][s] {
                a[r * w + idx(g.nodes[node].next[z], s2)] -= m.discount * p;
            }
            a[r * w + n] = m.reward(s, act);
        }
    }
    // Gaussian elimination with partial pivoting
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * w + col].abs().total_cmp(&a[j * w + col].abs())).unwrap();
        if a[piv * w + col].abs() < 1e-13 {
            return Err(PolicyError::SingularSystem);
        }
        if piv != col {
            for j in 0..w {
                a.swap(piv * w + j, col * w + j);
            }
        }
        let p = a[col * w + col];
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = a[row * w + col] / p;
            if f == 0.0 {
                continue;
            }
            for j in col..w {
                a[row * w + j] -= f * a[col * w + j];
            }
        }
    }
    Ok((0..nn).map(|node| (0..ns).map(|s| a[idx(node, s) * w + n] / a[idx(node, s) * w + idx(node, s)]).collect()).collect())
}

/// Weight-averaged component values per start state.
pub fn evaluate_mixed_exact(m: &Pomdp, mp: &MixedPolicy) -> Result<Vec<f64>, PolicyError> {
    let mut out = vec![0.0; m.num_states()];
    for (g, p) in &mp.components {
        for (o, v) in out.iter_mut().zip(evaluate_fsc_exact(m, g)?) {
            *o += p * v;
        }
    }
    Ok(out)
}

/// Expected value from the model's initial belief.
pub fn expected_value(m: &Pomdp, values: &[f64]) -> f64 {
    m.env.initial_belief.dot(values)
}
