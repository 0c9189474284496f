use std::fmt;

use super::{AbPomdp, Belief, Environment, Horizon, MePomdp, Pomdp, Posg, SparseRows, Spaces, sums_to_one};

/// One violated model invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

impl Violation {
    fn new(location: impl Into<String>, message: impl Into<String>) -> Self {
        Violation { location: location.into(), message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

/// Invariant checking. An empty list means the model is well formed.
pub trait Validate {
    fn validate(&self) -> Vec<Violation>;
}

fn check_discount(discount: f64, horizon: Horizon, out: &mut Vec<Violation>) {
    if !(0.0..=1.0).contains(&discount) {
        out.push(Violation::new("discount", format!("{discount} outside [0, 1]")));
    }
    if horizon == Horizon::Infinite && discount >= 1.0 {
        out.push(Violation::new("discount/horizon", "infinite horizon requires discount < 1"));
    }
    if horizon == Horizon::Finite(0) {
        out.push(Violation::new("horizon", "horizon must be positive"));
    }
}

/// Checks that `rows` has `expected` rows, each a distribution over `width` columns.
fn check_rows<F>(rows: &SparseRows, expected: usize, width: usize, label: &str, name_row: F, out: &mut Vec<Violation>)
where
    F: Fn(usize) -> String,
{
    if rows.num_rows() != expected {
        out.push(Violation::new(label, format!("{} rows, expected {expected}", rows.num_rows())));
        return;
    }
    for i in 0..expected {
        let row = rows.row(i);
        if let Some(&(j, p)) = row.iter().find(|&&(j, p)| j >= width || !p.is_finite() || p < 0.0) {
            out.push(Violation::new(format!("{label} {}", name_row(i)), format!("bad entry ({j}, {p})")));
            continue;
        }
        let sum = rows.row_sum(i);
        if !sums_to_one(sum) {
            out.push(Violation::new(format!("{label} {}", name_row(i)), format!("row sums to {sum}")));
        }
    }
}

fn check_belief(b: &Belief, width: usize, label: &str, out: &mut Vec<Violation>) {
    if b.len() != width {
        out.push(Violation::new(label, format!("length {} but {width} states", b.len())));
        return;
    }
    let sum: f64 = b.probs().iter().sum();
    if b.probs().iter().any(|p| !p.is_finite() || *p < 0.0) || !sums_to_one(sum) {
        out.push(Violation::new(label, format!("not a distribution (sum {sum})")));
    }
}

fn check_available(av: &Option<Vec<Vec<usize>>>, ns: usize, na: usize, out: &mut Vec<Violation>) {
    let Some(av) = av else { return };
    if av.len() != ns {
        out.push(Violation::new("available_actions", format!("{} entries for {ns} states", av.len())));
        return;
    }
    for (s, acts) in av.iter().enumerate() {
        if acts.is_empty() {
            out.push(Violation::new(format!("available_actions s{s}"), "empty action set"));
        } else if let Some(a) = acts.iter().find(|&&a| a >= na) {
            out.push(Violation::new(format!("available_actions s{s}"), format!("action {a} out of range")));
        }
    }
}

fn check_env(spaces: &Spaces, env: &Environment, prefix: &str, out: &mut Vec<Violation>) {
    let (ns, na, nz) = (spaces.num_states(), spaces.num_actions(), spaces.num_observations());
    let pair = |i: usize| format!("({},{})", spaces.states[i / na], spaces.actions[i % na]);
    check_rows(&env.transition, ns * na, ns, &format!("{prefix}transition"), pair, out);
    check_rows(&env.observation, ns * na, nz, &format!("{prefix}observation"), pair, out);
    if env.reward.len() != ns * na {
        out.push(Violation::new(format!("{prefix}reward"), format!("{} entries, expected {}", env.reward.len(), ns * na)));
    } else if let Some(i) = env.reward.iter().position(|r| !r.is_finite()) {
        out.push(Violation::new(format!("{prefix}reward {}", pair(i)), "non-finite reward"));
    }
    check_belief(&env.initial_belief, ns, &format!("{prefix}initial_belief"), out);
}

fn check_spaces(spaces: &Spaces, out: &mut Vec<Violation>) {
    for (label, names) in [("states", &spaces.states), ("actions", &spaces.actions), ("observations", &spaces.observations)] {
        if names.is_empty() {
            out.push(Violation::new(label, "empty index space"));
        }
        let mut sorted: Vec<&String> = names.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            out.push(Violation::new(label, "duplicate names"));
        }
    }
}

impl Validate for Pomdp {
    fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        check_spaces(&self.spaces, &mut out);
        check_env(&self.spaces, &self.env, "", &mut out);
        check_discount(self.discount, self.horizon, &mut out);
        check_available(&self.available_actions, self.num_states(), self.num_actions(), &mut out);
        out
    }
}

impl Validate for MePomdp {
    fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        check_spaces(&self.spaces, &mut out);
        if self.envs.is_empty() {
            out.push(Violation::new("environments", "at least one environment required"));
        }
        for (i, env) in self.envs.iter().enumerate() {
            check_env(&self.spaces, env, &format!("env {i} "), &mut out);
        }
        check_discount(self.discount, self.horizon, &mut out);
        check_available(&self.available_actions, self.spaces.num_states(), self.spaces.num_actions(), &mut out);
        out
    }
}

impl Validate for AbPomdp {
    fn validate(&self) -> Vec<Violation> {
        let mut out = self.base.validate();
        if self.belief_support.is_empty() {
            out.push(Violation::new("belief_support", "empty"));
        }
        if let Some(q) = self.belief_support.iter().find(|&&q| q >= self.base.num_states()) {
            out.push(Violation::new("belief_support", format!("state {q} out of range")));
        }
        out
    }
}

impl Validate for Posg {
    fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let (ns, n1, n2, nz) =
            (self.states.len(), self.agent_actions.len(), self.nature_actions.len(), self.observations.len());
        for (label, len) in [("states", ns), ("agent_actions", n1), ("nature_actions", n2), ("observations", nz)] {
            if len == 0 {
                out.push(Violation::new(label, "empty index space"));
            }
        }
        let triple = |i: usize| {
            let (s, rest) = (i / (n1 * n2), i % (n1 * n2));
            format!("({},{},{})", self.states[s], self.agent_actions[rest / n2], self.nature_actions[rest % n2])
        };
        check_rows(&self.transition, ns * n1 * n2, ns, "transition", triple, &mut out);
        check_rows(&self.observation, ns * n1 * n2, nz, "observation", triple, &mut out);
        if self.reward.len() != ns * n1 * n2 {
            out.push(Violation::new("reward", "wrong table size"));
        }
        check_belief(&self.initial_belief, ns, "initial_belief", &mut out);
        check_discount(self.discount, self.horizon, &mut out);
        check_available(&self.agent_available_actions, ns, n1, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Spaces;

    fn model_with_row(p: f64) -> Pomdp {
        Pomdp::tabulate(
            Spaces::indexed(2, 1, 1),
            move |s, _| if s == 0 { vec![(0, p), (1, 1.0 - p - (1.0 - p) * 0.0)] } else { vec![(1, 1.0)] },
            |_, _| vec![(0, 1.0)],
            |_, _| 0.0,
            Belief::point(2, 0),
            0.9,
            Horizon::Infinite,
        )
    }

    #[test]
    fn tolerance_boundary_accepted() {
        let mut m = model_with_row(0.5);
        m.env.transition = SparseRows::from_rows(vec![vec![(0, 0.5), (1, 0.499999999)], vec![(1, 1.0)]]);
        assert!(m.validate().is_empty(), "{:?}", m.validate());
    }

    #[test]
    fn broken_row_named() {
        let mut m = model_with_row(0.5);
        m.env.transition = SparseRows::from_rows(vec![vec![(0, 0.5), (1, 0.4)], vec![(1, 1.0)]]);
        let v = m.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].location.contains("(s0,a0)"), "{}", v[0]);
    }

    #[test]
    fn undiscounted_infinite_horizon() {
        let mut m = model_with_row(0.5);
        m.discount = 1.0;
        let v = m.validate();
        assert!(v.iter().any(|x| x.location == "discount/horizon"));
        m.horizon = Horizon::Finite(3);
        assert!(m.validate().is_empty());
    }

    #[test]
    fn empty_available_set() {
        let mut m = model_with_row(0.5);
        m.available_actions = Some(vec![vec![0], vec![]]);
        assert_eq!(m.validate().len(), 1);
    }
}
