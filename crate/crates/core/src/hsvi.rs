//! Heuristic search value iteration with restarts at nature's worst-case
//! belief, plus the exact finite-horizon pipeline.

use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;

use crate::bounds::{
    backup, blind_bound, exact_gamma_with, fib_bound, state_blocks, ExactOptions, GammaStack, LowerBound, UpperBound,
    DEFAULT_BOUND_TOL,
};
use crate::error::SolveError;
use crate::lp::{agent_lp, nature_lp, AgentSolution, NatureSolution};
use crate::model::{successor_beliefs, AbPomdp, Belief, Horizon, MePomdp, Pomdp};
use crate::policy::{agent_policy, MixedPolicy};
use crate::transforms::{lift_mixed, me_to_ab, TransformRecord};

/// Default wall-clock budget in seconds.
pub const DEFAULT_TIME_LIMIT_S: f64 = 3600.0;

/// Seconds charged per explore step under [`Clock::Logical`].
pub const DEFAULT_TICK_S: f64 = 1e-4;

/// How elapsed time is measured. The logical clock counts explore steps,
/// which makes traces and time limits reproducible.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Clock {
    Wall,
    Logical { tick_s: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveConfig {
    pub epsilon: f64,
    pub time_limit_s: f64,
    /// `None` picks the depth past which `ε γ^{-t}` exceeds the reward span.
    pub max_depth: Option<usize>,
    pub rng_seed: u64,
    pub trace_path: Option<PathBuf>,
    /// Choose observations by `P(z)·excess` rather than by raw gap.
    pub weighted_excess: bool,
    pub clock: Clock,
    pub max_iterations: Option<usize>,
}

impl SolveConfig {
    pub fn new(epsilon: f64) -> Self {
        SolveConfig {
            epsilon,
            time_limit_s: DEFAULT_TIME_LIMIT_S,
            max_depth: None,
            rng_seed: 0,
            trace_path: None,
            weighted_excess: true,
            clock: Clock::Wall,
            max_iterations: None,
        }
    }

    /// Config with `ε` from [`default_epsilon`].
    pub fn for_rewards(rewards: &[f64]) -> Self {
        SolveConfig::new(default_epsilon(rewards))
    }

    fn check(&self) -> Result<(), SolveError> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(SolveError::Config("epsilon must be positive".into()));
        }
        if !(self.time_limit_s > 0.0) {
            return Err(SolveError::Config("time limit must be positive".into()));
        }
        if let Clock::Logical { tick_s } = self.clock {
            if !(tick_s > 0.0) {
                return Err(SolveError::Config("logical tick must be positive".into()));
            }
        }
        Ok(())
    }
}

/// `0.1 · min{|r| : r ≠ 0}`, or 0.1 when every reward is zero.
pub fn default_epsilon(rewards: &[f64]) -> f64 {
    let m = rewards.iter().map(|r| r.abs()).filter(|&r| r > 0.0).fold(f64::INFINITY, f64::min);
    if m.is_finite() {
        0.1 * m
    } else {
        0.1
    }
}

/// `⌈log_γ(ε(1−γ)/(U−L))⌉ + 5`.
pub fn default_max_depth(m: &Pomdp, epsilon: f64) -> usize {
    let (lo, hi) = m.reward_bounds();
    let gamma = m.discount;
    let span = hi - lo;
    if span <= 0.0 {
        return 5;
    }
    let ratio = epsilon * (1.0 - gamma) / span;
    if ratio >= 1.0 {
        return 5;
    }
    (ratio.ln() / gamma.ln()).ceil() as usize + 5
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub iter: usize,
    pub elapsed_s: f64,
    pub lb: f64,
    pub ub: f64,
    pub gap: f64,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub lower: LowerBound,
    pub upper: UpperBound,
    pub worst_belief: Belief,
    pub lb_value: f64,
    pub ub_value: f64,
    pub converged: bool,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub trace: Vec<TraceRow>,
    pub depth_limit_hits: usize,
    /// Agent mixture over `candidates` (indices into `lower`).
    pub agent: AgentSolution,
    pub candidates: Vec<usize>,
}

impl SolveResult {
    pub fn gap(&self) -> f64 {
        self.ub_value - self.lb_value
    }

    /// The agent's mixture of extracted controllers.
    pub fn policy(&self, num_observations: usize) -> Result<MixedPolicy, SolveError> {
        Ok(agent_policy(&self.lower, &self.candidates, &self.agent, num_observations)?)
    }
}

/// `ub(b) − max_α α·b`.
pub fn gap(ub: &UpperBound, lb: &LowerBound, b: &Belief) -> f64 {
    ub.value(b) - lb.value(b)
}

struct Timer {
    start: Instant,
    clock: Clock,
    ticks: u64,
}

impl Timer {
    fn new(clock: Clock) -> Self {
        Timer { start: Instant::now(), clock, ticks: 0 }
    }

    fn tick(&mut self) {
        self.ticks += 1;
    }

    fn elapsed(&self) -> f64 {
        match self.clock {
            Clock::Wall => self.start.elapsed().as_secs_f64(),
            Clock::Logical { tick_s } => self.ticks as f64 * tick_s,
        }
    }
}

/// Search state: one solve owns its bounds.
pub struct Explorer<'a> {
    m: &'a Pomdp,
    pub lower: LowerBound,
    pub upper: UpperBound,
    epsilon: f64,
    max_depth: usize,
    weighted: bool,
    time_limit_s: f64,
    timer: Timer,
    timed_out: bool,
    pub depth_limit_hits: usize,
    /// Trial roots; kept as pruning witnesses next to the upper-bound points.
    roots: Vec<Belief>,
    pruned_active: usize,
}

impl<'a> Explorer<'a> {
    /// Bounds from the fast informed bound and the blind policies.
    pub fn new(m: &'a Pomdp, cfg: &SolveConfig) -> Self {
        let upper = UpperBound::with_blocks(fib_bound(m, DEFAULT_BOUND_TOL), state_blocks(m));
        let lower = LowerBound::from_vectors(blind_bound(m, DEFAULT_BOUND_TOL));
        Explorer::with_bounds(m, cfg, lower, upper)
    }

    pub fn with_bounds(m: &'a Pomdp, cfg: &SolveConfig, lower: LowerBound, upper: UpperBound) -> Self {
        Explorer {
            m,
            lower,
            upper,
            epsilon: cfg.epsilon,
            max_depth: cfg.max_depth.unwrap_or_else(|| default_max_depth(m, cfg.epsilon)),
            weighted: cfg.weighted_excess,
            time_limit_s: cfg.time_limit_s,
            timer: Timer::new(cfg.clock),
            timed_out: false,
            depth_limit_hits: 0,
            roots: Vec::new(),
            pruned_active: 0,
        }
    }

    pub fn gap(&self, b: &Belief) -> f64 {
        gap(&self.upper, &self.lower, b)
    }

    pub fn elapsed(&self) -> f64 {
        self.timer.elapsed()
    }

    pub fn timed_out(&self) -> bool {
        self.timed_out
    }

    /// Upper-bound lookahead per admissible action: `(action, value)`.
    fn lookahead(&self, b: &Belief) -> Vec<(usize, f64, Vec<crate::model::Successor>)> {
        let m = self.m;
        m.admissible_actions(b.support().iter().copied())
            .into_iter()
            .map(|a| {
                let r: f64 = b.iter().map(|(s, p)| p * m.reward(s, a)).sum();
                let succ = successor_beliefs(m, b, a);
                let cont: f64 = succ.iter().map(|n| n.prob * self.upper.value(&n.belief)).sum();
                (a, r + m.discount * cont, succ)
            })
            .collect()
    }

    /// Drops lower-bound vectors that are not the best at any stored upper
    /// bound point, corner or trial root.
    pub fn prune_lower(&mut self) {
        let n = self.m.num_states();
        let corners: Vec<Belief> = (0..n).map(|s| Belief::point(n, s)).collect();
        let witnesses = self.upper.points().map(|(b, _)| b).chain(&corners).chain(&self.roots);
        let dropped = self.lower.retain_best_at(witnesses);
        self.pruned_active = self.lower.num_active();
        log::debug!("lower bound pruning dropped {dropped}, {} active", self.pruned_active);
    }

    /// One depth-first trial from `b` at depth `t`.
    pub fn explore(&mut self, b: &Belief, t: usize) {
        if t == 0 && !self.roots.contains(b) {
            self.roots.push(b.clone());
        }
        if self.timed_out || self.timer.elapsed() >= self.time_limit_s {
            self.timed_out = true;
            return;
        }
        self.timer.tick();
        let gamma = self.m.discount;
        let threshold = self.epsilon * gamma.powi(-(t as i32));
        if self.gap(b) <= threshold {
            return;
        }
        if t > self.max_depth {
            self.depth_limit_hits += 1;
            log::debug!("depth limit {} reached", self.max_depth);
            return;
        }
        let looks = self.lookahead(b);
        let best = looks
            .iter()
            .enumerate()
            .fold(None::<(usize, f64)>, |acc, (i, l)| match acc {
                Some((_, v)) if v >= l.1 => acc,
                _ => Some((i, l.1)),
            })
            .map(|(i, _)| i);
        let Some(best) = best else { return };
        let next_threshold = threshold / gamma;
        let mut pick: Option<(usize, f64)> = None;
        for (k, n) in looks[best].2.iter().enumerate() {
            let excess = self.gap(&n.belief) - next_threshold;
            let score = if self.weighted { n.prob * excess } else { excess + next_threshold };
            if pick.is_none_or(|(_, v)| score > v) {
                pick = Some((k, score));
            }
        }
        if let Some((k, _)) = pick {
            let child = looks[best].2[k].belief.clone();
            self.explore(&child, t + 1);
        }
        self.update(b);
    }

    /// Point backup of both bounds at `b`, and of the upper bound at each
    /// per-block part of `b`.
    pub fn update(&mut self, b: &Belief) {
        let alpha = backup(self.m, &self.lower, b);
        if self.lower.insert(alpha).added && self.lower.num_active() > 2 * self.pruned_active + 64 {
            self.prune_lower();
        }
        for (_, part) in self.upper.components(b) {
            self.update_upper(&part);
        }
        self.update_upper(b);
    }

    fn update_upper(&mut self, b: &Belief) {
        let v = self.lookahead(b).iter().map(|l| l.1).fold(f64::NEG_INFINITY, f64::max);
        self.upper.insert(b, v);
    }
}

fn check_discounted(m: &Pomdp) -> Result<(), SolveError> {
    if !(m.discount > 0.0 && m.discount < 1.0) {
        return Err(SolveError::Config("heuristic search needs a discount in (0,1)".into()));
    }
    if m.horizon != Horizon::Infinite {
        return Err(SolveError::Config("heuristic search needs an infinite horizon; use the exact solver".into()));
    }
    Ok(())
}

fn active_vectors(lb: &LowerBound) -> (Vec<usize>, Vec<&[f64]>) {
    let idx: Vec<usize> = lb.active_indices().collect();
    let vecs = idx.iter().map(|&i| lb.vector(i).values.as_slice()).collect();
    (idx, vecs)
}

/// Heuristic search with worst-case belief restarts over `Δ(Q)`. A time-out
/// returns the partial bounds with `converged = false`.
pub fn ab_hsvi(m: &AbPomdp, cfg: &SolveConfig) -> Result<SolveResult, SolveError> {
    cfg.check()?;
    let p = &m.base;
    check_discounted(p)?;
    let q = &m.belief_support;
    let mut ex = Explorer::new(p, cfg);
    ex.upper.set_hull_face(q.clone());
    let mut trace = Vec::new();
    let mut iterations = 0;
    let (belief, lb_value, ub_value, converged) = loop {
        let (_, vecs) = active_vectors(&ex.lower);
        let nature: NatureSolution = nature_lp(&vecs, q)?;
        let b = nature.belief;
        let lbv = ex.lower.value(&b);
        let ubv = ex.upper.value(&b);
        iterations += 1;
        trace.push(TraceRow { iter: iterations, elapsed_s: ex.elapsed(), lb: lbv, ub: ubv, gap: ubv - lbv });
        log::info!("iter {iterations}: lb {lbv:.6} ub {ubv:.6}");
        if ubv - lbv < cfg.epsilon {
            break (b, lbv, ubv, true);
        }
        let capped = cfg.max_iterations.is_some_and(|k| iterations >= k);
        if ex.timed_out() || ex.elapsed() >= cfg.time_limit_s || capped {
            break (b, lbv, ubv, false);
        }
        ex.explore(&b, 0);
    };
    let (candidates, vecs) = active_vectors(&ex.lower);
    let agent = agent_lp(&vecs, q)?;
    let result = SolveResult {
        wall_time_s: ex.elapsed(),
        depth_limit_hits: ex.depth_limit_hits,
        lower: ex.lower,
        upper: ex.upper,
        worst_belief: belief,
        lb_value,
        ub_value,
        converged,
        iterations,
        trace,
        agent,
        candidates,
    };
    if let Some(path) = &cfg.trace_path {
        write_trace(path, &result.trace)?;
    }
    Ok(result)
}

/// Plain heuristic search from one belief; the single-state-set case.
pub fn hsvi_from(m: &Pomdp, b: &Belief, cfg: &SolveConfig) -> Result<(f64, f64, LowerBound, UpperBound), SolveError> {
    cfg.check()?;
    check_discounted(m)?;
    let mut ex = Explorer::new(m, cfg);
    while ex.gap(b) >= cfg.epsilon && !ex.timed_out() {
        ex.explore(b, 0);
    }
    Ok((ex.lower.value(b), ex.upper.value(b), ex.lower, ex.upper))
}

#[derive(Clone, Debug)]
pub struct ExactSolution {
    pub value: f64,
    pub nature: NatureSolution,
    pub agent: AgentSolution,
    pub stack: GammaStack,
    /// Flattened stack; `candidates` are the indices of `Γ_H` in it.
    pub lower: LowerBound,
    pub candidates: Vec<usize>,
}

impl ExactSolution {
    pub fn policy(&self, num_observations: usize) -> Result<MixedPolicy, SolveError> {
        Ok(agent_policy(&self.lower, &self.candidates, &self.agent, num_observations)?)
    }
}

/// Exact robust value at horizon `h` from the pruned vector sets and the two
/// matrix-game LPs over `Q`.
pub fn solve_exact(m: &AbPomdp, h: u32) -> Result<ExactSolution, SolveError> {
    let opts = ExactOptions { support: Some(m.belief_support.clone()), ..ExactOptions::default() };
    solve_exact_with(m, h, &opts)
}

pub fn solve_exact_with(m: &AbPomdp, h: u32, opts: &ExactOptions) -> Result<ExactSolution, SolveError> {
    let stack = exact_gamma_with(&m.base, h, opts)?;
    let (lower, candidates) = stack.flatten();
    let top: Vec<&[f64]> = stack.top().iter().map(|a| a.values.as_slice()).collect();
    let nature = nature_lp(&top, &m.belief_support)?;
    let agent = agent_lp(&top, &m.belief_support)?;
    Ok(ExactSolution { value: nature.value, nature, agent, stack, lower, candidates })
}

/// Exact solve of an ME-POMDP through the sentinel reduction, with the
/// mixture lifted back to the original model.
#[derive(Clone, Debug)]
pub struct MeExact {
    pub solution: ExactSolution,
    pub ab: AbPomdp,
    pub record: TransformRecord,
    pub policy: MixedPolicy,
}

pub fn solve_me_exact(m: &MePomdp, h: u32) -> Result<MeExact, SolveError> {
    let (ab, record) = me_to_ab(m)?;
    let solution = solve_exact(&ab, h + 1)?;
    let policy = lift_mixed(&record, &solution.policy(ab.base.num_observations())?)?;
    Ok(MeExact { solution, ab, record, policy })
}

#[derive(Clone, Debug)]
pub struct MeHsvi {
    pub result: SolveResult,
    pub ab: AbPomdp,
    pub record: TransformRecord,
    pub policy: MixedPolicy,
}

pub fn solve_me(m: &MePomdp, cfg: &SolveConfig) -> Result<MeHsvi, SolveError> {
    let (ab, record) = me_to_ab(m)?;
    let result = ab_hsvi(&ab, cfg)?;
    let policy = lift_mixed(&record, &result.policy(ab.base.num_observations())?)?;
    Ok(MeHsvi { result, ab, record, policy })
}

/// `%.9g`-style rendering.
pub fn fmt_g9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.8e}");
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if !(-5..9).contains(&exp) {
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mant}e{sign}{:02}", exp.abs());
    }
    let decimals = (8 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut out = String::from("iter,elapsed_s,lb,ub,gap\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{}\n", r.iter, fmt_g9(r.elapsed_s), fmt_g9(r.lb), fmt_g9(r.ub), fmt_g9(r.gap)));
    }
    out
}

pub fn write_trace(path: &std::path::Path, rows: &[TraceRow]) -> Result<(), SolveError> {
    std::fs::write(path, trace_csv(rows)).map_err(|e| SolveError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{AlphaVector, Successors};
    use crate::model::{Environment, Spaces};

    #[test]
    fn g9_formatting() {
        assert_eq!(fmt_g9(0.0), "0");
        assert_eq!(fmt_g9(1.5), "1.5");
        assert_eq!(fmt_g9(16.5312345678), "16.5312346");
        assert_eq!(fmt_g9(1e-7), "1e-07");
        assert_eq!(fmt_g9(123456789.0), "123456789");
        assert_eq!(fmt_g9(1234567890.0), "1.23456789e+09");
        assert_eq!(fmt_g9(-0.00012), "-0.00012");
        assert_eq!(fmt_g9(9.9999999999), "10");
    }

    #[test]
    fn gap_of_corner_bound() {
        let ub = UpperBound::new(vec![5.0, 5.0]);
        let lb = LowerBound::from_vectors(vec![AlphaVector::new(vec![0.0, 0.0], 0, Successors::SelfLoop)]);
        for p in [0.0, 0.3, 1.0] {
            let b = Belief::new(vec![p, 1.0 - p]).unwrap();
            assert!((gap(&ub, &lb, &b) - 5.0).abs() < 1e-12);
        }
        let lb2 = LowerBound::from_vectors(vec![AlphaVector::new(vec![5.0, 5.0], 0, Successors::SelfLoop)]);
        assert!(gap(&ub, &lb2, &Belief::uniform(2)).abs() < 1e-9);
    }

    fn single_state() -> Pomdp {
        Pomdp::tabulate(
            Spaces::indexed(1, 2, 1),
            |_, _| vec![(0, 1.0)],
            |_, _| vec![(0, 1.0)],
            |_, a| [1.0, 2.0][a],
            Belief::point(1, 0),
            0.9,
            Horizon::Infinite,
        )
    }

    #[test]
    fn single_state_converges_fast() {
        let m = single_state();
        let (lo, hi, _, _) = hsvi_from(&m, &Belief::point(1, 0), &SolveConfig::new(0.01)).unwrap();
        assert!(lo <= 20.0 + 1e-6 && hi >= 20.0 - 1e-6 && hi - lo < 0.01);
    }

    #[test]
    fn converged_explore_is_noop() {
        let m = single_state();
        let cfg = SolveConfig::new(0.01);
        let mut ex = Explorer::new(&m, &cfg);
        let b = Belief::point(1, 0);
        while ex.gap(&b) >= 0.01 {
            ex.explore(&b, 0);
        }
        let before = (ex.lower.len(), ex.upper.num_points(), ex.upper.corner_values().to_vec());
        ex.explore(&b, 0);
        assert_eq!(before, (ex.lower.len(), ex.upper.num_points(), ex.upper.corner_values().to_vec()));
    }

    fn coin() -> AbPomdp {
        // guessing game: reward 1 for naming the state, noisy peek action
        let base = Pomdp::tabulate(
            Spaces::indexed(2, 3, 2),
            |s, _| vec![(s, 1.0)],
            |s2, a| if a == 2 { vec![(s2, 0.8), (1 - s2, 0.2)] } else { vec![(0, 0.5), (1, 0.5)] },
            |s, a| if a == 2 { 0.0 } else if a == s { 1.0 } else { -1.0 },
            Belief::uniform(2),
            0.9,
            Horizon::Infinite,
        );
        AbPomdp::new(base, vec![0, 1]).unwrap()
    }

    #[test]
    fn robust_bounds_bracket_exact() {
        let m = coin();
        let cfg = SolveConfig { clock: Clock::Logical { tick_s: DEFAULT_TICK_S }, ..SolveConfig::new(0.05) };
        let r = ab_hsvi(&m, &cfg).unwrap();
        assert!(r.converged);
        assert!(r.ub_value - r.lb_value <= 0.05);
        let mut fin = m.clone();
        fin.base.horizon = Horizon::Finite(120);
        let opts = ExactOptions { support: Some(vec![0, 1]), lp_tol: Some(1e-7), ..ExactOptions::default() };
        let exact = solve_exact_with(&fin, 120, &opts).unwrap().value;
        assert!(r.lb_value - 1e-3 <= exact && exact <= r.ub_value + 1e-3, "{} {} {}", r.lb_value, exact, r.ub_value);
        assert!(r.trace.windows(2).all(|w| w[0].elapsed_s <= w[1].elapsed_s));
    }

    #[test]
    fn deterministic_traces() {
        let cfg = SolveConfig { clock: Clock::Logical { tick_s: DEFAULT_TICK_S }, ..SolveConfig::new(0.05) };
        let a = ab_hsvi(&coin(), &cfg).unwrap();
        let b = ab_hsvi(&coin(), &cfg).unwrap();
        assert_eq!(trace_csv(&a.trace), trace_csv(&b.trace));
    }

    #[test]
    fn time_limit_gives_partial_result() {
        let cfg = SolveConfig {
            clock: Clock::Logical { tick_s: 1.0 },
            time_limit_s: 2.0,
            ..SolveConfig::new(1e-6)
        };
        let r = ab_hsvi(&coin(), &cfg).unwrap();
        assert!(!r.converged);
        assert!(!r.trace.is_empty());
        assert!(r.lb_value <= r.ub_value + 1e-7);
    }

    #[test]
    fn one_step_matrix_game() {
        let base = Pomdp::tabulate(
            Spaces::indexed(2, 2, 1),
            |s, _| vec![(s, 1.0)],
            |_, _| vec![(0, 1.0)],
            |s, a| if s == a { 1.0 } else { -1.0 },
            Belief::uniform(2),
            0.9,
            Horizon::Finite(1),
        );
        let sol = solve_exact(&AbPomdp::new(base, vec![0, 1]).unwrap(), 1).unwrap();
        assert!(sol.value.abs() < 1e-9);
        assert!((sol.agent.weights[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn single_env_matches_plain_solve() {
        let spaces = Spaces::indexed(2, 2, 2);
        let env = Environment::tabulate(
            &spaces,
            |s, a| if a == 0 { vec![(s, 0.9), (1 - s, 0.1)] } else { vec![(0, 0.5), (1, 0.5)] },
            |s2, _| vec![(s2, 0.85), (1 - s2, 0.15)],
            |s, a| [[1.0, -0.5], [-1.0, 0.5]][s][a],
            Belief::new(vec![0.3, 0.7]).unwrap(),
        );
        let me = MePomdp::new(spaces.clone(), vec![env.clone()], 0.9, Horizon::Finite(3));
        let robust = solve_me_exact(&me, 3).unwrap().solution.value;
        let plain = Pomdp::new(spaces, env, 0.9, Horizon::Finite(3));
        let direct = crate::bounds::exact_gamma(&plain, 3, true).unwrap().value(&plain.env.initial_belief);
        assert!((robust - direct).abs() < 1e-9, "{robust} vs {direct}");
    }
}
