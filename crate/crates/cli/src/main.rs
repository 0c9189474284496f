//! `robust-pomdp`: generate, inspect, transform, solve and evaluate robust
//! POMDP models stored as JSON.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use robust_pomdp::benchmarks::{
    bird_fixture, gen_bird, gen_rocksample, pennies_fixture, BirdParams, BirdVariant, Formulation, Placement,
    RockConstants, RockSampleModel, RockSampleParams,
};
use robust_pomdp::error::GenError;
use robust_pomdp::format::{emit_model, mixed_to_value, parse_model, parse_policy, Model, ModelFile};
use robust_pomdp::hsvi::{
    fmt_g9, solve_exact, solve_me, solve_me_exact, write_trace, ab_hsvi, Clock, SolveConfig, TraceRow,
    DEFAULT_TICK_S, DEFAULT_TIME_LIMIT_S,
};
use robust_pomdp::model::{Belief, Horizon, MePomdp, Pomdp, Spaces};
use robust_pomdp::policy::{evaluate_mixed_exact, expected_value, simulate, MixedPolicy};
use robust_pomdp::transforms::{ab_to_pomemdp, ab_to_posg, me_to_ab, pomemdp_to_mo, TransformRecord};

const EXIT_INPUT: u8 = 2;
const EXIT_TIME_LIMIT: u8 = 3;

#[derive(Parser)]
#[command(name = "robust-pomdp", version, about = "Robust planning for multi-environment POMDPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a benchmark model.
    Gen(GenArgs),
    /// Solve a model, writing result, trace and policy files.
    Solve(SolveArgs),
    /// Apply one of the model reductions.
    Transform(TransformArgs),
    /// Evaluate a policy in every environment.
    Eval(EvalArgs),
    /// Print sizes, structure flags and validation status.
    Info(InfoArgs),
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("family").required(true).args(["bird", "rocksample", "pennies"]))]
struct GenArgs {
    #[arg(long)]
    bird: bool,
    #[arg(long)]
    rocksample: bool,
    /// The two-action matrix game where only mixing is safe.
    #[arg(long)]
    pennies: bool,
    /// The three-state, three-expert bird instance.
    #[arg(long, requires = "bird")]
    fixture: bool,
    #[arg(short = 's', long, default_value_t = 3)]
    states: usize,
    #[arg(short = 'a', long, default_value_t = 2)]
    actions: usize,
    #[arg(short = 'n', long, default_value_t = 3)]
    experts: usize,
    #[arg(long, value_enum, default_value_t = VariantArg::MePomdp)]
    variant: VariantArg,
    /// Grid side.
    #[arg(short = 'm', long, default_value_t = 2)]
    grid: usize,
    /// Good rocks.
    #[arg(short = 'g', long, default_value_t = 1)]
    good: usize,
    /// Total rocks.
    #[arg(short = 't', long, default_value_t = 2)]
    rocks: usize,
    #[arg(long, value_enum, default_value_t = PlacementArg::Nearby)]
    placement: PlacementArg,
    #[arg(long, value_enum, default_value_t = FormulationArg::Ab)]
    formulation: FormulationArg,
    /// Sensor half-efficiency distance (default: grid / 2).
    #[arg(long)]
    half_distance: Option<f64>,
    #[arg(long)]
    exit_reward: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    MePomdp,
    PoMemdp,
    MoPomdp,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlacementArg {
    Nearby,
    FarAway,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormulationArg {
    Ab,
    Me,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    model: PathBuf,
    /// Target gap (default: 0.1 × smallest nonzero |reward|).
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TIME_LIMIT_S)]
    time_limit: f64,
    /// Enumerate α-vectors to a finite horizon instead of searching.
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    horizon: Option<u32>,
    /// Trace file name (default: trace.csv in the output directory).
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Measure time in search steps instead of seconds, so reruns match byte
    /// for byte.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Posg,
    Ab,
    Pomemdp,
    Mo,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, value_enum)]
    to: Target,
    #[arg(long)]
    out: PathBuf,
    /// Record file (default: the output path with `.record.json`).
    #[arg(long)]
    record: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    policy: PathBuf,
    /// Exact evaluation (the default when no episodes are asked for).
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    episodes: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Steps per simulated episode on infinite horizons.
    #[arg(long, default_value_t = 200)]
    horizon_cap: usize,
    /// Per-environment optimal policies, in environment order, for the
    /// misassumption matrix.
    #[arg(long)]
    optimal: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InfoArgs {
    #[arg(long)]
    model: PathBuf,
}

struct Failure {
    code: u8,
    msg: String,
}

type Outcome = Result<u8, Failure>;

fn input_err(msg: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_INPUT, msg: msg.to_string() }
}

fn internal(msg: impl std::fmt::Display) -> Failure {
    Failure { code: 1, msg: msg.to_string() }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ROBUST_POMDP_LOG", "error")).init();
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Gen(a) => cmd_gen(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Transform(a) => cmd_transform(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Info(a) => cmd_info(&a),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| internal(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| internal(format!("{}: {e}", path.display())))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

/// Reads and validates; every failure here is an input error.
fn load(path: &Path) -> Result<ModelFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    let mf = parse_model(&text).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    let violations = mf.model.validate();
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(|v| format!("  {v}")).collect();
        return Err(input_err(format!("{}: invalid model\n{}", path.display(), list.join("\n"))));
    }
    Ok(mf)
}

fn summary(m: &Model) -> String {
    match m {
        Model::MePomdp(m) => format!(
            "{} states, {} envs, {} actions, {} obs",
            m.spaces.num_states(),
            m.num_envs(),
            m.spaces.num_actions(),
            m.spaces.num_observations()
        ),
        Model::Pomdp(p) => {
            format!("{} states, {} actions, {} obs", p.num_states(), p.num_actions(), p.num_observations())
        }
        Model::AbPomdp(m) => format!(
            "{} states, {} initial states, {} actions, {} obs",
            m.base.num_states(),
            m.belief_support.len(),
            m.base.num_actions(),
            m.base.num_observations()
        ),
        Model::Posg(g) => format!(
            "{} states, {} agent actions, {} nature actions, {} obs",
            g.states.len(),
            g.agent_actions.len(),
            g.nature_actions.len(),
            g.observations.len()
        ),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn cmd_info(a: &InfoArgs) -> Outcome {
    let text = std::fs::read_to_string(&a.model).map_err(|e| input_err(format!("{}: {e}", a.model.display())))?;
    let mf = parse_model(&text).map_err(|e| input_err(format!("{}: {e}", a.model.display())))?;
    let mut line = format!("{}, {}", mf.model.kind(), summary(&mf.model));
    if let Model::MePomdp(m) = &mf.model {
        line += &format!(", PO-MEMDP: {}, MO-POMDP: {}", yes_no(m.is_po_memdp()), yes_no(m.is_mo_pomdp()));
    }
    println!("{line}");
    let violations = mf.model.validate();
    if violations.is_empty() {
        println!("valid");
        Ok(0)
    } else {
        println!("invalid:");
        for v in &violations {
            println!("  {v}");
        }
        Ok(EXIT_INPUT)
    }
}

fn flag_for(name: &str) -> &str {
    match name {
        "num_states" => "--states",
        "num_actions" => "--actions",
        "num_experts" => "--experts",
        "grid" => "-m/--grid",
        "good" => "-g/--good",
        "rocks" => "-t/--rocks",
        "placement" => "--placement",
        other => other,
    }
}

fn gen_err(e: GenError) -> Failure {
    match e {
        GenError::Param { name, reason } => input_err(format!("invalid {}: {reason}", flag_for(name))),
        other => input_err(other),
    }
}

fn cmd_gen(a: &GenArgs) -> Outcome {
    let (model, params) = if a.pennies {
        (Model::MePomdp(pennies_fixture()), json!({ "generator": "pennies" }))
    } else if a.bird && a.fixture {
        (Model::MePomdp(bird_fixture()), json!({ "generator": "bird", "fixture": true }))
    } else if a.bird {
        let variant = match a.variant {
            VariantArg::MePomdp => BirdVariant::MePomdp,
            VariantArg::PoMemdp => BirdVariant::PoMemdp,
            VariantArg::MoPomdp => BirdVariant::MoPomdp,
        };
        let p = BirdParams { num_states: a.states, num_actions: a.actions, num_experts: a.experts, seed: a.seed, variant };
        let m = gen_bird(&p).map_err(gen_err)?;
        (Model::MePomdp(m), json!({ "generator": "bird", "params": p, "seed": a.seed }))
    } else {
        let placement = match a.placement {
            PlacementArg::Nearby => Placement::Nearby,
            PlacementArg::FarAway => Placement::FarAway,
            PlacementArg::Random => Placement::Random(a.seed),
        };
        let formulation = match a.formulation {
            FormulationArg::Ab => Formulation::Ab,
            FormulationArg::Me => Formulation::Me,
        };
        let mut constants = RockConstants { half_distance: a.half_distance, ..RockConstants::default() };
        if let Some(r) = a.exit_reward {
            constants.exit_reward = r;
        }
        if a.half_distance.is_some_and(|d| !(d > 0.0)) {
            return Err(input_err("invalid --half-distance: must be positive"));
        }
        let p = RockSampleParams { grid: a.grid, good: a.good, rocks: a.rocks, placement, formulation, constants };
        let m = match gen_rocksample(&p).map_err(gen_err)? {
            RockSampleModel::Ab(m) => Model::AbPomdp(m),
            RockSampleModel::Me(m) => Model::MePomdp(m),
        };
        (m, json!({ "generator": "rocksample", "params": p, "seed": a.seed }))
    };
    let mf = ModelFile { model, metadata: params };
    write(&a.out, &emit_model(&mf))?;
    println!("{}", summary(&mf.model));
    Ok(0)
}

fn record_path(a: &TransformArgs) -> PathBuf {
    a.record.clone().unwrap_or_else(|| {
        let mut s = a.out.clone().into_os_string();
        s.push(".record.json");
        PathBuf::from(s)
    })
}

fn as_me(model: &Model) -> Option<MePomdp> {
    match model {
        Model::MePomdp(m) => Some(m.clone()),
        Model::Pomdp(p) => Some(MePomdp::from_pomdp(p)),
        _ => None,
    }
}

fn cmd_transform(a: &TransformArgs) -> Outcome {
    let mf = load(&a.model)?;
    let wrong = |want: &str| input_err(format!("--to {}: needs {want} input, got {}", target_name(a.to), mf.model.kind()));
    let (out, record): (Model, TransformRecord) = match a.to {
        Target::Ab => {
            let me = as_me(&mf.model).ok_or_else(|| wrong("an me-pomdp or pomdp"))?;
            let (ab, r) = me_to_ab(&me).map_err(input_err)?;
            (Model::AbPomdp(ab), r)
        }
        Target::Posg => {
            let Model::AbPomdp(ab) = &mf.model else { return Err(wrong("an ab-pomdp")) };
            let (g, r) = ab_to_posg(ab).map_err(input_err)?;
            (Model::Posg(g), r)
        }
        Target::Pomemdp => {
            let Model::AbPomdp(ab) = &mf.model else { return Err(wrong("an ab-pomdp")) };
            let (m, r) = ab_to_pomemdp(ab).map_err(input_err)?;
            (Model::MePomdp(m), r)
        }
        Target::Mo => {
            let me = as_me(&mf.model).ok_or_else(|| wrong("an me-pomdp"))?;
            if !me.is_po_memdp() {
                return Err(input_err("--to mo: observation tables differ across environments"));
            }
            let (m, r) = pomemdp_to_mo(&me).map_err(input_err)?;
            (Model::MePomdp(m), r)
        }
    };
    let mut metadata = match &mf.metadata {
        Value::Object(o) => o.clone(),
        _ => Map::new(),
    };
    metadata.insert("transform".into(), json!(record.kind));
    let outf = ModelFile { model: out, metadata: Value::Object(metadata) };
    write(&a.out, &emit_model(&outf))?;
    let rec = serde_json::to_value(&record).map_err(internal)?;
    write(&record_path(a), &pretty(&rec))?;
    println!("{}", summary(&outf.model));
    Ok(0)
}

fn target_name(t: Target) -> &'static str {
    match t {
        Target::Posg => "posg",
        Target::Ab => "ab",
        Target::Pomemdp => "pomemdp",
        Target::Mo => "mo",
    }
}

/// The models a policy is scored against: one per environment, or one per
/// candidate initial state of an adversarial-belief model.
fn scenarios(model: &Model) -> Result<(Spaces, Vec<(String, Pomdp)>), Failure> {
    match model {
        Model::MePomdp(m) => {
            let envs = (0..m.num_envs())
                .map(|i| Ok((format!("env{}", i + 1), m.env_slice(i).map_err(internal)?)))
                .collect::<Result<_, Failure>>()?;
            Ok((m.spaces.clone(), envs))
        }
        Model::Pomdp(p) => Ok((p.spaces.clone(), vec![("env1".into(), p.clone())])),
        Model::AbPomdp(m) => {
            let ns = m.base.num_states();
            let envs = m
                .belief_support
                .iter()
                .map(|&q| {
                    let mut p = m.base.clone();
                    p.env.initial_belief = Belief::point(ns, q);
                    (m.base.spaces.states[q].clone(), p)
                })
                .collect();
            Ok((m.base.spaces.clone(), envs))
        }
        Model::Posg(_) => Err(input_err("posg models cannot be solved or evaluated; transform from the ab-pomdp instead")),
    }
}

fn with_horizon(envs: &[(String, Pomdp)], h: Horizon) -> Vec<(String, Pomdp)> {
    envs.iter().map(|(n, p)| (n.clone(), Pomdp { horizon: h, ..p.clone() })).collect()
}

fn exact_values(envs: &[(String, Pomdp)], mp: &MixedPolicy) -> Result<Vec<f64>, Failure> {
    envs.iter()
        .map(|(_, p)| Ok(expected_value(p, &evaluate_mixed_exact(p, mp).map_err(input_err)?)))
        .collect()
}

fn min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn rewards(model: &Model) -> Vec<f64> {
    match model {
        Model::MePomdp(m) => m.envs.iter().flat_map(|e| e.reward.iter().copied()).collect(),
        Model::Pomdp(p) => p.env.reward.clone(),
        Model::AbPomdp(m) => m.base.env.reward.clone(),
        Model::Posg(g) => g.reward.clone(),
    }
}

fn belief_json(b: &Belief, names: &[String]) -> Value {
    Value::Object(b.iter().map(|(s, p)| (names[s].clone(), json!(p))).collect())
}

struct Solved {
    solver: &'static str,
    lb: f64,
    ub: f64,
    converged: bool,
    iterations: usize,
    wall_time_s: f64,
    worst_belief: Value,
    trace: Vec<TraceRow>,
    policy: MixedPolicy,
    horizon: Horizon,
    depth_limit_hits: usize,
}

fn cmd_solve(a: &SolveArgs) -> Outcome {
    let mf = load(&a.model)?;
    let (spaces, envs) = scenarios(&mf.model)?;
    let (discount, model_h) = match &mf.model {
        Model::MePomdp(m) => (m.discount, m.horizon),
        Model::Pomdp(p) => (p.discount, p.horizon),
        Model::AbPomdp(m) => (m.base.discount, m.base.horizon),
        Model::Posg(_) => unreachable!("rejected by scenarios"),
    };
    // a horizon, given or stated by the model, means the exact solver
    let exact_h = match (a.horizon, model_h) {
        (Some(h), _) => Some(h),
        (None, Horizon::Finite(h)) => Some(h),
        (None, Horizon::Infinite) if a.exact => return Err(input_err("--exact on an infinite-horizon model needs --horizon")),
        (None, Horizon::Infinite) => None,
    };
    if exact_h == Some(0) {
        return Err(input_err("invalid --horizon: must be positive"));
    }
    if exact_h.is_none() && !(discount < 1.0) {
        return Err(input_err("search needs a discount below 1; pass --exact --horizon H"));
    }
    let mut cfg = match a.epsilon {
        Some(e) if e > 0.0 => SolveConfig::new(e),
        Some(_) => return Err(input_err("invalid --epsilon: must be positive")),
        None => SolveConfig::for_rewards(&rewards(&mf.model)),
    };
    if !(a.time_limit > 0.0) {
        return Err(input_err("invalid --time-limit: must be positive"));
    }
    cfg.time_limit_s = a.time_limit;
    cfg.max_depth = a.max_depth;
    cfg.rng_seed = a.seed;
    if a.deterministic {
        cfg.clock = Clock::Logical { tick_s: DEFAULT_TICK_S };
    }

    let start = Instant::now();
    let solved = match (&mf.model, exact_h) {
        (Model::AbPomdp(ab), Some(h)) => {
            let sol = solve_exact(ab, h).map_err(internal)?;
            let policy = sol.policy(ab.base.num_observations()).map_err(internal)?;
            exact_solved(sol.value, belief_json(&sol.nature.belief, &ab.base.spaces.states), policy, h)
        }
        (Model::AbPomdp(ab), None) => {
            let r = ab_hsvi(ab, &cfg).map_err(internal)?;
            let policy = r.policy(ab.base.num_observations()).map_err(internal)?;
            searched(&r, belief_json(&r.worst_belief, &ab.base.spaces.states), policy)
        }
        (model, Some(h)) => {
            let me = as_me(model).expect("ME or POMDP");
            let s = solve_me_exact(&me, h).map_err(internal)?;
            exact_solved(s.solution.value, belief_json(&s.solution.nature.belief, &s.ab.base.spaces.states), s.policy, h)
        }
        (model, None) => {
            let me = as_me(model).expect("ME or POMDP");
            let s = solve_me(&me, &cfg).map_err(internal)?;
            searched(&s.result, belief_json(&s.result.worst_belief, &s.ab.base.spaces.states), s.policy)
        }
    };
    let wall = match (a.deterministic, exact_h) {
        (true, Some(_)) => 0.0,
        (_, Some(_)) => start.elapsed().as_secs_f64(),
        _ => solved.wall_time_s,
    };

    let eval_envs = with_horizon(&envs, solved.horizon);
    let env_values = exact_values(&eval_envs, &solved.policy)?;

    std::fs::create_dir_all(&a.out_dir).map_err(|e| internal(format!("{}: {e}", a.out_dir.display())))?;
    let trace_path = a.out_dir.join(a.trace.clone().unwrap_or_else(|| "trace.csv".into()));
    write_trace(&trace_path, &solved.trace).map_err(internal)?;
    let policy_path = a.out_dir.join("policy.json");
    write(&policy_path, &pretty(&mixed_to_value(&solved.policy, &spaces.actions, &spaces.observations)))?;

    let config = json!({
        "epsilon": cfg.epsilon,
        "time_limit_s": cfg.time_limit_s,
        "max_depth": cfg.max_depth,
        "seed": cfg.rng_seed,
        "deterministic": a.deterministic,
        "horizon": exact_h,
    });
    let result = json!({
        "solver": solved.solver,
        "model_type": mf.model.kind(),
        "config": config,
        "lb": solved.lb,
        "ub": solved.ub,
        "gap": solved.ub - solved.lb,
        "worst_belief": solved.worst_belief,
        "converged": solved.converged,
        "iterations": solved.iterations,
        "depth_limit_hits": solved.depth_limit_hits,
        "wall_time_s": wall,
        "policy": "policy.json",
        "trace": trace_path.file_name().map(|n| n.to_string_lossy().into_owned()),
        "env_names": envs.iter().map(|e| e.0.clone()).collect::<Vec<_>>(),
        "env_values": env_values,
        "worst_env_value": min(&env_values),
    });
    write(&a.out_dir.join("result.json"), &pretty(&result))?;
    println!(
        "{}: lb {} ub {} gap {}{}",
        solved.solver,
        fmt_g9(solved.lb),
        fmt_g9(solved.ub),
        fmt_g9(solved.ub - solved.lb),
        if solved.converged { "" } else { " (time limit)" }
    );
    Ok(if solved.converged { 0 } else { EXIT_TIME_LIMIT })
}

fn exact_solved(value: f64, worst_belief: Value, policy: MixedPolicy, h: u32) -> Solved {
    Solved {
        solver: "exact",
        lb: value,
        ub: value,
        converged: true,
        iterations: 1,
        wall_time_s: 0.0,
        worst_belief,
        trace: vec![TraceRow { iter: 1, elapsed_s: 0.0, lb: value, ub: value, gap: 0.0 }],
        policy,
        horizon: Horizon::Finite(h),
        depth_limit_hits: 0,
    }
}

fn searched(r: &robust_pomdp::hsvi::SolveResult, worst_belief: Value, policy: MixedPolicy) -> Solved {
    Solved {
        solver: "ab-hsvi",
        lb: r.lb_value,
        ub: r.ub_value,
        converged: r.converged,
        iterations: r.iterations,
        wall_time_s: r.wall_time_s,
        worst_belief,
        trace: r.trace.clone(),
        policy,
        horizon: Horizon::Infinite,
        depth_limit_hits: r.depth_limit_hits,
    }
}

fn read_policy(path: &Path, spaces: &Spaces) -> Result<MixedPolicy, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    let mp = parse_policy(&text, &spaces.actions, &spaces.observations)
        .map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    for (g, _) in &mp.components {
        g.check(spaces.num_actions(), spaces.num_observations())
            .map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    }
    Ok(mp)
}

fn cmd_eval(a: &EvalArgs) -> Outcome {
    let mf = load(&a.model)?;
    let (spaces, envs) = scenarios(&mf.model)?;
    let mp = read_policy(&a.policy, &spaces)?;
    let mut report = Map::new();
    report.insert("environments".into(), json!(envs.iter().map(|e| e.0.clone()).collect::<Vec<_>>()));
    let exact = a.exact || a.episodes.is_none();
    if exact {
        let v = exact_values(&envs, &mp)?;
        report.insert("worst_case_exact".into(), json!(min(&v)));
        report.insert("values_exact".into(), json!(v));
    }
    if let Some(n) = a.episodes {
        let stats = envs
            .iter()
            .map(|(_, p)| simulate(p, &mp, n, a.horizon_cap, a.seed).map_err(input_err))
            .collect::<Result<Vec<_>, _>>()?;
        let means: Vec<f64> = stats.iter().map(|s| s.mean).collect();
        report.insert("worst_case_mc".into(), json!(min(&means)));
        report.insert(
            "values_mc".into(),
            Value::Array(stats.iter().map(|s| json!({ "mean": s.mean, "std_err": s.std_err })).collect()),
        );
    }
    if !a.optimal.is_empty() {
        if a.optimal.len() != envs.len() {
            return Err(input_err(format!("--optimal: expected {} policies, one per environment", envs.len())));
        }
        let matrix = a
            .optimal
            .iter()
            .map(|p| exact_values(&envs, &read_policy(p, &spaces)?))
            .collect::<Result<Vec<_>, _>>()?;
        let correct: Vec<f64> = (0..envs.len()).map(|i| matrix[i][i]).collect();
        let incorrect: Vec<Option<f64>> = (0..envs.len())
            .map(|i| {
                let off: Vec<f64> = (0..envs.len()).filter(|&j| j != i).map(|j| matrix[i][j]).collect();
                (!off.is_empty()).then(|| min(&off))
            })
            .collect();
        report.insert(
            "misassumption".into(),
            json!({ "matrix": matrix, "correct": correct, "incorrect": incorrect }),
        );
    }
    let text = pretty(&Value::Object(report));
    match &a.out {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}
