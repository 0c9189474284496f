//! JSON model and policy files.
//!
//! Tables are nested maps keyed by names: `transition[s][a][s']`,
//! `observation[s'][a][z]`, `reward[s][a]`, `initial_belief[s]`. Games nest
//! one more level for nature's action. Probabilities may be written as
//! numbers or as decimal strings.

use std::collections::HashMap;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::{FormatError, ModelError};
use crate::model::{AbPomdp, Belief, Environment, Horizon, MePomdp, Pomdp, Posg, SparseRows, Spaces, Validate, Violation};
use crate::policy::{MixedPolicy, PolicyGraph, PolicyNode};

#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Pomdp(Pomdp),
    MePomdp(MePomdp),
    AbPomdp(AbPomdp),
    Posg(Posg),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Pomdp(_) => "pomdp",
            Model::MePomdp(_) => "me-pomdp",
            Model::AbPomdp(_) => "ab-pomdp",
            Model::Posg(_) => "posg",
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        match self {
            Model::Pomdp(m) => m.validate(),
            Model::MePomdp(m) => m.validate(),
            Model::AbPomdp(m) => m.validate(),
            Model::Posg(m) => m.validate(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelFile {
    pub model: Model,
    pub metadata: Value,
}

impl ModelFile {
    pub fn new(model: Model) -> Self {
        ModelFile { model, metadata: Value::Object(Map::new()) }
    }
}

fn schema<T>(msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Schema(msg.into()))
}

fn obj<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, FormatError> {
    v.as_object().ok_or_else(|| FormatError::Schema(format!("{path}: expected an object")))
}

fn field<'a>(m: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, FormatError> {
    m.get(key).ok_or_else(|| FormatError::Schema(format!("{path}: missing \"{key}\"")))
}

fn names(v: &Value, path: &str) -> Result<Vec<String>, FormatError> {
    let arr = v.as_array().ok_or_else(|| FormatError::Schema(format!("{path}: expected an array of names")))?;
    let out: Vec<String> = arr
        .iter()
        .map(|x| x.as_str().map(str::to_string).ok_or_else(|| FormatError::Schema(format!("{path}: names must be strings"))))
        .collect::<Result<_, _>>()?;
    if out.is_empty() {
        return schema(format!("{path}: empty"));
    }
    for (i, n) in out.iter().enumerate() {
        if out[..i].contains(n) {
            return schema(format!("{path}: duplicate name \"{n}\""));
        }
    }
    Ok(out)
}

/// A number, or a string holding one.
fn number(v: &Value, path: &str) -> Result<f64, FormatError> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| FormatError::Schema(format!("{path}: bad number"))),
        Value::String(s) => s.trim().parse::<f64>().map_err(|_| FormatError::Schema(format!("{path}: \"{s}\" is not a number"))),
        _ => schema(format!("{path}: expected a number")),
    }
}

struct Index<'a> {
    map: HashMap<&'a str, usize>,
    what: &'static str,
}

impl<'a> Index<'a> {
    fn new(names: &'a [String], what: &'static str) -> Self {
        Index { map: names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect(), what }
    }

    fn get(&self, name: &str, path: &str) -> Result<usize, FormatError> {
        self.map.get(name).copied().ok_or_else(|| FormatError::Schema(format!("{path}: unknown {} \"{name}\"", self.what)))
    }
}

fn sparse(v: &Value, idx: &Index, path: &str) -> Result<Vec<(usize, f64)>, FormatError> {
    obj(v, path)?
        .iter()
        .map(|(k, p)| Ok((idx.get(k, path)?, number(p, &format!("{path}.{k}"))?)))
        .collect()
}

/// Rows keyed by `outer × inner`, each a sparse map over `cols`.
fn rows2(v: &Value, outer: &Index, inner: &Index, cols: &Index, n: (usize, usize), path: &str) -> Result<SparseRows, FormatError> {
    let mut rows = vec![Vec::new(); n.0 * n.1];
    for (k1, v1) in obj(v, path)? {
        let i = outer.get(k1, path)?;
        let p1 = format!("{path}.{k1}");
        for (k2, v2) in obj(v1, &p1)? {
            let j = inner.get(k2, &p1)?;
            rows[i * n.1 + j] = sparse(v2, cols, &format!("{p1}.{k2}"))?;
        }
    }
    Ok(SparseRows::from_rows(rows))
}

fn dense2(v: &Value, outer: &Index, inner: &Index, n: (usize, usize), path: &str) -> Result<Vec<f64>, FormatError> {
    let mut out = vec![f64::NAN; n.0 * n.1];
    for (k1, v1) in obj(v, path)? {
        let i = outer.get(k1, path)?;
        let p1 = format!("{path}.{k1}");
        for (k2, x) in obj(v1, &p1)? {
            let j = inner.get(k2, &p1)?;
            out[i * n.1 + j] = number(x, &format!("{p1}.{k2}"))?;
        }
    }
    if let Some(k) = out.iter().position(|x| x.is_nan()) {
        return schema(format!("{path}: missing entry for ({}, {})", k / n.1, k % n.1));
    }
    Ok(out)
}

fn belief(v: &Value, states: &Index, ns: usize, path: &str) -> Result<Belief, FormatError> {
    let mut probs = vec![0.0; ns];
    for (s, p) in sparse(v, states, path)? {
        if !(p.is_finite() && p >= 0.0) {
            return Err(ModelError::InvalidBelief(format!("{path}: entry {p}")).into());
        }
        probs[s] += p;
    }
    Ok(Belief::as_written(probs))
}

fn horizon(v: &Value) -> Result<Horizon, FormatError> {
    match v {
        Value::String(s) if s == "inf" => Ok(Horizon::Infinite),
        Value::Number(n) => match n.as_u64() {
            Some(h) if h > 0 && h <= u32::MAX as u64 => Ok(Horizon::Finite(h as u32)),
            _ => schema("horizon: expected a positive integer or \"inf\""),
        },
        _ => schema("horizon: expected a positive integer or \"inf\""),
    }
}

fn available(v: Option<&Value>, states: &Index, actions: &Index, ns: usize) -> Result<Option<Vec<Vec<usize>>>, FormatError> {
    let Some(v) = v else { return Ok(None) };
    // unlisted states keep every action
    let mut out: Vec<Vec<usize>> = vec![(0..actions.map.len()).collect(); ns];
    for (s, acts) in obj(v, "available_actions")? {
        let i = states.get(s, "available_actions")?;
        let arr = acts.as_array().ok_or_else(|| FormatError::Schema(format!("available_actions.{s}: expected an array")))?;
        let mut list = Vec::with_capacity(arr.len());
        for a in arr {
            let name = a.as_str().ok_or_else(|| FormatError::Schema("available_actions: names must be strings".into()))?;
            list.push(actions.get(name, &format!("available_actions.{s}"))?);
        }
        list.sort_unstable();
        list.dedup();
        if list.is_empty() {
            return schema(format!("available_actions.{s}: no action"));
        }
        out[i] = list;
    }
    Ok(Some(out))
}

fn environment(v: &Value, sp: &Spaces, path: &str) -> Result<Environment, FormatError> {
    let (ns, na) = (sp.num_states(), sp.num_actions());
    let (si, ai, zi) = (Index::new(&sp.states, "state"), Index::new(&sp.actions, "action"), Index::new(&sp.observations, "observation"));
    let e = obj(v, path)?;
    Ok(Environment {
        transition: rows2(field(e, "transition", path)?, &si, &ai, &si, (ns, na), &format!("{path}.transition"))?,
        observation: rows2(field(e, "observation", path)?, &si, &ai, &zi, (ns, na), &format!("{path}.observation"))?,
        reward: dense2(field(e, "reward", path)?, &si, &ai, (ns, na), &format!("{path}.reward"))?,
        initial_belief: belief(field(e, "initial_belief", path)?, &si, ns, &format!("{path}.initial_belief"))?,
    })
}

fn discount(v: &Value) -> Result<f64, FormatError> {
    number(v, "discount")
}

/// Parses a model file without validating it.
pub fn parse_model(text: &str) -> Result<ModelFile, FormatError> {
    let root: Value = serde_json::from_str(text)?;
    let top = obj(&root, "model")?;
    let kind = field(top, "type", "model")?.as_str().unwrap_or_default().to_string();
    let metadata = top.get("metadata").cloned().unwrap_or(Value::Object(Map::new()));
    let states = names(field(top, "states", "model")?, "states")?;
    let observations = names(field(top, "observations", "model")?, "observations")?;
    let actions = names(field(top, "actions", "model")?, "actions")?;
    let gamma = discount(field(top, "discount", "model")?)?;
    let h = horizon(field(top, "horizon", "model")?)?;
    let ns = states.len();

    if kind == "posg" {
        let nature = names(field(top, "nature_actions", "model")?, "nature_actions")?;
        let (si, ai, ni, zi) = (
            Index::new(&states, "state"),
            Index::new(&actions, "action"),
            Index::new(&nature, "nature action"),
            Index::new(&observations, "observation"),
        );
        let envs = field(top, "environments", "model")?.as_array().filter(|a| a.len() == 1);
        let Some(env) = envs.map(|a| &a[0]) else { return schema("posg: expected exactly one environment") };
        let e = obj(env, "environments[0]")?;
        let (na, nn) = (actions.len(), nature.len());
        let rows3 = |key: &str, cols: &Index| -> Result<SparseRows, FormatError> {
            let mut rows = vec![Vec::new(); ns * na * nn];
            for (k1, v1) in obj(field(e, key, "environments[0]")?, key)? {
                let s = si.get(k1, key)?;
                for (k2, v2) in obj(v1, key)? {
                    let a = ai.get(k2, key)?;
                    for (k3, v3) in obj(v2, key)? {
                        let b = ni.get(k3, key)?;
                        rows[(s * na + a) * nn + b] = sparse(v3, cols, &format!("{key}.{k1}.{k2}.{k3}"))?;
                    }
                }
            }
            Ok(SparseRows::from_rows(rows))
        };
        let mut reward = vec![f64::NAN; ns * na * nn];
        for (k1, v1) in obj(field(e, "reward", "environments[0]")?, "reward")? {
            let s = si.get(k1, "reward")?;
            for (k2, v2) in obj(v1, "reward")? {
                let a = ai.get(k2, "reward")?;
                for (k3, x) in obj(v2, "reward")? {
                    reward[(s * na + a) * nn + ni.get(k3, "reward")?] = number(x, "reward")?;
                }
            }
        }
        if reward.iter().any(|x| x.is_nan()) {
            return schema("reward: missing entries");
        }
        let game = Posg {
            transition: rows3("transition", &si)?,
            observation: rows3("observation", &zi)?,
            reward,
            initial_belief: belief(field(e, "initial_belief", "environments[0]")?, &si, ns, "initial_belief")?,
            agent_available_actions: available(top.get("available_actions"), &si, &ai, ns)?,
            states,
            agent_actions: actions,
            nature_actions: nature,
            observations,
            discount: gamma,
            horizon: h,
        };
        return Ok(ModelFile { model: Model::Posg(game), metadata });
    }

    let spaces = Spaces::new(states, actions, observations);
    let si = Index::new(&spaces.states, "state");
    let ai = Index::new(&spaces.actions, "action");
    let av = available(top.get("available_actions"), &si, &ai, ns)?;
    let envs_v = field(top, "environments", "model")?
        .as_array()
        .ok_or_else(|| FormatError::Schema("environments: expected an array".into()))?;
    let envs: Vec<Environment> = envs_v
        .iter()
        .enumerate()
        .map(|(i, v)| environment(v, &spaces, &format!("environments[{i}]")))
        .collect::<Result<_, _>>()?;
    if envs.is_empty() {
        return schema("environments: empty");
    }
    let single = |envs: Vec<Environment>| -> Result<Pomdp, FormatError> {
        if envs.len() != 1 {
            return schema(format!("{kind}: expected exactly one environment"));
        }
        let mut p = Pomdp::new(spaces.clone(), envs.into_iter().next().unwrap(), gamma, h);
        p.available_actions = av.clone();
        Ok(p)
    };
    let model = match kind.as_str() {
        "pomdp" => Model::Pomdp(single(envs)?),
        "me-pomdp" => {
            let mut m = MePomdp::new(spaces.clone(), envs, gamma, h);
            m.available_actions = av.clone();
            Model::MePomdp(m)
        }
        "ab-pomdp" => {
            let q_names = names(field(top, "belief_support", "model")?, "belief_support")?;
            let q = q_names.iter().map(|n| si.get(n, "belief_support")).collect::<Result<Vec<_>, _>>()?;
            Model::AbPomdp(AbPomdp::new(single(envs)?, q)?)
        }
        other => return schema(format!("type: unknown model type \"{other}\"")),
    };
    Ok(ModelFile { model, metadata })
}

/// Parses and rejects models that fail validation.
pub fn load_model(text: &str) -> Result<ModelFile, FormatError> {
    let mf = parse_model(text)?;
    let v = mf.model.validate();
    if !v.is_empty() {
        return Err(ModelError::Invalid(v).into());
    }
    Ok(mf)
}

pub fn read_model(path: &Path) -> Result<ModelFile, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|e| FormatError::Schema(format!("{}: {e}", path.display())))?;
    parse_model(&text)
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn sparse_json(row: &[(usize, f64)], names: &[String]) -> Value {
    Value::Object(row.iter().map(|&(i, p)| (names[i].clone(), num(p))).collect())
}

fn env_json(e: &Environment, sp: &Spaces) -> Value {
    let na = sp.num_actions();
    let nested = |rows: &SparseRows, cols: &[String]| -> Value {
        Value::Object(
            sp.states
                .iter()
                .enumerate()
                .map(|(s, sn)| {
                    let inner = sp.actions.iter().enumerate().map(|(a, an)| (an.clone(), sparse_json(rows.row(s * na + a), cols)));
                    (sn.clone(), Value::Object(inner.collect()))
                })
                .collect(),
        )
    };
    let reward = Value::Object(
        sp.states
            .iter()
            .enumerate()
            .map(|(s, sn)| {
                (sn.clone(), Value::Object(sp.actions.iter().enumerate().map(|(a, an)| (an.clone(), num(e.reward[s * na + a]))).collect()))
            })
            .collect(),
    );
    let init: Vec<(usize, f64)> = e.initial_belief.iter().collect();
    json!({
        "transition": nested(&e.transition, &sp.states),
        "observation": nested(&e.observation, &sp.observations),
        "reward": reward,
        "initial_belief": sparse_json(&init, &sp.states),
    })
}

fn horizon_json(h: Horizon) -> Value {
    match h {
        Horizon::Finite(k) => json!(k),
        Horizon::Infinite => json!("inf"),
    }
}

fn available_json(av: &Option<Vec<Vec<usize>>>, states: &[String], actions: &[String]) -> Option<Value> {
    av.as_ref().map(|av| {
        Value::Object(
            av.iter()
                .enumerate()
                .map(|(s, acts)| (states[s].clone(), Value::Array(acts.iter().map(|&a| json!(actions[a])).collect())))
                .collect(),
        )
    })
}

/// Canonical JSON value of a model file.
pub fn model_to_value(mf: &ModelFile) -> Value {
    let mut top = Map::new();
    top.insert("type".into(), json!(mf.model.kind()));
    match &mf.model {
        Model::Posg(g) => {
            let (na, nn) = (g.agent_actions.len(), g.nature_actions.len());
            top.insert("states".into(), json!(g.states));
            top.insert("actions".into(), json!(g.agent_actions));
            top.insert("nature_actions".into(), json!(g.nature_actions));
            top.insert("observations".into(), json!(g.observations));
            top.insert("discount".into(), num(g.discount));
            top.insert("horizon".into(), horizon_json(g.horizon));
            let nested3 = |f: &dyn Fn(usize, usize, usize) -> Value| -> Value {
                Value::Object(
                    g.states
                        .iter()
                        .enumerate()
                        .map(|(s, sn)| {
                            let mid = g.agent_actions.iter().enumerate().map(|(a, an)| {
                                let inner = g.nature_actions.iter().enumerate().map(|(b, bn)| (bn.clone(), f(s, a, b)));
                                (an.clone(), Value::Object(inner.collect()))
                            });
                            (sn.clone(), Value::Object(mid.collect()))
                        })
                        .collect(),
                )
            };
            let row = |s: usize, a: usize, b: usize| (s * na + a) * nn + b;
            let init: Vec<(usize, f64)> = g.initial_belief.iter().collect();
            let env = json!({
                "transition": nested3(&|s, a, b| sparse_json(g.transition.row(row(s, a, b)), &g.states)),
                "observation": nested3(&|s, a, b| sparse_json(g.observation.row(row(s, a, b)), &g.observations)),
                "reward": nested3(&|s, a, b| num(g.reward[row(s, a, b)])),
                "initial_belief": sparse_json(&init, &g.states),
            });
            top.insert("environments".into(), json!([env]));
            if let Some(av) = available_json(&g.agent_available_actions, &g.states, &g.agent_actions) {
                top.insert("available_actions".into(), av);
            }
        }
        other => {
            let (sp, envs, gamma, h, av): (&Spaces, Vec<&Environment>, f64, Horizon, &Option<Vec<Vec<usize>>>) = match other {
                Model::Pomdp(p) => (&p.spaces, vec![&p.env], p.discount, p.horizon, &p.available_actions),
                Model::AbPomdp(m) => (&m.base.spaces, vec![&m.base.env], m.base.discount, m.base.horizon, &m.base.available_actions),
                Model::MePomdp(m) => (&m.spaces, m.envs.iter().collect(), m.discount, m.horizon, &m.available_actions),
                Model::Posg(_) => unreachable!(),
            };
            top.insert("states".into(), json!(sp.states));
            top.insert("actions".into(), json!(sp.actions));
            top.insert("observations".into(), json!(sp.observations));
            top.insert("discount".into(), num(gamma));
            top.insert("horizon".into(), horizon_json(h));
            top.insert("environments".into(), Value::Array(envs.iter().map(|e| env_json(e, sp)).collect()));
            if let Model::AbPomdp(m) = other {
                top.insert("belief_support".into(), json!(m.belief_support.iter().map(|&q| &sp.states[q]).collect::<Vec<_>>()));
            }
            if let Some(v) = available_json(av, &sp.states, &sp.actions) {
                top.insert("available_actions".into(), v);
            }
        }
    }
    top.insert("metadata".into(), mf.metadata.clone());
    Value::Object(top)
}

/// Canonical text: pretty-printed with a trailing newline.
pub fn emit_model(mf: &ModelFile) -> String {
    let mut s = serde_json::to_string_pretty(&model_to_value(mf)).expect("values serialize");
    s.push('\n');
    s
}

/// `{"nodes": [{"action", "next": {obs: node}}], "root"}` with names.
pub fn policy_to_value(g: &PolicyGraph, actions: &[String], observations: &[String]) -> Value {
    let nodes: Vec<Value> = g
        .nodes
        .iter()
        .map(|n| {
            let next: Map<String, Value> = n.next.iter().enumerate().map(|(z, &k)| (observations[z].clone(), json!(k))).collect();
            json!({ "action": actions[n.action], "next": next })
        })
        .collect();
    json!({ "nodes": nodes, "root": g.root })
}

pub fn mixed_to_value(mp: &MixedPolicy, actions: &[String], observations: &[String]) -> Value {
    json!({
        "components": mp.components.iter().map(|(g, _)| policy_to_value(g, actions, observations)).collect::<Vec<_>>(),
        "weights": mp.weights().into_iter().map(num).collect::<Vec<_>>(),
    })
}

fn policy_from_value(v: &Value, actions: &Index, observations: &Index, nz: usize) -> Result<PolicyGraph, FormatError> {
    let o = obj(v, "policy")?;
    let nodes_v = field(o, "nodes", "policy")?.as_array().ok_or_else(|| FormatError::Schema("nodes: expected an array".into()))?;
    let mut nodes = Vec::with_capacity(nodes_v.len());
    for (i, n) in nodes_v.iter().enumerate() {
        let path = format!("nodes[{i}]");
        let no = obj(n, &path)?;
        let a = field(no, "action", &path)?.as_str().ok_or_else(|| FormatError::Schema(format!("{path}.action: expected a name")))?;
        let action = actions.get(a, &path)?;
        let mut next = vec![usize::MAX; nz];
        for (z, k) in obj(field(no, "next", &path)?, &path)? {
            let zi = observations.get(z, &path)?;
            next[zi] = k.as_u64().ok_or_else(|| FormatError::Schema(format!("{path}.next.{z}: expected a node index")))? as usize;
        }
        if next.iter().any(|&k| k == usize::MAX || k >= nodes_v.len()) {
            return schema(format!("{path}.next: must map every observation to an existing node"));
        }
        nodes.push(PolicyNode { action, next });
    }
    let root = field(o, "root", "policy")?.as_u64().unwrap_or(u64::MAX) as usize;
    if root >= nodes.len() {
        return schema("root: no such node");
    }
    Ok(PolicyGraph { nodes, root })
}

/// Reads either a single controller or a weighted mixture.
pub fn parse_policy(text: &str, actions: &[String], observations: &[String]) -> Result<MixedPolicy, FormatError> {
    let v: Value = serde_json::from_str(text)?;
    let (ai, zi) = (Index::new(actions, "action"), Index::new(observations, "observation"));
    let o = obj(&v, "policy")?;
    if !o.contains_key("components") {
        return Ok(MixedPolicy::single(policy_from_value(&v, &ai, &zi, observations.len())?));
    }
    let comps = field(o, "components", "policy")?.as_array().ok_or_else(|| FormatError::Schema("components: expected an array".into()))?;
    let weights = field(o, "weights", "policy")?.as_array().ok_or_else(|| FormatError::Schema("weights: expected an array".into()))?;
    if comps.len() != weights.len() || comps.is_empty() {
        return schema("components and weights differ in length");
    }
    let components = comps
        .iter()
        .zip(weights)
        .map(|(c, w)| {
            let w = number(w, "weights")?;
            if !(w >= 0.0) {
                return schema("weights: must be non-negative");
            }
            Ok((policy_from_value(c, &ai, &zi, observations.len())?, w))
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    let total: f64 = components.iter().map(|c| c.1).sum();
    if (total - 1.0).abs() > 1e-9 {
        return schema(format!("weights sum to {total}"));
    }
    Ok(MixedPolicy { components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{bird_fixture, gen_rocksample, Formulation, Placement, RockConstants, RockSampleModel, RockSampleParams};
    use crate::transforms::{ab_to_posg, me_to_ab};

    fn roundtrip(mf: &ModelFile) {
        let text = emit_model(mf);
        let back = parse_model(&text).unwrap();
        assert_eq!(&back, mf);
        assert_eq!(emit_model(&back), text);
    }

    #[test]
    fn roundtrips() {
        let me = bird_fixture();
        roundtrip(&ModelFile::new(Model::MePomdp(me.clone())));
        let (ab, _) = me_to_ab(&me).unwrap();
        roundtrip(&ModelFile::new(Model::AbPomdp(ab.clone())));
        let (g, _) = ab_to_posg(&ab).unwrap();
        roundtrip(&ModelFile::new(Model::Posg(g)));
        let p = RockSampleParams { grid: 2, good: 1, rocks: 2, placement: Placement::Nearby, formulation: Formulation::Ab, constants: RockConstants::default() };
        let RockSampleModel::Ab(rs) = gen_rocksample(&p).unwrap() else { panic!() };
        roundtrip(&ModelFile { model: Model::AbPomdp(rs), metadata: json!({"seed": 1}) });
    }

    #[test]
    fn string_probabilities() {
        let text = r#"{"type":"pomdp","states":["a","b"],"actions":["x"],"observations":["o"],
            "discount":"0.95","horizon":"inf",
            "environments":[{"transition":{"a":{"x":{"a":"0.05","b":"0.95"}},"b":{"x":{"b":1}}},
              "observation":{"a":{"x":{"o":1}},"b":{"x":{"o":"1"}}},
              "reward":{"a":{"x":1},"b":{"x":"-2.5"}},"initial_belief":{"a":"0.5","b":0.5}}]}"#;
        let mf = load_model(text).unwrap();
        let Model::Pomdp(p) = mf.model else { panic!() };
        assert_eq!(p.transition(0, 0), &[(0, 0.05), (1, 0.95)]);
        assert_eq!(p.reward(1, 0), -2.5);
        assert_eq!(p.discount, 0.95);
    }

    #[test]
    fn schema_errors_name_the_place() {
        let text = r#"{"type":"pomdp","states":["a"],"actions":["x"],"observations":["o"],"discount":0.9,"horizon":2,
            "environments":[{"transition":{"a":{"x":{"zz":1}}},"observation":{},"reward":{"a":{"x":0}},"initial_belief":{"a":1}}]}"#;
        let err = parse_model(text).unwrap_err().to_string();
        assert!(err.contains("zz"), "{err}");
        let bad = text.replace("{\"zz\":1}", "{\"a\":0.5}");
        assert!(matches!(load_model(&bad), Err(FormatError::Model(ModelError::Invalid(_)))));
    }

    #[test]
    fn policy_roundtrip() {
        let g = PolicyGraph { nodes: vec![PolicyNode { action: 1, next: vec![0, 0] }], root: 0 };
        let mp = MixedPolicy { components: vec![(g.clone(), 0.25), (PolicyGraph::constant(0, 2), 0.75)] };
        let actions = vec!["C".to_string(), "DN".to_string()];
        let obs = vec!["oL".to_string(), "oH".to_string()];
        let v = mixed_to_value(&mp, &actions, &obs);
        assert_eq!(parse_policy(&v.to_string(), &actions, &obs).unwrap(), mp);
        let single = policy_to_value(&g, &actions, &obs);
        assert_eq!(parse_policy(&single.to_string(), &actions, &obs).unwrap(), MixedPolicy::single(g));
    }
}
