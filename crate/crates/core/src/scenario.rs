//! Line-oriented text formats: scenarios (external system, sensor, task,
//! policy, options), transition systems and policy-labeled machines.
//!
//! Blank lines and `#` comments are ignored; every other line starts with a
//! keyword followed by whitespace-separated names. A scenario looks like
//!
//! ```text
//! states x1 x2
//! actions stay go
//! observations a b
//! initial x1
//! initial-set x1 x2
//! transition x1 stay x1
//! transition x1 go x2
//! transition x2 stay x2
//! transition x2 go x2
//! sensor a x1
//! sensor b x2
//! task observation b horizon 4
//! option depth 6
//! policy observation
//! observe a -> go
//! observe b -> stay
//! ```
//!
//! Policies come in four kinds: `belief` (rules `belief <states> -> u` plus
//! `default u`), `state` (`state x -> u`), `observation` (`observe y -> u`)
//! and `table` (`history <y,u,y,...> -> u`).

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::machine::{ActionId, MooreMachine, ObsMooreMachine, PolicyOutput};
use crate::reactive::StatePolicy;
use crate::restriction::{belief_filter_machine, HistoryPolicy};
use crate::system::{BeliefState, ExternalSystem, Goal, History, TaskSpec};
use crate::ts::{StateId, TransitionSystem};

/// Policy given in a scenario file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolicySpec {
    /// First matching rule on the exact belief, else the default.
    Belief {
        rules: Vec<(BeliefState, ActionId)>,
        default: ActionId,
    },
    State(StatePolicy),
    /// Reactive policy on the latest observation.
    Observation(Vec<ActionId>),
    Table(BTreeMap<History, ActionId>),
}

impl PolicySpec {
    /// The policy over histories; state policies need a bijective sensor.
    pub fn history_policy(&self, es: &ExternalSystem) -> Result<HistoryPolicy> {
        match self {
            PolicySpec::Belief { rules, default } => {
                let rules = rules.clone();
                let default = *default;
                Ok(HistoryPolicy::Machine(belief_filter_machine(es, move |b| {
                    rules.iter().find(|(r, _)| r == b).map_or(default, |&(_, u)| u)
                })))
            }
            PolicySpec::State(pi) => {
                if let Some(y) = es.bijective_violation() {
                    return Err(Error::NotBijective(es.observation_names()[y].clone()));
                }
                let pi_y = (0..es.num_observations())
                    .map(|y| pi.action(es.preimage(y).iter().next().expect("bijective")))
                    .collect::<Vec<_>>();
                Ok(HistoryPolicy::Machine(observation_machine(es, &pi_y)))
            }
            PolicySpec::Observation(pi_y) => Ok(HistoryPolicy::Machine(observation_machine(es, pi_y))),
            PolicySpec::Table(t) => Ok(HistoryPolicy::Table(t.clone())),
        }
    }
}

/// Machine acting on the latest observation only.
pub fn observation_machine(es: &ExternalSystem, pi_y: &[ActionId]) -> ObsMooreMachine {
    let k = es.num_observations();
    let mut outputs = vec![PolicyOutput::Start];
    outputs.extend(pi_y.iter().map(|&u| PolicyOutput::Act(u)));
    let step = (0..=k).flat_map(|_| 1..=k).collect();
    let mut names = vec!["()".to_owned()];
    names.extend(es.observation_names().iter().map(|y| format!("last={y}")));
    MooreMachine::new(es.observation_names().to_vec(), outputs, step, 0)
        .expect("one row per state")
        .with_state_names(names)
}

/// Numeric settings a scenario may carry for the command line.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScenarioOptions {
    pub depth: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub system: ExternalSystem,
    pub initial: StateId,
    pub initial_set: Option<Vec<StateId>>,
    pub task: Option<TaskSpec>,
    pub policy: Option<PolicySpec>,
    pub options: ScenarioOptions,
}

/// Significant lines with their 1-based numbers, split into words.
fn lines(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let l = l.split('#').next().unwrap_or("").trim();
            (!l.is_empty()).then(|| (i + 1, l.split_whitespace().collect()))
        })
        .collect()
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn lookup(names: &[String], word: &str, what: &str, line: usize) -> Result<usize> {
    names
        .iter()
        .position(|n| n == word)
        .ok_or_else(|| Error::Integrity(format!("line {line}: undeclared {what} `{word}`")))
}

fn declare(words: &[&str], what: &str, line: usize) -> Result<Vec<String>> {
    if words.is_empty() {
        return Err(parse_err(line, format!("no {what} declared")));
    }
    let mut seen = BTreeSet::new();
    for w in words {
        if !seen.insert(*w) {
            return Err(Error::Integrity(format!("line {line}: {what} `{w}` declared twice")));
        }
    }
    Ok(words.iter().map(|w| (*w).to_owned()).collect())
}

fn number<T: std::str::FromStr>(word: &str, line: usize) -> Result<T> {
    word.parse().map_err(|_| parse_err(line, format!("expected a number, found `{word}`")))
}

/// Splits `lhs... -> rhs`.
fn arrow<'a>(words: &'a [&'a str], line: usize) -> Result<(&'a [&'a str], &'a str)> {
    match words {
        [lhs @ .., "->", rhs] => Ok((lhs, rhs)),
        _ => Err(parse_err(line, "expected `... -> action`")),
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let lines = lines(text);
    if lines.is_empty() {
        return Err(parse_err(1, "empty scenario"));
    }
    let header = |key: &str| lines.iter().find(|(_, w)| w[0] == key);
    let require = |key: &str| header(key).ok_or_else(|| parse_err(lines.len(), format!("missing `{key}` line")));
    let (ls, sw) = require("states")?;
    let states = declare(&sw[1..], "state", *ls)?;
    let (la, aw) = require("actions")?;
    let actions = declare(&aw[1..], "action", *la)?;
    let (lo, ow) = require("observations")?;
    let observations = declare(&ow[1..], "observation", *lo)?;

    let mut initial = 0;
    let mut initial_set = None;
    let mut next: Vec<Vec<Option<StateId>>> = vec![vec![None; actions.len()]; states.len()];
    let mut sensor: Vec<Option<usize>> = vec![None; states.len()];
    let mut task = None;
    let mut options = ScenarioOptions::default();
    let mut policy_kind: Option<(usize, &str)> = None;
    let mut rules = Vec::new();
    let mut default = None;
    let mut state_rules: Vec<Option<ActionId>> = vec![None; states.len()];
    let mut obs_rules: Vec<Option<ActionId>> = vec![None; observations.len()];
    let mut table = BTreeMap::new();

    let state = |w: &str, l: usize| lookup(&states, w, "state", l);
    let action = |w: &str, l: usize| lookup(&actions, w, "action", l);
    let obs = |w: &str, l: usize| lookup(&observations, w, "observation", l);
    let in_policy = |kind: &str, l: usize, policy_kind: Option<(usize, &str)>| match policy_kind {
        Some((_, k)) if k == kind => Ok(()),
        _ => Err(parse_err(l, format!("rule outside a `policy {kind}` section"))),
    };

    for (l, w) in &lines {
        let l = *l;
        match w[0] {
            "states" | "actions" | "observations" => {}
            "initial" => match &w[1..] {
                [x] => initial = state(x, l)?,
                _ => return Err(parse_err(l, "expected `initial <state>`")),
            },
            "initial-set" => {
                initial_set = Some(w[1..].iter().map(|x| state(x, l)).collect::<Result<Vec<_>>>()?);
            }
            "transition" => match &w[1..] {
                [x, u, t] => {
                    let (x, u, t) = (state(x, l)?, action(u, l)?, state(t, l)?);
                    if next[x][u].is_some_and(|old| old != t) {
                        return Err(Error::Integrity(format!("line {l}: second successor for ({}, {})", w[1], w[2])));
                    }
                    next[x][u] = Some(t);
                }
                _ => return Err(parse_err(l, "expected `transition <state> <action> <state>`")),
            },
            "sensor" => {
                let y = obs(w.get(1).ok_or_else(|| parse_err(l, "expected `sensor <obs> <states...>`"))?, l)?;
                for x in &w[2..] {
                    let x = state(x, l)?;
                    if sensor[x].replace(y).is_some_and(|old| old != y) {
                        return Err(Error::Integrity(format!("line {l}: state `{}` in two sensor blocks", states[x])));
                    }
                }
            }
            "task" => {
                let (goal_words, horizon) = match &w[1..] {
                    [kind, goal @ .., "horizon", n] if !goal.is_empty() => ((*kind, goal), number(n, l)?),
                    _ => return Err(parse_err(l, "expected `task <observation|state> <names...> horizon <n>`")),
                };
                let goal = match goal_words.0 {
                    "observation" => Goal::Observation(goal_words.1.iter().map(|y| obs(y, l)).collect::<Result<_>>()?),
                    "state" => Goal::State(goal_words.1.iter().map(|x| state(x, l)).collect::<Result<_>>()?),
                    other => return Err(parse_err(l, format!("unknown task kind `{other}`"))),
                };
                task = Some(TaskSpec::new(goal, horizon)?);
            }
            "option" => match &w[1..] {
                ["depth", n] => options.depth = Some(number(n, l)?),
                ["samples", n] => options.samples = Some(number(n, l)?),
                ["seed", n] => options.seed = Some(number(n, l)?),
                _ => return Err(parse_err(l, "expected `option <depth|samples|seed> <n>`")),
            },
            "policy" => match &w[1..] {
                [kind @ ("belief" | "state" | "observation" | "table")] if policy_kind.is_none() => {
                    policy_kind = Some((l, kind))
                }
                [_] if policy_kind.is_some() => return Err(parse_err(l, "second policy section")),
                _ => return Err(parse_err(l, "expected `policy <belief|state|observation|table>`")),
            },
            "belief" => {
                in_policy("belief", l, policy_kind)?;
                let (lhs, u) = arrow(&w[1..], l)?;
                let b = lhs.iter().map(|x| state(x, l)).collect::<Result<BeliefState>>()?;
                rules.push((b, action(u, l)?));
            }
            "default" => {
                in_policy("belief", l, policy_kind)?;
                match &w[1..] {
                    [u] => default = Some(action(u, l)?),
                    _ => return Err(parse_err(l, "expected `default <action>`")),
                }
            }
            "state" => {
                in_policy("state", l, policy_kind)?;
                match arrow(&w[1..], l)? {
                    ([x], u) => state_rules[state(x, l)?] = Some(action(u, l)?),
                    _ => return Err(parse_err(l, "expected `state <state> -> <action>`")),
                }
            }
            "observe" => {
                in_policy("observation", l, policy_kind)?;
                match arrow(&w[1..], l)? {
                    ([y], u) => obs_rules[obs(y, l)?] = Some(action(u, l)?),
                    _ => return Err(parse_err(l, "expected `observe <observation> -> <action>`")),
                }
            }
            "history" => {
                in_policy("table", l, policy_kind)?;
                let (lhs, u) = arrow(&w[1..], l)?;
                table.insert(lhs.join(" "), (l, action(u, l)?));
            }
            other => return Err(parse_err(l, format!("unknown keyword `{other}`"))),
        }
    }

    let mut ts = TransitionSystem::new(states.clone(), actions.clone(), initial)?;
    for (x, row) in next.iter().enumerate() {
        for (u, t) in row.iter().enumerate() {
            let t = t.ok_or_else(|| {
                Error::Integrity(format!("no transition for state `{}` under action `{}`", states[x], actions[u]))
            })?;
            ts.add_transition(x, u, t)?;
        }
    }
    let sensor = sensor
        .iter()
        .enumerate()
        .map(|(x, y)| y.ok_or_else(|| Error::Integrity(format!("state `{}` is in no sensor block", states[x]))))
        .collect::<Result<Vec<_>>>()?;
    let system = ExternalSystem::new(ts, sensor, observations.clone())?;

    let policy = match policy_kind {
        None => None,
        Some((l, "belief")) => Some(PolicySpec::Belief {
            rules,
            default: default.ok_or_else(|| parse_err(l, "belief policy needs a `default` action"))?,
        }),
        Some((_, "state")) => Some(PolicySpec::State(StatePolicy::new(
            state_rules
                .iter()
                .enumerate()
                .map(|(x, u)| u.ok_or_else(|| Error::Integrity(format!("state policy misses state `{}`", states[x]))))
                .collect::<Result<_>>()?,
        ))),
        Some((_, "observation")) => Some(PolicySpec::Observation(
            obs_rules
                .iter()
                .enumerate()
                .map(|(y, u)| {
                    u.ok_or_else(|| Error::Integrity(format!("observation policy misses `{}`", observations[y])))
                })
                .collect::<Result<_>>()?,
        )),
        Some(_) => {
            let mut t = BTreeMap::new();
            for (text, (l, u)) in table {
                let h = History::parse(&text, &system).map_err(|e| Error::Integrity(format!("line {l}: {e}")))?;
                t.insert(h, u);
            }
            Some(PolicySpec::Table(t))
        }
    };

    Ok(Scenario {
        system,
        initial,
        initial_set,
        task,
        policy,
        options,
    })
}

pub fn serialize_scenario(sc: &Scenario) -> String {
    let es = &sc.system;
    let (xs, us, ys) = (es.state_names(), es.action_names(), es.observation_names());
    let names = |ids: &mut dyn Iterator<Item = usize>, pool: &[String]| {
        ids.map(|i| pool[i].as_str()).collect::<Vec<_>>().join(" ")
    };
    let mut out = format!("states {}\nactions {}\nobservations {}\n", xs.join(" "), us.join(" "), ys.join(" "));
    out += &format!("initial {}\n", xs[sc.initial]);
    if let Some(set) = &sc.initial_set {
        out += &format!("initial-set {}\n", names(&mut set.iter().copied(), xs));
    }
    out.push('\n');
    for x in 0..es.num_states() {
        for u in 0..es.num_actions() {
            out += &format!("transition {} {} {}\n", xs[x], us[u], xs[es.next(x, u)]);
        }
    }
    out.push('\n');
    for (y, yname) in ys.iter().enumerate() {
        let block = names(&mut es.preimage(y).iter(), xs);
        out += &format!("sensor {}{}{}\n", yname, if block.is_empty() { "" } else { " " }, block);
    }
    if let Some(task) = &sc.task {
        let (kind, goal) = match &task.goal {
            Goal::Observation(g) => ("observation", names(&mut g.iter().copied(), ys)),
            Goal::State(g) => ("state", names(&mut g.iter().copied(), xs)),
        };
        out += &format!("\ntask {kind} {goal} horizon {}\n", task.horizon);
    }
    let o = &sc.options;
    for (key, v) in [("depth", o.depth.map(|d| d as u64)), ("samples", o.samples.map(|d| d as u64)), ("seed", o.seed)] {
        if let Some(v) = v {
            out += &format!("option {key} {v}\n");
        }
    }
    match &sc.policy {
        None => {}
        Some(PolicySpec::Belief { rules, default }) => {
            out += "\npolicy belief\n";
            for (b, u) in rules {
                out += &format!("belief {} -> {}\n", names(&mut b.iter(), xs), us[*u]);
            }
            out += &format!("default {}\n", us[*default]);
        }
        Some(PolicySpec::State(pi)) => {
            out += "\npolicy state\n";
            for (x, &u) in pi.actions().iter().enumerate() {
                out += &format!("state {} -> {}\n", xs[x], us[u]);
            }
        }
        Some(PolicySpec::Observation(pi_y)) => {
            out += "\npolicy observation\n";
            for (y, &u) in pi_y.iter().enumerate() {
                out += &format!("observe {} -> {}\n", ys[y], us[u]);
            }
        }
        Some(PolicySpec::Table(t)) => {
            out += "\npolicy table\n";
            for (h, &u) in t {
                let text = h.render(es);
                out += &format!("history {} -> {}\n", &text[1..text.len() - 1], us[u]);
            }
        }
    }
    out
}

/// Transition system or policy-labeled machine read from the `.its` format:
/// `states`, `labels`, `initial`, `edge <s> <label> <t>` and, for machines,
/// `actions` plus one `output <s> <() | xi | action>` per state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItsFile {
    pub system: TransitionSystem,
    pub actions: Vec<String>,
    pub outputs: Option<Vec<PolicyOutput>>,
}

impl ItsFile {
    /// The machine, when outputs are given and the transitions are full.
    pub fn machine(&self) -> Result<ObsMooreMachine> {
        let outputs = self
            .outputs
            .clone()
            .ok_or_else(|| Error::Integrity("no `output` lines: not a machine".into()))?;
        MooreMachine::from_transition_system(&self.system, outputs)
    }
}

pub fn parse_its(text: &str) -> Result<ItsFile> {
    let lines = lines(text);
    if lines.is_empty() {
        return Err(parse_err(1, "empty transition system"));
    }
    let find = |key: &str| lines.iter().find(|(_, w)| w[0] == key);
    let (ls, sw) = find("states").ok_or_else(|| parse_err(1, "missing `states` line"))?;
    let states = declare(&sw[1..], "state", *ls)?;
    let (ll, lw) = find("labels").ok_or_else(|| parse_err(1, "missing `labels` line"))?;
    let labels = declare(&lw[1..], "label", *ll)?;
    let actions = match find("actions") {
        Some((l, w)) => declare(&w[1..], "action", *l)?,
        None => Vec::new(),
    };
    let mut initial = 0;
    let mut edges = Vec::new();
    let mut outputs: Vec<Option<PolicyOutput>> = vec![None; states.len()];
    let mut any_output = false;
    for (l, w) in &lines {
        let l = *l;
        match (w[0], &w[1..]) {
            ("states" | "labels" | "actions", _) => {}
            ("initial", [s]) => initial = lookup(&states, s, "state", l)?,
            ("edge", [s, y, t]) => edges.push((
                lookup(&states, s, "state", l)?,
                lookup(&labels, y, "label", l)?,
                lookup(&states, t, "state", l)?,
            )),
            ("output", [s, o]) => {
                let s = lookup(&states, s, "state", l)?;
                let o = PolicyOutput::parse(o, &actions)
                    .ok_or_else(|| Error::Integrity(format!("line {l}: undeclared action `{o}`")))?;
                outputs[s] = Some(o);
                any_output = true;
            }
            (key, _) => return Err(parse_err(l, format!("malformed `{key}` line"))),
        }
    }
    let mut system = TransitionSystem::new(states.clone(), labels, initial)?;
    for (s, y, t) in edges {
        system.add_transition(s, y, t)?;
    }
    let outputs = if any_output {
        Some(
            outputs
                .iter()
                .enumerate()
                .map(|(s, o)| o.ok_or_else(|| Error::Integrity(format!("state `{}` has no output", states[s]))))
                .collect::<Result<_>>()?,
        )
    } else {
        None
    };
    Ok(ItsFile {
        system,
        actions,
        outputs,
    })
}

/// State names usable as words: the given ones when they are distinct and
/// free of whitespace, else `s0, s1, ...`.
fn word_names(names: &[String]) -> Vec<String> {
    let distinct = names.iter().collect::<BTreeSet<_>>().len() == names.len();
    let wordy = names
        .iter()
        .all(|n| !n.is_empty() && !n.contains(char::is_whitespace) && !n.contains('#'));
    if distinct && wordy {
        names.to_vec()
    } else {
        (0..names.len()).map(|i| format!("s{i}")).collect()
    }
}

pub fn serialize_its(ts: &TransitionSystem) -> String {
    serialize_its_with(ts, None)
}

/// Machine file with outputs written via `actions`.
pub fn serialize_machine(m: &ObsMooreMachine, actions: &[String]) -> String {
    serialize_its_with(&m.to_transition_system(), Some((m.outputs(), actions)))
}

fn serialize_its_with(ts: &TransitionSystem, outputs: Option<(&[PolicyOutput], &[String])>) -> String {
    let states = word_names(ts.state_names());
    let labels = word_names(ts.label_names());
    let mut out = format!("states {}\nlabels {}\n", states.join(" "), labels.join(" "));
    if let Some((_, actions)) = outputs {
        if !actions.is_empty() {
            out += &format!("actions {}\n", actions.join(" "));
        }
    }
    out += &format!("initial {}\n", states[ts.initial()]);
    for (s, y, t) in ts.transitions() {
        out += &format!("edge {} {} {}\n", states[s], labels[y], states[t]);
    }
    if let Some((outs, actions)) = outputs {
        for (s, o) in outs.iter().enumerate() {
            out += &format!("output {} {}\n", states[s], o.render(actions));
        }
    }
    out
}
