//! Command-line front end. Each verb prints a plain-text report and, given
//! `--out-dir`, writes its artifacts there; `--dot` adds Graphviz files (or
//! prints them when no directory is given).

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::coupling::{is_feasible, run_coupled, PolicyLabeledIts};
use crate::dot::{gap_tree_to_dot, machine_to_dot, trace_to_dot, ts_to_dot};
use crate::error::{Error, Result};
use crate::geometry::{Navigator, Point, SimplePolygon};
use crate::gnt::{gap_sensor_reactive_counterexample, gnt_supports_navigation, navigation_trace, navigation_traces, replay, sample_interior};
use crate::machine::{ObsId, ObsMooreMachine};
use crate::minimize::{find_isomorphism, minimal_sufficient_refinement, multi_policy_minimal, support_failure, supports, SupportFailure};
use crate::reactive::{
    extract_state_policy, feasible_state_policies, minimal_reactive_sensor, observation_policy, reactive_policy_exists,
    sensor_sufficient_for_reactive, state_policy_feasible, SensorMap, StatePolicy,
};
use crate::restriction::{build_restriction, HistoryPolicy};
use crate::scenario::{parse_its, parse_scenario, serialize_machine, serialize_its, PolicySpec, Scenario};
use crate::system::{ExternalSystem, TaskSpec};
use crate::ts::StateId;

#[derive(Debug, Parser)]
#[command(name = "infofilter", version, about = "Minimal sufficient filters for information-feedback policies")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Depth bound for table policies (default: the table's longest history).
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Overrides the scenario task's horizon.
    #[arg(long, global = true)]
    pub horizon: Option<usize>,
    /// Sample count for sampling searches.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Seed for sampling searches.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for artifact files.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Also emit Graphviz DOT.
    #[arg(long, global = true)]
    pub dot: bool,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Restriction of the history filter by the scenario's policy.
    Restrict { scenario: PathBuf },
    /// Minimal sufficient refinement of the restriction.
    Minimize { scenario: PathBuf },
    /// Whether a transition system supports the scenario's policy.
    Supports {
        scenario: PathBuf,
        #[arg(long)]
        candidate: PathBuf,
    },
    /// Whether two policies (scenarios or machine files) minimize to the same machine.
    Isomorphic { first: PathBuf, second: PathBuf },
    /// Minimal machine supporting every given scenario's policy.
    Join {
        #[arg(required = true, num_args = 2..)]
        scenarios: Vec<PathBuf>,
    },
    /// Whether the scenario's policy accomplishes its task from every start.
    Feasible { scenario: PathBuf },
    /// State policy behind a history policy under a bijective sensor.
    ExtractPix { scenario: PathBuf },
    /// Whether the scenario's sensor suffices for a feasible reactive policy.
    SensorCheck { scenario: PathBuf },
    /// Coarsest sensor realizing a feasible state policy reactively.
    MinimalSensor { scenario: PathBuf },
    /// Whether any memoryless state policy accomplishes the task.
    ReactiveExists {
        scenario: PathBuf,
        /// Give up after this many candidate policies.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Gap sensor reading at a point.
    Gaps {
        polygon: PathBuf,
        #[arg(long, value_parser = parse_point)]
        at: Point,
    },
    /// Shortest path from a point to a vertex.
    Spt {
        polygon: PathBuf,
        #[arg(long, value_parser = parse_point)]
        from: Point,
        #[arg(long)]
        goal: usize,
    },
    /// Gap events along the shortest path from a point to a vertex.
    Events {
        polygon: PathBuf,
        #[arg(long, value_parser = parse_point)]
        from: Point,
        #[arg(long)]
        goal: usize,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Gap navigation tree filter against optimal navigation to every vertex.
    GntRun {
        polygon: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
    },
    /// Two points with equal gap readings but different optimal first moves.
    ReactiveCounterexample {
        polygon: PathBuf,
        #[arg(long)]
        goal: usize,
    },
}

/// Report text and whether the verdict was positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub text: String,
    pub positive: bool,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.positive {
            0
        } else {
            1
        }
    }
}

/// `x,y` or `x y`.
pub fn parse_point(s: &str) -> std::result::Result<Point, String> {
    let parts: Vec<&str> = s.split(|c: char| c == ',' || c.is_whitespace()).filter(|w| !w.is_empty()).collect();
    match parts[..] {
        [x, y] => match (x.parse(), y.parse()) {
            (Ok(x), Ok(y)) => Ok(Point::new(x, y)),
            _ => Err(format!("not a point: `{s}`")),
        },
        _ => Err(format!("expected `x,y`, found `{s}`")),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Integrity(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn load_scenario(path: &Path, flags: &Flags) -> Result<Scenario> {
    let mut sc = parse_scenario(&read(path)?)?;
    if let (Some(h), Some(task)) = (flags.horizon, sc.task.as_mut()) {
        *task = TaskSpec::new(task.goal.clone(), h)?;
    }
    Ok(sc)
}

fn load_polygon(path: &Path) -> Result<Navigator> {
    Ok(Navigator::new(SimplePolygon::parse(&read(path)?)?))
}

fn task(sc: &Scenario) -> Result<&TaskSpec> {
    sc.task.as_ref().ok_or_else(|| Error::Integrity("scenario declares no task".into()))
}

fn history_policy(sc: &Scenario) -> Result<HistoryPolicy> {
    sc.policy
        .as_ref()
        .ok_or_else(|| Error::Integrity("scenario declares no policy".into()))?
        .history_policy(&sc.system)
}

fn depth(sc: &Scenario, pol: &HistoryPolicy, flags: &Flags) -> Option<usize> {
    flags.depth.or(sc.options.depth).or_else(|| pol.table_depth())
}

fn restriction(sc: &Scenario, flags: &Flags) -> Result<ObsMooreMachine> {
    let pol = history_policy(sc)?;
    build_restriction(&sc.system, &pol, depth(sc, &pol, flags))
}

/// Artifact sink: files under `--out-dir`, DOT echoed into the report when
/// there is no directory.
struct Artifacts<'a> {
    flags: &'a Flags,
    report: String,
}

impl<'a> Artifacts<'a> {
    fn new(flags: &'a Flags) -> Self {
        Self {
            flags,
            report: String::new(),
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.report.push_str(s.as_ref());
        self.report.push('\n');
    }

    /// Written via a temporary file and a rename.
    fn file(&mut self, name: &str, contents: &str) -> Result<()> {
        let Some(dir) = &self.flags.out_dir else {
            return Ok(());
        };
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let path = dir.join(name);
        let tmp = dir.join(format!(".{name}.tmp"));
        fs::write(&tmp, contents).map_err(|e| io_err(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| io_err(&path, e))?;
        self.line(format!("wrote {}", path.display()));
        Ok(())
    }

    fn dot(&mut self, name: &str, contents: impl FnOnce() -> String) -> Result<()> {
        if !self.flags.dot {
            return Ok(());
        }
        let text = contents();
        if self.flags.out_dir.is_some() {
            self.file(name, &text)
        } else {
            self.report.push_str(&text);
            Ok(())
        }
    }

    fn finish(self, positive: bool) -> Report {
        Report {
            text: self.report,
            positive,
        }
    }
}

fn word(es: &ExternalSystem, w: &[ObsId]) -> String {
    format!("({})", w.iter().map(|&y| es.observation_names()[y].as_str()).collect::<Vec<_>>().join(","))
}

fn list_machine(out: &mut Artifacts, m: &ObsMooreMachine, actions: &[String]) {
    for s in m.reachable_order() {
        let succ: Vec<String> = (0..m.num_inputs())
            .map(|y| format!("{}->{}", m.inputs()[y], m.state_name(m.step(s, y))))
            .collect();
        out.line(format!("  {} : {}  [{}]", m.state_name(s), m.output(s).render(actions), succ.join(" ")));
    }
}

fn starts(sc: &Scenario) -> Vec<StateId> {
    sc.initial_set.clone().unwrap_or_else(|| (0..sc.system.num_states()).collect())
}

/// State policies the verb should consider: the scenario's own, else every
/// feasible one.
fn candidate_state_policies(sc: &Scenario) -> Result<Vec<StatePolicy>> {
    match &sc.policy {
        Some(PolicySpec::State(pi)) => Ok(vec![pi.clone()]),
        _ => Ok(feasible_state_policies(&sc.system, task(sc)?, sc.initial_set.as_deref())),
    }
}

/// Machine named by a path: a scenario's minimized restriction, or a
/// machine file; with the action names used to print outputs.
fn load_machine(path: &Path, flags: &Flags) -> Result<(ObsMooreMachine, Vec<String>)> {
    if path.extension().is_some_and(|e| e == "scn") {
        let sc = load_scenario(path, flags)?;
        Ok((restriction(&sc, flags)?, sc.system.action_names().to_vec()))
    } else {
        let f = parse_its(&read(path)?)?;
        Ok((f.machine()?, f.actions))
    }
}

pub fn run(cli: &Cli) -> Result<Report> {
    let flags = &cli.flags;
    let mut out = Artifacts::new(flags);
    let positive = match &cli.verb {
        Verb::Restrict { scenario } => {
            let sc = load_scenario(scenario, flags)?;
            let m = restriction(&sc, flags)?;
            let actions = sc.system.action_names();
            out.line(format!("restriction: {} states", m.num_reachable()));
            list_machine(&mut out, &m, actions);
            out.file("restriction.its", &serialize_machine(&m, actions))?;
            out.dot("restriction.dot", || machine_to_dot(&m, actions, "restriction"))?;
            true
        }
        Verb::Minimize { scenario } => {
            let sc = load_scenario(scenario, flags)?;
            let m = restriction(&sc, flags)?;
            let (_, min) = minimal_sufficient_refinement(&m);
            let actions = sc.system.action_names();
            out.line(format!("restriction: {} states; minimized: {} states", m.num_reachable(), min.num_states()));
            list_machine(&mut out, &min, actions);
            out.file("minimized.its", &serialize_machine(&min, actions))?;
            out.dot("minimized.dot", || machine_to_dot(&min, actions, "minimized"))?;
            true
        }
        Verb::Supports { scenario, candidate } => {
            let sc = load_scenario(scenario, flags)?;
            let (_, m) = minimal_sufficient_refinement(&restriction(&sc, flags)?);
            let cand = parse_its(&read(candidate)?)?.system;
            let es = &sc.system;
            match supports(&cand, &m) {
                Some(mu) => {
                    out.line("supported; policy on candidate states:");
                    for (s, o) in mu.labels().iter().enumerate() {
                        if let Some(o) = o {
                            out.line(format!("  {} : {}", cand.state_name(s), o.render(es.action_names())));
                        }
                    }
                    true
                }
                None => {
                    let why = match support_failure(&cand, &m) {
                        Some(SupportFailure::Indistinguishable { first, second }) => format!(
                            "histories {} and {} cannot be distinguished by the candidate, but the policy answers {} and {}",
                            word(es, &first),
                            word(es, &second),
                            m.evaluate(&first)?.render(es.action_names()),
                            m.evaluate(&second)?.render(es.action_names()),
                        ),
                        Some(SupportFailure::Missing { word: w }) => {
                            format!("the candidate has no transition for history {}", word(es, &w))
                        }
                        _ => "the candidate's labels differ from the observations".to_owned(),
                    };
                    out.line(format!("not supported: {why}"));
                    false
                }
            }
        }
        Verb::Isomorphic { first, second } => {
            let (a, actions) = load_machine(first, flags)?;
            let (b, _) = load_machine(second, flags)?;
            let (ma, mb) = (minimal_sufficient_refinement(&a).1, minimal_sufficient_refinement(&b).1);
            match find_isomorphism(&ma, &mb) {
                Some(pairs) => {
                    out.line(format!("isomorphic after minimization ({} states):", ma.num_states()));
                    for (p, q) in pairs {
                        out.line(format!(
                            "  {} <-> {} : {}",
                            ma.state_name(p),
                            mb.state_name(q),
                            ma.output(p).render(&actions)
                        ));
                    }
                    true
                }
                None => {
                    out.line(format!(
                        "not isomorphic: minimized machines have {} and {} states",
                        ma.num_states(),
                        mb.num_states()
                    ));
                    false
                }
            }
        }
        Verb::Join { scenarios } => {
            let mut machines = Vec::new();
            let mut actions = Vec::new();
            for p in scenarios {
                let sc = load_scenario(p, flags)?;
                machines.push(restriction(&sc, flags)?);
                actions.push(sc.system.action_names().to_vec());
            }
            let joint = multi_policy_minimal(&machines)?;
            out.line(format!("joint minimal machine: {} states", joint.num_states()));
            let render = |s: usize| {
                joint
                    .output(s)
                    .iter()
                    .zip(&actions)
                    .map(|(o, a)| o.render(a))
                    .collect::<Vec<_>>()
                    .join(",")
            };
            let mut ts = joint.to_transition_system();
            let names: Vec<String> = (0..joint.num_states()).map(|s| format!("{}:[{}]", joint.state_name(s), render(s))).collect();
            for s in joint.reachable_order() {
                out.line(format!("  {}", names[s]));
            }
            ts = relabel(&ts, names)?;
            out.file("join.its", &serialize_its(&ts))?;
            out.dot("join.dot", || ts_to_dot(&ts, "join"))?;
            true
        }
        Verb::Feasible { scenario } => {
            let sc = load_scenario(scenario, flags)?;
            let task = task(&sc)?;
            let es = &sc.system;
            let ok = match &sc.policy {
                Some(PolicySpec::State(pi)) => state_policy_feasible(es, pi, task, sc.initial_set.as_deref()),
                _ => {
                    let its = PolicyLabeledIts::from_machine(&restriction(&sc, flags)?);
                    for x1 in starts(&sc) {
                        let outcome = match run_coupled(&its, es, x1, task) {
                            Ok(r) => format!("{:?} after {} stages", r.outcome, r.trace.len()),
                            Err(e) => format!("failed: {e}"),
                        };
                        out.line(format!("  from {}: {outcome}", es.state_names()[x1]));
                    }
                    matches!(is_feasible(&its, es, task, sc.initial_set.as_deref()), Ok(true))
                }
            };
            out.line(if ok { "feasible" } else { "not feasible" });
            ok
        }
        Verb::ExtractPix { scenario } => {
            let sc = load_scenario(scenario, flags)?;
            let pol = history_policy(&sc)?;
            match extract_state_policy(&sc.system, &pol, task(&sc)?, sc.initial_set.as_deref())? {
                Some(pi) => {
                    out.line("state policy:");
                    out.line(pi.render(&sc.system));
                    true
                }
                None => {
                    out.line("the policy takes different actions at the same state: no state policy");
                    false
                }
            }
        }
        Verb::SensorCheck { scenario } => {
            let sc = load_scenario(scenario, flags)?;
            let h = SensorMap::of_system(&sc.system);
            let es = &sc.system;
            let found = candidate_state_policies(&sc)?
                .into_iter()
                .find(|pi| sensor_sufficient_for_reactive(&h, pi));
            out.line(format!("sensor blocks: {}", h.render(es.state_names())));
            match found {
                Some(pi) => {
                    let pi_y = observation_policy(&h, &pi).expect("sufficient");
                    out.line("sufficient; reactive policy:");
                    for (y, u) in pi_y.iter().enumerate() {
                        out.line(format!("  {} -> {}", es.observation_names()[y], es.action_names()[*u]));
                    }
                    true
                }
                None => {
                    out.line("not sufficient: every feasible state policy separates states the sensor conflates");
                    false
                }
            }
        }
        Verb::MinimalSensor { scenario } => {
            let sc = load_scenario(scenario, flags)?;
            let best = candidate_state_policies(&sc)?
                .into_iter()
                .map(|pi| (minimal_reactive_sensor(&pi), pi))
                .min_by_key(|(h, _)| h.num_blocks());
            match best {
                Some((h, pi)) => {
                    out.line(format!("minimal sensor ({} blocks): {}", h.num_blocks(), h.render(sc.system.state_names())));
                    out.line("for state policy:");
                    out.line(pi.render(&sc.system));
                    true
                }
                None => {
                    out.line("no feasible state policy");
                    false
                }
            }
        }
        Verb::ReactiveExists { scenario, budget } => {
            let sc = load_scenario(scenario, flags)?;
            let ok = reactive_policy_exists(&sc.system, task(&sc)?, sc.initial_set.as_deref(), *budget)?;
            out.line(if ok { "a feasible state policy exists" } else { "no feasible state policy" });
            ok
        }
        Verb::Gaps { polygon, at } => {
            let nav = load_polygon(polygon)?;
            let obs = nav.gap_observation(*at)?;
            out.line(format!("{} gaps", obs.len()));
            for v in obs.occluders() {
                out.line(format!("  occluded by v{v} at {}", nav.polygon().vertices()[*v]));
            }
            true
        }
        Verb::Spt { polygon, from, goal } => {
            let nav = load_polygon(polygon)?;
            let (len, path) = nav.shortest_path(*from, *goal)?;
            out.line(format!("length {len:.9}"));
            let mut hops = vec![from.to_string()];
            hops.extend(path.iter().map(|v| format!("v{v}")));
            out.line(format!("path {}", hops.join(" -> ")));
            true
        }
        Verb::Events { polygon, from, goal, step } => {
            let nav = load_polygon(polygon)?;
            let tr = navigation_trace(&nav, *from, *goal, *step)?;
            let trees = replay(&tr.initial, &tr.events)?;
            out.line(format!("initial tree {}", tr.initial));
            for e in &tr.events {
                out.line(format!("  {e}"));
            }
            out.line(format!("final tree {}", trees.last().expect("initial tree")));
            out.dot("events.dot", || trace_to_dot(&tr, "events"))?;
            true
        }
        Verb::GntRun { polygon, step } => {
            let nav = load_polygon(polygon)?;
            let samples = flags.samples.unwrap_or(60);
            let starts = sample_interior(&nav, samples, flags.seed.unwrap_or(7));
            let goals: Vec<usize> = (0..nav.polygon().len()).collect();
            let report = gnt_supports_navigation(&navigation_traces(&nav, &starts, &goals, *step)?)?;
            for (g, ok) in &report.supported {
                out.line(format!("  goal v{g}: {}", if *ok { "supported" } else { "not supported" }));
            }
            out.line(format!(
                "tree filter: {} states; joint minimal machine: {} states ({})",
                report.gnt_states,
                report.joint_states,
                if report.minimal() { "equal" } else { "tree filter is larger" }
            ));
            out.file("gnt.its", &serialize_its(&report.filter))?;
            out.dot("gnt.dot", || ts_to_dot(&report.filter, "gnt"))?;
            if flags.dot {
                for (i, t) in report.trees.iter().enumerate() {
                    out.dot(&format!("tree{i}.dot"), || gap_tree_to_dot(t, &format!("tree{i}")))?;
                }
            }
            report.supports_all()
        }
        Verb::ReactiveCounterexample { polygon, goal } => {
            let nav = load_polygon(polygon)?;
            let samples = flags.samples.unwrap_or(10_000);
            match gap_sensor_reactive_counterexample(&nav, *goal, samples, flags.seed.unwrap_or(1))? {
                Some((a, b)) => {
                    let target = |p| nav.optimal_action(p, *goal).map(|a| a.map_or("none".into(), |a| format!("v{}", a.target)));
                    out.line(format!("{} gaps at both {a} and {b}", nav.gap_observation(a)?.len()));
                    out.line(format!("optimal moves: {} vs {}", target(a)?, target(b)?));
                    true
                }
                None => {
                    out.line(format!("no counterexample among {samples} samples"));
                    false
                }
            }
        }
    };
    Ok(out.finish(positive))
}

fn relabel(ts: &crate::ts::TransitionSystem, names: Vec<String>) -> Result<crate::ts::TransitionSystem> {
    let mut out = crate::ts::TransitionSystem::new(names, ts.label_names().to_vec(), ts.initial())?;
    for (s, y, t) in ts.transitions() {
        out.add_transition(s, y, t)?;
    }
    Ok(out)
}

/// Parses arguments and runs the verb; returns the exit code with what
/// would go to stdout and stderr.
pub fn run_args<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if e.use_stderr() => return (2, String::new(), e.render().to_string()),
        Err(e) => return (0, e.render().to_string(), String::new()),
    };
    match run(&cli) {
        Ok(r) => (r.exit_code(), r.text, String::new()),
        Err(e) => (2, String::new(), format!("error: {e}\n")),
    }
}

/// Parses arguments, runs the verb and prints; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let (code, out, err) = run_args(args);
    print!("{out}");
    eprint!("{err}");
    code
}
