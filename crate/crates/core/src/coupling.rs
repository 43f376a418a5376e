//! Coupling a policy-labeled filter with an external system: belief
//! filtering, attainability, task labels, simulation and feasibility.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::machine::{ActionId, ObsId, ObsMooreMachine, PolicyOutput};
use crate::system::{BeliefState, ExternalSystem, History, TaskSpec};
use crate::ts::{Labeling, StateId, TransitionSystem};

/// Filter over observations together with an action labeling of its states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolicyLabeledIts {
    its: TransitionSystem,
    policy: Labeling<PolicyOutput>,
}

impl PolicyLabeledIts {
    pub fn new(its: TransitionSystem, policy: Labeling<PolicyOutput>) -> Result<Self> {
        if policy.len() != its.num_states() {
            return Err(Error::DomainMismatch);
        }
        for s in its.reachable_order() {
            if !policy.in_domain(s) {
                return Err(Error::UndefinedLabel(its.state_name(s).to_owned()));
            }
        }
        Ok(Self { its, policy })
    }

    pub fn from_machine(m: &ObsMooreMachine) -> Self {
        Self {
            its: m.to_transition_system(),
            policy: m.output_labeling(),
        }
    }

    /// Memoryless policy over the observations of `es`: one internal state
    /// per observation plus the start state.
    pub fn reactive(es: &ExternalSystem, action_of_obs: &[ActionId]) -> Self {
        let k = es.num_observations();
        let mut names = vec!["()".to_owned()];
        names.extend(es.observation_names().iter().cloned());
        let mut its = TransitionSystem::new(names, es.observation_names().to_vec(), 0).expect("nonempty");
        for s in 0..=k {
            for y in 0..k {
                its.add_transition(s, y, y + 1).expect("fresh");
            }
        }
        let mut labels = vec![PolicyOutput::Start];
        labels.extend(action_of_obs.iter().map(|&u| PolicyOutput::Act(u)));
        Self {
            its,
            policy: Labeling::total(labels),
        }
    }

    pub fn its(&self) -> &TransitionSystem {
        &self.its
    }

    pub fn policy(&self) -> &Labeling<PolicyOutput> {
        &self.policy
    }

    pub fn output(&self, s: StateId) -> Result<PolicyOutput> {
        self.policy
            .get(s)
            .copied()
            .ok_or_else(|| Error::UndefinedLabel(self.its.state_name(s).to_owned()))
    }
}

/// Belief after applying `u` and then observing `y`.
pub fn belief_step(es: &ExternalSystem, b: &BeliefState, u: ActionId, y: ObsId) -> BeliefState {
    b.iter().map(|x| es.next(x, u)).filter(|&x| es.observe(x) == y).collect()
}

/// Prior over all states conditioned on the first observation.
pub fn initial_belief(es: &ExternalSystem, y1: ObsId) -> BeliefState {
    es.preimage(y1)
}

/// Belief after a whole history; every state for the empty history.
pub fn belief_after(es: &ExternalSystem, eta: &History) -> BeliefState {
    let obs = eta.observations();
    let Some(&y1) = obs.first() else {
        return es.all_states();
    };
    let mut b = initial_belief(es, y1);
    for (&u, &y) in eta.actions().iter().zip(&obs[1..]) {
        if b.is_empty() {
            break;
        }
        b = belief_step(es, &b, u, y);
    }
    b
}

fn check_indices(es: &ExternalSystem, eta: &History) -> Result<()> {
    if let Some(&y) = eta.observations().iter().find(|&&y| y >= es.num_observations()) {
        return Err(Error::MalformedHistory(format!("observation index {y} out of range")));
    }
    if let Some(&u) = eta.actions().iter().find(|&&u| u >= es.num_actions()) {
        return Err(Error::MalformedHistory(format!("action index {u} out of range")));
    }
    Ok(())
}

pub fn is_attainable(es: &ExternalSystem, eta: &History) -> Result<bool> {
    check_indices(es, eta)?;
    Ok(eta.is_empty() || !belief_after(es, eta).is_empty())
}

/// Task label of a history: whether it accomplishes the task.
pub fn task_label(task: &TaskSpec, es: &ExternalSystem, eta: &History) -> Result<bool> {
    check_indices(es, eta)?;
    let Some(y) = eta.last_observation() else {
        return Ok(false);
    };
    let belief = task.needs_belief().then(|| belief_after(es, eta));
    Ok(task.accomplished(y, belief.as_ref()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Accomplished,
    /// The coupled state repeated before the task was accomplished.
    Diverges,
    HorizonExceeded,
}

/// One stage of a coupled run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub stage: usize,
    pub internal: StateId,
    pub external: StateId,
    pub action: Option<ActionId>,
    pub observation: ObsId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoupledRun {
    pub history: History,
    /// Action selected at every stage, including the stage at which the run
    /// stopped when the policy names one there.
    pub actions: Vec<ActionId>,
    pub trace: Vec<TraceRecord>,
    pub outcome: Outcome,
}

impl CoupledRun {
    /// Line-oriented `stage internal external action observation` records.
    pub fn render_trace(&self, its: &PolicyLabeledIts, es: &ExternalSystem) -> String {
        let mut out = String::from("# stage internal external action observation\n");
        for r in &self.trace {
            out.push_str(&format!(
                "{} {} {} {} {}\n",
                r.stage,
                its.its().state_name(r.internal),
                es.state_names()[r.external],
                r.action.map_or("-", |u| es.action_names()[u].as_str()),
                es.observation_names()[r.observation],
            ));
        }
        out.push_str(&format!("# outcome {:?}\n", self.outcome));
        out
    }
}

/// Runs the coupled system from `(initial, x1)` until the task is
/// accomplished, the coupled state repeats, or the horizon is reached.
pub fn run_coupled(its: &PolicyLabeledIts, es: &ExternalSystem, x1: StateId, task: &TaskSpec) -> Result<CoupledRun> {
    if its.its().num_labels() != es.num_observations() {
        return Err(Error::AlphabetMismatch);
    }
    if x1 >= es.num_states() {
        return Err(Error::UnknownState(x1));
    }
    let mut iota = its.its().initial();
    let mut x = x1;
    let mut history = History::empty();
    let mut actions = Vec::new();
    let mut trace = Vec::new();
    let mut belief: Option<BeliefState> = None;
    let mut prev_action: Option<ActionId> = None;
    let mut seen: HashSet<(StateId, StateId, Option<BeliefState>)> = HashSet::new();

    for stage in 1.. {
        let y = es.observe(x);
        iota = its.its().successor(iota, y).ok_or_else(|| Error::MissingTransition {
            state: its.its().state_name(iota).to_owned(),
            label: its.its().label_name(y).to_owned(),
        })?;
        history.push(prev_action, y)?;
        if task.needs_belief() {
            belief = Some(match (&belief, prev_action) {
                (Some(b), Some(u)) => belief_step(es, b, u, y),
                _ => initial_belief(es, y),
            });
        }
        let out = its.output(iota)?;
        trace.push(TraceRecord {
            stage,
            internal: iota,
            external: x,
            action: out.action(),
            observation: y,
        });
        let outcome = if task.accomplished(y, belief.as_ref()) {
            Some(Outcome::Accomplished)
        } else if !seen.insert((iota, x, belief.clone())) {
            Some(Outcome::Diverges)
        } else if stage >= task.horizon {
            Some(Outcome::HorizonExceeded)
        } else {
            None
        };
        if let Some(outcome) = outcome {
            if outcome == Outcome::Accomplished {
                actions.extend(out.action());
            }
            return Ok(CoupledRun {
                history,
                actions,
                trace,
                outcome,
            });
        }
        let u = match out {
            PolicyOutput::Act(u) => u,
            PolicyOutput::Dead => return Err(Error::PolicyEmitsXi(its.its().state_name(iota).to_owned())),
            PolicyOutput::Start => return Err(Error::NoAction(its.its().state_name(iota).to_owned())),
        };
        if u >= es.num_actions() {
            return Err(Error::NoAction(its.its().state_name(iota).to_owned()));
        }
        actions.push(u);
        prev_action = Some(u);
        x = es.next(x, u);
    }
    unreachable!("the stage loop only exits by returning")
}

/// Whether the coupled run accomplishes the task from every state in
/// `initial_set` (all states when `None`).
pub fn is_feasible(
    its: &PolicyLabeledIts,
    es: &ExternalSystem,
    task: &TaskSpec,
    initial_set: Option<&[StateId]>,
) -> Result<bool> {
    let all: Vec<StateId> = (0..es.num_states()).collect();
    for &x1 in initial_set.unwrap_or(&all) {
        if run_coupled(its, es, x1, task)?.outcome != Outcome::Accomplished {
            return Ok(false);
        }
    }
    Ok(true)
}

/// As [`is_feasible`], treating runs that hit the dead label or an undefined
/// action as failures instead of errors.
pub fn is_feasible_lenient(
    its: &PolicyLabeledIts,
    es: &ExternalSystem,
    task: &TaskSpec,
    initial_set: Option<&[StateId]>,
) -> bool {
    let all: Vec<StateId> = (0..es.num_states()).collect();
    initial_set
        .unwrap_or(&all)
        .iter()
        .all(|&x1| matches!(run_coupled(its, es, x1, task), Ok(r) if r.outcome == Outcome::Accomplished))
}
