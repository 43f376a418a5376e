//! External systems, histories, belief states and task descriptions.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::machine::{ActionId, ObsId};
use crate::ts::{StateId, TransitionSystem};

/// Finite deterministic plant with a total state-to-observation sensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalSystem {
    dynamics: TransitionSystem,
    sensor: Vec<ObsId>,
    observations: Vec<String>,
}

impl ExternalSystem {
    /// `dynamics` carries actions as edge labels and must be full; its
    /// initial state is not used.
    pub fn new(dynamics: TransitionSystem, sensor: Vec<ObsId>, observations: Vec<String>) -> Result<Self> {
        if let Some((s, l)) = (0..dynamics.num_states())
            .flat_map(|s| (0..dynamics.num_labels()).map(move |l| (s, l)))
            .find(|&(s, l)| dynamics.successor(s, l).is_none())
        {
            return Err(Error::MissingTransition {
                state: dynamics.state_name(s).to_owned(),
                label: dynamics.label_name(l).to_owned(),
            });
        }
        if sensor.len() != dynamics.num_states() {
            return Err(Error::Integrity(format!(
                "sensor covers {} of {} states",
                sensor.len(),
                dynamics.num_states()
            )));
        }
        if let Some(&y) = sensor.iter().find(|&&y| y >= observations.len()) {
            return Err(Error::UnknownObservation(y));
        }
        Ok(Self {
            dynamics,
            sensor,
            observations,
        })
    }

    /// Builds a system from a successor table `next[x][u]`, naming states
    /// `x0..`, actions `u0..` and observations `0..`.
    pub fn from_table(next: &[Vec<StateId>], sensor: Vec<ObsId>, num_observations: usize) -> Result<Self> {
        let num_actions = next.first().map_or(0, Vec::len);
        let mut ts = TransitionSystem::new(
            (0..next.len()).map(|i| format!("x{i}")).collect(),
            (0..num_actions).map(|i| format!("u{i}")).collect(),
            0,
        )?;
        for (x, row) in next.iter().enumerate() {
            for (u, &t) in row.iter().enumerate() {
                ts.add_transition(x, u, t)?;
            }
        }
        Self::new(ts, sensor, (0..num_observations).map(|i| i.to_string()).collect())
    }

    pub fn dynamics(&self) -> &TransitionSystem {
        &self.dynamics
    }

    pub fn num_states(&self) -> usize {
        self.dynamics.num_states()
    }

    pub fn num_actions(&self) -> usize {
        self.dynamics.num_labels()
    }

    pub fn num_observations(&self) -> usize {
        self.observations.len()
    }

    pub fn next(&self, x: StateId, u: ActionId) -> StateId {
        self.dynamics.successor(x, u).expect("dynamics are full")
    }

    pub fn observe(&self, x: StateId) -> ObsId {
        self.sensor[x]
    }

    pub fn sensor(&self) -> &[ObsId] {
        &self.sensor
    }

    pub fn state_names(&self) -> &[String] {
        self.dynamics.state_names()
    }

    pub fn action_names(&self) -> &[String] {
        self.dynamics.label_names()
    }

    pub fn observation_names(&self) -> &[String] {
        &self.observations
    }

    pub fn preimage(&self, y: ObsId) -> BeliefState {
        BeliefState::from_iter((0..self.num_states()).filter(|&x| self.sensor[x] == y))
    }

    pub fn all_states(&self) -> BeliefState {
        BeliefState::from_iter(0..self.num_states())
    }

    /// Same dynamics observed through a different sensor.
    pub fn with_sensor(&self, sensor: Vec<ObsId>, observations: Vec<String>) -> Result<Self> {
        Self::new(self.dynamics.clone(), sensor, observations)
    }

    /// Same dynamics with the identity sensor; observation names are the
    /// state names.
    pub fn with_state_feedback(&self) -> Self {
        Self {
            dynamics: self.dynamics.clone(),
            sensor: (0..self.num_states()).collect(),
            observations: self.state_names().to_vec(),
        }
    }

    /// Whether every observation labels exactly one state.
    pub fn bijective_violation(&self) -> Option<ObsId> {
        (0..self.num_observations()).find(|&y| self.preimage(y).len() != 1)
    }
}

/// Set of external states consistent with a history.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BeliefState {
    support: BTreeSet<StateId>,
}

impl BeliefState {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn support(&self) -> &BTreeSet<StateId> {
        &self.support
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn contains(&self, x: StateId) -> bool {
        self.support.contains(&x)
    }

    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        self.support.iter().copied()
    }

    pub fn render(&self, names: &[String]) -> String {
        let inner: Vec<&str> = self.iter().map(|x| names[x].as_str()).collect();
        format!("{{{}}}", inner.join(","))
    }
}

impl FromIterator<StateId> for BeliefState {
    fn from_iter<I: IntoIterator<Item = StateId>>(iter: I) -> Self {
        Self {
            support: iter.into_iter().collect(),
        }
    }
}

/// One element of an alternating history.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistoryToken {
    Obs(ObsId),
    Act(ActionId),
}

/// Observation-first action-observation history `(y1, u1, y2, ..., yN)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct History {
    observations: Vec<ObsId>,
    actions: Vec<ActionId>,
}

impl History {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn start(y: ObsId) -> Self {
        Self {
            observations: vec![y],
            actions: Vec::new(),
        }
    }

    pub fn new(observations: Vec<ObsId>, actions: Vec<ActionId>) -> Result<Self> {
        let ok = if observations.is_empty() {
            actions.is_empty()
        } else {
            actions.len() + 1 == observations.len()
        };
        if !ok {
            return Err(Error::MalformedHistory(format!(
                "{} observations cannot interleave with {} actions",
                observations.len(),
                actions.len()
            )));
        }
        Ok(Self { observations, actions })
    }

    pub fn from_tokens(tokens: &[HistoryToken]) -> Result<Self> {
        let mut observations = Vec::new();
        let mut actions = Vec::new();
        for (i, t) in tokens.iter().enumerate() {
            match (i % 2, t) {
                (0, HistoryToken::Obs(y)) => observations.push(*y),
                (1, HistoryToken::Act(u)) => actions.push(*u),
                _ => {
                    return Err(Error::MalformedHistory(format!(
                        "position {i} expects {}",
                        if i % 2 == 0 { "an observation" } else { "an action" }
                    )))
                }
            }
        }
        Self::new(observations, actions)
    }

    /// Extends a nonempty history by an action and the next observation, or
    /// starts an empty one with the observation alone.
    pub fn push(&mut self, u: Option<ActionId>, y: ObsId) -> Result<()> {
        match (self.observations.is_empty(), u) {
            (true, None) => {}
            (false, Some(u)) => self.actions.push(u),
            _ => {
                return Err(Error::MalformedHistory(
                    "an action must separate consecutive observations".into(),
                ))
            }
        }
        self.observations.push(y);
        Ok(())
    }

    pub fn extended(&self, u: ActionId, y: ObsId) -> Self {
        let mut h = self.clone();
        if h.observations.is_empty() {
            h.observations.push(y);
        } else {
            h.actions.push(u);
            h.observations.push(y);
        }
        h
    }

    pub fn observations(&self) -> &[ObsId] {
        &self.observations
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.actions
    }

    /// Number of observations (stages).
    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn last_observation(&self) -> Option<ObsId> {
        self.observations.last().copied()
    }

    pub fn tokens(&self) -> Vec<HistoryToken> {
        let mut out = Vec::with_capacity(self.observations.len() + self.actions.len());
        for (i, &y) in self.observations.iter().enumerate() {
            if i > 0 {
                out.push(HistoryToken::Act(self.actions[i - 1]));
            }
            out.push(HistoryToken::Obs(y));
        }
        out
    }

    pub fn render(&self, es: &ExternalSystem) -> String {
        let parts: Vec<&str> = self
            .tokens()
            .into_iter()
            .map(|t| match t {
                HistoryToken::Obs(y) => es.observation_names()[y].as_str(),
                HistoryToken::Act(u) => es.action_names()[u].as_str(),
            })
            .collect();
        format!("({})", parts.join(","))
    }

    /// Parses whitespace- or comma-separated names, alternating observation
    /// and action names and starting with an observation.
    pub fn parse(text: &str, es: &ExternalSystem) -> Result<Self> {
        let mut tokens = Vec::new();
        let cleaned = text.trim().trim_start_matches('(').trim_end_matches(')');
        for (i, word) in cleaned.split(|c: char| c == ',' || c.is_whitespace()).filter(|w| !w.is_empty()).enumerate() {
            let tok = if i % 2 == 0 {
                es.observation_names()
                    .iter()
                    .position(|n| n == word)
                    .map(HistoryToken::Obs)
            } else {
                es.action_names().iter().position(|n| n == word).map(HistoryToken::Act)
            };
            tokens.push(tok.ok_or_else(|| Error::MalformedHistory(format!("unexpected token `{word}` at {i}")))?);
        }
        Self::from_tokens(&tokens)
    }
}

impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .tokens()
            .into_iter()
            .map(|t| match t {
                HistoryToken::Obs(y) => format!("y{y}"),
                HistoryToken::Act(u) => format!("u{u}"),
            })
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Goal {
    /// Accomplished once the latest observation is in the set.
    Observation(BTreeSet<ObsId>),
    /// Accomplished once every state consistent with the history is in the
    /// set.
    State(BTreeSet<StateId>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskSpec {
    pub goal: Goal,
    pub horizon: usize,
}

impl TaskSpec {
    pub fn new(goal: Goal, horizon: usize) -> Result<Self> {
        let empty = match &goal {
            Goal::Observation(g) => g.is_empty(),
            Goal::State(g) => g.is_empty(),
        };
        if empty {
            return Err(Error::Integrity("task goal set is empty".into()));
        }
        if horizon == 0 {
            return Err(Error::Integrity("task horizon must be at least 1".into()));
        }
        Ok(Self { goal, horizon })
    }

    pub fn observation(goal: impl IntoIterator<Item = ObsId>, horizon: usize) -> Result<Self> {
        Self::new(Goal::Observation(goal.into_iter().collect()), horizon)
    }

    pub fn state(goal: impl IntoIterator<Item = StateId>, horizon: usize) -> Result<Self> {
        Self::new(Goal::State(goal.into_iter().collect()), horizon)
    }

    pub fn needs_belief(&self) -> bool {
        matches!(self.goal, Goal::State(_))
    }

    /// Accomplishment test given the latest observation and, for state goals,
    /// the current belief.
    pub(crate) fn accomplished(&self, y: ObsId, belief: Option<&BeliefState>) -> bool {
        match &self.goal {
            Goal::Observation(g) => g.contains(&y),
            Goal::State(g) => {
                let b = belief.expect("state goals track beliefs");
                !b.is_empty() && b.iter().all(|x| g.contains(&x))
            }
        }
    }
}
