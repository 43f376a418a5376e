//! Observation-input Moore machines.
//!
//! A machine reads observations and emits an output per state. With
//! [`PolicyOutput`] outputs it is the finite generator of a restricted history
//! filter: its unrolling over all observation sequences is the observation
//! tree labeled by the policy.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::ts::{Labeling, StateId, TransitionSystem};

pub type ObsId = usize;
pub type ActionId = usize;

/// Output of a policy-labeled filter state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyOutput {
    /// The empty history: nothing has been observed, so no action is due.
    Start,
    Act(ActionId),
    /// Unattainable or off-policy information state.
    Dead,
}

impl PolicyOutput {
    pub fn action(self) -> Option<ActionId> {
        match self {
            PolicyOutput::Act(u) => Some(u),
            _ => None,
        }
    }

    pub fn is_dead(self) -> bool {
        self == PolicyOutput::Dead
    }

    pub fn render(self, actions: &[String]) -> String {
        match self {
            PolicyOutput::Start => "()".to_owned(),
            PolicyOutput::Act(u) => actions.get(u).cloned().unwrap_or_else(|| format!("u{u}")),
            PolicyOutput::Dead => "xi".to_owned(),
        }
    }

    pub fn parse(token: &str, actions: &[String]) -> Option<Self> {
        match token {
            "()" => Some(PolicyOutput::Start),
            "xi" => Some(PolicyOutput::Dead),
            _ => actions.iter().position(|a| a == token).map(PolicyOutput::Act),
        }
    }
}

impl fmt::Display for PolicyOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyOutput::Start => write!(f, "()"),
            PolicyOutput::Act(u) => write!(f, "u{u}"),
            PolicyOutput::Dead => write!(f, "xi"),
        }
    }
}

/// Deterministic, full Moore machine over an indexed input alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MooreMachine<O> {
    inputs: Vec<String>,
    state_names: Vec<String>,
    step: Vec<StateId>,
    output: Vec<O>,
    initial: StateId,
}

pub type ObsMooreMachine = MooreMachine<PolicyOutput>;

impl<O: Clone + Eq + Hash> MooreMachine<O> {
    /// `step[s * inputs.len() + y]` is the successor of `s` on `y`.
    pub fn new(inputs: Vec<String>, output: Vec<O>, step: Vec<StateId>, initial: StateId) -> Result<Self> {
        let n = output.len();
        if initial >= n {
            return Err(Error::UnknownState(initial));
        }
        if step.len() != n * inputs.len() {
            let missing = step.len().min(n * inputs.len());
            let k = inputs.len().max(1);
            return Err(Error::NotFull {
                state: missing / k,
                input: missing % k,
            });
        }
        if let Some(&bad) = step.iter().find(|&&t| t >= n) {
            return Err(Error::UnknownState(bad));
        }
        Ok(Self {
            inputs,
            state_names: (0..n).map(|i| format!("q{i}")).collect(),
            step,
            output,
            initial,
        })
    }

    /// Builds a machine from a possibly partial transition system; a missing
    /// transition is reported as [`Error::NotFull`].
    pub fn from_transition_system(ts: &TransitionSystem, output: Vec<O>) -> Result<Self> {
        let k = ts.num_labels();
        let mut step = Vec::with_capacity(ts.num_states() * k);
        for s in 0..ts.num_states() {
            for y in 0..k {
                step.push(ts.successor(s, y).ok_or(Error::NotFull { state: s, input: y })?);
            }
        }
        let mut m = Self::new(ts.label_names().to_vec(), output, step, ts.initial())?;
        m.state_names = ts.state_names().to_vec();
        Ok(m)
    }

    pub fn with_state_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.num_states());
        self.state_names = names;
        self
    }

    pub fn num_states(&self) -> usize {
        self.output.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.state_names[s]
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn output(&self, s: StateId) -> &O {
        &self.output[s]
    }

    pub fn outputs(&self) -> &[O] {
        &self.output
    }

    pub fn step(&self, s: StateId, y: ObsId) -> StateId {
        self.step[s * self.inputs.len() + y]
    }

    /// State reached from the initial state after consuming `word`.
    pub fn run(&self, word: &[ObsId]) -> Result<StateId> {
        word.iter().try_fold(self.initial, |s, &y| {
            if y < self.num_inputs() {
                Ok(self.step(s, y))
            } else {
                Err(Error::UnknownObservation(y))
            }
        })
    }

    /// Output after consuming `word`; the output of the initial state for the
    /// empty word.
    pub fn evaluate(&self, word: &[ObsId]) -> Result<&O> {
        self.run(word).map(|s| self.output(s))
    }

    pub fn reachable_order(&self) -> Vec<StateId> {
        let mut seen = vec![false; self.num_states()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(s) = queue.pop_front() {
            order.push(s);
            for y in 0..self.num_inputs() {
                let t = self.step(s, y);
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        order
    }

    pub fn num_reachable(&self) -> usize {
        self.reachable_order().len()
    }

    pub fn to_transition_system(&self) -> TransitionSystem {
        let mut ts = TransitionSystem::new(self.state_names.clone(), self.inputs.clone(), self.initial)
            .expect("initial checked at construction");
        for s in 0..self.num_states() {
            for y in 0..self.num_inputs() {
                ts.add_transition(s, y, self.step(s, y)).expect("deterministic by construction");
            }
        }
        ts
    }

    pub fn output_labeling(&self) -> Labeling<O> {
        Labeling::total(self.output.clone())
    }

    pub fn map_outputs<P: Clone + Eq + Hash>(&self, f: impl FnMut(&O) -> P) -> MooreMachine<P> {
        MooreMachine {
            inputs: self.inputs.clone(),
            state_names: self.state_names.clone(),
            step: self.step.clone(),
            output: self.output.iter().map(f).collect(),
            initial: self.initial,
        }
    }

    /// Same machine with states renumbered by `order` (a permutation given as
    /// the list of old ids in new order).
    pub fn permuted(&self, order: &[StateId]) -> Self {
        let n = self.num_states();
        assert_eq!(order.len(), n);
        let mut new_of = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            new_of[old] = new;
        }
        let k = self.num_inputs();
        let mut step = vec![0; n * k];
        for (new, &old) in order.iter().enumerate() {
            for y in 0..k {
                step[new * k + y] = new_of[self.step(old, y)];
            }
        }
        MooreMachine {
            inputs: self.inputs.clone(),
            state_names: order.iter().map(|&o| self.state_names[o].clone()).collect(),
            step,
            output: order.iter().map(|&o| self.output[o].clone()).collect(),
            initial: new_of[self.initial],
        }
    }

    /// Reachable part, renumbered breadth-first from the initial state.
    pub fn reachable_part(&self) -> Self {
        let order = self.reachable_order();
        let mut new_of = HashMap::new();
        for (i, &s) in order.iter().enumerate() {
            new_of.insert(s, i);
        }
        let k = self.num_inputs();
        let step = order
            .iter()
            .flat_map(|&s| (0..k).map(move |y| (s, y)))
            .map(|(s, y)| new_of[&self.step(s, y)])
            .collect();
        MooreMachine {
            inputs: self.inputs.clone(),
            state_names: order.iter().map(|&s| self.state_names[s].clone()).collect(),
            step,
            output: order.iter().map(|&s| self.output[s].clone()).collect(),
            initial: 0,
        }
    }
}

impl ObsMooreMachine {
    pub fn dead_states(&self) -> Vec<StateId> {
        (0..self.num_states()).filter(|&s| self.output(s).is_dead()).collect()
    }

    /// Every state reachable from a dead state is dead.
    pub fn is_dead_closed(&self) -> bool {
        self.dead_states()
            .into_iter()
            .all(|d| (0..self.num_inputs()).all(|y| self.output(self.step(d, y)).is_dead()))
    }
}
