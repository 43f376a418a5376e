//! Restriction of the history filter by a policy, represented by a finite
//! full Moore machine over observations whose unrolling is the labeled
//! observation tree.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::hash::Hash;

use crate::coupling::{belief_step, initial_belief, is_feasible, PolicyLabeledIts};
use crate::error::{Error, Result};
use crate::machine::{ActionId, MooreMachine, ObsId, ObsMooreMachine, PolicyOutput};
use crate::system::{BeliefState, ExternalSystem, Goal, History, TaskSpec};
use crate::ts::StateId;

/// A policy over action-observation histories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HistoryPolicy {
    /// Finite generator: the action after a history is the machine's output
    /// on the history's observation projection.
    Machine(ObsMooreMachine),
    /// Explicit actions for finitely many histories.
    Table(BTreeMap<History, ActionId>),
}

impl HistoryPolicy {
    /// Longest history in a table policy.
    pub fn table_depth(&self) -> Option<usize> {
        match self {
            HistoryPolicy::Machine(_) => None,
            HistoryPolicy::Table(t) => Some(t.keys().map(History::len).max().unwrap_or(0)),
        }
    }

    /// Action named by the policy for an attainable on-policy history, or
    /// `Dead` when the generator marks it so.
    fn lookup(&self, eta: &History) -> Result<PolicyOutput> {
        if eta.is_empty() {
            return Ok(PolicyOutput::Start);
        }
        match self {
            HistoryPolicy::Machine(m) => {
                let out = *m.evaluate(eta.observations())?;
                match out {
                    PolicyOutput::Start => Err(Error::NoAction(format!("{eta}"))),
                    other => Ok(other),
                }
            }
            HistoryPolicy::Table(t) => t
                .get(eta)
                .map(|&u| PolicyOutput::Act(u))
                .ok_or_else(|| Error::OutOfDomain(format!("{eta}"))),
        }
    }
}

/// Strips actions from a history.
pub fn project_to_obs(eta: &History) -> Vec<ObsId> {
    eta.observations().to_vec()
}

/// Label of a history under the restriction: the policy's action for
/// attainable histories that follow the policy, the dead label otherwise.
pub fn kappa_pi(es: &ExternalSystem, pol: &HistoryPolicy, eta: &History) -> Result<PolicyOutput> {
    if eta.is_empty() {
        return Ok(PolicyOutput::Start);
    }
    let obs = eta.observations();
    if obs.iter().any(|&y| y >= es.num_observations()) || eta.actions().iter().any(|&u| u >= es.num_actions()) {
        return Err(Error::MalformedHistory(format!("{eta}: index out of range")));
    }
    let mut prefix = History::start(obs[0]);
    let mut belief = initial_belief(es, obs[0]);
    for (i, &y) in obs.iter().enumerate().skip(1) {
        if belief.is_empty() {
            return Ok(PolicyOutput::Dead);
        }
        let u = eta.actions()[i - 1];
        match pol.lookup(&prefix)? {
            PolicyOutput::Act(chosen) if chosen == u => {}
            _ => return Ok(PolicyOutput::Dead),
        }
        belief = belief_step(es, &belief, u, y);
        prefix = prefix.extended(u, y);
    }
    if belief.is_empty() {
        return Ok(PolicyOutput::Dead);
    }
    pol.lookup(eta)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Node<G> {
    Root,
    Live(G, BeliefState),
    Dead,
}

/// Builds the restriction of the history filter by `pol` as a full Moore
/// machine over the observations of `es`. Table policies need `depth_bound`;
/// observation sequences longer than the bound lead to the dead state.
pub fn build_restriction(es: &ExternalSystem, pol: &HistoryPolicy, depth_bound: Option<usize>) -> Result<ObsMooreMachine> {
    match pol {
        HistoryPolicy::Machine(g) => {
            if g.num_inputs() != es.num_observations() {
                return Err(Error::AlphabetMismatch);
            }
            product_build(es, |node: &Node<StateId>, y| {
                let (g_next, belief) = match node {
                    Node::Root => (g.step(g.initial(), y), initial_belief(es, y)),
                    Node::Live(s, b) => {
                        let u = g.output(*s).action().ok_or_else(|| Error::NoAction(g.state_name(*s).into()))?;
                        (g.step(*s, y), belief_step(es, b, u, y))
                    }
                    Node::Dead => return Ok((Node::Dead, PolicyOutput::Dead)),
                };
                if belief.is_empty() {
                    return Ok((Node::Dead, PolicyOutput::Dead));
                }
                match *g.output(g_next) {
                    PolicyOutput::Act(u) => Ok((Node::Live(g_next, belief), PolicyOutput::Act(u))),
                    PolicyOutput::Dead => Ok((Node::Dead, PolicyOutput::Dead)),
                    PolicyOutput::Start => Err(Error::NoAction(g.state_name(g_next).into())),
                }
            }, |node| match node {
                Node::Live(s, b) => format!("{}:{}", g.state_name(*s), b.render(es.state_names())),
                _ => unreachable!(),
            })
        }
        HistoryPolicy::Table(_) => {
            let bound = depth_bound.ok_or(Error::DepthRequired)?;
            product_build(es, |node: &Node<History>, y| {
                let (eta, belief) = match node {
                    Node::Root => (History::start(y), initial_belief(es, y)),
                    Node::Live(h, b) => {
                        if h.len() >= bound {
                            return Ok((Node::Dead, PolicyOutput::Dead));
                        }
                        let u = pol.lookup(h)?.action().ok_or_else(|| Error::NoAction(format!("{h}")))?;
                        (h.extended(u, y), belief_step(es, b, u, y))
                    }
                    Node::Dead => return Ok((Node::Dead, PolicyOutput::Dead)),
                };
                if belief.is_empty() {
                    return Ok((Node::Dead, PolicyOutput::Dead));
                }
                let out = pol.lookup(&eta)?;
                Ok((Node::Live(eta, belief), out))
            }, |node| match node {
                Node::Live(h, _) => h.render(es),
                _ => unreachable!(),
            })
        }
    }
}

/// Breadth-first product construction shared by both policy forms. The dead
/// state is always present.
fn product_build<G: Clone + Eq + Hash>(
    es: &ExternalSystem,
    mut next: impl FnMut(&Node<G>, ObsId) -> Result<(Node<G>, PolicyOutput)>,
    name: impl Fn(&Node<G>) -> String,
) -> Result<ObsMooreMachine> {
    let k = es.num_observations();
    let mut ids: HashMap<Node<G>, StateId> = HashMap::new();
    let mut nodes = vec![Node::Root, Node::Dead];
    let mut outputs = vec![PolicyOutput::Start, PolicyOutput::Dead];
    ids.insert(Node::Root, 0);
    ids.insert(Node::Dead, 1);
    let mut step = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    let mut rows: Vec<Option<Vec<StateId>>> = vec![None, Some(vec![1; k])];
    while let Some(i) = queue.pop_front() {
        let node = nodes[i].clone();
        let mut row = Vec::with_capacity(k);
        for y in 0..k {
            let (succ, out) = next(&node, y)?;
            let id = match ids.get(&succ) {
                Some(&id) => id,
                None => {
                    let id = nodes.len();
                    ids.insert(succ.clone(), id);
                    nodes.push(succ);
                    outputs.push(out);
                    rows.push(None);
                    queue.push_back(id);
                    id
                }
            };
            row.push(id);
        }
        rows[i] = Some(row);
    }
    for row in rows {
        step.extend(row.expect("every node is expanded"));
    }
    let names = nodes
        .iter()
        .map(|n| match n {
            Node::Root => "()".to_owned(),
            Node::Dead => "xi".to_owned(),
            live => name(live),
        })
        .collect();
    Ok(MooreMachine::new(es.observation_names().to_vec(), outputs, step, 0)?.with_state_names(names))
}

/// Builds the restriction and checks that the policy accomplishes `task` from
/// every state of `initial_set` (all states when `None`).
pub fn build_feasible_restriction(
    es: &ExternalSystem,
    pol: &HistoryPolicy,
    depth_bound: Option<usize>,
    task: &TaskSpec,
    initial_set: Option<&[StateId]>,
) -> Result<ObsMooreMachine> {
    let m = build_restriction(es, pol, depth_bound)?;
    match is_feasible(&PolicyLabeledIts::from_machine(&m), es, task, initial_set) {
        Ok(true) => Ok(m),
        Ok(false) | Err(Error::PolicyEmitsXi(_)) | Err(Error::NoAction(_)) => Err(Error::NotFeasible),
        Err(e) => Err(e),
    }
}

/// Nondeterministic (belief) filter driven by a belief-feedback policy:
/// after a start state, states are the beliefs reached from the full state
/// set and the empty belief is the dead state.
pub fn belief_filter_machine(
    es: &ExternalSystem,
    action_of: impl Fn(&BeliefState) -> ActionId,
) -> ObsMooreMachine {
    let k = es.num_observations();
    let mut ids: HashMap<BeliefState, StateId> = HashMap::from([(BeliefState::empty(), 1)]);
    let mut beliefs = vec![es.all_states(), BeliefState::empty()];
    let mut outputs = vec![PolicyOutput::Start, PolicyOutput::Dead];
    let mut rows: Vec<Vec<StateId>> = vec![Vec::new(), vec![1; k]];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let b = beliefs[i].clone();
        let row = (0..k)
            .map(|y| {
                let nb = if i == 0 {
                    initial_belief(es, y)
                } else {
                    belief_step(es, &b, action_of(&b), y)
                };
                *ids.entry(nb.clone()).or_insert_with(|| {
                    beliefs.push(nb.clone());
                    outputs.push(PolicyOutput::Act(action_of(&nb)));
                    rows.push(Vec::new());
                    queue.push_back(beliefs.len() - 1);
                    beliefs.len() - 1
                })
            })
            .collect();
        rows[i] = row;
    }
    let mut names: Vec<String> = beliefs.iter().map(|b| b.render(es.state_names())).collect();
    names[0] = "()".into();
    MooreMachine::new(
        es.observation_names().to_vec(),
        outputs,
        rows.into_iter().flatten().collect(),
        0,
    )
    .expect("rows cover every state")
    .with_state_names(names)
}

/// Searches for a belief-feedback policy that accomplishes `task` from every
/// state, by backward induction over the beliefs reachable under any action.
/// Returns its belief filter, with the fewest worst-case stages and ties
/// broken toward lower action indices.
pub fn synthesize_belief_policy(es: &ExternalSystem, task: &TaskSpec) -> Option<ObsMooreMachine> {
    let mut beliefs: Vec<BeliefState> = Vec::new();
    let mut ids: HashMap<BeliefState, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let intern = |b: BeliefState, beliefs: &mut Vec<BeliefState>, ids: &mut HashMap<BeliefState, usize>, queue: &mut VecDeque<usize>| {
        *ids.entry(b.clone()).or_insert_with(|| {
            beliefs.push(b);
            queue.push_back(beliefs.len() - 1);
            beliefs.len() - 1
        })
    };
    let starts: Vec<usize> = (0..es.num_observations())
        .map(|y| initial_belief(es, y))
        .filter(|b| !b.is_empty())
        .map(|b| intern(b, &mut beliefs, &mut ids, &mut queue))
        .collect();
    // succ[i][u] = successor belief ids over all observations
    let mut succ: Vec<Vec<Vec<usize>>> = Vec::new();
    while let Some(i) = queue.pop_front() {
        let b = beliefs[i].clone();
        let row: Vec<Vec<usize>> = (0..es.num_actions())
            .map(|u| {
                (0..es.num_observations())
                    .map(|y| belief_step(es, &b, u, y))
                    .filter(|nb| !nb.is_empty())
                    .map(|nb| intern(nb, &mut beliefs, &mut ids, &mut queue))
                    .collect()
            })
            .collect();
        if succ.len() <= i {
            succ.resize(i + 1, Vec::new());
        }
        succ[i] = row;
    }
    let is_goal = |b: &BeliefState| match &task.goal {
        Goal::Observation(g) => b.iter().next().is_some_and(|x| g.contains(&es.observe(x))),
        Goal::State(g) => !b.is_empty() && b.iter().all(|x| g.contains(&x)),
    };
    let n = beliefs.len();
    let mut level: Vec<Option<usize>> = beliefs.iter().map(|b| is_goal(b).then_some(0)).collect();
    let mut choice: Vec<ActionId> = vec![0; n];
    loop {
        let mut changed = false;
        for i in 0..n {
            if level[i] == Some(0) {
                continue;
            }
            let best = (0..es.num_actions())
                .filter_map(|u| {
                    let worst = succ[i][u].iter().try_fold(0usize, |acc, &j| level[j].map(|l| acc.max(l)))?;
                    (!succ[i][u].is_empty()).then_some((worst + 1, u))
                })
                .min();
            if let Some((l, u)) = best {
                if level[i].is_none_or(|old| l < old) {
                    level[i] = Some(l);
                    choice[i] = u;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    if starts.iter().any(|&i| level[i].is_none_or(|l| l >= task.horizon)) {
        return None;
    }
    Some(belief_filter_machine(es, |b| ids.get(b).map_or(0, |&i| choice[i])))
}
