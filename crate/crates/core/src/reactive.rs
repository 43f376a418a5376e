//! Reactive policies: sensors as partitions of the state space, extraction
//! of a state-feedback policy from a history policy, and when a sensor lets a
//! memoryless policy do the job.

use std::collections::{HashMap, HashSet};

use crate::coupling::Outcome;
use crate::error::{Error, Result};
use crate::machine::{ActionId, PolicyOutput};
use crate::restriction::{kappa_pi, HistoryPolicy};
use crate::system::{ExternalSystem, Goal, History, TaskSpec};
use crate::ts::{is_refinement, Labeling, StateId};

/// A sensor up to renaming of its observations: a partition of the states.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SensorMap {
    partition: Labeling<usize>,
}

impl SensorMap {
    /// From one observation per state; block ids are canonicalized.
    pub fn from_observations(obs: &[usize]) -> Self {
        Self {
            partition: Labeling::total(obs.to_vec()).canonical(),
        }
    }

    pub fn of_system(es: &ExternalSystem) -> Self {
        Self::from_observations(es.sensor())
    }

    /// From explicit blocks covering `0..num_states` exactly once.
    pub fn from_blocks(num_states: usize, blocks: &[Vec<StateId>]) -> Result<Self> {
        let mut obs = vec![None; num_states];
        for (b, block) in blocks.iter().enumerate() {
            for &x in block {
                match obs.get_mut(x) {
                    None => return Err(Error::UnknownState(x)),
                    Some(Some(_)) => return Err(Error::Integrity(format!("state {x} in two sensor blocks"))),
                    Some(slot) => *slot = Some(b),
                }
            }
        }
        let obs: Option<Vec<usize>> = obs.into_iter().collect();
        let obs = obs.ok_or_else(|| Error::Integrity("sensor does not observe every state".into()))?;
        Ok(Self::from_observations(&obs))
    }

    pub fn identity(num_states: usize) -> Self {
        Self::from_observations(&(0..num_states).collect::<Vec<_>>())
    }

    pub fn num_states(&self) -> usize {
        self.partition.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.partition.num_blocks()
    }

    pub fn observe(&self, x: StateId) -> usize {
        *self.partition.get(x).expect("sensors are total")
    }

    pub fn partition(&self) -> &Labeling<usize> {
        &self.partition
    }

    pub fn blocks(&self) -> Vec<Vec<StateId>> {
        self.partition.blocks()
    }

    /// Observation sequence usable with [`ExternalSystem::with_sensor`].
    pub fn observations(&self) -> Vec<usize> {
        (0..self.num_states()).map(|x| self.observe(x)).collect()
    }

    /// Blocks written with state names, e.g. `{x1,x3} {x2} {x4}`.
    pub fn render(&self, names: &[String]) -> String {
        self.blocks()
            .iter()
            .map(|b| format!("{{{}}}", b.iter().map(|&x| names[x].as_str()).collect::<Vec<_>>().join(",")))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Every partition of `0..num_states`, as restricted growth strings in
    /// lexicographic order.
    pub fn all(num_states: usize) -> Vec<SensorMap> {
        fn grow(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<SensorMap>) {
            if prefix.len() == n {
                out.push(SensorMap::from_observations(prefix));
                return;
            }
            let next = prefix.iter().copied().max().map_or(0, |m| m + 1);
            for b in 0..=next {
                prefix.push(b);
                grow(prefix, n, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        grow(&mut Vec::new(), num_states, &mut out);
        out
    }
}

/// Memoryless state-feedback policy, one action per state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StatePolicy {
    action_of: Vec<ActionId>,
}

impl StatePolicy {
    pub fn new(action_of: Vec<ActionId>) -> Self {
        Self { action_of }
    }

    /// `pi_y ∘ h`.
    pub fn compose(h: &SensorMap, pi_y: &[ActionId]) -> Self {
        Self::new((0..h.num_states()).map(|x| pi_y[h.observe(x)]).collect())
    }

    pub fn action(&self, x: StateId) -> ActionId {
        self.action_of[x]
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.action_of
    }

    pub fn labeling(&self) -> Labeling<ActionId> {
        Labeling::total(self.action_of.clone())
    }

    pub fn render(&self, es: &ExternalSystem) -> String {
        self.action_of
            .iter()
            .enumerate()
            .map(|(x, &u)| format!("{} -> {}", es.state_names()[x], es.action_names()[u]))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Whether the state is a goal under the task, judged on the true state.
fn goal_reached(es: &ExternalSystem, task: &TaskSpec, x: StateId) -> bool {
    match &task.goal {
        Goal::Observation(g) => g.contains(&es.observe(x)),
        Goal::State(g) => g.contains(&x),
    }
}

/// Memoryless execution from `x1`; the outcome plus the visited states.
pub fn run_state_policy(es: &ExternalSystem, pi: &StatePolicy, x1: StateId, task: &TaskSpec) -> (Outcome, Vec<StateId>) {
    let mut seen = vec![false; es.num_states()];
    let mut x = x1;
    let mut visited = Vec::new();
    for stage in 1.. {
        visited.push(x);
        if goal_reached(es, task, x) {
            return (Outcome::Accomplished, visited);
        }
        if std::mem::replace(&mut seen[x], true) {
            return (Outcome::Diverges, visited);
        }
        if stage >= task.horizon {
            return (Outcome::HorizonExceeded, visited);
        }
        x = es.next(x, pi.action(x));
    }
    unreachable!("the stage loop only exits by returning")
}

fn starts(es: &ExternalSystem, initial_set: Option<&[StateId]>) -> Vec<StateId> {
    initial_set.map_or_else(|| (0..es.num_states()).collect(), <[StateId]>::to_vec)
}

/// Every start in `initial_set` (all states when `None`) accomplishes the
/// task under the memoryless execution.
pub fn state_policy_feasible(es: &ExternalSystem, pi: &StatePolicy, task: &TaskSpec, initial_set: Option<&[StateId]>) -> bool {
    starts(es, initial_set)
        .into_iter()
        .all(|x1| run_state_policy(es, pi, x1, task).0 == Outcome::Accomplished)
}

/// Reactive execution of `pi_y` reading sensor `h`.
pub fn reactive_feasible(
    es: &ExternalSystem,
    h: &SensorMap,
    pi_y: &[ActionId],
    task: &TaskSpec,
    initial_set: Option<&[StateId]>,
) -> bool {
    state_policy_feasible(es, &StatePolicy::compose(h, pi_y), task, initial_set)
}

/// Every assignment of one of `num_actions` actions to each of `slots`
/// slots, in lexicographic order.
pub fn all_assignments(slots: usize, num_actions: usize) -> impl Iterator<Item = Vec<ActionId>> {
    let total = (num_actions as u128).pow(slots as u32);
    (0..total).map(move |mut code| {
        let mut a = vec![0; slots];
        for slot in a.iter_mut().rev() {
            *slot = (code % num_actions as u128) as usize;
            code /= num_actions as u128;
        }
        a
    })
}

/// Every feasible state policy, by exhaustive search.
pub fn feasible_state_policies(es: &ExternalSystem, task: &TaskSpec, initial_set: Option<&[StateId]>) -> Vec<StatePolicy> {
    all_assignments(es.num_states(), es.num_actions())
        .map(StatePolicy::new)
        .filter(|pi| state_policy_feasible(es, pi, task, initial_set))
        .collect()
}

/// State policy followed by a history policy under a bijective sensor, if
/// every visit to a state takes the same action.
///
/// Runs from each start until the task is accomplished; a repeated coupled
/// state or the horizon means the policy is infeasible. Later stages would
/// only revisit earlier pairs, so the runs see every `(state, action)` pair.
/// States never visited get the first action.
pub fn extract_state_policy(
    es: &ExternalSystem,
    pol: &HistoryPolicy,
    task: &TaskSpec,
    initial_set: Option<&[StateId]>,
) -> Result<Option<StatePolicy>> {
    if let Some(y) = es.bijective_violation() {
        return Err(Error::NotBijective(es.observation_names()[y].clone()));
    }
    let mut chosen: HashMap<StateId, ActionId> = HashMap::new();
    for x1 in starts(es, initial_set) {
        let mut x = x1;
        let mut eta = History::start(es.observe(x));
        let mut seen = HashSet::new();
        for stage in 1.. {
            let at_goal = goal_reached(es, task, x);
            let out = kappa_pi(es, pol, &eta);
            let u = match out {
                Ok(PolicyOutput::Act(u)) => u,
                _ if at_goal => break,
                Ok(PolicyOutput::Dead) => return Err(Error::PolicyEmitsXi(eta.render(es))),
                Ok(PolicyOutput::Start) => return Err(Error::NoAction(eta.render(es))),
                Err(e) => return Err(e),
            };
            if *chosen.entry(x).or_insert(u) != u {
                return Ok(None);
            }
            if at_goal {
                break;
            }
            if let HistoryPolicy::Machine(m) = pol {
                if !seen.insert((m.run(eta.observations())?, x)) {
                    return Err(Error::NotFeasible);
                }
            }
            if stage >= task.horizon || u >= es.num_actions() {
                return Err(Error::NotFeasible);
            }
            x = es.next(x, u);
            eta = eta.extended(u, es.observe(x));
        }
    }
    Ok(Some(StatePolicy::new(
        (0..es.num_states()).map(|x| chosen.get(&x).copied().unwrap_or(0)).collect(),
    )))
}

/// A sensor suffices for a reactive realization of `pi` exactly when its
/// partition refines the one induced by `pi`.
pub fn sensor_sufficient_for_reactive(h: &SensorMap, pi: &StatePolicy) -> bool {
    is_refinement(h.partition(), &pi.labeling()).unwrap_or(false)
}

/// The coarsest such sensor: the preimages of the actions.
pub fn minimal_reactive_sensor(pi: &StatePolicy) -> SensorMap {
    SensorMap::from_observations(pi.actions())
}

/// The observation policy realizing `pi` through `h`, if any.
pub fn observation_policy(h: &SensorMap, pi: &StatePolicy) -> Option<Vec<ActionId>> {
    if !sensor_sufficient_for_reactive(h, pi) {
        return None;
    }
    let mut pi_y = vec![0; h.num_blocks()];
    for x in 0..h.num_states() {
        pi_y[h.observe(x)] = pi.action(x);
    }
    Some(pi_y)
}

/// Whether some state policy is feasible. Candidates are tried in
/// lexicographic order; with a budget, giving up after that many candidates
/// without a success is an error.
pub fn reactive_policy_exists(
    es: &ExternalSystem,
    task: &TaskSpec,
    initial_set: Option<&[StateId]>,
    budget: Option<usize>,
) -> Result<bool> {
    for (explored, a) in all_assignments(es.num_states(), es.num_actions()).enumerate() {
        if budget.is_some_and(|b| explored >= b) {
            return Err(Error::SearchBudgetExceeded {
                budget: budget.unwrap_or_default(),
                explored,
            });
        }
        if state_policy_feasible(es, &StatePolicy::new(a), task, initial_set) {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    fn tetromino_state_feedback() -> (ExternalSystem, TaskSpec) {
        let es = bundled::tetromino_system().with_state_feedback();
        (es, TaskSpec::state([3], 16).unwrap())
    }

    /// Shortest action sequences from each start, by breadth-first search.
    fn shortest_first_actions(es: &ExternalSystem, goal: StateId) -> Vec<Vec<ActionId>> {
        (0..es.num_states())
            .map(|x1| {
                let mut best: Option<Vec<ActionId>> = None;
                let mut layer = vec![(x1, Vec::new())];
                while best.is_none() {
                    if let Some((_, p)) = layer.iter().find(|(x, _)| *x == goal) {
                        best = Some(p.clone());
                        break;
                    }
                    layer = layer
                        .iter()
                        .flat_map(|(x, p)| {
                            (0..es.num_actions()).map(move |u| {
                                let mut p = p.clone();
                                p.push(u);
                                (es.next(*x, u), p)
                            })
                        })
                        .collect();
                }
                best.unwrap()
            })
            .collect()
    }

    #[test]
    fn extraction_on_tetromino() {
        let (es, task) = tetromino_state_feedback();
        let pol = HistoryPolicy::Machine(crate::restriction::synthesize_belief_policy(&es, &task).unwrap());
        let pi = extract_state_policy(&es, &pol, &task, None).unwrap().unwrap();
        // Goal action is stop; elsewhere the first move of the unique
        // shortest path.
        let paths = shortest_first_actions(&es, 3);
        for (x, path) in paths.iter().enumerate().take(3) {
            assert_eq!(pi.action(x), path[0]);
        }
        assert_eq!(pi.actions(), &[2, 1, 2, 0]);
        assert!(state_policy_feasible(&es, &pi, &task, None));
    }

    #[test]
    fn extraction_rejects_shared_observations() {
        let es = bundled::tetromino_system();
        let pol = HistoryPolicy::Machine(bundled::tetromino_belief_policy());
        let err = extract_state_policy(&es, &pol, &bundled::tetromino_task(), None).unwrap_err();
        assert!(matches!(err, Error::NotBijective(_)));
    }

    #[test]
    fn extraction_detects_revisits_with_new_actions() {
        // Wait once at x1 (a blocked move up), then go right.
        let (es, task) = tetromino_state_feedback();
        let mut table = std::collections::BTreeMap::new();
        let h = crate::system::History::start(0);
        table.insert(h.clone(), 1);
        let h2 = h.extended(1, 0);
        table.insert(h2.clone(), 2);
        let h3 = h2.extended(2, 1);
        table.insert(h3.clone(), 1);
        let h4 = h3.extended(1, 2);
        table.insert(h4.clone(), 2);
        table.insert(h4.extended(2, 3), 0);
        let pol = HistoryPolicy::Table(table);
        let got = extract_state_policy(&es, &pol, &task, Some(&[0])).unwrap();
        assert_eq!(got, None);
    }

    #[test]
    fn extraction_single_state() {
        let es = ExternalSystem::from_table(&[vec![0, 0]], vec![0], 1).unwrap();
        let task = TaskSpec::state([0], 4).unwrap();
        let m = crate::restriction::belief_filter_machine(&es, |_| 1);
        let pi = extract_state_policy(&es, &HistoryPolicy::Machine(m), &task, None).unwrap().unwrap();
        assert_eq!(pi.actions(), &[1]);
    }

    #[test]
    fn sensor_checks() {
        let pi = StatePolicy::new(vec![2, 1, 2, 0]);
        assert!(sensor_sufficient_for_reactive(&minimal_reactive_sensor(&pi), &pi));
        assert!(sensor_sufficient_for_reactive(&SensorMap::identity(4), &pi));
        let tetromino = SensorMap::of_system(&bundled::tetromino_system());
        assert!(!sensor_sufficient_for_reactive(&tetromino, &pi));
        assert_eq!(minimal_reactive_sensor(&pi).blocks(), vec![vec![0, 2], vec![1], vec![3]]);
        assert_eq!(minimal_reactive_sensor(&StatePolicy::new(vec![1; 4])).num_blocks(), 1);
        assert_eq!(minimal_reactive_sensor(&StatePolicy::new(vec![0, 1, 2])).num_blocks(), 3);
        let pi_y = observation_policy(&minimal_reactive_sensor(&pi), &pi).unwrap();
        assert_eq!(StatePolicy::compose(&minimal_reactive_sensor(&pi), &pi_y), pi);
    }

    #[test]
    fn existence() {
        let (es, task) = tetromino_state_feedback();
        assert!(reactive_policy_exists(&es, &task, None, None).unwrap());
        // Oracle: count feasible policies directly.
        let count = all_assignments(4, 3)
            .filter(|a| state_policy_feasible(&es, &StatePolicy::new(a.clone()), &task, None))
            .count();
        assert_eq!(feasible_state_policies(&es, &task, None).len(), count);
        assert!(count >= 1);

        // x0 -a-> x1 -b-> x2; without the x1 exit the goal is unreachable.
        let es = ExternalSystem::from_table(&[vec![1, 0], vec![0, 2], vec![2, 2]], vec![0, 0, 1], 2).unwrap();
        let task = TaskSpec::state([2], 8).unwrap();
        assert!(reactive_policy_exists(&es, &task, None, None).unwrap());
        let dead_end = ExternalSystem::from_table(&[vec![1, 0], vec![0, 1], vec![2, 2]], vec![0, 0, 1], 2).unwrap();
        assert!(!reactive_policy_exists(&dead_end, &task, None, None).unwrap());

        let everywhere = TaskSpec::state([0, 1, 2], 1).unwrap();
        assert!(reactive_policy_exists(&dead_end, &everywhere, None, None).unwrap());
    }

    #[test]
    fn budget() {
        let es = ExternalSystem::from_table(&[vec![1, 0], vec![0, 1], vec![2, 2]], vec![0, 0, 1], 2).unwrap();
        let task = TaskSpec::state([2], 8).unwrap();
        assert_eq!(
            reactive_policy_exists(&es, &task, None, Some(3)),
            Err(Error::SearchBudgetExceeded { budget: 3, explored: 3 })
        );
    }

    #[test]
    fn partitions_are_bell_numbers() {
        let counts: Vec<usize> = (0..=5).map(|n| SensorMap::all(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52]);
    }
}
