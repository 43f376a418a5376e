//! Shared generators for the integration tests.
#![allow(dead_code)]

use infofilter::machine::{ObsMooreMachine, PolicyOutput};
use infofilter::restriction::{build_restriction, synthesize_belief_policy, HistoryPolicy};
use infofilter::system::{ExternalSystem, TaskSpec};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub const HORIZON: usize = 64;

/// Uniformly random dynamics and sensor with the given maximum sizes.
pub fn random_system(rng: &mut StdRng, max_states: usize, max_actions: usize, max_obs: usize) -> ExternalSystem {
    let n = rng.gen_range(1..=max_states);
    let m = rng.gen_range(1..=max_actions);
    let k = rng.gen_range(1..=max_obs);
    let next: Vec<Vec<usize>> = (0..n).map(|_| (0..m).map(|_| rng.gen_range(0..n)).collect()).collect();
    let sensor = (0..n).map(|_| rng.gen_range(0..k)).collect();
    ExternalSystem::from_table(&next, sensor, k).expect("well-formed table")
}

/// Nonempty random goal set of states.
pub fn random_task(rng: &mut StdRng, es: &ExternalSystem) -> TaskSpec {
    let n = es.num_states();
    let mut states: Vec<usize> = (0..n).collect();
    states.shuffle(rng);
    let k = rng.gen_range(1..=n);
    TaskSpec::state(states[..k].iter().copied(), HORIZON).expect("nonempty goal")
}

/// A random system, task and feasible belief policy with its restriction.
pub struct Instance {
    pub system: ExternalSystem,
    pub task: TaskSpec,
    pub policy: ObsMooreMachine,
    /// Reachable part of the policy's restriction.
    pub restriction: ObsMooreMachine,
}

/// Draws systems until one admits a feasible policy.
pub fn feasible_instance(rng: &mut StdRng, max_states: usize, max_actions: usize, max_obs: usize) -> Instance {
    loop {
        let system = random_system(rng, max_states, max_actions, max_obs);
        let task = random_task(rng, &system);
        if let Some(policy) = synthesize_belief_policy(&system, &task) {
            let restriction = build_restriction(&system, &HistoryPolicy::Machine(policy.clone()), None)
                .expect("machine policies restrict")
                .reachable_part();
            return Instance {
                system,
                task,
                policy,
                restriction,
            };
        }
    }
}

/// Random permutation of `0..n`.
pub fn permutation(rng: &mut StdRng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

pub fn outputs_multiset(m: &ObsMooreMachine) -> Vec<PolicyOutput> {
    let mut v = m.outputs().to_vec();
    v.sort();
    v
}
