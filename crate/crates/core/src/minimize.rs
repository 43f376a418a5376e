//! Minimal sufficient refinements by partition refinement, the support
//! relation between filters and policies, isomorphism, and joint filters for
//! several policies.
//!
//! The restriction of the history filter is the unrolling of a finite full
//! Moore machine. A labeling of the unrolled tree is sufficient exactly when
//! the induced partition of machine states is compatible with the
//! transitions, and it refines the policy exactly when it is compatible with
//! the outputs. The coarsest such partition is therefore the Moore
//! minimization of the generator, and fullness makes it unique.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::machine::{MooreMachine, ObsId};
use crate::ts::{Labeling, StateId, TransitionSystem};

/// Output after consuming `ytilde`.
pub fn evaluate_pi<'m, O: Clone + Eq + Hash>(machine: &'m MooreMachine<O>, ytilde: &[ObsId]) -> Result<&'m O> {
    machine.evaluate(ytilde)
}

/// Splitter-driven refinement of the states reachable in a Moore machine.
///
/// Blocks always refine the output partition and only ever split, so the
/// block count never decreases.
#[derive(Debug, Clone)]
pub struct PartitionRefinement {
    block_of: Vec<usize>,
    blocks: Vec<Vec<usize>>,
    worklist: Vec<usize>,
    queued: Vec<bool>,
}

impl PartitionRefinement {
    /// Starts from the partition induced by `initial_block` over states
    /// `0..n`.
    fn new(initial_block: Vec<usize>) -> Self {
        let count = initial_block.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); count];
        for (s, &b) in initial_block.iter().enumerate() {
            blocks[b].push(s);
        }
        Self {
            block_of: initial_block,
            worklist: (0..count).collect(),
            queued: vec![true; count],
            blocks,
        }
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn pending(&self) -> &[usize] {
        &self.worklist
    }

    /// Processes one splitter; `false` once the worklist is empty.
    fn refine_once(&mut self, inverse: &[Vec<Vec<usize>>]) -> bool {
        let Some(splitter) = self.worklist.pop() else {
            return false;
        };
        self.queued[splitter] = false;
        let members = self.blocks[splitter].clone();
        for pre_y in inverse {
            let mut marked: HashMap<usize, Vec<usize>> = HashMap::new();
            for &t in &members {
                for &s in &pre_y[t] {
                    marked.entry(self.block_of[s]).or_default().push(s);
                }
            }
            let mut touched: Vec<usize> = marked.keys().copied().collect();
            touched.sort_unstable();
            for b in touched {
                let mut hit = marked.remove(&b).expect("key present");
                hit.sort_unstable();
                hit.dedup();
                if hit.len() == self.blocks[b].len() {
                    continue;
                }
                let rest: Vec<usize> = self.blocks[b].iter().copied().filter(|s| hit.binary_search(s).is_err()).collect();
                let new_id = self.blocks.len();
                for &s in &hit {
                    self.block_of[s] = new_id;
                }
                self.blocks[b] = rest;
                self.blocks.push(hit);
                self.queued.push(false);
                if self.queued[b] {
                    self.worklist.push(new_id);
                    self.queued[new_id] = true;
                } else {
                    let smaller = if self.blocks[new_id].len() < self.blocks[b].len() { new_id } else { b };
                    self.worklist.push(smaller);
                    self.queued[smaller] = true;
                }
            }
        }
        true
    }
}

/// Reachable states with dense local indices.
struct Dense {
    order: Vec<StateId>,
    local: HashMap<StateId, usize>,
}

fn dense<O: Clone + Eq + Hash>(m: &MooreMachine<O>) -> Dense {
    let order = m.reachable_order();
    let local = order.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    Dense { order, local }
}

fn output_blocks<O: Clone + Eq + Hash>(m: &MooreMachine<O>, d: &Dense) -> Vec<usize> {
    let mut ids: HashMap<&O, usize> = HashMap::new();
    d.order
        .iter()
        .map(|&s| {
            let next = ids.len();
            *ids.entry(m.output(s)).or_insert(next)
        })
        .collect()
}

/// Coarsest stable partition with the worklist algorithm; one block id per
/// reachable state, in the order of [`MooreMachine::reachable_order`].
fn refine_worklist<O: Clone + Eq + Hash>(m: &MooreMachine<O>, d: &Dense) -> Vec<usize> {
    let n = d.order.len();
    let mut inverse = vec![vec![Vec::new(); n]; m.num_inputs()];
    for (i, &s) in d.order.iter().enumerate() {
        for (y, pre) in inverse.iter_mut().enumerate() {
            pre[d.local[&m.step(s, y)]].push(i);
        }
    }
    let mut p = PartitionRefinement::new(output_blocks(m, d));
    while p.refine_once(&inverse) {}
    p.block_of
}

/// Coarsest stable partition by splitting on successor signatures until
/// nothing changes.
fn refine_fixpoint<O: Clone + Eq + Hash>(m: &MooreMachine<O>, d: &Dense) -> Vec<usize> {
    let mut block = output_blocks(m, d);
    let mut count = block.iter().copied().max().map_or(0, |b| b + 1);
    loop {
        let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let next: Vec<usize> = d
            .order
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let sig = (0..m.num_inputs()).map(|y| block[d.local[&m.step(s, y)]]).collect();
                let fresh = ids.len();
                *ids.entry((block[i], sig)).or_insert(fresh)
            })
            .collect();
        if ids.len() == count {
            return block;
        }
        count = ids.len();
        block = next;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Splitting {
    Worklist,
    Fixpoint,
}

/// Minimal sufficient refinement of the output labeling, returned as a map
/// from machine states to minimized states (unreachable states are outside
/// its domain) together with the quotient machine. Minimized states are
/// numbered in breadth-first order from the initial state.
pub fn minimal_sufficient_refinement<O: Clone + Eq + Hash>(machine: &MooreMachine<O>) -> (Labeling<usize>, MooreMachine<O>) {
    minimal_sufficient_refinement_with(machine, Splitting::Worklist)
}

pub fn minimal_sufficient_refinement_with<O: Clone + Eq + Hash>(
    machine: &MooreMachine<O>,
    splitting: Splitting,
) -> (Labeling<usize>, MooreMachine<O>) {
    let d = dense(machine);
    let raw = match splitting {
        Splitting::Worklist => refine_worklist(machine, &d),
        Splitting::Fixpoint => refine_fixpoint(machine, &d),
    };
    quotient_machine(machine, &d, &raw)
}

/// Checks a transition system over observations for fullness before
/// minimizing it with the given outputs.
pub fn minimal_sufficient_refinement_of_ts<O: Clone + Eq + Hash>(
    ts: &TransitionSystem,
    outputs: Vec<O>,
) -> Result<(Labeling<usize>, MooreMachine<O>)> {
    let m = MooreMachine::from_transition_system(ts, outputs)?;
    Ok(minimal_sufficient_refinement(&m))
}

fn quotient_machine<O: Clone + Eq + Hash>(m: &MooreMachine<O>, d: &Dense, raw: &[usize]) -> (Labeling<usize>, MooreMachine<O>) {
    let mut canon: HashMap<usize, usize> = HashMap::new();
    let mut reps: Vec<StateId> = Vec::new();
    let mut queue = VecDeque::from([m.initial()]);
    canon.insert(raw[d.local[&m.initial()]], 0);
    reps.push(m.initial());
    while let Some(s) = queue.pop_front() {
        for y in 0..m.num_inputs() {
            let t = m.step(s, y);
            let b = raw[d.local[&t]];
            if let std::collections::hash_map::Entry::Vacant(e) = canon.entry(b) {
                e.insert(reps.len());
                reps.push(t);
                queue.push_back(t);
            }
        }
    }
    let k = m.num_inputs();
    let step = reps
        .iter()
        .flat_map(|&r| (0..k).map(move |y| (r, y)))
        .map(|(r, y)| canon[&raw[d.local[&m.step(r, y)]]])
        .collect();
    let outputs = reps.iter().map(|&r| m.output(r).clone()).collect();
    let names = reps.iter().map(|&r| m.state_name(r).to_owned()).collect();
    let min = MooreMachine::new(m.inputs().to_vec(), outputs, step, 0)
        .expect("quotient of a full machine is full")
        .with_state_names(names);
    let kappa = Labeling::new(
        (0..m.num_states())
            .map(|s| d.local.get(&s).map(|&i| canon[&raw[i]]))
            .collect(),
    );
    (kappa, min)
}

/// Whether `candidate`, with some labeling of its states, reproduces the
/// machine's output on every observation sequence. The labeling is returned
/// on the candidate states met along the way.
pub fn supports<O: Clone + Eq + Hash>(candidate: &TransitionSystem, machine: &MooreMachine<O>) -> Option<Labeling<O>> {
    supports_where(candidate, machine, |_| true)
}

/// As [`supports`], but machine states whose output fails `constrained`
/// (and everything after them) place no requirement on the candidate.
pub fn supports_where<O: Clone + Eq + Hash>(
    candidate: &TransitionSystem,
    machine: &MooreMachine<O>,
    constrained: impl Fn(&O) -> bool,
) -> Option<Labeling<O>> {
    if candidate.num_labels() != machine.num_inputs() {
        return None;
    }
    let mut mu: Vec<Option<O>> = vec![None; candidate.num_states()];
    let mut seen = std::collections::HashSet::new();
    let mut queue = VecDeque::from([(candidate.initial(), machine.initial())]);
    seen.insert((candidate.initial(), machine.initial()));
    while let Some((c, m)) = queue.pop_front() {
        let out = machine.output(m);
        if !constrained(out) {
            continue;
        }
        match &mu[c] {
            Some(prev) if prev != out => return None,
            Some(_) => {}
            None => mu[c] = Some(out.clone()),
        }
        for y in 0..machine.num_inputs() {
            let m2 = machine.step(m, y);
            match candidate.successor(c, y) {
                Some(c2) => {
                    if seen.insert((c2, m2)) {
                        queue.push_back((c2, m2));
                    }
                }
                None if !constrained(machine.output(m2)) => {}
                None => return None,
            }
        }
    }
    Some(Labeling::new(mu))
}

/// Why a candidate fails to support a machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SupportFailure {
    AlphabetMismatch,
    /// Both words lead the candidate to one state but the machine to
    /// different outputs.
    Indistinguishable { first: Vec<ObsId>, second: Vec<ObsId> },
    /// The candidate has no transition on this word's last observation.
    Missing { word: Vec<ObsId> },
}

/// Shortest-first witness that [`supports`] fails; `None` when it holds.
pub fn support_failure<O: Clone + Eq + Hash>(candidate: &TransitionSystem, machine: &MooreMachine<O>) -> Option<SupportFailure> {
    if candidate.num_labels() != machine.num_inputs() {
        return Some(SupportFailure::AlphabetMismatch);
    }
    let mut mu: Vec<Option<(O, Vec<ObsId>)>> = vec![None; candidate.num_states()];
    let mut seen = std::collections::HashSet::new();
    let mut queue = VecDeque::from([(candidate.initial(), machine.initial(), Vec::new())]);
    seen.insert((candidate.initial(), machine.initial()));
    while let Some((c, m, word)) = queue.pop_front() {
        let out = machine.output(m);
        match &mu[c] {
            Some((prev, first)) if prev != out => {
                return Some(SupportFailure::Indistinguishable {
                    first: first.clone(),
                    second: word,
                })
            }
            Some(_) => {}
            None => mu[c] = Some((out.clone(), word.clone())),
        }
        for y in 0..machine.num_inputs() {
            let mut next = word.clone();
            next.push(y);
            match candidate.successor(c, y) {
                Some(c2) => {
                    if seen.insert((c2, machine.step(m, y))) {
                        queue.push_back((c2, machine.step(m, y), next));
                    }
                }
                None => return Some(SupportFailure::Missing { word: next }),
            }
        }
    }
    None
}

/// Bijection between the reachable parts of two machines that preserves the
/// initial state, transitions and outputs (compared with `same`), as pairs
/// `(state of a, state of b)` in breadth-first order of `a`.
pub fn find_isomorphism_by<A, B>(
    a: &MooreMachine<A>,
    b: &MooreMachine<B>,
    same: impl Fn(&A, &B) -> bool,
) -> Option<Vec<(StateId, StateId)>>
where
    A: Clone + Eq + Hash,
    B: Clone + Eq + Hash,
{
    if a.num_inputs() != b.num_inputs() {
        return None;
    }
    let mut fwd: HashMap<StateId, StateId> = HashMap::new();
    let mut bwd: HashMap<StateId, StateId> = HashMap::new();
    let mut pairs = Vec::new();
    let mut queue = VecDeque::from([(a.initial(), b.initial())]);
    fwd.insert(a.initial(), b.initial());
    bwd.insert(b.initial(), a.initial());
    while let Some((sa, sb)) = queue.pop_front() {
        if !same(a.output(sa), b.output(sb)) {
            return None;
        }
        pairs.push((sa, sb));
        for y in 0..a.num_inputs() {
            let (ta, tb) = (a.step(sa, y), b.step(sb, y));
            match (fwd.get(&ta), bwd.get(&tb)) {
                (Some(&x), Some(&z)) if x == tb && z == ta => {}
                (None, None) => {
                    fwd.insert(ta, tb);
                    bwd.insert(tb, ta);
                    queue.push_back((ta, tb));
                }
                _ => return None,
            }
        }
    }
    Some(pairs)
}

pub fn find_isomorphism<O: Clone + Eq + Hash>(a: &MooreMachine<O>, b: &MooreMachine<O>) -> Option<Vec<(StateId, StateId)>> {
    find_isomorphism_by(a, b, |x, y| x == y)
}

/// Isomorphism of the minimized machines.
pub fn is_isomorphic<O: Clone + Eq + Hash>(a: &MooreMachine<O>, b: &MooreMachine<O>) -> bool {
    let (_, ma) = minimal_sufficient_refinement(a);
    let (_, mb) = minimal_sufficient_refinement(b);
    find_isomorphism(&ma, &mb).is_some()
}

/// Synchronous product with tuple outputs, minimized: the smallest filter
/// supporting every input machine at once.
pub fn multi_policy_minimal<O: Clone + Eq + Hash>(machines: &[MooreMachine<O>]) -> Result<MooreMachine<Vec<O>>> {
    let first = machines.first().ok_or(Error::AlphabetMismatch)?;
    if machines.iter().any(|m| m.inputs() != first.inputs()) {
        return Err(Error::AlphabetMismatch);
    }
    let k = first.num_inputs();
    let start: Vec<StateId> = machines.iter().map(MooreMachine::initial).collect();
    let mut ids: HashMap<Vec<StateId>, StateId> = HashMap::from([(start.clone(), 0)]);
    let mut tuples = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    let mut rows: Vec<Vec<StateId>> = vec![Vec::new()];
    while let Some(t) = queue.pop_front() {
        let i = ids[&t];
        let row = (0..k)
            .map(|y| {
                let next: Vec<StateId> = t.iter().zip(machines).map(|(&s, m)| m.step(s, y)).collect();
                *ids.entry(next.clone()).or_insert_with(|| {
                    tuples.push(next.clone());
                    rows.push(Vec::new());
                    queue.push_back(next);
                    tuples.len() - 1
                })
            })
            .collect();
        rows[i] = row;
    }
    let outputs = tuples
        .iter()
        .map(|t| t.iter().zip(machines).map(|(&s, m)| m.output(s).clone()).collect())
        .collect();
    let names = tuples
        .iter()
        .map(|t| {
            let parts: Vec<&str> = t.iter().zip(machines).map(|(&s, m)| m.state_name(s)).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    let product = MooreMachine::new(first.inputs().to_vec(), outputs, rows.into_iter().flatten().collect(), 0)?
        .with_state_names(names);
    Ok(minimal_sufficient_refinement(&product).1)
}

/// Component `i` of a tuple-output machine.
pub fn project_outputs<O: Clone + Eq + Hash>(m: &MooreMachine<Vec<O>>, i: usize) -> MooreMachine<O> {
    m.map_outputs(|v| v[i].clone())
}

/// Every word over `0..alphabet` of length at most `depth`, shortest first.
pub fn words_up_to(alphabet: usize, depth: usize) -> Vec<Vec<ObsId>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..depth {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<ObsId>| {
                (0..alphabet).map(move |y| {
                    let mut w = w.clone();
                    w.push(y);
                    w
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}
