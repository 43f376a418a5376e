//! Finite deterministic transition systems and state labelings.
//!
//! A [`Labeling`] plays two roles: it is an information map from states to
//! labels, and it is the partition of states into label classes. Sufficiency,
//! refinement, quotients and joins only ever look at the induced partition, so
//! labels are opaque tokens compared by equality.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use crate::error::{Error, Result};

pub type StateId = usize;
pub type LabelId = usize;

/// Deterministic transition system with a possibly partial transition map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionSystem {
    state_names: Vec<String>,
    label_names: Vec<String>,
    delta: Vec<Option<StateId>>,
    initial: StateId,
}

impl TransitionSystem {
    pub fn new(state_names: Vec<String>, label_names: Vec<String>, initial: StateId) -> Result<Self> {
        if initial >= state_names.len() {
            return Err(Error::UnknownState(initial));
        }
        let delta = vec![None; state_names.len() * label_names.len()];
        Ok(Self {
            state_names,
            label_names,
            delta,
            initial,
        })
    }

    /// Builds a system with states and labels named by their indices.
    pub fn with_sizes(num_states: usize, num_labels: usize, initial: StateId) -> Result<Self> {
        Self::new(
            (0..num_states).map(|i| format!("s{i}")).collect(),
            (0..num_labels).map(|i| format!("l{i}")).collect(),
            initial,
        )
    }

    pub fn add_transition(&mut self, from: StateId, label: LabelId, to: StateId) -> Result<()> {
        self.check_state(from)?;
        self.check_state(to)?;
        if label >= self.label_names.len() {
            return Err(Error::UnknownLabel(label));
        }
        let slot = &mut self.delta[from * self.label_names.len() + label];
        match *slot {
            Some(existing) if existing != to => Err(Error::Nondeterministic {
                state: self.state_names[from].clone(),
                label: self.label_names[label].clone(),
                existing: self.state_names[existing].clone(),
            }),
            _ => {
                *slot = Some(to);
                Ok(())
            }
        }
    }

    fn check_state(&self, s: StateId) -> Result<()> {
        if s < self.state_names.len() {
            Ok(())
        } else {
            Err(Error::UnknownState(s))
        }
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn num_labels(&self) -> usize {
        self.label_names.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.state_names[s]
    }

    pub fn label_name(&self, l: LabelId) -> &str {
        &self.label_names[l]
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.state_names.iter().position(|n| n == name)
    }

    pub fn label_index(&self, name: &str) -> Option<LabelId> {
        self.label_names.iter().position(|n| n == name)
    }

    pub fn successor(&self, s: StateId, label: LabelId) -> Option<StateId> {
        self.delta[s * self.label_names.len() + label]
    }

    /// All defined transitions in (state, label) order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, LabelId, StateId)> + '_ {
        let n = self.label_names.len();
        self.delta
            .iter()
            .enumerate()
            .filter_map(move |(i, t)| t.map(|to| (i / n, i % n, to)))
    }

    pub fn is_full(&self) -> bool {
        self.delta.iter().all(Option::is_some)
    }

    /// States in breadth-first order from the initial state, visiting labels
    /// in index order.
    pub fn reachable_order(&self) -> Vec<StateId> {
        let mut seen = vec![false; self.num_states()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(s) = queue.pop_front() {
            order.push(s);
            for l in 0..self.num_labels() {
                if let Some(t) = self.successor(s, l) {
                    if !seen[t] {
                        seen[t] = true;
                        queue.push_back(t);
                    }
                }
            }
        }
        order
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut mask = vec![false; self.num_states()];
        for s in self.reachable_order() {
            mask[s] = true;
        }
        mask
    }

    /// Copy restricted to the states reachable from the initial state,
    /// renumbered in breadth-first order.
    pub fn reachable_part(&self) -> TransitionSystem {
        let order = self.reachable_order();
        let mut index = vec![None; self.num_states()];
        for (i, &s) in order.iter().enumerate() {
            index[s] = Some(i);
        }
        let mut out = TransitionSystem {
            state_names: order.iter().map(|&s| self.state_names[s].clone()).collect(),
            label_names: self.label_names.clone(),
            delta: vec![None; order.len() * self.num_labels()],
            initial: 0,
        };
        for (i, &s) in order.iter().enumerate() {
            for l in 0..self.num_labels() {
                if let Some(t) = self.successor(s, l) {
                    out.delta[i * self.num_labels() + l] = index[t];
                }
            }
        }
        out
    }

    pub fn rename_states(&mut self, names: Vec<String>) {
        assert_eq!(names.len(), self.num_states());
        self.state_names = names;
    }
}

/// Map from (a subset of) states to opaque labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Labeling<L> {
    labels: Vec<Option<L>>,
}

impl<L: Clone + Eq + Hash> Labeling<L> {
    pub fn new(labels: Vec<Option<L>>) -> Self {
        Self { labels }
    }

    pub fn total(labels: Vec<L>) -> Self {
        Self {
            labels: labels.into_iter().map(Some).collect(),
        }
    }

    pub fn from_fn(num_states: usize, f: impl FnMut(StateId) -> L) -> Self {
        Self::total((0..num_states).map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, s: StateId) -> Option<&L> {
        self.labels.get(s).and_then(Option::as_ref)
    }

    pub fn labels(&self) -> &[Option<L>] {
        &self.labels
    }

    pub fn in_domain(&self, s: StateId) -> bool {
        self.get(s).is_some()
    }

    /// Canonical block index per state: blocks are numbered by the first
    /// state (in index order) that carries their label.
    pub fn block_ids(&self) -> Vec<Option<usize>> {
        let mut seen: HashMap<&L, usize> = HashMap::new();
        self.labels
            .iter()
            .map(|l| {
                l.as_ref().map(|l| {
                    let next = seen.len();
                    *seen.entry(l).or_insert(next)
                })
            })
            .collect()
    }

    pub fn num_blocks(&self) -> usize {
        self.block_ids().into_iter().flatten().max().map_or(0, |m| m + 1)
    }

    /// The induced partition, each block sorted, blocks in canonical order.
    pub fn blocks(&self) -> Vec<Vec<StateId>> {
        let ids = self.block_ids();
        let mut blocks = vec![Vec::new(); self.num_blocks()];
        for (s, b) in ids.into_iter().enumerate() {
            if let Some(b) = b {
                blocks[b].push(s);
            }
        }
        blocks
    }

    /// Relabels with canonical block numbers, forgetting label structure.
    pub fn canonical(&self) -> Labeling<usize> {
        Labeling::new(self.block_ids())
    }

    pub fn map<M: Clone + Eq + Hash>(&self, mut f: impl FnMut(&L) -> M) -> Labeling<M> {
        Labeling::new(self.labels.iter().map(|l| l.as_ref().map(&mut f)).collect())
    }
}

impl Labeling<usize> {
    /// Each state in its own block.
    pub fn identity(num_states: usize) -> Self {
        Self::total((0..num_states).collect())
    }

    /// All states in one block.
    pub fn constant(num_states: usize) -> Self {
        Self::total(vec![0; num_states])
    }
}

/// Equal labels and equal edge label imply equal successor labels, over the
/// states reachable from the initial state. Pairs where either successor is
/// missing are not constrained.
pub fn is_sufficient<L: Clone + Eq + Hash>(ts: &TransitionSystem, kappa: &Labeling<L>) -> Result<bool> {
    Ok(sufficiency_witness(ts, kappa)?.is_none())
}

/// First (block state, edge label) pair violating sufficiency, if any.
pub(crate) fn sufficiency_witness<L: Clone + Eq + Hash>(
    ts: &TransitionSystem,
    kappa: &Labeling<L>,
) -> Result<Option<(StateId, LabelId)>> {
    let order = ts.reachable_order();
    for &s in &order {
        if !kappa.in_domain(s) {
            return Err(Error::UndefinedLabel(ts.state_name(s).to_owned()));
        }
    }
    let mut image: HashMap<(&L, LabelId), &L> = HashMap::new();
    for &s in &order {
        let ls = kappa.get(s).expect("checked above");
        for l in 0..ts.num_labels() {
            let Some(t) = ts.successor(s, l) else { continue };
            let lt = kappa.get(t).expect("successor of a reachable state is reachable");
            match image.get(&(ls, l)) {
                Some(prev) if *prev != lt => return Ok(Some((s, l))),
                Some(_) => {}
                None => {
                    image.insert((ls, l), lt);
                }
            }
        }
    }
    Ok(None)
}

/// Whether every block of `fine` lies inside a block of `coarse`.
pub fn is_refinement<A, B>(fine: &Labeling<A>, coarse: &Labeling<B>) -> Result<bool>
where
    A: Clone + Eq + Hash,
    B: Clone + Eq + Hash,
{
    if fine.len() != coarse.len() || (0..fine.len()).any(|s| fine.in_domain(s) != coarse.in_domain(s)) {
        return Err(Error::DomainMismatch);
    }
    let mut image: HashMap<&A, &B> = HashMap::new();
    for (a, b) in fine.labels().iter().zip(coarse.labels()) {
        let (Some(a), Some(b)) = (a, b) else { continue };
        if *image.entry(a).or_insert(b) != b {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Quotient of `ts` by a sufficient labeling. Quotient states are the blocks
/// met by reachable states, numbered in breadth-first order from `[initial]`
/// and named after a representative label.
pub fn quotient_by<L>(ts: &TransitionSystem, kappa: &Labeling<L>) -> Result<TransitionSystem>
where
    L: Clone + Eq + Hash + std::fmt::Debug,
{
    quotient_with_map(ts, kappa).map(|(q, _)| q)
}

/// As [`quotient_by`], also returning the state → quotient-state map
/// (`None` for unreachable states).
pub fn quotient_with_map<L>(
    ts: &TransitionSystem,
    kappa: &Labeling<L>,
) -> Result<(TransitionSystem, Vec<Option<StateId>>)>
where
    L: Clone + Eq + Hash + std::fmt::Debug,
{
    if let Some((s, l)) = sufficiency_witness(ts, kappa)? {
        return Err(Error::NotSufficient {
            block: format!("{:?}", kappa.get(s).expect("reachable")),
            label: ts.label_name(l).to_owned(),
        });
    }
    // BFS over blocks, expanding every reachable member of a block.
    let mask = ts.reachable();
    let mut members: HashMap<&L, Vec<StateId>> = HashMap::new();
    for s in (0..ts.num_states()).filter(|&s| mask[s]) {
        members.entry(kappa.get(s).expect("checked")).or_default().push(s);
    }
    let mut block_of: HashMap<&L, StateId> = HashMap::new();
    let mut reps: Vec<&L> = Vec::new();
    let mut queue = VecDeque::new();
    let init = kappa.get(ts.initial()).expect("checked");
    block_of.insert(init, 0);
    reps.push(init);
    queue.push_back(init);
    let mut edges = Vec::new();
    while let Some(label) = queue.pop_front() {
        let from = block_of[label];
        for l in 0..ts.num_labels() {
            let succ = members[label].iter().find_map(|&s| ts.successor(s, l));
            if let Some(t) = succ {
                let lt = kappa.get(t).expect("checked");
                let to = *block_of.entry(lt).or_insert_with(|| {
                    reps.push(lt);
                    queue.push_back(lt);
                    reps.len() - 1
                });
                edges.push((from, l, to));
            }
        }
    }
    let names = reps.iter().map(|l| format!("{l:?}")).collect();
    let mut q = TransitionSystem::new(names, ts.label_names().to_vec(), 0)?;
    for (from, l, to) in edges {
        q.add_transition(from, l, to)?;
    }
    let map = (0..ts.num_states())
        .map(|s| if mask[s] { kappa.get(s).map(|l| block_of[l]) } else { None })
        .collect();
    Ok((q, map))
}

/// Join (least upper bound in the refinement order): the label of a state is
/// the tuple of its labels under every input.
pub fn join_labelings<L: Clone + Eq + Hash>(ls: &[Labeling<L>]) -> Result<Labeling<Vec<L>>> {
    let Some(first) = ls.first() else {
        return Ok(Labeling::new(Vec::new()));
    };
    let n = first.len();
    for l in ls {
        if l.len() != n || (0..n).any(|s| l.in_domain(s) != first.in_domain(s)) {
            return Err(Error::DomainMismatch);
        }
    }
    Ok(Labeling::new(
        (0..n)
            .map(|s| {
                first
                    .in_domain(s)
                    .then(|| ls.iter().map(|l| l.get(s).expect("same domain").clone()).collect())
            })
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_loops() -> TransitionSystem {
        let mut ts = TransitionSystem::with_sizes(2, 1, 0).unwrap();
        ts.add_transition(0, 0, 0).unwrap();
        ts.add_transition(1, 0, 1).unwrap();
        ts
    }

    fn cycle(n: usize) -> TransitionSystem {
        let mut ts = TransitionSystem::with_sizes(n, 1, 0).unwrap();
        for s in 0..n {
            ts.add_transition(s, 0, (s + 1) % n).unwrap();
        }
        ts
    }

    #[test]
    fn constant_and_identity_labelings_are_sufficient() {
        let ts = two_loops();
        assert!(is_sufficient(&ts, &Labeling::constant(2)).unwrap());
        assert!(is_sufficient(&ts, &Labeling::identity(2)).unwrap());
    }

    #[test]
    fn parity_is_sufficient_on_even_cycle_but_not_a_split_pair() {
        let ts = cycle(4);
        assert!(is_sufficient(&ts, &Labeling::total(vec![0, 1, 0, 1])).unwrap());
        assert!(!is_sufficient(&ts, &Labeling::total(vec![0, 0, 1, 1])).unwrap());
    }

    #[test]
    fn unlabeled_reachable_state_is_an_error() {
        let ts = cycle(3);
        let k = Labeling::new(vec![Some(0), None, Some(0)]);
        assert_eq!(is_sufficient(&ts, &k), Err(Error::UndefinedLabel("s1".into())));
    }

    #[test]
    fn unreachable_states_are_ignored() {
        let mut ts = TransitionSystem::with_sizes(3, 1, 0).unwrap();
        ts.add_transition(0, 0, 0).unwrap();
        ts.add_transition(1, 0, 2).unwrap();
        ts.add_transition(2, 0, 1).unwrap();
        let k = Labeling::new(vec![Some(0), Some(1), None]);
        assert!(is_sufficient(&ts, &k).unwrap());
    }

    #[test]
    fn missing_successor_is_vacuous() {
        let mut ts = TransitionSystem::with_sizes(3, 2, 0).unwrap();
        ts.add_transition(0, 0, 1).unwrap();
        ts.add_transition(0, 1, 2).unwrap();
        ts.add_transition(1, 1, 1).unwrap();
        ts.add_transition(2, 0, 0).unwrap();
        // 1 and 2 share a block; they never both have a successor on one label.
        assert!(is_sufficient(&ts, &Labeling::total(vec![0, 1, 1])).unwrap());
    }

    #[test]
    fn nondeterministic_insert_is_rejected() {
        let mut ts = TransitionSystem::with_sizes(2, 1, 0).unwrap();
        ts.add_transition(0, 0, 1).unwrap();
        assert!(matches!(ts.add_transition(0, 0, 0), Err(Error::Nondeterministic { .. })));
        ts.add_transition(0, 0, 1).unwrap();
    }

    #[test]
    fn refinement_cases() {
        let id = Labeling::identity(4);
        let two = Labeling::total(vec!['a', 'a', 'b', 'b']);
        assert!(is_refinement(&id, &two).unwrap());
        assert!(!is_refinement(&Labeling::constant(4), &two).unwrap());
        assert!(is_refinement(&two, &Labeling::constant(4)).unwrap());
        let partial = Labeling::new(vec![Some(0), None, Some(0), Some(0)]);
        assert_eq!(is_refinement(&id, &partial), Err(Error::DomainMismatch));
    }

    #[test]
    fn quotient_by_identity_and_constant() {
        let ts = cycle(3);
        let q = quotient_by(&ts, &Labeling::identity(3)).unwrap();
        assert_eq!(q.num_states(), 3);
        assert_eq!(q.successor(0, 0), Some(1));
        let q = quotient_by(&ts, &Labeling::constant(3)).unwrap();
        assert_eq!(q.num_states(), 1);
        assert_eq!(q.successor(0, 0), Some(0));
    }

    #[test]
    fn quotient_rejects_insufficient_labeling() {
        let ts = cycle(4);
        let err = quotient_by(&ts, &Labeling::total(vec![0, 0, 1, 1])).unwrap_err();
        assert!(matches!(err, Error::NotSufficient { .. }));
    }

    #[test]
    fn join_of_crossing_partitions() {
        // {0,1}{2,3} joined with {0,2}{1,3}: every intersection is a singleton.
        let a = Labeling::total(vec![0, 0, 1, 1]);
        let b = Labeling::total(vec![0, 1, 0, 1]);
        let j = join_labelings(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(j.num_blocks(), 4);
        assert!(is_refinement(&j, &a).unwrap() && is_refinement(&j, &b).unwrap());
    }

    #[test]
    fn join_identities() {
        let k = Labeling::total(vec![3, 1, 3, 2]);
        let j = join_labelings(std::slice::from_ref(&k)).unwrap();
        assert_eq!(j.canonical(), k.canonical());
        let j = join_labelings(&[Labeling::constant(4), k.clone()]).unwrap();
        assert_eq!(j.canonical(), k.canonical());
        let short = Labeling::constant(3);
        assert_eq!(join_labelings(&[k, short]), Err(Error::DomainMismatch));
    }
}
