//! Gap navigation trees: critical events of the gap sensor along paths, the
//! tree filter they drive, and how it relates to distance-optimal
//! navigation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::geometry::{canonical_rotation, Location, Navigator, Point};
use crate::machine::{MooreMachine, ObsMooreMachine, PolicyOutput};
use crate::minimize::{minimal_sufficient_refinement, supports_where};
use crate::ts::TransitionSystem;

/// Bisection stops once a change is bracketed this tightly (path length).
pub const EVENT_TOL: f64 = 1e-7;
/// Changes this close to a reached vertex (path length) count as part of
/// the arrival.
pub const ARRIVAL_TOL: f64 = 1e-5;
/// Most samples a single trace may take.
const SAMPLE_BUDGET: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventKind {
    Appear,
    Disappear,
    Split,
    Merge,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::Appear => "appear",
            EventKind::Disappear => "disappear",
            EventKind::Split => "split",
            EventKind::Merge => "merge",
        })
    }
}

/// A change of the gap observation. `gap` is the occluding vertex of the
/// gap concerned; for merges `partner` is the gap absorbing it, for splits
/// the gap it leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct GapEvent {
    pub kind: EventKind,
    pub gap: usize,
    pub partner: Option<usize>,
    /// Arc length along the path.
    pub t: f64,
    /// Gaps after the event and any simultaneous ones, canonical cyclic
    /// order.
    pub after: Vec<usize>,
    /// Path leg the robot is on after the event.
    pub leg: usize,
    /// Last of a group of simultaneous events.
    pub settled: bool,
}

/// Splits events into groups of simultaneous ones.
pub fn batches(events: &[GapEvent]) -> Vec<&[GapEvent]> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, e) in events.iter().enumerate() {
        if e.settled {
            out.push(&events[start..=i]);
            start = i + 1;
        }
    }
    if start < events.len() {
        out.push(&events[start..]);
    }
    out
}

/// One change of the observation: simultaneous events and the gaps after
/// them.
pub fn batch_symbol(batch: &[GapEvent]) -> GntSymbol {
    GntSymbol::Change {
        events: batch.iter().map(|e| (e.kind, e.gap, e.partner)).collect(),
        after: batch.last().map(|e| e.after.clone()).unwrap_or_default(),
    }
}

impl fmt::Display for GapEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.7} {} v{}", self.t, self.kind, self.gap)?;
        if let Some(p) = self.partner {
            write!(f, " v{p}")?;
        }
        Ok(())
    }
}

/// Input letter of the tree filter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GntSymbol {
    Init(GapTree),
    Change {
        events: Vec<(EventKind, usize, Option<usize>)>,
        after: Vec<usize>,
    },
}

impl fmt::Display for GntSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[usize]| v.iter().map(|g| format!("v{g}")).collect::<Vec<_>>().join(" ");
        match self {
            GntSymbol::Init(t) => write!(f, "init{t}"),
            GntSymbol::Change { events, after } => {
                for (kind, gap, partner) in events {
                    write!(f, "{kind} v{gap}")?;
                    if let Some(p) = partner {
                        write!(f, "/v{p}")?;
                    }
                    f.write_str(" ")?;
                }
                write!(f, "[{}]", list(after))
            }
        }
    }
}

/// A gap: primitive, or several merged behind the first one's occluder.
/// `Hidden` marks a convex vertex behind a gap; it never becomes a gap.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GapNode {
    Leaf(usize),
    Hidden(usize),
    Group(Vec<GapNode>),
}

impl GapNode {
    pub fn occluder(&self) -> usize {
        match self {
            GapNode::Leaf(v) | GapNode::Hidden(v) => *v,
            GapNode::Group(c) => c[0].occluder(),
        }
    }

    /// Removes the node occluded by `v` below this one, if present.
    fn extract(&mut self, v: usize) -> Option<GapNode> {
        let GapNode::Group(children) = self else {
            return None;
        };
        let found = if let Some(i) = children.iter().position(|c| c.occluder() == v) {
            (i > 0).then(|| children.remove(i))
        } else {
            None
        };
        let found = found.or_else(|| children.iter_mut().find_map(|c| c.extract(v)));
        if children.len() == 1 {
            *self = children.pop().expect("one child");
        }
        found
    }

    fn contains(&self, v: usize) -> bool {
        match self {
            GapNode::Leaf(u) | GapNode::Hidden(u) => *u == v,
            GapNode::Group(c) => c.iter().any(|n| n.contains(v)),
        }
    }

    fn render(&self) -> String {
        match self {
            GapNode::Leaf(v) => format!("v{v}"),
            GapNode::Hidden(v) => format!("·v{v}"),
            GapNode::Group(c) => format!("({})", c.iter().map(GapNode::render).collect::<Vec<_>>().join(" ")),
        }
    }
}

/// Root children are the current gaps in canonical cyclic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GapTree {
    root: Vec<GapNode>,
}

impl GapTree {
    pub fn from_observation(occluders: &[usize]) -> Self {
        Self {
            root: canonical_rotation(occluders).into_iter().map(GapNode::Leaf).collect(),
        }
    }

    /// Tree of an explored environment at `x`: the current gaps, each with
    /// the gaps that appear behind it once its occluder is reached, read off
    /// the shortest paths from `x` to every vertex.
    pub fn explored(nav: &Navigator, x: Point) -> Result<Self> {
        let p = nav.polygon();
        let mut children: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for w in 0..p.len() {
            let (_, path) = nav.shortest_path(x, w)?;
            if let [.., g, _] = path[..] {
                children.entry(g).or_default().push(w);
            }
        }
        let build = |g: usize| -> GapNode {
            fn go(g: usize, p: &crate::geometry::SimplePolygon, children: &BTreeMap<usize, Vec<usize>>) -> GapNode {
                if !p.is_reflex(g) {
                    return GapNode::Hidden(g);
                }
                let below: Vec<GapNode> = children.get(&g).into_iter().flatten().map(|&c| go(c, p, children)).collect();
                if below.is_empty() {
                    GapNode::Leaf(g)
                } else {
                    GapNode::Group(std::iter::once(GapNode::Leaf(g)).chain(below).collect())
                }
            }
            go(g, p, &children)
        };
        let order = canonical_rotation(nav.gap_observation_near(x)?.occluders());
        Ok(Self {
            root: order.into_iter().map(build).collect(),
        })
    }

    pub fn root(&self) -> &[GapNode] {
        &self.root
    }

    pub fn gaps(&self) -> Vec<usize> {
        self.root.iter().map(GapNode::occluder).collect()
    }

    /// Root gap whose subtree holds vertex `v`.
    pub fn gap_hiding(&self, v: usize) -> Option<usize> {
        self.root.iter().find(|n| n.contains(v)).map(GapNode::occluder)
    }

    fn position(&self, v: usize) -> Result<usize> {
        self.root.iter().position(|n| n.occluder() == v).ok_or(Error::UnknownGapToken(v))
    }

    fn reorder(&mut self, after: &[usize]) {
        let rank = |n: &GapNode| after.iter().position(|&g| g == n.occluder()).unwrap_or(usize::MAX);
        self.root.sort_by_key(|n| (rank(n), n.occluder()));
    }

    pub fn render(&self) -> String {
        format!("[{}]", self.root.iter().map(GapNode::render).collect::<Vec<_>>().join(" "))
    }
}

impl fmt::Display for GapTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Tree after one event: appear adds a leaf (or lifts a recorded one),
/// disappear drops a gap and lifts the gaps recorded behind it, merge groups the absorbed gap behind its partner,
/// split takes the gap back out of its partner (a fresh leaf if it was not
/// recorded there).
pub fn gnt_step(tree: &GapTree, event: &GapEvent) -> Result<GapTree> {
    let mut t = tree.clone();
    match event.kind {
        EventKind::Appear => {
            if t.position(event.gap).is_err() {
                let node = t.root.iter_mut().find_map(|n| n.extract(event.gap));
                t.root.push(node.unwrap_or(GapNode::Leaf(event.gap)));
            }
        }
        EventKind::Disappear => {
            let i = t.position(event.gap)?;
            let lifted = dissolve(t.root.remove(i));
            t.root.extend(lifted);
        }
        EventKind::Merge => {
            let partner = event.partner.ok_or(Error::UnknownGapToken(event.gap))?;
            let absorbed = t.root.remove(t.position(event.gap)?);
            let i = t.position(partner)?;
            let front = std::mem::replace(&mut t.root[i], GapNode::Leaf(partner));
            t.root[i] = GapNode::Group(vec![front, absorbed]);
        }
        EventKind::Split => {
            let partner = event.partner.ok_or(Error::UnknownGapToken(event.gap))?;
            let i = t.position(partner)?;
            let node = t.root[i]
                .extract(event.gap)
                .or_else(|| t.root.iter_mut().find_map(|n| n.extract(event.gap)))
                .unwrap_or(GapNode::Leaf(event.gap));
            t.root.push(node);
        }
    }
    t.reorder(&event.after);
    Ok(t)
}

/// Children of a reached gap, including those of merged groups.
fn dissolve(node: GapNode) -> Vec<GapNode> {
    match node {
        GapNode::Leaf(_) | GapNode::Hidden(_) => Vec::new(),
        GapNode::Group(mut cs) => {
            let rest = cs.split_off(1);
            let mut out = dissolve(cs.pop().expect("nonempty group"));
            out.extend(rest.into_iter().filter(|n| !matches!(n, GapNode::Hidden(_))));
            out
        }
    }
}

/// Whether `r` lies beyond `s` on a ray from `e`, within tolerance.
fn collinear_behind(e: Point, s: Point, r: Point) -> bool {
    let (vs, vr) = (s.sub(e), r.sub(e));
    vs.cross(vr).abs() <= 1e-5 * vs.norm() * vr.norm() && vs.dot(vr) > 0.0 && vr.norm() > vs.norm()
}

fn classify(
    nav: &Navigator,
    e: Point,
    before: &[usize],
    after: &[usize],
    t: f64,
    leg: usize,
    out: &mut Vec<GapEvent>,
) {
    let verts = nav.polygon().vertices();
    let canon = canonical_rotation(after);
    let kept: Vec<usize> = before.iter().copied().filter(|g| after.contains(g)).collect();
    let start = out.len();
    let mut push = |kind, gap, partner| {
        out.push(GapEvent {
            kind,
            gap,
            partner,
            t,
            after: canon.clone(),
            leg,
            settled: false,
        })
    };
    for &r in before.iter().filter(|g| !after.contains(g)) {
        match kept.iter().find(|&&s| collinear_behind(e, verts[s], verts[r])) {
            Some(&s) => push(EventKind::Merge, r, Some(s)),
            None => push(EventKind::Disappear, r, None),
        }
    }
    for &r in after.iter().filter(|g| !before.contains(g)) {
        match kept.iter().find(|&&s| collinear_behind(e, verts[s], verts[r])) {
            Some(&s) => push(EventKind::Split, r, Some(s)),
            None => push(EventKind::Appear, r, None),
        }
    }
    if out.len() > start {
        out.last_mut().expect("nonempty").settled = true;
    }
}

/// Events on arriving at path vertex `a` and turning onto the next leg: the
/// chased gap at `a` disappears; if `a` hides the way back it reappears and
/// gaps lost on that side merge into it.
fn classify_arrival(a: usize, before: &[usize], after: &[usize], t: f64, leg: usize, out: &mut Vec<GapEvent>) {
    let canon = canonical_rotation(after);
    let start = out.len();
    let mut push = |kind, gap, partner| {
        out.push(GapEvent {
            kind,
            gap,
            partner,
            t,
            after: canon.clone(),
            leg,
            settled: false,
        })
    };
    if before.contains(&a) {
        push(EventKind::Disappear, a, None);
    }
    let back = after.contains(&a);
    if back {
        push(EventKind::Appear, a, None);
    }
    for &r in before.iter().filter(|&&g| g != a && !after.contains(&g)) {
        if back {
            push(EventKind::Merge, r, Some(a));
        } else {
            push(EventKind::Disappear, r, None);
        }
    }
    for &r in after.iter().filter(|&&g| g != a && !before.contains(&g)) {
        push(EventKind::Appear, r, None);
    }
    if out.len() > start {
        out.last_mut().expect("nonempty").settled = true;
    }
}

/// Polyline parametrized by arc length.
struct Polyline {
    points: Vec<Point>,
    offsets: Vec<f64>,
}

impl Polyline {
    fn new(points: &[Point]) -> Self {
        let mut offsets = vec![0.0];
        for w in points.windows(2) {
            offsets.push(offsets.last().expect("nonempty") + w[0].dist(w[1]));
        }
        Self {
            points: points.to_vec(),
            offsets,
        }
    }

    fn length(&self) -> f64 {
        *self.offsets.last().expect("nonempty")
    }

    fn at(&self, leg: usize, s: f64) -> Point {
        let (a, b) = (self.points[leg], self.points[leg + 1]);
        let len = self.offsets[leg + 1] - self.offsets[leg];
        if len == 0.0 {
            a
        } else {
            a.lerp(b, (s - self.offsets[leg]) / len)
        }
    }
}

/// Change points of the gap observation along a path, found by sampling
/// every `step` and bisecting each change down to [`EVENT_TOL`].
/// Observations on the boundary are taken from the interior side; at path
/// corners on polygon vertices the corner is passed as one step.
pub fn event_trace(nav: &Navigator, path: &[Point], step: f64) -> Result<Vec<GapEvent>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::StepTooCoarse(step));
    }
    for &p in path {
        if nav.polygon().locate(p) == Location::Outside {
            return Err(Error::OutsidePolygon(p.x, p.y));
        }
    }
    if path.len() < 2 {
        return Ok(Vec::new());
    }
    let line = Polyline::new(path);
    if line.length() / step > SAMPLE_BUDGET {
        return Err(Error::StepTooCoarse(step));
    }
    let obs = |leg: usize, s: f64| -> Result<Vec<usize>> {
        Ok(nav.gap_observation_near(line.at(leg, s))?.occluders().to_vec())
    };
    let mut events = Vec::new();
    let mut carried: Option<Vec<usize>> = None;
    for leg in 0..path.len() - 1 {
        let (s0, s1) = (line.offsets[leg], line.offsets[leg + 1]);
        if s1 - s0 <= 2.0 * ARRIVAL_TOL {
            continue;
        }
        let margin = |p: Point| {
            match nav.polygon().locate(p) {
                Location::Inside => 0.0,
                _ if nav.polygon().vertex_at(p).is_some() => ARRIVAL_TOL,
                _ => EVENT_TOL,
            }
        };
        let lo = s0 + margin(path[leg]);
        let hi = s1 - margin(path[leg + 1]);
        let mut samples = vec![lo];
        let mut s = s0 + step;
        while s < hi {
            samples.push(s);
            s += step;
        }
        samples.push(hi);
        let first = obs(leg, lo)?;
        if let Some(prev) = carried.take() {
            if prev != first {
                let corner = path[leg];
                match nav.polygon().vertex_at(corner) {
                    Some(a) => classify_arrival(a, &prev, &first, s0, leg, &mut events),
                    None => classify(nav, corner, &prev, &first, s0, leg, &mut events),
                }
            }
        }
        let mut cur = first;
        for w in samples.windows(2) {
            let next = obs(leg, w[1])?;
            if next != cur {
                bisect(nav, &line, leg, (w[0], &cur), (w[1], &next), &mut events)?;
            }
            cur = next;
        }
        carried = Some(cur);
    }
    Ok(events)
}

fn bisect(
    nav: &Navigator,
    line: &Polyline,
    leg: usize,
    (lo, olo): (f64, &[usize]),
    (hi, ohi): (f64, &[usize]),
    out: &mut Vec<GapEvent>,
) -> Result<()> {
    if olo == ohi {
        return Ok(());
    }
    if hi - lo <= EVENT_TOL {
        let t = (lo + hi) / 2.0;
        classify(nav, line.at(leg, t), olo, ohi, t, leg, out);
        return Ok(());
    }
    let mid = (lo + hi) / 2.0;
    let omid = nav.gap_observation_near(line.at(leg, mid))?.occluders().to_vec();
    bisect(nav, line, leg, (lo, olo), (mid, &omid), out)?;
    bisect(nav, line, leg, (mid, &omid), (hi, ohi), out)
}

/// Replays events from an initial tree; one tree per group of simultaneous
/// events, checking the root against the observed gaps after each.
pub fn replay(initial: &GapTree, events: &[GapEvent]) -> Result<Vec<GapTree>> {
    let mut trees = vec![initial.clone()];
    for batch in batches(events) {
        let mut next = trees.last().expect("nonempty").clone();
        for e in batch {
            next = gnt_step(&next, e)?;
        }
        let after = &batch.last().expect("nonempty batch").after;
        if next.gaps() != *after {
            return Err(Error::TraceInconsistent(format!(
                "at t={:.7}: tree {next} but observed [{}]",
                batch[0].t,
                after.iter().map(|g| format!("v{g}")).collect::<Vec<_>>().join(" ")
            )));
        }
        trees.push(next);
    }
    Ok(trees)
}

/// Execution of the distance-optimal policy from `start` to vertex `goal`.
#[derive(Debug, Clone, PartialEq)]
pub struct NavigationTrace {
    pub start: Point,
    pub goal: usize,
    pub path: Vec<usize>,
    pub initial: GapTree,
    pub events: Vec<GapEvent>,
}

impl NavigationTrace {
    /// Observation symbols: the first reading, then one per change.
    pub fn symbols(&self) -> Vec<GntSymbol> {
        std::iter::once(GntSymbol::Init(self.initial.clone()))
            .chain(batches(&self.events).into_iter().map(batch_symbol))
            .collect()
    }

    /// Vertex headed for after each symbol.
    pub fn targets(&self) -> Vec<usize> {
        std::iter::once(self.path[0])
            .chain(batches(&self.events).into_iter().map(|b| self.path[b[b.len() - 1].leg]))
            .collect()
    }
}

pub fn navigation_trace(nav: &Navigator, start: Point, goal: usize, step: f64) -> Result<NavigationTrace> {
    nav.gap_observation(start)?;
    let initial = GapTree::explored(nav, start)?;
    let (_, path) = nav.shortest_path(start, goal)?;
    let mut points = vec![start];
    points.extend(path.iter().map(|&v| nav.polygon().vertices()[v]));
    let events = event_trace(nav, &points, step)?;
    Ok(NavigationTrace {
        start,
        goal,
        path,
        initial,
        events,
    })
}

/// Deterministic uniform samples from the polygon's interior.
pub fn sample_interior(nav: &Navigator, count: usize, seed: u64) -> Vec<Point> {
    let (lo, hi) = nav.polygon().bounding_box();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = Point::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
        if nav.polygon().locate(p) == Location::Inside {
            out.push(p);
        }
    }
    out
}

/// Two interior points with the same gap reading whose optimal moves toward
/// `goal` differ, from `samples` seeded samples.
pub fn gap_sensor_reactive_counterexample(
    nav: &Navigator,
    goal: usize,
    samples: usize,
    seed: u64,
) -> Result<Option<(Point, Point)>> {
    nav.polygon().vertex(goal)?;
    let mut seen: HashMap<usize, (Point, usize)> = HashMap::new();
    for x in sample_interior(nav, samples, seed) {
        let reading = nav.gap_observation(x)?.tokens().len();
        let Some(action) = nav.optimal_action(x, goal)? else {
            continue;
        };
        match seen.get(&reading) {
            Some(&(first, target)) if target != action.target => return Ok(Some((first, x))),
            Some(_) => {}
            None => {
                seen.insert(reading, (x, action.target));
            }
        }
    }
    Ok(None)
}

/// Outcome of checking the tree filter against optimal navigation.
#[derive(Debug, Clone, PartialEq)]
pub struct GntReport {
    /// Goals whose optimal policy the tree filter supports.
    pub supported: Vec<(usize, bool)>,
    /// Reachable states of the tree filter, with start and sink.
    pub gnt_states: usize,
    /// States after jointly minimizing over every goal's policy.
    pub joint_states: usize,
    /// The tree filter: start state, then one state per tree.
    pub filter: TransitionSystem,
    pub trees: Vec<GapTree>,
    pub symbols: Vec<GntSymbol>,
}

impl GntReport {
    pub fn supports_all(&self) -> bool {
        self.supported.iter().all(|&(_, ok)| ok)
    }

    pub fn minimal(&self) -> bool {
        self.gnt_states == self.joint_states
    }
}

/// Builds the tree filter over the observation symbols met in `traces`, and
/// for each goal the policy tree that maps observation sequences to the
/// vertex headed for. A goal is supported when the tree filter determines
/// the policy's move everywhere the policy was exercised.
pub fn gnt_supports_navigation(traces: &[NavigationTrace]) -> Result<GntReport> {
    let mut symbols: Vec<GntSymbol> = traces.iter().flat_map(NavigationTrace::symbols).collect();
    symbols.sort();
    symbols.dedup();
    let sym_id: HashMap<&GntSymbol, usize> = symbols.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let k = symbols.len();

    // Tree filter: state 0 is the start, trees follow in first-seen order.
    let mut trees: Vec<GapTree> = Vec::new();
    let mut tree_id: HashMap<GapTree, usize> = HashMap::new();
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    for tr in traces {
        let seq = replay(&tr.initial, &tr.events)?;
        let mut prev = 0;
        for (tree, sym) in seq.into_iter().zip(tr.symbols()) {
            let next = *tree_id.entry(tree.clone()).or_insert_with(|| {
                trees.push(tree);
                trees.len()
            });
            edges.push((prev, sym_id[&sym], next));
            prev = next;
        }
    }
    let mut names = vec!["()".to_owned()];
    names.extend(trees.iter().map(GapTree::render));
    let mut gnt = TransitionSystem::new(names, symbols.iter().map(ToString::to_string).collect(), 0)?;
    for &(a, y, b) in &edges {
        if gnt.successor(a, y).is_none() {
            gnt.add_transition(a, y, b)?;
        }
    }

    let goals: BTreeSet<usize> = traces.iter().map(|t| t.goal).collect();
    let mut supported = Vec::new();
    let mut joint: Vec<Vec<PolicyOutput>> = vec![vec![PolicyOutput::Dead; goals.len()]; trees.len() + 2];
    joint[0] = vec![PolicyOutput::Start; goals.len()];
    for (gi, &goal) in goals.iter().enumerate() {
        let ok = match policy_trie(traces.iter().filter(|t| t.goal == goal), &sym_id, k) {
            Some(trie) => match supports_where(&gnt, &trie, |o| !o.is_dead()) {
                Some(mu) => {
                    for (s, row) in joint.iter_mut().enumerate().take(trees.len() + 1).skip(1) {
                        if let Some(&o) = mu.get(s) {
                            row[gi] = o;
                        }
                    }
                    true
                }
                None => false,
            },
            None => false,
        };
        supported.push((goal, ok));
    }

    // Complete the filter with a sink and label it with every goal's move.
    let sink = trees.len() + 1;
    let step: Vec<usize> = (0..=sink)
        .flat_map(|s| {
            let gnt = &gnt;
            (0..k).map(move |y| if s == sink { sink } else { gnt.successor(s, y).unwrap_or(sink) })
        })
        .collect();
    let labeled = MooreMachine::new(gnt.label_names().to_vec(), joint, step, 0)?;
    let gnt_states = labeled.num_reachable();
    let joint_states = minimal_sufficient_refinement(&labeled).1.num_states();
    Ok(GntReport {
        supported,
        gnt_states,
        joint_states,
        filter: gnt,
        trees,
        symbols,
    })
}

/// Observation-sequence tree of one goal's executions with the vertex headed
/// for at each node; `None` if two executions disagree after the same
/// observations.
fn policy_trie<'a>(
    traces: impl Iterator<Item = &'a NavigationTrace>,
    sym_id: &HashMap<&GntSymbol, usize>,
    k: usize,
) -> Option<ObsMooreMachine> {
    let mut outputs = vec![PolicyOutput::Start, PolicyOutput::Dead];
    let mut rows: Vec<Vec<usize>> = vec![vec![1; k], vec![1; k]];
    for tr in traces {
        let mut node = 0;
        for (sym, target) in tr.symbols().iter().zip(tr.targets()) {
            let y = sym_id[sym];
            node = if rows[node][y] == 1 {
                outputs.push(PolicyOutput::Act(target));
                rows.push(vec![1; k]);
                let fresh = outputs.len() - 1;
                rows[node][y] = fresh;
                fresh
            } else {
                rows[node][y]
            };
            if outputs[node] != PolicyOutput::Act(target) {
                return None;
            }
        }
    }
    let names = (0..outputs.len()).map(|i| format!("n{i}")).collect();
    Some(
        MooreMachine::new(Vec::from_iter((0..k).map(|y| y.to_string())), outputs, rows.concat(), 0)
            .expect("rows cover every node")
            .with_state_names(names),
    )
}

/// Traces of the optimal policy from every start to every goal.
pub fn navigation_traces(nav: &Navigator, starts: &[Point], goals: &[usize], step: f64) -> Result<Vec<NavigationTrace>> {
    let mut out = Vec::new();
    for &goal in goals {
        for &x in starts {
            out.push(navigation_trace(nav, x, goal, step)?);
        }
    }
    Ok(out)
}
