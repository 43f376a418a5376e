//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary so
//! the lines are always shown; exits nonzero if any criterion fails.

mod common;

use std::cell::RefCell;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::time::{Duration, Instant};

use infofilter::bundled;
use infofilter::geometry::{Location, Navigator, Point, SimplePolygon};
use infofilter::gnt::{
    batches, gap_sensor_reactive_counterexample, gnt_supports_navigation, navigation_traces, sample_interior,
    NavigationTrace,
};
use infofilter::machine::{MooreMachine, ObsMooreMachine, PolicyOutput};
use infofilter::minimize::{
    evaluate_pi, find_isomorphism, is_isomorphic, minimal_sufficient_refinement, minimal_sufficient_refinement_with,
    multi_policy_minimal, project_outputs, supports, Splitting,
};
use infofilter::reactive::{
    all_assignments, feasible_state_policies, reactive_feasible, reactive_policy_exists,
    sensor_sufficient_for_reactive, SensorMap,
};
use infofilter::restriction::{belief_filter_machine, build_restriction, HistoryPolicy};
use infofilter::scenario::parse_scenario;
use infofilter::system::{BeliefState, ExternalSystem, TaskSpec};
use infofilter::ts::{is_refinement, is_sufficient, quotient_by, Labeling};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("tetromino end-to-end", tetromino_end_to_end),
        ("belief filter is the minimal filter", belief_filter_isomorphism),
        ("sufficient refinements of the policy are exactly the supporting quotients", quotient_support),
        ("minimization is minimal and unique", minimality_uniqueness),
        ("joint minimization supports every policy", joint_support),
        ("reactive execution needs a refining sensor", reactive_enumeration),
        ("geometry", geometry),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = check();
        let took = start.elapsed();
        match verdict {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} [{took:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why} [{took:.2?}]", i + 1)
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn within(start: Instant, budget: Duration, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    ensure!(took < budget, "{what} took {took:.2?}, budget {budget:.0?}");
    Ok(())
}

// ---------------------------------------------------------------- 1 and 2

fn tetromino_minimized() -> Result<(ExternalSystem, ObsMooreMachine, ObsMooreMachine), String> {
    let sc = parse_scenario(bundled::TETROMINO_SCENARIO).map_err(|e| e.to_string())?;
    let pol = sc.policy.as_ref().ok_or("scenario has no policy")?.history_policy(&sc.system).map_err(|e| e.to_string())?;
    let r = build_restriction(&sc.system, &pol, sc.options.depth).map_err(|e| e.to_string())?;
    let (_, m) = minimal_sufficient_refinement(&r);
    Ok((sc.system, r, m))
}

fn tetromino_end_to_end() -> Verdict {
    let start = Instant::now();
    let (es, r, m) = tetromino_minimized()?;
    within(start, Duration::from_secs(1), "restriction and minimization")?;

    let act = |name: &str| PolicyOutput::Act(es.action_names().iter().position(|a| a == name).unwrap());
    let mut expected = vec![PolicyOutput::Start, act("u3"), act("u2"), act("u3"), act("u1"), PolicyOutput::Dead];
    expected.sort();
    ensure!(m.num_reachable() == 6, "{} reachable states, expected 6", m.num_reachable());
    ensure!(
        common::outputs_multiset(&m) == expected,
        "outputs {:?}, expected {:?}",
        common::outputs_multiset(&m),
        expected
    );

    // The policy's outputs alone are not sufficient: two histories agree on
    // their output but not on the output one observation later.
    for machine in [&r, &m] {
        let pi = |w: &[usize]| evaluate_pi(machine, w).copied().map_err(|e| e.to_string());
        ensure!(pi(&[0])? == act("u3"), "π((0)) = {:?}", pi(&[0])?);
        ensure!(pi(&[0, 0, 0])? == act("u3"), "π((0,0,0)) = {:?}", pi(&[0, 0, 0])?);
        ensure!(pi(&[0, 0])? == act("u2"), "π((0,0)) = {:?}", pi(&[0, 0])?);
        ensure!(pi(&[0, 0, 0, 0])? == PolicyOutput::Dead, "π((0,0,0,0)) = {:?}", pi(&[0, 0, 0, 0])?);
    }
    let ts = r.to_transition_system();
    ensure!(
        !is_sufficient(&ts, &r.output_labeling()).map_err(|e| e.to_string())?,
        "the output labeling is unexpectedly sufficient"
    );
    Ok(format!(
        "6 states, outputs {}; π((0))=π((0,0,0))=u3, π((0,0))=u2 ≠ π((0,0,0,0))=xi",
        m.outputs().iter().map(|o| o.render(es.action_names())).collect::<Vec<_>>().join(" ")
    ))
}

fn belief_filter_isomorphism() -> Verdict {
    let start = Instant::now();
    let (_, _, m) = tetromino_minimized()?;
    let b = bundled::tetromino_belief_policy().reachable_part();
    let iso = find_isomorphism(&b, &m).ok_or("no isomorphism between belief filter and minimized machine")?;
    within(start, Duration::from_secs(1), "isomorphism check")?;
    let image: HashMap<usize, usize> = iso.into_iter().collect();
    // Each belief is named by an observation word reaching it; the
    // bijection must send it to the minimized state reached by that word.
    let psi: [(&str, &[usize]); 6] = [
        ("()", &[]),
        ("{x1,x2,x3}", &[0]),
        ("{x2}", &[0, 0]),
        ("{x3}", &[0, 0, 0]),
        ("{x4}", &[1]),
        ("{}", &[1, 0]),
    ];
    for (belief, word) in psi {
        let sb = b.run(word).map_err(|e| e.to_string())?;
        ensure!(b.state_name(sb) == belief, "word {word:?} reaches {} not {belief}", b.state_name(sb));
        let sm = m.run(word).map_err(|e| e.to_string())?;
        ensure!(image[&sb] == sm, "{belief} is not paired with the state reached by {word:?}");
    }
    ensure!(image.len() == 6, "bijection has {} pairs", image.len());
    Ok("bijection pairs (), {x1,x2,x3}, {x2}, {x3}, {x4}, ∅ with their minimized states".into())
}

// ---------------------------------------------------------------- 3 and 4

const SUITE_SIZE: usize = 500;

fn suite() -> Vec<common::Instance> {
    let mut rng = StdRng::seed_from_u64(2024);
    (0..SUITE_SIZE).map(|_| common::feasible_instance(&mut rng, 5, 3, 3)).collect()
}

/// Same transitions as `m` with the given outputs.
fn relabel<L: Clone + Eq + std::hash::Hash>(m: &ObsMooreMachine, labels: Vec<L>) -> MooreMachine<L> {
    let step = (0..m.num_states()).flat_map(|s| (0..m.num_inputs()).map(move |y| m.step(s, y))).collect();
    MooreMachine::new(m.inputs().to_vec(), labels, step, m.initial()).expect("same shape")
}

/// Coarsest sufficient refinement of an arbitrary labeling of `m`'s states.
fn sufficient_closure<L: Clone + Eq + std::hash::Hash>(m: &ObsMooreMachine, labels: Vec<L>) -> Labeling<usize> {
    minimal_sufficient_refinement(&relabel(m, labels)).0
}

fn quotient_support() -> Verdict {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(77);
    let (mut positive, mut negative) = (0usize, 0usize);
    for (i, inst) in suite().iter().enumerate() {
        let r = &inst.restriction;
        let ts = r.to_transition_system();
        let pi = r.output_labeling();
        let n = r.num_states();
        let mut candidates: Vec<Labeling<usize>> = vec![Labeling::identity(n), Labeling::constant(n)];
        candidates.push(minimal_sufficient_refinement(r).0);
        for _ in 0..4 {
            let tagged: Vec<(PolicyOutput, usize)> = r.outputs().iter().map(|&o| (o, rng.gen_range(0..3))).collect();
            candidates.push(sufficient_closure(r, tagged));
            let j = rng.gen_range(1..=4);
            let arbitrary: Vec<usize> = (0..n).map(|_| rng.gen_range(0..j)).collect();
            candidates.push(sufficient_closure(r, arbitrary));
        }
        for kappa in candidates {
            let sufficient = is_sufficient(&ts, &kappa).map_err(|e| e.to_string())?;
            ensure!(sufficient, "system {i}: candidate labeling is not sufficient");
            let refines = is_refinement(&kappa, &pi).map_err(|e| e.to_string())?;
            let q = quotient_by(&ts, &kappa).map_err(|e| e.to_string())?;
            let supported = supports(&q, r).is_some();
            ensure!(
                supported == refines,
                "system {i}: quotient with {} blocks {} but the labeling {} the policy",
                kappa.num_blocks(),
                if supported { "supports" } else { "does not support" },
                if refines { "refines" } else { "does not refine" }
            );
            if refines {
                positive += 1;
            } else {
                negative += 1;
            }
        }
    }
    within(start, Duration::from_secs(60), "property suite")?;
    ensure!(negative > 0 && positive > 0, "degenerate sample: {positive} positive, {negative} negative");
    Ok(format!(
        "{SUITE_SIZE} systems: {positive} refining quotients all support, {negative} non-refining all fail"
    ))
}

fn minimality_uniqueness() -> Verdict {
    let mut rng = StdRng::seed_from_u64(78);
    let mut checked = 0;
    for (i, inst) in suite().iter().enumerate() {
        let r = &inst.restriction;
        let n = r.num_states();
        if n > 8 {
            continue;
        }
        checked += 1;
        let ts = r.to_transition_system();
        let pi = r.output_labeling();
        let brute = SensorMap::all(n)
            .iter()
            .map(SensorMap::partition)
            .filter(|p| is_refinement(p, &pi).unwrap_or(false) && is_sufficient(&ts, p).unwrap_or(false))
            .map(Labeling::num_blocks)
            .min()
            .ok_or_else(|| format!("system {i}: no sufficient refinement at all"))?;
        let (_, m) = minimal_sufficient_refinement(r);
        ensure!(m.num_states() == brute, "system {i}: {} blocks, brute force {brute}", m.num_states());

        let order = common::permutation(&mut rng, n);
        let (_, mp) = minimal_sufficient_refinement(&r.permuted(&order));
        ensure!(is_isomorphic(&m, &mp), "system {i}: reordered states minimize differently");
        let (_, mf) = minimal_sufficient_refinement_with(&r.permuted(&order), Splitting::Fixpoint);
        ensure!(is_isomorphic(&m, &mf), "system {i}: fixpoint splitting disagrees with the worklist");
    }
    ensure!(checked >= 100, "only {checked} restrictions with at most 8 states");
    Ok(format!("{checked} restrictions with ≤8 states match brute force and minimize uniquely"))
}

// ---------------------------------------------------------------- 5

/// Belief-feedback policy choosing a random action for each belief.
fn random_belief_policy(es: &ExternalSystem, rng: &mut StdRng) -> ObsMooreMachine {
    let seed: u64 = rng.gen();
    let m = es.num_actions();
    let memo: RefCell<HashMap<BeliefState, usize>> = RefCell::new(HashMap::new());
    let rng = RefCell::new(StdRng::seed_from_u64(seed));
    belief_filter_machine(es, |b| *memo.borrow_mut().entry(b.clone()).or_insert_with(|| rng.borrow_mut().gen_range(0..m)))
}

fn joint_support() -> Verdict {
    let mut rng = StdRng::seed_from_u64(79);
    let mut pairs = 0;
    let mut distinct = 0;
    while pairs < 150 {
        let inst = common::feasible_instance(&mut rng, 5, 3, 3);
        let other = match rng.gen_bool(0.5) {
            true => random_belief_policy(&inst.system, &mut rng),
            false => {
                let task = common::random_task(&mut rng, &inst.system);
                match infofilter::restriction::synthesize_belief_policy(&inst.system, &task) {
                    Some(p) => p,
                    None => continue,
                }
            }
        };
        let r2 = build_restriction(&inst.system, &HistoryPolicy::Machine(other), None).map_err(|e| e.to_string())?;
        let r1 = &inst.restriction;
        let joint = multi_policy_minimal(&[r1.clone(), r2.clone()]).map_err(|e| e.to_string())?;
        let ts = joint.to_transition_system();
        ensure!(supports(&ts, r1).is_some(), "pair {pairs}: joint machine does not support the first policy");
        ensure!(supports(&ts, &r2).is_some(), "pair {pairs}: joint machine does not support the second policy");
        for (k, r) in [r1, &r2].into_iter().enumerate() {
            let own = minimal_sufficient_refinement(r).1.num_states();
            ensure!(joint.num_states() >= own, "pair {pairs}: joint machine smaller than policy {k}'s minimum");
            let projected = minimal_sufficient_refinement(&project_outputs(&joint, k)).1;
            ensure!(projected.num_states() == own, "pair {pairs}: projection {k} does not reduce to the policy");
        }
        if !is_isomorphic(&minimal_sufficient_refinement(r1).1, &minimal_sufficient_refinement(&r2).1) {
            distinct += 1;
        }
        pairs += 1;
    }
    Ok(format!("{pairs} pairs ({distinct} with different policies): the joint machine supports both"))
}

// ---------------------------------------------------------------- 6

/// Every deterministic dynamics on `n` states with `m` actions.
fn all_dynamics(n: usize, m: usize) -> impl Iterator<Item = Vec<Vec<usize>>> {
    all_assignments(n * m, n).map(move |flat| flat.chunks(m).map(<[usize]>::to_vec).collect())
}

fn reactive_enumeration() -> Verdict {
    let start = Instant::now();
    let (mut systems, mut cases, mut solvable, mut insolvable) = (0usize, 0usize, 0usize, 0usize);
    for (n, m) in [(1, 2), (2, 2), (3, 2), (4, 2), (1, 3), (2, 3), (3, 3)] {
        let sensors = SensorMap::all(n);
        for next in all_dynamics(n, m) {
            systems += 1;
            let es = ExternalSystem::from_table(&next, (0..n).collect(), n).map_err(|e| e.to_string())?;
            // Renaming states maps any goal set of size k onto the last k.
            for k in 1..=n.min(3) {
                let task = TaskSpec::state(n - k..n, 2 * n + 2).map_err(|e| e.to_string())?;
                let feasible = feasible_state_policies(&es, &task, None);
                let exists = reactive_policy_exists(&es, &task, None, None).map_err(|e| e.to_string())?;
                ensure!(exists == !feasible.is_empty(), "{next:?} goal {k}: existence disagrees with enumeration");
                if exists {
                    solvable += 1;
                } else {
                    insolvable += 1;
                }
                for h in &sensors {
                    cases += 1;
                    let reactive = all_assignments(h.num_blocks(), m).any(|pi_y| reactive_feasible(&es, h, &pi_y, &task, None));
                    let refining = feasible.iter().any(|pi| sensor_sufficient_for_reactive(h, pi));
                    ensure!(
                        reactive == refining,
                        "{next:?} goal last {k}, sensor {:?}: reactive {reactive}, refining feasible policy {refining}",
                        h.observations()
                    );
                    ensure!(exists || !reactive, "{next:?} goal last {k}: a reactive policy succeeds without any feasible state policy");
                }
            }
        }
    }
    within(start, Duration::from_secs(120), "exhaustive enumeration")?;
    Ok(format!(
        "{systems} dynamics, {cases} sensor cases ({solvable} solvable and {insolvable} unsolvable tasks)"
    ))
}

// ---------------------------------------------------------------- 7

fn polygons() -> Vec<(&'static str, Navigator)> {
    bundled::POLYGONS
        .iter()
        .map(|(name, text)| (*name, Navigator::new(SimplePolygon::parse(text).expect("bundled polygon"))))
        .collect()
}

fn geometry() -> Verdict {
    let mut notes = Vec::new();
    let mut failures = Vec::new();
    for (part, result) in [
        ("grid oracle", grid_oracle()),
        ("event lines", event_lines()),
        ("counterexamples", counterexamples()),
        ("tree filter", tree_filter()),
    ] {
        match result {
            Ok(note) => notes.push(format!("{part}: {note}")),
            Err(why) => failures.push(format!("{part}: {why}")),
        }
    }
    if failures.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(format!("{} (passing: {})", failures.join("; "), notes.join("; ")))
    }
}

/// Shortest distances from `start` to each polygon vertex through a fine
/// grid: grid points inside the polygon joined along every primitive
/// offset of at most five cells, with the start and the polygon vertices
/// joined to the grid points within five cells that they see.
fn grid_distances(poly: &SimplePolygon, start: Point) -> Vec<f64> {
    const REACH: i64 = 5;
    let (lo, hi) = poly.bounding_box();
    let cell = 0.005 * (hi.x - lo.x).max(hi.y - lo.y);
    let nx = ((hi.x - lo.x) / cell).ceil() as i64 + 1;
    let ny = ((hi.y - lo.y) / cell).ceil() as i64 + 1;
    let at = |i: i64, j: i64| Point::new(lo.x + i as f64 * cell, lo.y + j as f64 * cell);
    let inside: Vec<bool> = (0..nx * ny).map(|id| poly.locate(at(id % nx, id / nx)) == Location::Inside).collect();
    let edges: Vec<(Point, Point)> = (0..poly.len()).map(|i| poly.edge(i)).collect();
    let clearance: Vec<f64> = (0..nx * ny)
        .map(|id| {
            let p = at(id % nx, id / nx);
            edges.iter().map(|&(a, b)| segment_distance(p, a, b)).fold(f64::INFINITY, f64::min)
        })
        .collect();
    let offsets: Vec<(i64, i64)> = (-REACH..=REACH)
        .flat_map(|dx| (-REACH..=REACH).map(move |dy| (dx, dy)))
        .filter(|&(dx, dy)| gcd(dx.abs(), dy.abs()) == 1)
        .collect();

    // Extra nodes after the grid: the start, then the vertices.
    let grid = (nx * ny) as usize;
    let mut extra = vec![start];
    extra.extend_from_slice(poly.vertices());
    let mut links: HashMap<usize, Vec<(usize, f64)>> = HashMap::new();
    for (e, &p) in extra.iter().enumerate() {
        let node = grid + e;
        let (ci, cj) = (((p.x - lo.x) / cell).round() as i64, ((p.y - lo.y) / cell).round() as i64);
        for i in ci - REACH - 1..=ci + REACH + 1 {
            for j in cj - REACH - 1..=cj + REACH + 1 {
                if i < 0 || j < 0 || i >= nx || j >= ny || !inside[(j * nx + i) as usize] {
                    continue;
                }
                let q = at(i, j);
                if p.dist(q) <= REACH as f64 * cell && poly.visible(p, q).unwrap_or(false) {
                    let id = (j * nx + i) as usize;
                    links.entry(node).or_default().push((id, p.dist(q)));
                    links.entry(id).or_default().push((node, p.dist(q)));
                }
            }
        }
        for (f, &q) in extra.iter().enumerate().skip(e + 1) {
            if p.dist(q) <= REACH as f64 * cell && poly.visible(p, q).unwrap_or(false) {
                links.entry(node).or_default().push((grid + f, p.dist(q)));
                links.entry(grid + f).or_default().push((node, p.dist(q)));
            }
        }
    }

    let total = grid + extra.len();
    let mut dist = vec![f64::INFINITY; total];
    let mut heap = BinaryHeap::new();
    dist[grid] = 0.0;
    heap.push(Reverse((0u64, grid)));
    while let Some(Reverse((bits, u))) = heap.pop() {
        let d = f64::from_bits(bits);
        if d > dist[u] {
            continue;
        }
        let mut relax = |v: usize, w: f64, heap: &mut BinaryHeap<Reverse<(u64, usize)>>| {
            if d + w < dist[v] {
                dist[v] = d + w;
                heap.push(Reverse(((d + w).to_bits(), v)));
            }
        };
        if u < grid {
            let (i, j) = (u as i64 % nx, u as i64 / nx);
            for &(dx, dy) in &offsets {
                let (a, b) = (i + dx, j + dy);
                if a < 0 || b < 0 || a >= nx || b >= ny {
                    continue;
                }
                let v = (b * nx + a) as usize;
                if !inside[v] {
                    continue;
                }
                let len = ((dx * dx + dy * dy) as f64).sqrt() * cell;
                if clearance[u] > len || poly.visible(at(i, j), at(a, b)).unwrap_or(false) {
                    relax(v, len, &mut heap);
                }
            }
        }
        if let Some(ls) = links.get(&u) {
            for &(v, w) in ls {
                relax(v, w, &mut heap);
            }
        }
    }
    dist[grid + 1..].to_vec()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = b.sub(a);
    let t = (p.sub(a).dot(d) / d.dot(d)).clamp(0.0, 1.0);
    p.dist(a.add(d.scale(t)))
}

fn grid_oracle() -> Result<String, String> {
    let mut compared = 0;
    let mut worst: f64 = 0.0;
    for (name, nav) in polygons() {
        let poly = nav.polygon();
        let (lo, hi) = poly.bounding_box();
        let cell = 0.005 * (hi.x - lo.x).max(hi.y - lo.y);
        for start in sample_interior(&nav, 3, 11) {
            let grid = grid_distances(poly, start);
            for (v, &approx) in grid.iter().enumerate() {
                let (exact, _) = nav.shortest_path(start, v).map_err(|e| e.to_string())?;
                if exact < 10.0 * cell {
                    continue;
                }
                let rel = (approx - exact) / exact;
                ensure!(
                    rel > -1e-9 && rel <= 0.01,
                    "{name}: from ({:.3},{:.3}) to v{v} visibility graph {exact:.5}, grid {approx:.5}",
                    start.x,
                    start.y
                );
                worst = worst.max(rel);
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} distances within {:.3}%", worst * 100.0))
}

/// Position at arc length `t` along a polyline.
fn point_at(points: &[Point], t: f64) -> Point {
    let mut left = t;
    for w in points.windows(2) {
        let len = w[0].dist(w[1]);
        if left <= len {
            return w[0].lerp(w[1], if len > 0.0 { left / len } else { 0.0 });
        }
        left -= len;
    }
    *points.last().expect("nonempty")
}

fn line_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = b.sub(a);
    (d.cross(p.sub(a))).abs() / d.norm()
}

fn standard_traces(nav: &Navigator) -> Result<Vec<NavigationTrace>, String> {
    let starts = sample_interior(nav, 60, 7);
    let goals: Vec<usize> = (0..nav.polygon().len()).collect();
    navigation_traces(nav, &starts, &goals, 0.05).map_err(|e| e.to_string())
}

/// Every change of the gap reading happens where the path crosses a line
/// through a reflex vertex and another vertex (an edge extension or a
/// bitangent), and distinct changes happen at distinct crossings.
fn event_lines() -> Result<String, String> {
    const TOL: f64 = 1e-6;
    let mut events = 0;
    for (name, nav) in polygons() {
        let poly = nav.polygon();
        let vs = poly.vertices();
        let lines: Vec<(Point, Point)> = poly
            .reflex_vertices()
            .into_iter()
            .flat_map(|r| (0..vs.len()).filter(move |&w| w != r).map(move |w| (vs[r], vs[w])))
            .collect();
        for tr in standard_traces(&nav)? {
            let mut points = vec![tr.start];
            points.extend(tr.path.iter().map(|&v| vs[v]));
            let mut used: Vec<Point> = Vec::new();
            for batch in batches(&tr.events) {
                let mut hit = None;
                for e in batch {
                    let p = point_at(&points, e.t);
                    let leg = (points[e.leg.min(points.len() - 2)], points[e.leg.min(points.len() - 2) + 1]);
                    let on = lines.iter().any(|&(a, b)| {
                        let along_leg = line_distance(leg.0, a, b) < 1e-9 && line_distance(leg.1, a, b) < 1e-9;
                        !along_leg && line_distance(p, a, b) <= TOL
                    });
                    ensure!(on, "{name}: {e} at ({:.6},{:.6}) lies on no predicted line", p.x, p.y);
                    events += 1;
                    hit = Some(p);
                }
                if let Some(p) = hit {
                    ensure!(
                        used.iter().all(|q| q.dist(p) > TOL),
                        "{name}: two changes at one crossing ({:.6},{:.6})",
                        p.x,
                        p.y
                    );
                    used.push(p);
                }
            }
        }
    }
    Ok(format!("{events} events on predicted lines"))
}

fn counterexamples() -> Result<String, String> {
    let mut found = Vec::new();
    for (name, nav) in polygons() {
        let n = nav.polygon().len();
        let mut pair = None;
        for goal in 0..n {
            if let Some(p) = gap_sensor_reactive_counterexample(&nav, goal, 10_000, 1).map_err(|e| e.to_string())? {
                pair = Some((goal, p));
                break;
            }
        }
        match (nav.polygon().is_convex(), pair) {
            (true, None) => {}
            (true, Some(_)) => return Err(format!("{name} is convex yet has a counterexample")),
            (false, None) => return Err(format!("{name}: no counterexample in 10^4 samples")),
            (false, Some((goal, (a, b)))) => {
                let same = nav.gap_observation(a).map_err(|e| e.to_string())?.len()
                    == nav.gap_observation(b).map_err(|e| e.to_string())?.len();
                let ta = nav.optimal_action(a, goal).map_err(|e| e.to_string())?.map(|x| x.target);
                let tb = nav.optimal_action(b, goal).map_err(|e| e.to_string())?.map(|x| x.target);
                ensure!(same && ta != tb, "{name}: reported pair is not a counterexample");
                found.push(name);
            }
        }
    }
    Ok(format!("found on {}", found.join(", ")))
}

fn tree_filter() -> Result<String, String> {
    let mut rows = Vec::new();
    let mut unsupported = Vec::new();
    let mut larger = Vec::new();
    for (name, nav) in polygons() {
        let report = gnt_supports_navigation(&standard_traces(&nav)?).map_err(|e| e.to_string())?;
        if !report.supports_all() {
            unsupported.push(name);
        }
        if !report.minimal() {
            larger.push(name);
        }
        rows.push(format!("{name} {}/{}", report.gnt_states, report.joint_states));
    }
    let counts = rows.join(", ");
    ensure!(unsupported.is_empty(), "navigation unsupported on {}", unsupported.join(", "));
    ensure!(
        larger.is_empty(),
        "supported everywhere, but the tree filter exceeds the joint minimum on {} (tree/joint states: {counts})",
        larger.join(", ")
    );
    Ok(format!("supported everywhere with minimal state counts ({counts})"))
}
