//! Graphviz DOT export. Machine states are filled by output: the start state
//! white, dead states grey, and each action its own color.

use std::fmt::Write;

use crate::gnt::{GapNode, GapTree, NavigationTrace};
use crate::machine::{ObsMooreMachine, PolicyOutput};
use crate::ts::TransitionSystem;

const PALETTE: [&str; 8] = [
    "#8dd3c7", "#fdb462", "#bebada", "#fb8072", "#80b1d3", "#b3de69", "#fccde5", "#ffffb3",
];

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn fill(o: PolicyOutput) -> &'static str {
    match o {
        PolicyOutput::Start => "white",
        PolicyOutput::Dead => "grey70",
        PolicyOutput::Act(u) => PALETTE[u % PALETTE.len()],
    }
}

/// Edges sharing endpoints are drawn once with their labels joined.
fn edges(ts: &TransitionSystem, out: &mut String) {
    let mut grouped: Vec<((usize, usize), Vec<&str>)> = Vec::new();
    for (s, y, t) in ts.transitions() {
        match grouped.iter_mut().find(|(k, _)| *k == (s, t)) {
            Some((_, labels)) => labels.push(ts.label_name(y)),
            None => grouped.push(((s, t), vec![ts.label_name(y)])),
        }
    }
    for ((s, t), labels) in grouped {
        let _ = writeln!(out, "  n{s} -> n{t} [label={}];", quote(&labels.join(",")));
    }
}

pub fn ts_to_dot(ts: &TransitionSystem, name: &str) -> String {
    let mut out = format!("digraph {} {{\n  rankdir=LR;\n  node [shape=circle];\n", quote(name));
    for s in 0..ts.num_states() {
        let shape = if s == ts.initial() { ", shape=doublecircle" } else { "" };
        let _ = writeln!(out, "  n{s} [label={}{shape}];", quote(ts.state_name(s)));
    }
    edges(ts, &mut out);
    out.push_str("}\n");
    out
}

/// Reachable part of a policy-labeled machine, states labeled with their
/// name and output.
pub fn machine_to_dot(m: &ObsMooreMachine, actions: &[String], name: &str) -> String {
    let m = m.reachable_part();
    let ts = m.to_transition_system();
    let mut out = format!(
        "digraph {} {{\n  rankdir=LR;\n  node [shape=circle, style=filled];\n",
        quote(name)
    );
    for s in 0..m.num_states() {
        let o = *m.output(s);
        let shape = if s == m.initial() { ", shape=doublecircle" } else { "" };
        let label = format!("{}\n{}", m.state_name(s), o.render(actions));
        let _ = writeln!(out, "  n{s} [label={}, fillcolor={}{shape}];", quote(&label), quote(fill(o)));
    }
    edges(&ts, &mut out);
    out.push_str("}\n");
    out
}

/// Gap tree drawn top-down from a root for the robot's position.
pub fn gap_tree_to_dot(tree: &GapTree, name: &str) -> String {
    fn node(n: &GapNode, parent: usize, next: &mut usize, out: &mut String) {
        *next += 1;
        let me = *next;
        match n {
            GapNode::Leaf(v) => {
                let _ = writeln!(out, "  g{me} [label=\"v{v}\"];");
            }
            GapNode::Hidden(v) => {
                let _ = writeln!(out, "  g{me} [label=\"v{v}\", shape=plaintext];");
            }
            GapNode::Group(children) => {
                let _ = writeln!(out, "  g{me} [label=\"v{}\"];", n.occluder());
                let _ = writeln!(out, "  g{parent} -> g{me};");
                for c in &children[1..] {
                    node(c, me, next, out);
                }
                return;
            }
        }
        let _ = writeln!(out, "  g{parent} -> g{me};");
    }
    let mut out = format!("digraph {} {{\n  node [shape=ellipse];\n  g0 [label=\"x\", shape=point];\n", quote(name));
    let mut next = 0;
    for n in tree.root() {
        node(n, 0, &mut next, &mut out);
    }
    out.push_str("}\n");
    out
}

/// Path of a navigation trace: start, visited vertices, and the events
/// observed on each leg.
pub fn trace_to_dot(trace: &NavigationTrace, name: &str) -> String {
    let mut out = format!("digraph {} {{\n  rankdir=LR;\n  node [shape=box];\n", quote(name));
    let _ = writeln!(out, "  p0 [label={}];", quote(&format!("start {}\n{}", trace.start, trace.initial)));
    for (i, v) in trace.path.iter().enumerate() {
        let _ = writeln!(out, "  p{} [label=\"v{v}\"];", i + 1);
        let events: Vec<String> = trace.events.iter().filter(|e| e.leg == i).map(|e| e.to_string()).collect();
        let _ = writeln!(out, "  p{i} -> p{} [label={}];", i + 1, quote(&events.join("\n")));
    }
    out.push_str("}\n");
    out
}
