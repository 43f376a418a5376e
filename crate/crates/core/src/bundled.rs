//! Bundled scenarios: the skewed tetromino grid and the test polygons.

use std::collections::BTreeMap;

use crate::machine::ObsMooreMachine;
use crate::restriction::{belief_filter_machine, kappa_pi, HistoryPolicy};
use crate::system::{ExternalSystem, History, TaskSpec};
use crate::ts::TransitionSystem;

pub const TETROMINO_SCENARIO: &str = include_str!("../scenarios/tetromino.scn");
pub const TETROMINO_STATE_FEEDBACK_SCENARIO: &str = include_str!("../scenarios/tetromino_state.scn");
pub const ONE_STATE_ITS: &str = include_str!("../scenarios/onestate.its");

/// Bundled polygons as (name, vertex-list text).
pub const POLYGONS: [(&str, &str); 5] = [
    ("square", include_str!("../scenarios/square.poly")),
    ("lshape", include_str!("../scenarios/lshape.poly")),
    ("ushape", include_str!("../scenarios/ushape.poly")),
    ("star3", include_str!("../scenarios/star3.poly")),
    ("tetromino", include_str!("../scenarios/tetromino.poly")),
];

/// Four cells `x1=(0,0)`, `x2=(1,0)`, `x3=(1,1)`, `x4=(2,1)`; actions stop,
/// up and right, with moves off the grid leaving the state unchanged; the
/// sensor reports 1 exactly at `x4`.
pub fn tetromino_system() -> ExternalSystem {
    let cells = [(0, 0), (1, 0), (1, 1), (2, 1)];
    let moves = [(0, 0), (0, 1), (1, 0)];
    let mut ts = TransitionSystem::new(
        ["x1", "x2", "x3", "x4"].map(String::from).to_vec(),
        ["u1", "u2", "u3"].map(String::from).to_vec(),
        0,
    )
    .expect("nonempty");
    for (x, &(cx, cy)) in cells.iter().enumerate() {
        for (u, &(dx, dy)) in moves.iter().enumerate() {
            let target = cells.iter().position(|&c| c == (cx + dx, cy + dy)).unwrap_or(x);
            ts.add_transition(x, u, target).expect("one move per action");
        }
    }
    ExternalSystem::new(ts, vec![0, 0, 0, 1], vec!["0".into(), "1".into()]).expect("full dynamics")
}

/// Reach `x4`, i.e. observe 1.
pub fn tetromino_task() -> TaskSpec {
    TaskSpec::observation([1], 16).expect("nonempty goal")
}

/// Belief filter of the tetromino under the belief policy that stops at
/// `{x4}`, moves up at `{x2}` and right otherwise.
pub fn tetromino_belief_policy() -> ObsMooreMachine {
    let es = tetromino_system();
    belief_filter_machine(&es, |b| match b.iter().collect::<Vec<_>>().as_slice() {
        [3] => 0,
        [1] => 1,
        _ => 2,
    })
}

/// The same policy written out as an explicit table over the attainable
/// on-policy histories with at most four observations.
pub fn tetromino_table_policy() -> HistoryPolicy {
    let es = tetromino_system();
    let gen = HistoryPolicy::Machine(tetromino_belief_policy());
    let mut table = BTreeMap::new();
    let mut frontier: Vec<History> = (0..es.num_observations()).map(History::start).collect();
    while let Some(h) = frontier.pop() {
        let Some(u) = kappa_pi(&es, &gen, &h).expect("in range").action() else {
            continue;
        };
        table.insert(h.clone(), u);
        if h.len() < 4 {
            frontier.extend((0..es.num_observations()).map(|y| h.extended(u, y)));
        }
    }
    HistoryPolicy::Table(table)
}
