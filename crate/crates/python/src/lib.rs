//! Python bindings: scenarios, policy-labeled machines and polygons.

use infofilter::coupling::{is_feasible, PolicyLabeledIts};
use infofilter::dot::machine_to_dot;
use infofilter::geometry::{Navigator, Point, SimplePolygon};
use infofilter::gnt::{
    gap_sensor_reactive_counterexample, gnt_supports_navigation, navigation_trace, navigation_traces, sample_interior,
};
use infofilter::machine::ObsMooreMachine;
use infofilter::minimize::{is_isomorphic, minimal_sufficient_refinement, multi_policy_minimal, supports};
use infofilter::reactive::{reactive_policy_exists, state_policy_feasible};
use infofilter::restriction::build_restriction;
use infofilter::scenario::{parse_its, parse_scenario, serialize_machine, serialize_scenario, PolicySpec, Scenario};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

fn value_error(e: infofilter::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn read(path: &str) -> PyResult<String> {
    std::fs::read_to_string(path).map_err(|e| PyIOError::new_err(format!("{path}: {e}")))
}

/// A system with its task and policy, parsed from the scenario text format.
#[pyclass(name = "Scenario", frozen)]
struct PyScenario {
    inner: Scenario,
}

#[pymethods]
impl PyScenario {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: parse_scenario(text).map_err(value_error)?,
        })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Self::parse(&read(path)?)
    }

    #[getter]
    fn states(&self) -> Vec<String> {
        self.inner.system.state_names().to_vec()
    }

    #[getter]
    fn actions(&self) -> Vec<String> {
        self.inner.system.action_names().to_vec()
    }

    #[getter]
    fn observations(&self) -> Vec<String> {
        self.inner.system.observation_names().to_vec()
    }

    /// Restriction of the history filter by the scenario's policy.
    #[pyo3(signature = (depth=None))]
    fn restrict(&self, depth: Option<usize>) -> PyResult<PyMachine> {
        let sc = &self.inner;
        let pol = sc
            .policy
            .as_ref()
            .ok_or_else(|| PyValueError::new_err("scenario declares no policy"))?
            .history_policy(&sc.system)
            .map_err(value_error)?;
        let depth = depth.or(sc.options.depth).or_else(|| pol.table_depth());
        Ok(PyMachine {
            inner: build_restriction(&sc.system, &pol, depth).map_err(value_error)?,
            actions: self.actions(),
        })
    }

    /// Minimal sufficient refinement of the restriction.
    #[pyo3(signature = (depth=None))]
    fn minimize(&self, depth: Option<usize>) -> PyResult<PyMachine> {
        self.restrict(depth)?.minimize()
    }

    /// Whether the policy accomplishes the task from every start.
    fn feasible(&self) -> PyResult<bool> {
        let sc = &self.inner;
        let task = sc.task.as_ref().ok_or_else(|| PyValueError::new_err("scenario declares no task"))?;
        let starts = sc.initial_set.as_deref();
        Ok(match &sc.policy {
            Some(PolicySpec::State(pi)) => state_policy_feasible(&sc.system, pi, task, starts),
            _ => {
                let its = PolicyLabeledIts::from_machine(&self.restrict(None)?.inner);
                matches!(is_feasible(&its, &sc.system, task, starts), Ok(true))
            }
        })
    }

    /// Whether some memoryless state policy accomplishes the task.
    fn reactive_exists(&self) -> PyResult<bool> {
        let sc = &self.inner;
        let task = sc.task.as_ref().ok_or_else(|| PyValueError::new_err("scenario declares no task"))?;
        reactive_policy_exists(&sc.system, task, sc.initial_set.as_deref(), None).map_err(value_error)
    }

    fn to_text(&self) -> String {
        serialize_scenario(&self.inner)
    }
}

/// Observation-driven Moore machine whose outputs are policy actions.
#[pyclass(name = "Machine", frozen)]
struct PyMachine {
    inner: ObsMooreMachine,
    actions: Vec<String>,
}

#[pymethods]
impl PyMachine {
    /// Machine file (`output` lines required) with the given action names.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let file = parse_its(text).map_err(value_error)?;
        Ok(Self {
            inner: file.machine().map_err(value_error)?,
            actions: file.actions,
        })
    }

    #[getter]
    fn num_states(&self) -> usize {
        self.inner.num_reachable()
    }

    #[getter]
    fn state_names(&self) -> Vec<String> {
        self.inner.state_names().to_vec()
    }

    #[getter]
    fn outputs(&self) -> Vec<String> {
        self.inner.outputs().iter().map(|o| o.render(&self.actions)).collect()
    }

    /// Output after an observation sequence (observation indices).
    fn evaluate(&self, word: Vec<usize>) -> PyResult<String> {
        Ok(self.inner.evaluate(&word).map_err(value_error)?.render(&self.actions))
    }

    fn minimize(&self) -> PyResult<PyMachine> {
        Ok(PyMachine {
            inner: minimal_sufficient_refinement(&self.inner).1,
            actions: self.actions.clone(),
        })
    }

    /// Whether the transition system in `its_text` supports this policy.
    fn supported_by(&self, its_text: &str) -> PyResult<bool> {
        let cand = parse_its(its_text).map_err(value_error)?.system;
        Ok(supports(&cand, &self.inner).is_some())
    }

    /// Whether both machines minimize to isomorphic machines.
    fn equivalent(&self, other: &PyMachine) -> bool {
        is_isomorphic(
            &minimal_sufficient_refinement(&self.inner).1,
            &minimal_sufficient_refinement(&other.inner).1,
        )
    }

    fn to_text(&self) -> String {
        serialize_machine(&self.inner, &self.actions)
    }

    #[pyo3(signature = (name="machine"))]
    fn to_dot(&self, name: &str) -> String {
        machine_to_dot(&self.inner, &self.actions, name)
    }

    fn __repr__(&self) -> String {
        format!("Machine({} states)", self.num_states())
    }
}

/// State count of the minimal machine supporting every given policy.
#[pyfunction]
fn join(machines: Vec<PyRef<'_, PyMachine>>) -> PyResult<usize> {
    let ms: Vec<ObsMooreMachine> = machines.iter().map(|m| m.inner.clone()).collect();
    Ok(multi_policy_minimal(&ms).map_err(value_error)?.num_states())
}

/// Simple polygon from `x y` lines in counterclockwise order.
#[pyclass(name = "Polygon", frozen)]
struct PyPolygon {
    nav: Navigator,
}

type PointPair = ((f64, f64), (f64, f64));

fn point((x, y): (f64, f64)) -> Point {
    Point::new(x, y)
}

#[pymethods]
impl PyPolygon {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self {
            nav: Navigator::new(SimplePolygon::parse(text).map_err(value_error)?),
        })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Self::parse(&read(path)?)
    }

    #[getter]
    fn vertices(&self) -> Vec<(f64, f64)> {
        self.nav.polygon().vertices().iter().map(|p| (p.x, p.y)).collect()
    }

    fn reflex_vertices(&self) -> Vec<usize> {
        self.nav.polygon().reflex_vertices()
    }

    /// Length and vertex sequence of the shortest path to vertex `goal`.
    fn shortest_path(&self, start: (f64, f64), goal: usize) -> PyResult<(f64, Vec<usize>)> {
        self.nav.shortest_path(point(start), goal).map_err(value_error)
    }

    /// Occluding vertices of the gaps seen from an interior point.
    fn gaps(&self, at: (f64, f64)) -> PyResult<Vec<usize>> {
        Ok(self.nav.gap_observation(point(at)).map_err(value_error)?.occluders().to_vec())
    }

    /// Gap events along the shortest path, rendered one per string.
    #[pyo3(signature = (start, goal, step=0.01))]
    fn events(&self, start: (f64, f64), goal: usize, step: f64) -> PyResult<Vec<String>> {
        let tr = navigation_trace(&self.nav, point(start), goal, step).map_err(value_error)?;
        Ok(tr.events.iter().map(ToString::to_string).collect())
    }

    /// Two points with equal gap counts but different optimal first moves.
    #[pyo3(signature = (goal, samples=10_000, seed=1))]
    fn counterexample(&self, goal: usize, samples: usize, seed: u64) -> PyResult<Option<PointPair>> {
        Ok(gap_sensor_reactive_counterexample(&self.nav, goal, samples, seed)
            .map_err(value_error)?
            .map(|(a, b)| ((a.x, a.y), (b.x, b.y))))
    }

    /// Tree filter against optimal navigation to every vertex: whether it
    /// supports every goal, its state count and the joint minimum.
    #[pyo3(signature = (samples=60, seed=7, step=0.05))]
    fn gnt_run(&self, samples: usize, seed: u64, step: f64) -> PyResult<(bool, usize, usize)> {
        let starts = sample_interior(&self.nav, samples, seed);
        let goals: Vec<usize> = (0..self.nav.polygon().len()).collect();
        let traces = navigation_traces(&self.nav, &starts, &goals, step).map_err(value_error)?;
        let report = gnt_supports_navigation(&traces).map_err(value_error)?;
        Ok((report.supports_all(), report.gnt_states, report.joint_states))
    }
}

/// Runs the command-line tool; returns (exit code, stdout, stderr).
#[pyfunction]
fn cli(args: Vec<String>) -> (i32, String, String) {
    infofilter::cli::run_args(std::iter::once("infofilter".to_owned()).chain(args))
}

#[pymodule]
fn infofilter_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_class::<PyMachine>()?;
    m.add_class::<PyPolygon>()?;
    m.add_function(wrap_pyfunction!(join, m)?)?;
    m.add_function(wrap_pyfunction!(cli, m)?)?;
    Ok(())
}
