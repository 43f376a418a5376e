use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("reachable state `{0}` has no label")]
    UndefinedLabel(String),
    #[error("labelings are defined over different domains")]
    DomainMismatch,
    #[error("labeling is not sufficient: states in block `{block}` disagree on successor under `{label}`")]
    NotSufficient { block: String, label: String },
    #[error("transition ({state}, {label}) already leads to `{existing}`")]
    Nondeterministic {
        state: String,
        label: String,
        existing: String,
    },
    #[error("state index {0} out of range")]
    UnknownState(usize),
    #[error("edge label index {0} out of range")]
    UnknownLabel(usize),
    #[error("no transition from `{state}` on `{label}`")]
    MissingTransition { state: String, label: String },

    #[error("malformed history: {0}")]
    MalformedHistory(String),
    #[error("policy selects the dead label at internal state `{0}`")]
    PolicyEmitsXi(String),
    #[error("policy defines no action at internal state `{0}`")]
    NoAction(String),
    #[error("history lies outside the policy's domain: {0}")]
    OutOfDomain(String),
    #[error("policy is not feasible for the task")]
    NotFeasible,
    #[error("a depth bound is required for table policies")]
    DepthRequired,
    #[error("observation index {0} is not in the input alphabet")]
    UnknownObservation(usize),
    #[error("machine is not full: no transition from state {state} on input {input}")]
    NotFull { state: usize, input: usize },
    #[error("machines do not share an input alphabet")]
    AlphabetMismatch,

    #[error("sensor is not bijective: observation `{0}` covers several states or none")]
    NotBijective(String),
    #[error("search budget of {budget} candidates exhausted after {explored} (no feasible candidate found so far)")]
    SearchBudgetExceeded { budget: usize, explored: usize },

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("point ({0}, {1}) lies outside the polygon")]
    OutsidePolygon(f64, f64),
    #[error("point ({0}, {1}) lies on the polygon boundary")]
    OnBoundary(f64, f64),
    #[error("vertex index {0} out of range")]
    UnknownVertex(usize),
    #[error("events collapse within one sampling step near t = {0}")]
    StepTooCoarse(f64),
    #[error("gap token {0} is not present in the tree")]
    UnknownGapToken(usize),
    #[error("gap tree lost sync with the observed gaps: {0}")]
    TraceInconsistent(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("integrity error: {0}")]
    Integrity(String),
}
