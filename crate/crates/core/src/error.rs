use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LtlError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("alphabet exceeds {0} atoms")]
    AlphabetTooLarge(usize),
    #[error("lasso word needs a non-empty cycle")]
    EmptyCycle,
    #[error("automaton exceeds the state cap of {cap}")]
    StateCap { cap: usize },
    #[error("formula is not syntactically co-safe")]
    NotCosafe,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error(transparent)]
    Ltl(#[from] LtlError),
    #[error("agent has no regions")]
    NoRegions,
    #[error("region `{region}` violates the layout assumption: {reason}")]
    Assumption { region: String, reason: String },
    #[error("task `{formula}` is unrealizable over the given regions")]
    Unrealizable { formula: String },
    #[error("synthesized plan does not satisfy `{formula}`")]
    Invalid { formula: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControlError {
    #[error("invalid control parameter: {0}")]
    InvalidParams(String),
    #[error("agents {i} and {j} are {dist} apart, outside the sensing radius {r}")]
    OutOfRange { i: usize, j: usize, dist: f64, r: f64 },
    #[error("distance {dist} is not below the sensing radius {r}")]
    Domain { dist: f64, r: f64 },
    #[error("active agent {0} has no goal")]
    MissingGoal(usize),
    #[error("matrix is not symmetric")]
    NotSymmetric,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("initial graph is disconnected")]
    Disconnected,
    #[error("edge ({i},{j}) lost at step {step}: distance {dist} exceeds {r}")]
    EdgeLost {
        step: u64,
        i: usize,
        j: usize,
        dist: f64,
        r: f64,
    },
    #[error(transparent)]
    Control(#[from] ControlError),
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse scenario `{path}`: {message}")]
    Format { path: String, message: String },
    #[error("invalid scenario:\n{}", .0.join("\n"))]
    Validation(Vec<String>),
    #[error("plan synthesis failed for agent {agent}: {source}")]
    Synthesis {
        agent: usize,
        #[source]
        source: PlanError,
    },
    #[error("malformed trace `{file}` line {line}: {message}")]
    MalformedTrace {
        file: String,
        line: usize,
        message: String,
    },
}
