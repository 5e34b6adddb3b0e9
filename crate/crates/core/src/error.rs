use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed task set document: {0}")]
    Parse(String),

    #[error("task {id}: {field} must be positive and finite (got {value})")]
    NonPositive {
        id: String,
        field: &'static str,
        value: f64,
    },

    #[error("task {id}: utilization {util} exceeds 1")]
    Overutilized { id: String, util: f64 },

    #[error("task set is empty")]
    EmptyTaskSet,

    #[error("processor count must be at least 1")]
    NoProcessors,

    #[error("task index {index} out of range for {len} tasks")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("expected {expected} test points, got {got}")]
    PointCount { expected: usize, got: usize },

    #[error("test points must be nondecreasing and positive")]
    PointOrder,

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("oracle requires integer parameters: task {id} has {field} = {value}")]
    NotExact {
        id: String,
        field: &'static str,
        value: f64,
    },

    #[error("oracle budget exceeded: {0}")]
    Budget(String),

    #[error("too many entries for enumeration: {got} > {max}")]
    TooLarge { got: usize, max: usize },

    #[error("invalid generator configuration: {0}")]
    Config(String),

    #[error("generator gave up after {0} attempts")]
    GenerationFailed(usize),

    #[error("witness requested for a task that passed the test")]
    AcceptedSet,
}

pub type Result<T> = std::result::Result<T, Error>;
