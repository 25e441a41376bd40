use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QubitError {
    #[error("probability out of range: {field} = {value} (must lie in (0, 1))")]
    ProbabilityOutOfRange { field: &'static str, value: f64 },
    #[error("non-positive duration: {field}")]
    NonPositiveDuration { field: &'static str },
    #[error("missing duration: t_gate is required for gate-based qubits")]
    MissingGateTime,
    #[error("unknown preset '{name}' (valid: {})", valid.join(", "))]
    UnknownPreset {
        name: String,
        valid: Vec<&'static str>,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QecError {
    #[error("above threshold: p = {p} is not below p* = {threshold} for code '{code}'")]
    AboveThreshold {
        code: String,
        p: f64,
        threshold: f64,
    },
    #[error("distance cap exceeded: code '{code}' needs d > {cap} to reach P <= {target:e}")]
    DistanceCapExceeded { code: String, cap: u32, target: f64 },
    #[error("code '{code}' is not compatible with the {instruction_set} instruction set")]
    IncompatibleInstructionSet {
        code: String,
        instruction_set: String,
    },
    #[error("invalid code distance {0}: must be odd and at least 3")]
    InvalidDistance(u32),
    #[error("invalid logical error target {0}: must be positive")]
    InvalidTarget(f64),
    #[error("invalid code model '{code}': {reason}")]
    InvalidModel { code: String, reason: String },
    #[error("no compatible code reaches P <= {target:e}: {}", reasons.join("; "))]
    NoFeasibleCode { target: f64, reasons: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FactoryError {
    #[error(
        "formula out of validity range in round {round}: acceptance probability {acceptance} <= 0"
    )]
    OutOfValidityRange { round: usize, acceptance: f64 },
    #[error("factory produces no reliable output")]
    NoReliableOutput,
    #[error("no factory reaches target error rate {target:e} (best achieved: {best})")]
    NoFactoryReachesTarget { target: f64, best: String },
    #[error("invalid round {round}: {reason}")]
    InvalidRound { round: usize, reason: String },
    #[error("round {round} has {copies} copies but {required} are needed to feed the next round")]
    UnderProvisioned {
        round: usize,
        copies: u64,
        required: u64,
    },
    #[error("invalid factory target {0}: must be positive")]
    InvalidTarget(f64),
    #[error("factory has no rounds")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CountsError {
    #[error("invalid algorithm counts: {0}")]
    InvalidCounts(String),
    #[error("invalid error budget: {0}")]
    InvalidBudget(String),
    #[error("budget exhausted: shares sum to {sum} which exceeds epsilon = {epsilon}")]
    BudgetExhausted { sum: f64, epsilon: f64 },
    #[error("non-positive budget share: {share} = {value}")]
    NonPositiveShare { share: &'static str, value: f64 },
    #[error("invalid synthesis accuracy {0}: must lie in (0, 1)")]
    InvalidSynthesisAccuracy(f64),
    #[error("invalid synthesis model: {0}")]
    InvalidSynthesisModel(String),
    #[error("lattice size N = {0} is not a perfect square >= 4")]
    NonSquareLattice(u64),
    #[error("invalid Trotter step count {0}: must be at least 1")]
    InvalidTrotterSteps(u64),
    #[error("unknown application preset '{name}' (valid: {})", valid.join(", "))]
    UnknownPreset {
        name: String,
        valid: Vec<&'static str>,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimateError {
    #[error("invalid c_factor {0}: must be a rational >= 1")]
    InvalidCFactor(String),
    #[error("no c_factors given")]
    EmptyFactors,
    #[error("invalid requirements: {0}")]
    InvalidRequirements(String),
    #[error("factory duration exceeds algorithm runtime after {passes} passes")]
    FixedPointNotReached { passes: usize },
    #[error("arithmetic overflow computing {0}")]
    Overflow(&'static str),
    #[error(transparent)]
    Qec(#[from] QecError),
    #[error(transparent)]
    Factory(#[from] FactoryError),
}

/// Top-level error, tagged with the module that raised it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit_models: {0}")]
    Qubit(#[from] QubitError),
    #[error("qec_models: {0}")]
    Qec(#[from] QecError),
    #[error("tfactory: {0}")]
    Factory(#[from] FactoryError),
    #[error("psspc: {0}")]
    Counts(#[from] CountsError),
    #[error("estimator: {0}")]
    Estimate(EstimateError),
    #[error("job schema violation at '{pointer}': {message}")]
    Schema { pointer: String, message: String },
}

impl From<EstimateError> for Error {
    fn from(err: EstimateError) -> Self {
        match err {
            EstimateError::Qec(e) => Error::Qec(e),
            EstimateError::Factory(e) => Error::Factory(e),
            other => Error::Estimate(other),
        }
    }
}

impl Error {
    /// Schema problems exit with 2, everything else with 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema { .. } => 2,
            Error::Qubit(QubitError::UnknownPreset { .. }) => 2,
            Error::Counts(CountsError::UnknownPreset { .. }) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
