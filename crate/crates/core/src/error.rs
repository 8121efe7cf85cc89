use thiserror::Error;

/// Errors produced by the simulator, the gate checker and the search.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mode index {mode} out of range for {n_modes} modes")]
    ModeOutOfRange { mode: usize, n_modes: usize },

    #[error("mode index {0} listed more than once")]
    DuplicateMode(usize),

    /// Two states (or a state and an operator) live in different sectors.
    #[error("basis mismatch: ({0} modes, {1} photons) vs ({2} modes, {3} photons)")]
    BasisMismatch(usize, usize, usize, usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("photon number mismatch: {input} photons in, {output} photons out")]
    PhotonNumberMismatch { input: usize, output: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not unitary (max |SS^dag - I| = {0:e})")]
    NotUnitary(f64),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("logical mode coefficients are not unit norm (norm {0})")]
    InvalidLogicalMode(f64),

    #[error("cannot postselect {required} photons from a {available}-photon sector")]
    ImpossiblePattern { required: usize, available: usize },

    #[error("invalid postselection pattern: {0}")]
    InvalidPattern(String),

    #[error("occupation {0} lies outside the gate's computational basis")]
    OutsideGateSupport(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("circuit does not implement {gate}: deviation {deviation:e} exceeds tolerance {tol:e}")]
    GateNotImplemented { gate: String, deviation: f64, tol: f64 },

    #[error("expected {expected} parameters, found {found}")]
    ParameterLength { expected: usize, found: usize },

    #[error("{photons} single photons need at least as many modes, got {modes}")]
    TooManyPhotons { photons: usize, modes: usize },

    #[error("target expectation must be positive, got {0}")]
    NonPositiveExpectation(f64),

    /// A valid circuit beat a proven upper bound. This can only mean a simulator defect.
    #[error("{gate} circuit reports success probability {probability} above the proven bound {bound}")]
    BoundViolation { gate: String, probability: f64, bound: f64 },

    #[error("construction not found: {0}")]
    ConstructionNotFound(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
