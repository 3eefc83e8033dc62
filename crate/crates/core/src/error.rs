use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamsError {
    #[error("invalid model parameters: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExponentError {
    #[error("value is not a rational number: {0}")]
    NotRational(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("domain radius must be positive and finite, got {0}")]
    Radius(f64),
    #[error("need at least {min} cells, got {got}")]
    TooFewCells { min: usize, got: usize },
    #[error("dimension must be at least 1")]
    Dimension,
    #[error("field length {got} does not match grid size {expected}")]
    Length { expected: usize, got: usize },
    #[error("field contains non-finite values")]
    NonFinite,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("operator is not self-adjoint in the weighted inner product (residual {0:e})")]
    NotSelfAdjoint(f64),
    #[error("eigendecomposition failed: {0}")]
    Decomposition(String),
}

#[derive(Debug, Error)]
pub enum ContainerError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic bytes")]
    Magic,
    #[error("unsupported container version {0}")]
    Version(u16),
    #[error("unsupported precision tag {0}")]
    Precision(u8),
    #[error("container header does not match the target grid: {0}")]
    Mismatch(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroundStateError {
    #[error("iteration did not converge after {iterations} iterations (change {change:e}, residual {residual:e})")]
    NotConverged {
        iterations: usize,
        change: f64,
        residual: f64,
        multipliers: Vec<f64>,
    },
    #[error("iteration collapsed to the zero field after {iterations} iterations")]
    Collapsed { iterations: usize, multipliers: Vec<f64> },
    #[error("resolvent symbol vanishes on eigenvalue {0}")]
    SingularResolvent(f64),
    #[error("threshold quantities require a converged ground state")]
    Unconverged,
    #[error(transparent)]
    Params(#[from] ParamsError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("E[u] = {energy} < 0 with non-integer s_c = {sc}: fractional power of a negative number")]
    SignObstruction { energy: f64, sc: f64 },
    #[error("ground state is not converged")]
    NotConverged,
    #[error("radius {radius} outside the admissible range (limit {limit})")]
    Radius { radius: f64, limit: f64 },
    #[error("not enough samples: {0}")]
    TooFewSamples(String),
    #[error("pair is not admissible: {0}")]
    Inadmissible(String),
    #[error("field has {got} cells, expected {expected}")]
    GridMismatch { expected: usize, got: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PropagatorError {
    #[error("time step must be finite and nonzero, got {0}")]
    TimeStep(f64),
    #[error("final time must be finite and nonnegative, got {0}")]
    Horizon(f64),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SetupError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
