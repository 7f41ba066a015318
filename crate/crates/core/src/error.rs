use thiserror::Error;

/// Errors raised by the solver, the transform calculus and the analysis layer.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum AlrError {
    #[error("map evaluated at its singular point")]
    SingularPoint,
    #[error("point outside the domain: {0}")]
    Domain(String),
    #[error("degenerate Jacobian (|det| = {det:e})")]
    DegenerateJacobian { det: f64 },
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("medium is not doubly complementary: max deviation {deviation:e}")]
    NotDoublyComplementary { deviation: f64 },
    #[error("singular function evaluated at its pole t = 0")]
    Pole,
    #[error("order {0} exceeds the supported cap of 500")]
    OrderOverflow(u32),
    #[error("argument |t| = {0} outside the supported range")]
    ArgumentRange(f64),
    #[error("transmission system is singular (mode {n}); sign-changing media need delta > 0")]
    Resonance { n: u32 },
    #[error("mode sum did not converge by N = {n_max}: last relative tail {tail:e}")]
    TruncationFailure { n_max: u32, tail: f64 },
    #[error("medium has no negative annulus")]
    NoShell,
    #[error("zero shell energy: normalization undefined")]
    ZeroShellEnergy,
    #[error("range does not bracket a verdict change: {0}")]
    Bracket(String),
    #[error("inconclusive verdict at bracket end rho = {rho}; extend the delta grid")]
    Resolution { rho: f64 },
    #[error("source radius equals the critical radius {0}; boundary case excluded")]
    BoundaryCase(f64),
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),
    #[error("invalid source: {0}")]
    Source(String),
    #[error("ODE integration failed: {0}")]
    Integration(String),
}

pub type Result<T> = std::result::Result<T, AlrError>;
