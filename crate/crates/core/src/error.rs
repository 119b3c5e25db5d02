use thiserror::Error;

/// Errors raised by the library. Variants split into validation failures
/// (bad input, violated preconditions) and numerical-contract failures
/// (a computed result broke an invariant it is supposed to satisfy).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("one-particle dimension must be in 2..={max}, got {got}")]
    InvalidDimension { got: i64, max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is zero; symmetricity and normalization are undefined")]
    ZeroTrace,

    #[error("density operator is not normalized (trace {trace})")]
    NotNormalized { trace: f64 },

    #[error("premise violated: state is not state-symmetric (||P rho - rho|| / ||rho|| = {residual:e})")]
    NotStateSymmetric { residual: f64 },

    #[error("premise violated: state is not operator-symmetric (||P rho P - rho|| / ||rho|| = {residual:e})")]
    NotOperatorSymmetric { residual: f64 },

    #[error(
        "premise violated: state is not perfectly asymmetric (Tr P rho / Tr rho = {symmetricity:e}); \
         use the extended-domain map apply_map_noncp for general inputs"
    )]
    NotPerfectlyAsymmetric { symmetricity: f64 },

    #[error("|m(t)| = {m} exceeds the admissible bound {bound}")]
    SymmetricityBound { m: f64, bound: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("schedule constraint violated: {0}")]
    ScheduleConstraint(String),

    #[error("Hamiltonian does not commute with the exchange operator (||[H,P]|| = {commutator:e})")]
    HamiltonianNotSymmetric { commutator: f64 },

    #[error("step size too large: dt * (||H|| + 4 gamma) = {stiffness} > 0.1; use a smaller dt")]
    StepTooLarge { stiffness: f64 },

    #[error("quadrature did not converge: estimate {estimate:e}, error estimate {error:e}")]
    QuadratureNotConverged { estimate: f64, error: f64 },

    #[error("numerical contract violated: {0}")]
    Contract(String),
}

impl Error {
    /// True for failures of a computed result, false for bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Contract(_) | Error::QuadratureNotConverged { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
