use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input in {0}")]
    NonFinite(&'static str),

    #[error("north-pole singularity: z = {z} too close to 1")]
    NorthPole { z: f64 },

    #[error("chordal radius must lie in (0, 1), got {0}")]
    RadiusOutOfRange(f64),

    #[error("spherical ball touches the north pole (boundary polar angle {theta})")]
    BallTouchesNorthPole { theta: f64 },

    #[error("nominal point too close to the origin (|nominal| = {r}); use the ball route")]
    DegenerateNominal { r: f64 },

    #[error("covariance matrix is not symmetric positive definite")]
    NotSpd,

    #[error("singular interconnection: |1 - C P| = {modulus}")]
    SingularInterconnection { modulus: f64 },

    #[error("{0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quadrature did not converge in {context}: best {best}, error bound {err_bound}")]
    Convergence {
        best: f64,
        err_bound: f64,
        context: String,
    },

    #[error("CDF curve not monotone at d = {threshold}: drop of {drop}")]
    Monotonicity { threshold: f64, drop: f64 },

    #[error("{failed} of {total} identification trials failed to converge (limit 5%)")]
    TooManyFailedTrials { failed: usize, total: usize },

    #[error("eigenvalue computation failed")]
    EigenFailure,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for config/usage errors, 3 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
