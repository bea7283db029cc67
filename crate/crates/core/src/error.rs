use thiserror::Error;

/// Errors produced by the walking-engine library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The pendulum model is not defined for the requested height or vertical acceleration.
    #[error("pendulum model invalid: {0}")]
    Domain(String),

    /// A parameter set violates its invariants.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The multibody ZMP denominator vanished.
    #[error("singular configuration: total vertical force is zero")]
    SingularConfiguration,

    /// A matrix that must be inverted is singular.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Riccati iteration did not converge.
    #[error("Riccati iteration did not converge after {iterations} iterations (last step norm {last_step:e})")]
    NoConvergence { iterations: usize, last_step: f64 },

    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The closed-loop simulation produced non-finite values.
    #[error("simulation diverged at t = {time:.3} s")]
    Diverged { time: f64 },

    /// Configuration or scenario text could not be parsed.
    #[error("{0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
