use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Numeric,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(
        "eigen-iteration did not converge for level {level}: residual {residual:.3e} after {iterations} iterations"
    )]
    EigenNonConvergence { level: usize, residual: f64, iterations: usize },

    #[error("quadrature did not converge on [{a}, {b}]: estimated error {error:.3e} after {intervals} intervals")]
    Quadrature { a: f64, b: f64, error: f64, intervals: usize },

    #[error("resonance unreachable: target {target:.6} meV, achievable range [{min:.6}, {max:.6}] meV")]
    ResonanceUnreachable { target: f64, min: f64, max: f64 },

    #[error("field {field} MV/m outside interpolation range [{lo}, {hi}] MV/m")]
    Extrapolation { field: f64, lo: f64, hi: f64 },

    #[error("division hazard in two-photon rate: {which} detuning is {detuning:.3e} meV; move the operating point")]
    DivisionHazard { which: &'static str, detuning: f64 },

    #[error("norm drift {drift:.3e} exceeds {limit:.1e} (step {dt:.3e} ns, {steps} steps); reduce dt_max")]
    NormDrift { drift: f64, limit: f64, dt: f64, steps: usize },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Config(_) => ErrorClass::Config,
            Error::Io { .. } => ErrorClass::Io,
            _ => ErrorClass::Numeric,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
