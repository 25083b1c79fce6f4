//! Error types shared by the electrochemical solvers and the environment.

use thiserror::Error;

/// Which electrode an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Electrode {
    Negative,
    Positive,
}

impl std::fmt::Display for Electrode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Electrode::Negative => write!(f, "negative"),
            Electrode::Positive => write!(f, "positive"),
        }
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    /// An argument is outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A surface or shell concentration left [0, c_max].
    #[error("{electrode} electrode concentration left [0, c_max]")]
    Saturation { electrode: Electrode },

    /// Exchange current collapsed to zero (surface concentration at a bound).
    #[error("kinetics singularity on {electrode} electrode (i0 -> 0)")]
    Kinetics { electrode: Electrode },

    /// Newton iteration failed to converge after all retries.
    #[error("solver failed to converge ({context}); residual inf-norm {residual:.3e}")]
    Solver { residual: f64, context: String },

    /// A protocol phase exceeded its configured maximum duration.
    #[error("{phase} phase exceeded its configured maximum duration")]
    Timeout { phase: String },

    /// NaN or infinity appeared where a finite value was required.
    #[error("non-finite value in {0}")]
    NonFinite(String),

    /// Cumulative capacity fade reached 100 %.
    #[error("cell dead: cumulative capacity fade reached 100 %")]
    CellDead,
}
