use thiserror::Error;

/// Errors raised by the construction and evaluation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("could not place disc {disc} of annulus {annulus} after exhausting the retry policy")]
    ConstructionFailure { annulus: u32, disc: usize },

    #[error("evaluation at {z} lies within {distance:e} of the pole {pole}")]
    PoleEvaluation { z: String, pole: String, distance: f64 },

    #[error("random member generation failed: {0}")]
    GenerationFailure(String),

    #[error("residue oracle not applicable: pole {pole} is {distance:e} from the unit circle")]
    OracleInapplicable { pole: String, distance: f64 },

    #[error("contour precondition violated: {0}")]
    Precondition(String),

    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    #[error("serialization: {0}")]
    Serialization(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
