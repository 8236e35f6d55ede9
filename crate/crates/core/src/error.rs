use thiserror::Error;

use crate::equilibria::Family;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}` = {value}: {reason}")]
    Domain {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("field evaluated inside the guard radius of {primary} at ({x}, {y})")]
    Singularity { primary: Primary, x: f64, y: f64 },

    #[error("{family}: Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        family: Family,
        iterations: usize,
        residual: f64,
    },

    #[error("{family}: iteration collapsed onto {primary}")]
    PrimaryCollision { family: Family, primary: Primary },

    #[error("{family}: iteration converged to a point of family {found} at ({x}, {y})")]
    FamilyMismatch {
        family: Family,
        found: Family,
        x: f64,
        y: f64,
    },

    #[error("trajectory entered the guard radius of {primary} at t = {t}")]
    Collision {
        primary: Primary,
        t: f64,
        /// Last accepted state `(x, y, vx, vy)`.
        state: [f64; 4],
    },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("{0}")]
    Invalid(String),

    #[error("preset line {line}: {message}")]
    Preset { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Primary {
    /// Radiating primary at (-mu, 0).
    Larger,
    /// Oblate primary at (1 - mu, 0).
    Smaller,
    /// Centre of a belt with zero width parameter.
    BeltCentre,
}

impl std::fmt::Display for Primary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Primary::Larger => f.write_str("the radiating primary"),
            Primary::Smaller => f.write_str("the oblate primary"),
            Primary::BeltCentre => f.write_str("the belt centre"),
        }
    }
}
