use thiserror::Error;

use crate::anisotropy::PsiClassification;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid samples: {0}")]
    Samples(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate ellipse with semi-axes ({a1}, {a2})")]
    DegenerateShape { a1: f64, a2: f64 },

    #[error("point lies {distance:.3e} from the ellipse boundary")]
    NearBoundary { distance: f64 },

    #[error("outside the convexity range: angular profile has minimum {} at {:.6} rad", .0.min_value, .0.argmin_angle)]
    OutsideConvexity(PsiClassification),

    #[error("particles {first} and {second} coincide")]
    CoincidentParticles { first: usize, second: usize },

    #[error("solver did not converge (best residual {best_residual:.3e})")]
    NonConvergence { best_residual: f64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
