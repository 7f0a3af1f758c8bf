use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("discriminant interpolation is ill-conditioned (relative residual {residual:.3e})")]
    InterpolationIllConditioned { residual: f64 },

    #[error("polynomial root finding did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("the discriminant vanishes identically: eigenvalues are degenerate for every z")]
    DiscriminantIdenticallyZero,

    #[error("probe circle about {center} is contaminated by another degeneracy at {other}")]
    ProbeCircleContaminated { center: Complex64, other: Complex64 },

    #[error("base points differ: {left} vs {right}")]
    BasePointMismatch { left: Complex64, right: Complex64 },

    #[error("path crosses the cut tangentially near {at}")]
    TangentialCrossing { at: Complex64 },

    #[error("path touches the cut anchor at {at}")]
    TouchesCutAnchor { at: Complex64 },

    #[error("point {at} does not lie on the cut interior")]
    NotOnCut { at: Complex64 },

    #[error("step underflow near z = {z}: bisection depth exhausted, path too close to a degeneracy")]
    StepUnderflow { z: Complex64 },

    #[error("path passes within {distance:.3e} of the degeneracy at {degeneracy}")]
    ClearanceViolated { degeneracy: Complex64, distance: f64 },

    #[error("labels do not match the spectrum (deviation {deviation:.3e})")]
    MultisetMismatch { deviation: f64 },

    #[error("permutation sizes differ: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("punctures too close for clearance {clearance}: {detail}")]
    PuncturesTooClose { clearance: f64, detail: String },

    #[error("sorting tie between eigenvalues {a} and {b}")]
    UnresolvableTie { a: Complex64, b: Complex64 },

    #[error("generator {generator}: conjugation predicts {predicted} but re-tracking gives {tracked}")]
    ConjugationMismatch { generator: usize, predicted: String, tracked: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by malformed user input rather than by a
    /// failed computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::Json(_)
                | Error::Io(_)
                | Error::BasePointMismatch { .. }
                | Error::SizeMismatch { .. }
        )
    }
}
