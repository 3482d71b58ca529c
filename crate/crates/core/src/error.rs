use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("elements belong to different triple systems")]
    DomainMismatch,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("invalid triple system: {0}")]
    InvalidDescriptor(String),
    #[error("coordinate shape does not match the triple system: {0}")]
    InvalidShape(String),
    #[error("element is not a tripotent (residual {0:e})")]
    NotATripotent(f64),
    #[error("tripotents {0} and {1} are not orthogonal")]
    NotOrthogonal(usize, usize),
    #[error("vector is not in the Peirce 2-space (residual {0:e})")]
    NotInV2(f64),
    #[error("Peirce index ({0}, {1}) out of range")]
    IndexOutOfRange(usize, usize),
    #[error("spectral value {0} outside the domain of validity of the function")]
    DomainOfValidity(f64),
    #[error("point outside the domain (spectral norm {0})")]
    OutsideDomain(f64),
    #[error("operator is not positive definite (min eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),
    #[error("finite-difference step leaves the domain of the map")]
    StepLeavesDomain,
    #[error("sampler exhausted after {0} rejections")]
    SamplingExhausted(usize),
    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
