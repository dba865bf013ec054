use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain of a function (NaN, non-positive, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Argument sits on a pole of Gamma.
    #[error("pole at x = {0}")]
    Pole(f64),
    /// A caller-side precondition was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A numerical approximation failed its own accuracy check.
    #[error("accuracy error: {0}")]
    Accuracy(String),
    /// A computed quantity contradicts a structural guarantee (e.g. positivity).
    #[error("numerical consistency error: {0}")]
    Consistency(String),
    /// Closed form requested outside its region of finiteness.
    #[error("divergent: {0}")]
    Divergence(String),
    /// A sampled matrix failed its structure check.
    #[error("construction error: {0}")]
    Construction(String),
    /// Eigenangles could not be matched to the group structure.
    #[error("eigenangle extraction error: {0}")]
    Extraction(String),
}

impl Error {
    /// True for failures of a numerical approximation, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Accuracy(_) | Error::Consistency(_) | Error::Construction(_) | Error::Extraction(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
