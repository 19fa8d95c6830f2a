use thiserror::Error;

use crate::ac::netlist::Diagnostic;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("frequency must be positive, got {0} Hz")]
    NonPositiveFrequency(f64),

    #[error("no physical solution: {0}")]
    NoPhysicalSolution(String),

    #[error("no resonance found between {lo:.6e} and {hi:.6e} Hz")]
    NoResonance { lo: f64, hi: f64 },

    #[error("unsupported topology: {0}")]
    UnsupportedTopology(String),

    #[error("singular MNA system at {freq:.9e} Hz (pivot {pivot:.3e})")]
    Singular { freq: f64, pivot: f64 },

    #[error("netlist has {} diagnostic(s); first: {}", .0.len(), .0.first().map(|d| d.to_string()).unwrap_or_default())]
    Netlist(Vec<Diagnostic>),

    #[error("document line {line}: {msg}")]
    Document { line: usize, msg: String },

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("design failed: {0}")]
    Design(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}

pub(crate) fn require_positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and > 0, got {v}")))
    }
}

pub(crate) fn require_freq(f: f64) -> Result<()> {
    if f.is_finite() && f > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveFrequency(f))
    }
}
