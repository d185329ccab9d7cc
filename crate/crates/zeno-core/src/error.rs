//! Error type shared by every module in the crate.

use thiserror::Error;

/// Coarse category used by callers (the CLI maps these to exit codes).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Invalid input: out-of-range value, parity violation, missing field.
    Domain,
    /// A configured enumeration or simulator cap was exceeded.
    Resource,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("purity p[{index}] = {value} is outside [0, 1]")]
    PurityOutOfRange { index: usize, value: f64 },

    #[error("purity {value} is outside [0, 1]")]
    PurityScalarOutOfRange { value: f64 },

    #[error("a probe needs at least one SPQ and one RPQ; got {0} qubit(s)")]
    TooFewQubits(usize),

    #[error("bitstring {k:#b} has bits beyond the {n} register qubits")]
    BitstringOutOfRange { k: u64, n: usize },

    #[error("dephasing rate g = {0} must be >= 0")]
    NegativeRate(f64),

    #[error("inhomogeneity exponent alpha = {0} must be > 0")]
    NonPositiveAlpha(f64),

    #[error("parameter {name} = {value} must be {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error(
        "odd register count n = {n}: the omega*t = pi/2 protocol needs even n; \
         discard one RPQ first (CLI: --discard-rpq)"
    )]
    OddRegisterCount { n: usize },

    #[error("g = 0 gives no finite optimal time (the objective grows without bound)")]
    NoFiniteOptimum,

    #[error("total_time is required to compute a total Fisher information")]
    MissingTotalTime,

    #[error("total_time = {total_time} must be >= the per-run time t = {t}")]
    TotalTimeTooShort { total_time: f64, t: f64 },

    #[error(
        "n = {n} register qubits exceeds the enumeration cap {cap}; \
         use the uniform/tilted closed forms for larger probes"
    )]
    EnumerationCapExceeded { n: usize, cap: usize },

    #[error("{qubits} qubits exceeds the dense simulator cap of {cap}")]
    SimulatorCapExceeded { qubits: usize, cap: usize },

    #[error("samples must be >= 1")]
    NoSamples,

    #[error("n range [{n_min}, {n_max}] is empty or outside the enumeration cap")]
    BadSampleRange { n_min: usize, n_max: usize },

    #[error("Fisher report invariant violated: {0}")]
    ReportInvariant(String),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::EnumerationCapExceeded { .. } | Error::SimulatorCapExceeded { .. } => {
                ErrorCategory::Resource
            }
            _ => ErrorCategory::Domain,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
