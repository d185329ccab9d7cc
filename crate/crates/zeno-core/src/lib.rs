//! Frequency estimation with noisy GHZ-diagonal probes under
//! time-inhomogeneous dephasing.
//!
//! A probe of n+1 qubits with Bloch-vector lengths **p** = (p₀,…,p_n) is
//! prepared into a GHZ-diagonal state by a CNOT/Hadamard/CNOT circuit, a
//! frequency ω is encoded for a time t while the qubits dephase with decay
//! e^(−g t^α), and all qubits are read out. This crate provides
//!
//! - [`probe`]: the probe parameterization and the eigenvalue spectrum of
//!   the prepared state;
//! - [`fisher`]: closed-form classical and quantum Fisher information —
//!   the general readout, the time-optimised ωt = π/2 value, the
//!   uncorrelated baseline, the uniform/tilted protocols, the ⟨**p**²⟩
//!   approximation, time optimization and the (n+1)^(1−1/α) advantage;
//! - [`oracle`]: a dense density-matrix simulator of the whole protocol,
//!   used as the independent check on every closed form;
//! - [`spq`]: the single-qubit readout (controlled rotation by a guess
//!   angle, RPQs discarded);
//! - [`experiments`]: seeded, reproducible Monte Carlo studies of the
//!   approximation quality, monotonicity, symmetry, crossover, scaling,
//!   and the majorisation negative result.
//!
//! All operations are pure functions; values are immutable after
//! construction and safe to share across threads.

pub mod error;
pub mod experiments;
pub mod fisher;
pub mod kahan;
pub mod oracle;
pub mod probe;
pub mod rng;
pub mod spq;
pub mod stats;

pub use error::{Error, ErrorCategory, Result};
pub use fisher::{EncodingParams, FisherReport, ReportMeta};
pub use probe::{GhzSpectrum, NoiseModel, PurityVector, SpectralWeights};
