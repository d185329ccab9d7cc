//! Library side of the `zeno` binary: CSV/manifest persistence, study
//! dispatch, oracle validation, and the report builders. The binary in
//! `main.rs` is a thin argument layer over these, and the acceptance test
//! suite drives them in-process.

pub mod csvio;
pub mod manifest;
pub mod oracle_check;
pub mod report;
pub mod studyrun;

/// Stable exit-code contract: 0 success, 1 validation failure, 2 usage,
/// 3 resource cap, 4 I/O.
pub mod exit_codes {
    pub const OK: u8 = 0;
    pub const VALIDATION_FAILURE: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const RESOURCE_CAP: u8 = 3;
    pub const IO: u8 = 4;
}

/// Exit code for a core error per the contract above.
pub fn exit_code_for(err: &zeno_core::Error) -> u8 {
    match err.category() {
        zeno_core::ErrorCategory::Resource => exit_codes::RESOURCE_CAP,
        zeno_core::ErrorCategory::Domain => exit_codes::USAGE,
    }
}
