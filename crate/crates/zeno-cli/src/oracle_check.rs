//! Seeded oracle validation: random protocol configurations compared
//! between the closed forms and the density-matrix simulator.

use crate::manifest::RunManifest;
use zeno_core::error::{Error, Result};
use zeno_core::fisher::{cfi_general, qfi, EncodingParams};
use zeno_core::oracle::{oracle_cfi, oracle_qfi, EIG_QUBIT_CAP, SIM_QUBIT_CAP};
use zeno_core::probe::{NoiseModel, PurityVector};
use zeno_core::rng::SplitMix64;

pub const CFI_TOLERANCE: f64 = 1e-6;
pub const QFI_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct OracleCheckConfig {
    pub samples: usize,
    pub max_qubits: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub index: usize,
    pub quantity: &'static str,
    pub closed: f64,
    pub oracle: f64,
    pub rel: f64,
    pub manifest: RunManifest,
}

#[derive(Debug, Clone)]
pub struct OracleCheckReport {
    pub samples: usize,
    pub max_rel_cfi: f64,
    pub max_rel_qfi: f64,
    pub violations: Vec<Violation>,
}

impl OracleCheckReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn config_manifest(
    cfg: &OracleCheckConfig,
    index: usize,
    p: &PurityVector,
    t: f64,
    omega_t: f64,
    g: f64,
    alpha: f64,
) -> RunManifest {
    let mut m = RunManifest::new("oracle-check sample");
    m.set("seed", cfg.seed);
    m.set("index", index as u64);
    m.set(
        "p",
        p.entries()
            .iter()
            .map(|x| format!("{x}"))
            .collect::<Vec<_>>()
            .join(","),
    );
    m.set("t", t);
    m.set("omega_t", omega_t);
    m.set("g", g);
    m.set("alpha", alpha);
    m
}

/// Run the check. Configurations draw n+1 ∈ [2, max_qubits] qubits with
/// uniform purities; the spectral-QFI comparison is skipped above its own
/// eigensolver cap.
pub fn run(cfg: &OracleCheckConfig) -> Result<OracleCheckReport> {
    if cfg.max_qubits > SIM_QUBIT_CAP {
        return Err(Error::SimulatorCapExceeded {
            qubits: cfg.max_qubits,
            cap: SIM_QUBIT_CAP,
        });
    }
    if cfg.max_qubits < 2 {
        return Err(Error::TooFewQubits(cfg.max_qubits));
    }
    if cfg.samples == 0 {
        return Err(Error::NoSamples);
    }

    let mut report = OracleCheckReport {
        samples: cfg.samples,
        max_rel_cfi: 0.0,
        max_rel_qfi: 0.0,
        violations: Vec::new(),
    };

    for index in 0..cfg.samples {
        let mut rng = SplitMix64::for_sample(cfg.seed, index as u64);
        let n = rng.uniform_usize(1, cfg.max_qubits - 1);
        let p = PurityVector::new((0..=n).map(|_| rng.next_f64()).collect())?;
        let t = rng.uniform(0.5, 1.5);
        let omega_t = rng.uniform(0.3, 2.8);
        let g = rng.uniform(0.0, 0.3);
        let alpha = rng.uniform(0.5, 2.5);
        let noise = NoiseModel::new(g, alpha)?;
        let enc = EncodingParams::new(t, omega_t)?;

        let closed_cfi = cfi_general(&p, &enc, &noise)?;
        let sim_cfi = oracle_cfi(&p, &enc, &noise)?;
        let rel_cfi = (closed_cfi - sim_cfi).abs() / closed_cfi.abs().max(1e-9);
        report.max_rel_cfi = report.max_rel_cfi.max(rel_cfi);
        if rel_cfi > CFI_TOLERANCE {
            report.violations.push(Violation {
                index,
                quantity: "cfi",
                closed: closed_cfi,
                oracle: sim_cfi,
                rel: rel_cfi,
                manifest: config_manifest(cfg, index, &p, t, omega_t, g, alpha),
            });
        }

        if n < EIG_QUBIT_CAP {
            let closed_qfi = qfi(&p, t, &noise)?;
            let sim_qfi = oracle_qfi(&p, t, &noise)?;
            let rel_qfi = (closed_qfi - sim_qfi).abs() / closed_qfi.abs().max(1e-9);
            report.max_rel_qfi = report.max_rel_qfi.max(rel_qfi);
            if rel_qfi > QFI_TOLERANCE {
                report.violations.push(Violation {
                    index,
                    quantity: "qfi",
                    closed: closed_qfi,
                    oracle: sim_qfi,
                    rel: rel_qfi,
                    manifest: config_manifest(cfg, index, &p, t, omega_t, g, alpha),
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        let report = run(&OracleCheckConfig {
            samples: 10,
            max_qubits: 4,
            seed: 11,
        })
        .unwrap();
        assert!(report.passed(), "violations: {:?}", report.violations);
        assert!(report.max_rel_cfi < CFI_TOLERANCE);
        assert!(report.max_rel_qfi < QFI_TOLERANCE);
    }

    #[test]
    fn cap_is_enforced() {
        let err = run(&OracleCheckConfig {
            samples: 1,
            max_qubits: 13,
            seed: 0,
        })
        .unwrap_err();
        assert!(matches!(err, Error::SimulatorCapExceeded { .. }));
    }

    #[test]
    fn rerun_is_identical() {
        let cfg = OracleCheckConfig {
            samples: 5,
            max_qubits: 4,
            seed: 3,
        };
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a.max_rel_cfi.to_bits(), b.max_rel_cfi.to_bits());
        assert_eq!(a.max_rel_qfi.to_bits(), b.max_rel_qfi.to_bits());
    }
}
