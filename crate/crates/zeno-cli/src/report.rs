//! Builders behind `zeno cfi` and `zeno spq`: argument resolution into
//! probe/noise/encoding values and FisherReport assembly.

use serde::Serialize;
use std::f64::consts::FRAC_PI_2;
use std::str::FromStr;
use zeno_core::error::{Error, Result};
use zeno_core::fisher::{
    cfi_approx, cfi_general, cfi_optimal, cfi_uncorrelated, cfi_uncorrelated_phase, optimal_time,
    qfi, EncodingParams, FisherReport, ReportMeta,
};
use zeno_core::probe::{NoiseModel, PurityVector};
use zeno_core::spq::{spq_cfi_averaged, spq_cfi_exact, spq_probabilities, ReadoutGuess, SpqCfi};

/// `--p` accepts an explicit comma list, `uniform:<x>` or `tilted` (the
/// latter two need `--n`).
pub fn parse_purity_spec(spec: &str, n: Option<usize>) -> Result<PurityVector> {
    if spec == "tilted" {
        let n = n.ok_or(Error::InvalidParameter {
            name: "n",
            value: f64::NAN,
            constraint: "required with --p tilted",
        })?;
        return PurityVector::tilted(n);
    }
    if let Some(x) = spec.strip_prefix("uniform:") {
        let p: f64 = x.parse().map_err(|_| Error::InvalidParameter {
            name: "p",
            value: f64::NAN,
            constraint: "a number after uniform:",
        })?;
        let n = n.ok_or(Error::InvalidParameter {
            name: "n",
            value: f64::NAN,
            constraint: "required with --p uniform:<x>",
        })?;
        return PurityVector::uniform(p, n);
    }
    let entries: std::result::Result<Vec<f64>, _> =
        spec.split(',').map(str::trim).map(f64::from_str).collect();
    let entries = entries.map_err(|_| Error::InvalidParameter {
        name: "p",
        value: f64::NAN,
        constraint: "a comma-separated list of numbers, uniform:<x>, or tilted",
    })?;
    let p = PurityVector::new(entries)?;
    if let Some(n) = n {
        if n != p.num_rpqs() {
            return Err(Error::InvalidParameter {
                name: "n",
                value: n as f64,
                constraint: "consistent with the explicit --p list",
            });
        }
    }
    Ok(p)
}

/// `--omega-t` accepts a real or the literal `pi/2` (kept exact so the
/// optimal path is selected without decimal-π loss).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseSpec {
    HalfPi,
    Value(f64),
}

impl PhaseSpec {
    pub fn parse(s: &str) -> Result<Self> {
        if s == "pi/2" {
            return Ok(PhaseSpec::HalfPi);
        }
        s.parse::<f64>()
            .map(PhaseSpec::Value)
            .map_err(|_| Error::InvalidParameter {
                name: "omega_t",
                value: f64::NAN,
                constraint: "a number or the literal pi/2",
            })
    }

    pub fn radians(&self) -> f64 {
        match self {
            PhaseSpec::HalfPi => FRAC_PI_2,
            PhaseSpec::Value(v) => *v,
        }
    }

    pub fn is_half_pi(&self) -> bool {
        match self {
            PhaseSpec::HalfPi => true,
            PhaseSpec::Value(v) => (*v - FRAC_PI_2).abs() < 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfiMode {
    Optimal,
    General,
    Uncorrelated,
    Approx,
    Spq,
}

impl FromStr for CfiMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "optimal" => Ok(CfiMode::Optimal),
            "general" => Ok(CfiMode::General),
            "uncorrelated" => Ok(CfiMode::Uncorrelated),
            "approx" => Ok(CfiMode::Approx),
            "spq" => Ok(CfiMode::Spq),
            _ => Err(Error::InvalidParameter {
                name: "mode",
                value: f64::NAN,
                constraint: "one of optimal|general|uncorrelated|approx|spq",
            }),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CfiRequest {
    pub p: PurityVector,
    pub mode: CfiMode,
    pub noise: NoiseModel,
    /// None means `--t opt`.
    pub t: Option<f64>,
    pub omega_t: PhaseSpec,
    pub total_time: Option<f64>,
    pub theta: Option<f64>,
    pub discard_rpq: bool,
    pub phase_convention: bool,
}

impl CfiRequest {
    fn resolve_time(&self, p: &PurityVector) -> Result<f64> {
        match self.t {
            Some(t) => Ok(t),
            None => match self.mode {
                CfiMode::Uncorrelated => optimal_time(0, &self.noise),
                _ => optimal_time(p.num_rpqs(), &self.noise),
            },
        }
    }

    /// Resolve every argument and compute the report.
    pub fn run(&self) -> Result<FisherReport> {
        let mut p = self.p.clone();
        if self.discard_rpq && p.num_rpqs() % 2 == 1 {
            p = p.without_last_rpq()?;
        }
        let t = self.resolve_time(&p)?;
        let omega_t = self.omega_t.radians();
        let mut warnings = Vec::new();

        let (per_run_cfi, per_run_qfi) = match self.mode {
            CfiMode::Optimal => {
                if !self.omega_t.is_half_pi() {
                    return Err(Error::InvalidParameter {
                        name: "omega_t",
                        value: omega_t,
                        constraint: "pi/2 in optimal mode (use --mode general otherwise)",
                    });
                }
                (cfi_optimal(&p, t, &self.noise)?, qfi(&p, t, &self.noise)?)
            }
            CfiMode::General => {
                // Exact pi/2 phases take the simplified optimal path (the
                // pi/2 token exists to avoid decimal-pi loss).
                let value = if self.omega_t.is_half_pi() && p.num_rpqs().is_multiple_of(2) {
                    cfi_optimal(&p, t, &self.noise)?
                } else {
                    let enc = EncodingParams::new(t, omega_t)?;
                    cfi_general(&p, &enc, &self.noise)?
                };
                (value, qfi(&p, t, &self.noise)?)
            }
            CfiMode::Uncorrelated => {
                // The product-probe readout saturates its own QFI.
                let value = if self.phase_convention {
                    cfi_uncorrelated_phase(&p, t, &self.noise)?
                } else {
                    cfi_uncorrelated(&p, t, &self.noise)?
                };
                (value, value)
            }
            CfiMode::Approx => {
                // Approximates the common CFI = QFI value.
                let value = cfi_approx(&p, t, &self.noise)?;
                (value, value)
            }
            CfiMode::Spq => {
                let theta = self.theta.ok_or(Error::InvalidParameter {
                    name: "theta",
                    value: f64::NAN,
                    constraint: "required in spq mode",
                })?;
                let guess = ReadoutGuess::new(theta);
                let enc = EncodingParams::new(t, omega_t)?;
                let out = spq_cfi_exact(&p, &enc, &self.noise, &guess);
                if !out.expansion_valid {
                    warnings.push(
                        "guess mismatch outside the small-delta expansion window; \
                         the spq CFI value is unreliable"
                            .to_string(),
                    );
                }
                (out.value, qfi(&p, t, &self.noise)?)
            }
        };

        let total_cfi = match self.total_time {
            Some(total) => {
                if total < t {
                    return Err(Error::TotalTimeTooShort {
                        total_time: total,
                        t,
                    });
                }
                Some(total / t * per_run_cfi)
            }
            None => None,
        };

        let report = FisherReport {
            per_run_cfi,
            per_run_qfi,
            total_cfi,
            meta: ReportMeta {
                n: p.num_rpqs(),
                g: self.noise.g(),
                alpha: self.noise.alpha(),
                t,
                omega_t,
                p_mean_square: p.mean_square(),
            },
            warnings,
        };
        if self.mode == CfiMode::Spq && !report.warnings.is_empty() {
            // Outside the expansion window the value may exceed the probe
            // QFI; the warning already flags it, so skip the hard check.
            Ok(report)
        } else {
            report.validated()
        }
    }
}

/// Output record of `zeno spq`.
#[derive(Debug, Serialize)]
pub struct SpqRecord {
    pub q_plus: f64,
    pub q_minus: f64,
    pub delta: f64,
    pub cfi_exact: f64,
    pub cfi_averaged: f64,
    pub expansion_valid: bool,
}

pub fn spq_record(
    p: &PurityVector,
    enc: &EncodingParams,
    noise: &NoiseModel,
    theta: f64,
) -> SpqRecord {
    let guess = ReadoutGuess::new(theta);
    let (q_plus, q_minus) = spq_probabilities(p, enc, noise, &guess);
    let SpqCfi {
        value: cfi_exact,
        expansion_valid,
    } = spq_cfi_exact(p, enc, noise, &guess);
    let averaged = spq_cfi_averaged(p, enc, noise, &guess);
    SpqRecord {
        q_plus,
        q_minus,
        delta: guess.delta(enc.omega_t),
        cfi_exact,
        cfi_averaged: averaged.value,
        expansion_valid,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn purity_spec_variants() {
        assert_eq!(
            parse_purity_spec("1,1,1", None).unwrap().entries(),
            &[1.0, 1.0, 1.0]
        );
        assert_eq!(
            parse_purity_spec("uniform:0.5", Some(3)).unwrap().entries(),
            &[0.5; 4]
        );
        assert_eq!(
            parse_purity_spec("tilted", Some(2)).unwrap().entries(),
            &[1.0, 0.0, 0.0]
        );
        assert!(parse_purity_spec("tilted", None).is_err());
        assert!(parse_purity_spec("1,2,oops", None).is_err());
        assert!(parse_purity_spec("1,1,1", Some(5)).is_err());
    }

    #[test]
    fn phase_spec_half_pi_token() {
        assert!(PhaseSpec::parse("pi/2").unwrap().is_half_pi());
        assert!(!PhaseSpec::parse("1.0").unwrap().is_half_pi());
        assert!(PhaseSpec::parse("half").is_err());
    }

    #[test]
    fn heisenberg_through_the_request_path() {
        let req = CfiRequest {
            p: parse_purity_spec("1,1,1", None).unwrap(),
            mode: CfiMode::Optimal,
            noise: NoiseModel::noiseless(),
            t: Some(1.0),
            omega_t: PhaseSpec::HalfPi,
            total_time: None,
            theta: None,
            discard_rpq: false,
            phase_convention: false,
        };
        let report = req.run().unwrap();
        assert!((report.per_run_cfi - 9.0).abs() < 1e-12 * 9.0);
        assert!((report.per_run_qfi - 9.0).abs() < 1e-12 * 9.0);
    }

    #[test]
    fn tilted_and_uniform_zero_examples() {
        let req = CfiRequest {
            p: parse_purity_spec("tilted", Some(2)).unwrap(),
            mode: CfiMode::Optimal,
            noise: NoiseModel::noiseless(),
            t: Some(1.0),
            omega_t: PhaseSpec::HalfPi,
            total_time: None,
            theta: None,
            discard_rpq: false,
            phase_convention: false,
        };
        assert!((req.run().unwrap().per_run_cfi - 3.0).abs() < 1e-12);

        let req = CfiRequest {
            p: parse_purity_spec("uniform:0", Some(4)).unwrap(),
            mode: CfiMode::Optimal,
            noise: NoiseModel::noiseless(),
            t: Some(1.0),
            omega_t: PhaseSpec::HalfPi,
            total_time: None,
            theta: None,
            discard_rpq: false,
            phase_convention: false,
        };
        assert_eq!(req.run().unwrap().per_run_cfi, 0.0);
    }

    #[test]
    fn discard_rpq_handles_odd_registers() {
        let base = CfiRequest {
            p: parse_purity_spec("1,1,1,1", None).unwrap(), // n = 3
            mode: CfiMode::Optimal,
            noise: NoiseModel::noiseless(),
            t: Some(1.0),
            omega_t: PhaseSpec::HalfPi,
            total_time: None,
            theta: None,
            discard_rpq: false,
            phase_convention: false,
        };
        assert!(base.run().is_err());
        let fixed = CfiRequest {
            discard_rpq: true,
            ..base
        };
        let report = fixed.run().unwrap();
        assert_eq!(report.meta.n, 2);
        assert!((report.per_run_cfi - 9.0).abs() < 1e-12 * 9.0);
    }

    #[test]
    fn t_opt_resolves_by_mode() {
        let noise = NoiseModel::new(0.5, 1.0).unwrap();
        let req = CfiRequest {
            p: parse_purity_spec("uniform:1", Some(2)).unwrap(),
            mode: CfiMode::Uncorrelated,
            noise,
            t: None,
            omega_t: PhaseSpec::HalfPi,
            total_time: None,
            theta: None,
            discard_rpq: false,
            phase_convention: false,
        };
        // t_parallel = (2 * 1 * 0.5)^-1 = 1.
        assert!((req.run().unwrap().meta.t - 1.0).abs() < 1e-15);
    }

    #[test]
    fn total_time_produces_total_cfi() {
        let req = CfiRequest {
            p: parse_purity_spec("1,1,1", None).unwrap(),
            mode: CfiMode::Optimal,
            noise: NoiseModel::noiseless(),
            t: Some(0.5),
            omega_t: PhaseSpec::HalfPi,
            total_time: Some(5.0),
            theta: None,
            discard_rpq: false,
            phase_convention: false,
        };
        let report = req.run().unwrap();
        let per_run = report.per_run_cfi;
        assert!((report.total_cfi.unwrap() - 10.0 * per_run).abs() < 1e-9);
    }
}
