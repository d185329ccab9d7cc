//! Reproducible Monte Carlo studies: the approximation correlation, the
//! monotonicity scans, permutation symmetry (with the no-first-CNOT
//! counterexample), the uniform/tilted crossover, the advantage-scaling
//! fit, the majorisation negative result, and the single-qubit-readout
//! correlation.
//!
//! Determinism: sample i draws from a SplitMix64 stream seeded with
//! `cfg.seed ^ i`, rows are collected in index order, and summaries are
//! recomputed from the rows — so identical (seed, config) give identical
//! results regardless of how many threads run the samples.

use crate::error::{Error, Result};
use crate::fisher::{
    cfi_uncorrelated, fisher_weight_sum, optimal_time, qfi, uniform_fisher_weight_sum,
    EncodingParams,
};
use crate::oracle::oracle_cfi_without_first_cnots;
use crate::probe::{NoiseModel, PurityVector, ENUMERATION_CAP};
use crate::rng::SplitMix64;
use crate::spq::{spq_cfi_averaged, spq_cfi_exact, ReadoutGuess};
use crate::stats::{log_log_slope, ols, pearson};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

/// Guess mismatch used by the single-qubit-readout correlation study
/// (inside the expansion validity window for every n up to 11 at t = 1).
pub const SPQ_STUDY_DELTA: f64 = 0.05;

/// Sampling setup shared by the seeded studies.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub samples: usize,
    /// Inclusive RPQ-count range the per-sample n is drawn from.
    pub n_min: usize,
    pub n_max: usize,
    pub t: f64,
    pub g: f64,
    pub alpha: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            samples: 10_000,
            n_min: 1,
            n_max: 11,
            t: 1.0,
            g: 0.0,
            alpha: 1.0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::NoSamples);
        }
        if self.n_min < 1 || self.n_min > self.n_max || self.n_max > ENUMERATION_CAP {
            return Err(Error::BadSampleRange {
                n_min: self.n_min,
                n_max: self.n_max,
            });
        }
        NoiseModel::new(self.g, self.alpha)?;
        if self.t <= 0.0 || self.t.is_nan() {
            return Err(Error::InvalidParameter {
                name: "t",
                value: self.t,
                constraint: "> 0",
            });
        }
        Ok(())
    }

    fn noise(&self) -> NoiseModel {
        NoiseModel::new(self.g, self.alpha).expect("validated")
    }
}

/// Monotonicity perturbation mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MonotonicityMode {
    /// One random coordinate gets a positive bump.
    SingleCoordinate,
    /// Every coordinate gets an independent non-negative bump.
    FullVector,
}

/// Named summary statistics, in insertion order.
#[derive(Debug, Clone, Default, Serialize)]
pub struct StudySummary {
    entries: Vec<(String, f64)>,
}

impl StudySummary {
    pub fn push(&mut self, key: &str, value: f64) {
        self.entries.push((key.to_string(), value));
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    /// One-line `key=value` rendering for CLI output.
    pub fn render(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Rows plus summary of one study run. Every row is recomputable from its
/// logged inputs (the sample index recovers the per-sample stream).
#[derive(Debug, Clone, Serialize)]
pub struct StudyResult {
    pub study: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub summary: StudySummary,
}

impl StudyResult {
    fn new(study: &str, columns: &[&str]) -> Self {
        Self {
            study: study.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: StudySummary::default(),
        }
    }

    fn column(&self, name: &str) -> Vec<f64> {
        let idx = self
            .columns
            .iter()
            .position(|c| c == name)
            .unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[idx]).collect()
    }
}

fn sample_n(rng: &mut SplitMix64, cfg: &ExperimentConfig) -> usize {
    rng.uniform_usize(cfg.n_min, cfg.n_max)
}

pub(crate) fn sample_purity_vector(rng: &mut SplitMix64, n: usize) -> PurityVector {
    let entries: Vec<f64> = (0..=n).map(|_| rng.next_f64()).collect();
    PurityVector::new(entries).expect("uniform draws are in range")
}

fn parallel_rows<F>(samples: usize, row_fn: F) -> Vec<Vec<f64>>
where
    F: Fn(usize) -> Vec<f64> + Sync + Send,
{
    (0..samples).into_par_iter().map(row_fn).collect()
}

/// Approximation quality: Σ 𝒫_k (n+1−2m_k)² against ⟨**p**²⟩(n+1)² for
/// uniformly sampled probes. Summary: Pearson r and the least-squares
/// slope/intercept.
pub fn approx_correlation_study(cfg: &ExperimentConfig) -> Result<StudyResult> {
    cfg.validate()?;
    let mut result = StudyResult::new(
        "approx",
        &["index", "n", "p_mean_square", "approx", "exact_sum"],
    );
    result.rows = parallel_rows(cfg.samples, |i| {
        let mut rng = SplitMix64::for_sample(cfg.seed, i as u64);
        let n = sample_n(&mut rng, cfg);
        let p = sample_purity_vector(&mut rng, n);
        let msq = p.mean_square();
        let qubits = n as f64 + 1.0;
        let exact = fisher_weight_sum(&p).expect("n within cap");
        vec![i as f64, n as f64, msq, msq * qubits * qubits, exact]
    });
    let xs = result.column("approx");
    let ys = result.column("exact_sum");
    let (slope, intercept) = ols(&xs, &ys);
    result.summary.push("pearson", pearson(&xs, &ys));
    result.summary.push("slope", slope);
    result.summary.push("intercept", intercept);
    Ok(result)
}

/// Monotonicity scan: difference of the time-optimised CFI under a
/// positive purity perturbation. `diff` uses the parity-free QFI form so
/// odd register counts are sampled too.
pub fn monotonicity_study(cfg: &ExperimentConfig, mode: MonotonicityMode) -> Result<StudyResult> {
    cfg.validate()?;
    let noise = cfg.noise();
    let columns: &[&str] = match mode {
        MonotonicityMode::SingleCoordinate => &[
            "index",
            "n",
            "coordinate",
            "epsilon",
            "cfi_base",
            "cfi_perturbed",
            "diff",
        ],
        MonotonicityMode::FullVector => &[
            "index",
            "n",
            "eps_mean_square",
            "cfi_base",
            "cfi_perturbed",
            "diff",
        ],
    };
    let mut result = StudyResult::new("mono", columns);
    result.rows = parallel_rows(cfg.samples, |i| {
        let mut rng = SplitMix64::for_sample(cfg.seed, i as u64);
        let n = sample_n(&mut rng, cfg);
        let p = sample_purity_vector(&mut rng, n);
        let base = qfi(&p, cfg.t, &noise).expect("n within cap");
        match mode {
            MonotonicityMode::SingleCoordinate => {
                let j = rng.uniform_usize(0, n);
                let eps = rng.uniform(0.0, 1.0 - p.entries()[j]);
                let mut bumped = p.entries().to_vec();
                bumped[j] += eps;
                let perturbed = qfi(&PurityVector::new(bumped).unwrap(), cfg.t, &noise).unwrap();
                vec![
                    i as f64,
                    n as f64,
                    j as f64,
                    eps,
                    base,
                    perturbed,
                    perturbed - base,
                ]
            }
            MonotonicityMode::FullVector => {
                let mut bumped = p.entries().to_vec();
                let mut eps_sq = 0.0;
                for value in &mut bumped {
                    let eps = rng.uniform(0.0, 1.0 - *value);
                    eps_sq += eps * eps;
                    *value += eps;
                }
                let perturbed = qfi(&PurityVector::new(bumped).unwrap(), cfg.t, &noise).unwrap();
                vec![
                    i as f64,
                    n as f64,
                    eps_sq / (n as f64 + 1.0),
                    base,
                    perturbed,
                    perturbed - base,
                ]
            }
        }
    });
    let diffs = result.column("diff");
    let min = diffs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    result.summary.push("min_diff", min);
    result.summary.push("max_diff", max);
    Ok(result)
}

/// Permutation symmetry: CFI under random permutations of the full purity
/// vector (SPQ swaps
/// included), plus the 3-qubit no-first-CNOT counterexample evaluated with
/// the density-matrix oracle at p = (0.9, 0.2, 0.7).
pub fn symmetry_study(cfg: &ExperimentConfig) -> Result<StudyResult> {
    cfg.validate()?;
    let noise = cfg.noise();
    let mut result = StudyResult::new(
        "symmetry",
        &["index", "n", "cfi_base", "cfi_permuted", "rel_deviation"],
    );
    result.rows = parallel_rows(cfg.samples, |i| {
        let mut rng = SplitMix64::for_sample(cfg.seed, i as u64);
        let n = sample_n(&mut rng, cfg);
        let p = sample_purity_vector(&mut rng, n);
        let perm = rng.permutation(n + 1);
        let base = qfi(&p, cfg.t, &noise).expect("n within cap");
        let permuted = qfi(&p.permuted(&perm).unwrap(), cfg.t, &noise).unwrap();
        let rel = (base - permuted).abs() / base.abs().max(1e-300);
        vec![i as f64, n as f64, base, permuted, rel]
    });
    let devs = result.column("rel_deviation");
    let max_rel = devs.iter().copied().fold(0.0f64, f64::max);
    result.summary.push("max_rel_deviation", max_rel);

    // Counterexample: omit the first CNOT layer and swap SPQ with RPQ 1.
    let p = PurityVector::new(vec![0.9, 0.2, 0.7])?;
    let swapped = p.permuted(&[1, 0, 2])?;
    let enc = EncodingParams::new(cfg.t, FRAC_PI_2)?;
    let f_base = oracle_cfi_without_first_cnots(&p, &enc, &noise)?;
    let f_swapped = oracle_cfi_without_first_cnots(&swapped, &enc, &noise)?;
    let counter_dev = (f_base - f_swapped).abs() / f_base.abs().max(f_swapped.abs());
    result
        .summary
        .push("counterexample_rel_deviation", counter_dev);
    Ok(result)
}

/// Crossover scan: for each n, the purity where the exact uniform protocol
/// overtakes
/// the tilted one, located by bisection to 1e−6, against the predicted
/// 1/sqrt(n+1). Odd n uses the same parity-free weight sums.
pub fn crossover_study(n_min: usize, n_max: usize) -> Result<StudyResult> {
    if n_min < 2 || n_min > n_max || n_max > ENUMERATION_CAP {
        return Err(Error::BadSampleRange { n_min, n_max });
    }
    let mut result = StudyResult::new("crossover", &["n", "p_star", "predicted", "deviation"]);
    for n in n_min..=n_max {
        let tilted = n as f64 + 1.0;
        let excess = |p: f64| uniform_fisher_weight_sum(p, n).unwrap() - tilted;
        // Uniform loses at p = 0 and wins at p = 1; the sum is monotone in p.
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        while hi - lo > 1e-6 {
            let mid = 0.5 * (lo + hi);
            if excess(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let p_star = 0.5 * (lo + hi);
        let predicted = 1.0 / (n as f64 + 1.0).sqrt();
        result
            .rows
            .push(vec![n as f64, p_star, predicted, p_star - predicted]);
    }
    let devs = result.column("deviation");
    let max_abs = devs.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
    result.summary.push("max_abs_deviation", max_abs);
    Ok(result)
}

/// Advantage scaling: total-CFI ratio F♯/F∥ at the optimal times across
/// probe sizes
/// for a pure uniform probe, with the fitted log-log slope against the
/// predicted 1 − 1/α. The ratio is independent of g and 𝒯 (both fixed
/// internally at 1).
pub fn scaling_study(alpha: f64, n_min: usize, n_max: usize) -> Result<StudyResult> {
    if n_min < 1 || n_min > n_max || n_max > ENUMERATION_CAP {
        return Err(Error::BadSampleRange { n_min, n_max });
    }
    let noise = NoiseModel::new(1.0, alpha)?;
    let total_time = 1.0;
    let mut result = StudyResult::new(
        "scaling",
        &[
            "n_plus_1",
            "t_sharp",
            "t_parallel",
            "f_sharp",
            "f_parallel",
            "ratio",
        ],
    );
    let t_parallel = optimal_time(0, &noise)?;
    for n in n_min..=n_max {
        let t_sharp = optimal_time(n, &noise)?;
        let p = PurityVector::uniform(1.0, n)?;
        let f_sharp = total_time / t_sharp * qfi(&p, t_sharp, &noise)?;
        let f_parallel = total_time / t_parallel * cfi_uncorrelated(&p, t_parallel, &noise)?;
        result.rows.push(vec![
            n as f64 + 1.0,
            t_sharp,
            t_parallel,
            f_sharp,
            f_parallel,
            f_sharp / f_parallel,
        ]);
    }
    let sizes = result.column("n_plus_1");
    let ratios = result.column("ratio");
    result.summary.push("slope", log_log_slope(&sizes, &ratios));
    result.summary.push("expected_slope", 1.0 - 1.0 / alpha);
    Ok(result)
}

/// Majorisation negative result: pairs (p, q) with p ≻ q by construction
/// (sorted
/// vector plus random T-transforms, entries summing to one), classified by
/// whether the CFI ordering agrees with the majorisation. `ordering` is +1
/// when it agrees, −1 when it disagrees, 0 on a tie.
pub fn majorisation_study(cfg: &ExperimentConfig) -> Result<StudyResult> {
    cfg.validate()?;
    let mut result = StudyResult::new(
        "majorisation",
        &["index", "n", "cfi_major", "cfi_minor", "diff", "ordering"],
    );
    result.rows = parallel_rows(cfg.samples, |i| {
        let mut rng = SplitMix64::for_sample(cfg.seed, i as u64);
        let n = sample_n(&mut rng, cfg);
        let raw = sample_purity_vector(&mut rng, n);
        let total: f64 = raw.entries().iter().sum();
        let mut major: Vec<f64> = raw.entries().iter().map(|x| x / total).collect();
        major.sort_by(|a, b| b.partial_cmp(a).unwrap());

        let mut minor = major.clone();
        let transforms = rng.uniform_usize(1, 3);
        for _ in 0..transforms {
            let a = rng.uniform_usize(0, n);
            let mut b = rng.uniform_usize(0, n);
            while b == a {
                b = rng.uniform_usize(0, n);
            }
            let lambda = rng.next_f64();
            let (va, vb) = (minor[a], minor[b]);
            minor[a] = lambda * va + (1.0 - lambda) * vb;
            minor[b] = lambda * vb + (1.0 - lambda) * va;
        }
        debug_assert!(majorizes(&major, &minor));

        let f_major = fisher_weight_sum(&PurityVector::new(major).unwrap()).unwrap();
        let f_minor = fisher_weight_sum(&PurityVector::new(minor).unwrap()).unwrap();
        let diff = f_major - f_minor;
        let ordering = if diff > 1e-15 {
            1.0
        } else if diff < -1e-15 {
            -1.0
        } else {
            0.0
        };
        vec![i as f64, n as f64, f_major, f_minor, diff, ordering]
    });
    let orderings = result.column("ordering");
    let agree = orderings.iter().filter(|&&o| o > 0.0).count();
    let disagree = orderings.iter().filter(|&&o| o < 0.0).count();
    result.summary.push("agree", agree as f64);
    result.summary.push("disagree", disagree as f64);
    Ok(result)
}

/// Whether `p` majorizes `q`: equal totals and dominating sorted prefix
/// sums.
pub fn majorizes(p: &[f64], q: &[f64]) -> bool {
    if p.len() != q.len() {
        return false;
    }
    let sort_desc = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        s
    };
    let ps = sort_desc(p);
    let qs = sort_desc(q);
    let mut acc_p = 0.0;
    let mut acc_q = 0.0;
    for i in 0..ps.len() {
        acc_p += ps[i];
        acc_q += qs[i];
        if acc_p < acc_q - 1e-12 {
            return false;
        }
    }
    (acc_p - acc_q).abs() < 1e-12
}

/// Single-qubit readout: exact vs averaged CFI at a fixed
/// small mismatch δ_θ. Summary: Pearson r.
pub fn spq_correlation_study(cfg: &ExperimentConfig) -> Result<StudyResult> {
    cfg.validate()?;
    let noise = cfg.noise();
    let enc = EncodingParams::new(cfg.t, SPQ_STUDY_DELTA)?;
    let guess = ReadoutGuess::new(0.0);
    let mut result = StudyResult::new("spq-corr", &["index", "n", "cfi_exact", "cfi_averaged"]);
    result.rows = parallel_rows(cfg.samples, |i| {
        let mut rng = SplitMix64::for_sample(cfg.seed, i as u64);
        let n = sample_n(&mut rng, cfg);
        let p = sample_purity_vector(&mut rng, n);
        let exact = spq_cfi_exact(&p, &enc, &noise, &guess).value;
        let averaged = spq_cfi_averaged(&p, &enc, &noise, &guess).value;
        vec![i as f64, n as f64, exact, averaged]
    });
    let xs = result.column("cfi_exact");
    let ys = result.column("cfi_averaged");
    result.summary.push("pearson", pearson(&xs, &ys));
    Ok(result)
}
