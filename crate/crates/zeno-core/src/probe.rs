//! Probe parameterization: purity vector, per-qubit spectral weights, the
//! dephasing model, and the eigenvalue spectrum of the prepared GHZ-diagonal
//! probe.
//!
//! Bitstring convention used everywhere in this crate: an RPQ outcome
//! **k** = (k₁, …, k_n) is packed little-endian into a `u64`, so k₁ is the
//! least significant bit and RPQ i lives at bit i−1.

use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use serde::Serialize;

/// Hard cap on the register size accepted for full 2^n bitstring
/// enumeration. The uniform and tilted closed forms bypass it.
pub const ENUMERATION_CAP: usize = 24;

/// Denominator floor below which an eigenvalue pair is treated as absent;
/// the 𝒫_k numerator vanishes quadratically at the same time.
pub const PAIR_WEIGHT_FLOOR: f64 = 1e-300;

/// Bloch-vector lengths of the n+1 probe qubits. Index 0 is the SPQ
/// (the control of every CNOT); indices 1..=n are the RPQs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PurityVector {
    entries: Vec<f64>,
}

impl PurityVector {
    /// Validates each p_i ∈ [0, 1] and that there is at least one SPQ and
    /// one RPQ. Negative p_i (anti-aligned qubits) are rejected, not folded.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::TooFewQubits(entries.len()));
        }
        for (index, &value) in entries.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) || value.is_nan() {
                return Err(Error::PurityOutOfRange { index, value });
            }
        }
        Ok(Self { entries })
    }

    /// All n+1 qubits share the same purity p.
    pub fn uniform(p: f64, n: usize) -> Result<Self> {
        Self::new(vec![p; n + 1])
    }

    /// Pure SPQ, maximally mixed RPQs: p = (1, 0, …, 0).
    pub fn tilted(n: usize) -> Result<Self> {
        let mut entries = vec![0.0; n + 1];
        entries[0] = 1.0;
        Self::new(entries)
    }

    /// Number of RPQs (total qubits minus the SPQ).
    pub fn num_rpqs(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn num_qubits(&self) -> usize {
        self.entries.len()
    }

    pub fn spq(&self) -> f64 {
        self.entries[0]
    }

    pub fn rpqs(&self) -> &[f64] {
        &self.entries[1..]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// ⟨**p**²⟩ = Σ p_i² / (n+1), the normalized length squared.
    pub fn mean_square(&self) -> f64 {
        self.entries.iter().map(|p| p * p).sum::<f64>() / self.entries.len() as f64
    }

    /// Mean of the RPQ purities only (the appendix's ⟨**p**⟩).
    pub fn rpq_mean(&self) -> f64 {
        let n = self.num_rpqs();
        self.rpqs().iter().sum::<f64>() / n as f64
    }

    /// Reorders all entries (SPQ included) by `perm`: entry i of the result
    /// is `self[perm[i]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        assert_eq!(
            perm.len(),
            self.entries.len(),
            "permutation length mismatch"
        );
        Self::new(perm.iter().map(|&i| self.entries[i]).collect())
    }

    /// Drops the last RPQ — the odd-n remedy ("discard one RPQ at the
    /// beginning of the protocol").
    pub fn without_last_rpq(&self) -> Result<Self> {
        Self::new(self.entries[..self.entries.len() - 1].to_vec())
    }

    /// Per-qubit spectral weights, SPQ first.
    pub fn weights(&self) -> Vec<SpectralWeights> {
        self.entries
            .iter()
            .map(|&p| SpectralWeights::from_purity(p).expect("validated on construction"))
            .collect()
    }
}

/// Eigenvalues (λ₀, λ₁) of one diagonal qubit state: λ₀ = (1+p)/2,
/// λ₁ = 1 − λ₀, so the pair sums to one exactly in floating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralWeights {
    pub lambda0: f64,
    pub lambda1: f64,
}

impl SpectralWeights {
    pub fn from_purity(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::PurityScalarOutOfRange { value: p });
        }
        let lambda0 = (1.0 + p) / 2.0;
        Ok(Self {
            lambda0,
            lambda1: 1.0 - lambda0,
        })
    }

    /// λ indexed by a bit: λ₀ for 0, λ₁ for 1.
    #[inline]
    pub fn lambda(&self, bit: u64) -> f64 {
        if bit == 0 {
            self.lambda0
        } else {
            self.lambda1
        }
    }
}

/// Spectral weights of one qubit with purity `p_i`.
pub fn spectral_weights(p_i: f64) -> Result<SpectralWeights> {
    SpectralWeights::from_purity(p_i)
}

/// Dephasing channel parameters: single-qubit decay factor e^(−g t^α).
/// α = 1 is the semigroup case; α ≠ 1 is time-inhomogeneous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseModel {
    g: f64,
    alpha: f64,
}

impl NoiseModel {
    pub fn new(g: f64, alpha: f64) -> Result<Self> {
        if g < 0.0 || g.is_nan() {
            return Err(Error::NegativeRate(g));
        }
        if alpha <= 0.0 || alpha.is_nan() {
            return Err(Error::NonPositiveAlpha(alpha));
        }
        Ok(Self { g, alpha })
    }

    /// g = 0 (any α); the decay factor is 1 for all t.
    pub fn noiseless() -> Self {
        Self { g: 0.0, alpha: 1.0 }
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// e^(−g t^α), the off-diagonal survival factor of one qubit.
    pub fn qubit_decay(&self, t: f64) -> f64 {
        (-self.g * t.powf(self.alpha)).exp()
    }

    /// e^(−qubits · g t^α): joint survival of a coherence spread over
    /// `qubits` qubits (n+1 for the GHZ probe).
    pub fn collective_decay(&self, t: f64, qubits: usize) -> f64 {
        (-(qubits as f64) * self.g * t.powf(self.alpha)).exp()
    }

    /// e^(−2 · qubits · g t^α), the squared factor appearing in every
    /// Fisher-information prefactor.
    pub fn collective_decay_squared(&self, t: f64, qubits: usize) -> f64 {
        (-2.0 * qubits as f64 * self.g * t.powf(self.alpha)).exp()
    }
}

/// Eigenvalue spectrum of the prepared probe: for every RPQ bitstring **k**
/// the pair (g₊, g₋) with
///
///   g₊(**k**) = λ₀ · Π λ_{k_i}^{(i)},    g₋(**k**) = λ₁ · Π λ_{1−k_i}^{(i)}.
///
/// Pairs are produced lazily so register sizes up to the enumeration cap
/// never materialize a map.
#[derive(Debug, Clone)]
pub struct GhzSpectrum {
    weights: Vec<SpectralWeights>,
}

impl GhzSpectrum {
    pub fn new(p: &PurityVector) -> Result<Self> {
        let n = p.num_rpqs();
        if n > ENUMERATION_CAP {
            return Err(Error::EnumerationCapExceeded {
                n,
                cap: ENUMERATION_CAP,
            });
        }
        Ok(Self {
            weights: p.weights(),
        })
    }

    pub fn num_rpqs(&self) -> usize {
        self.weights.len() - 1
    }

    /// Number of bitstrings, 2^n.
    pub fn num_pairs(&self) -> u64 {
        1u64 << self.num_rpqs()
    }

    /// Eigenvalue pair for one bitstring.
    pub fn eigenpair(&self, k: u64) -> (f64, f64) {
        let mut g_plus = self.weights[0].lambda0;
        let mut g_minus = self.weights[0].lambda1;
        for (i, w) in self.weights[1..].iter().enumerate() {
            let bit = (k >> i) & 1;
            g_plus *= w.lambda(bit);
            g_minus *= w.lambda(1 - bit);
        }
        (g_plus, g_minus)
    }

    /// All pairs in ascending k order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, f64, f64)> + '_ {
        (0..self.num_pairs()).map(move |k| {
            let (g_plus, g_minus) = self.eigenpair(k);
            (k, g_plus, g_minus)
        })
    }

    /// Trace of the probe state recovered from the spectrum (should be 1).
    pub fn total_weight(&self) -> f64 {
        self.iter()
            .map(|(_, gp, gm)| gp + gm)
            .collect::<KahanSum>()
            .value()
    }
}

/// Spectrum of the probe prepared from `p`.
pub fn ghz_spectrum(p: &PurityVector) -> Result<GhzSpectrum> {
    GhzSpectrum::new(p)
}

/// Eigenvalue pair after collective dephasing with the given decay factor
/// e^(−(n+1) g t^α):
///
///   g̃± = (g₊+g₋)/2 ± decay · (g₊−g₋)/2.
///
/// The sum is preserved and both outputs stay non-negative for
/// decay ∈ (0, 1].
pub fn noisy_eigenvalues(g_plus: f64, g_minus: f64, decay: f64) -> (f64, f64) {
    let mean = 0.5 * (g_plus + g_minus);
    let half_gap = 0.5 * decay * (g_plus - g_minus);
    (mean + half_gap, mean - half_gap)
}

/// Hamming weight of a register bitstring, m_k.
#[inline]
pub fn hamming_weight(k: u64) -> u32 {
    k.count_ones()
}

/// The phase multiplicity factor (n + 1 − 2 m_k) as a float.
#[inline]
pub fn phase_multiplicity(n: usize, k: u64) -> f64 {
    (n as f64 + 1.0) - 2.0 * hamming_weight(k) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_weights_examples() {
        let w = spectral_weights(1.0).unwrap();
        assert_eq!((w.lambda0, w.lambda1), (1.0, 0.0));
        let w = spectral_weights(0.0).unwrap();
        assert_eq!((w.lambda0, w.lambda1), (0.5, 0.5));
        let w = spectral_weights(0.5).unwrap();
        assert_eq!((w.lambda0, w.lambda1), (0.75, 0.25));
    }

    #[test]
    fn spectral_weights_rejects_out_of_range() {
        assert!(spectral_weights(-0.1).is_err());
        assert!(spectral_weights(1.1).is_err());
        assert!(spectral_weights(f64::NAN).is_err());
    }

    #[test]
    fn purity_vector_names_offending_index() {
        let err = PurityVector::new(vec![0.3, 1.5]).unwrap_err();
        match err {
            Error::PurityOutOfRange { index, value } => {
                assert_eq!(index, 1);
                assert_eq!(value, 1.5);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn purity_vector_needs_two_qubits() {
        assert!(PurityVector::new(vec![1.0]).is_err());
        assert!(PurityVector::new(vec![]).is_err());
    }

    #[test]
    fn ghz_spectrum_pure_probe() {
        // p = (1, 1): all weight in the k = 0 pair (1, 0).
        let p = PurityVector::new(vec![1.0, 1.0]).unwrap();
        let spec = GhzSpectrum::new(&p).unwrap();
        assert_eq!(spec.eigenpair(0), (1.0, 0.0));
        assert_eq!(spec.eigenpair(1), (0.0, 0.0));
    }

    #[test]
    fn ghz_spectrum_maximally_mixed() {
        let p = PurityVector::new(vec![0.0, 0.0]).unwrap();
        let spec = GhzSpectrum::new(&p).unwrap();
        for (_, gp, gm) in spec.iter() {
            assert_eq!((gp, gm), (0.25, 0.25));
        }
    }

    #[test]
    fn ghz_spectrum_hand_evaluated() {
        // p = (0.5, 0.5), k = 0: g+ = 0.75 * 0.75, g- = 0.25 * 0.25.
        let p = PurityVector::new(vec![0.5, 0.5]).unwrap();
        let spec = GhzSpectrum::new(&p).unwrap();
        let (gp, gm) = spec.eigenpair(0);
        assert!((gp - 0.5625).abs() < 1e-15);
        assert!((gm - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn ghz_spectrum_cap() {
        let p = PurityVector::uniform(0.5, ENUMERATION_CAP + 1).unwrap();
        match GhzSpectrum::new(&p) {
            Err(Error::EnumerationCapExceeded { n, cap }) => {
                assert_eq!(n, ENUMERATION_CAP + 1);
                assert_eq!(cap, ENUMERATION_CAP);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn spectrum_normalizes_for_random_p() {
        let p = PurityVector::new(vec![0.83, 0.12, 0.5, 0.99, 0.01, 0.67]).unwrap();
        assert!((GhzSpectrum::new(&p).unwrap().total_weight() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_eigenvalues_examples() {
        assert_eq!(noisy_eigenvalues(1.0, 0.0, 1.0), (1.0, 0.0));
        assert_eq!(noisy_eigenvalues(1.0, 0.0, 0.5), (0.75, 0.25));
        assert_eq!(noisy_eigenvalues(0.25, 0.25, 0.3), (0.25, 0.25));
    }

    #[test]
    fn noise_preserves_spectrum_trace() {
        let p = PurityVector::new(vec![0.4, 0.9, 0.2, 0.75]).unwrap();
        let spec = GhzSpectrum::new(&p).unwrap();
        let total: KahanSum = spec
            .iter()
            .map(|(_, gp, gm)| {
                let (tp, tm) = noisy_eigenvalues(gp, gm, 0.37);
                tp + tm
            })
            .collect();
        assert!((total.value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noise_model_decay_bounds() {
        let noise = NoiseModel::new(0.8, 2.0).unwrap();
        for t in [0.0, 0.1, 1.0, 5.0] {
            let d = noise.qubit_decay(t);
            assert!(d > 0.0 && d <= 1.0);
        }
        assert_eq!(NoiseModel::noiseless().qubit_decay(3.0), 1.0);
    }

    #[test]
    fn noise_model_rejects_bad_parameters() {
        assert!(NoiseModel::new(-0.1, 1.0).is_err());
        assert!(NoiseModel::new(0.1, 0.0).is_err());
        assert!(NoiseModel::new(0.1, -2.0).is_err());
    }

    #[test]
    fn permuted_rpqs_leave_pair_multiset_unchanged() {
        let p = PurityVector::new(vec![0.7, 0.2, 0.9, 0.4]).unwrap();
        // Permute RPQs only: SPQ stays, RPQ order reversed.
        let q = p.permuted(&[0, 3, 2, 1]).unwrap();
        let pairs = |v: &PurityVector| {
            let mut out: Vec<(f64, f64)> = GhzSpectrum::new(v)
                .unwrap()
                .iter()
                .map(|(_, gp, gm)| (gp, gm))
                .collect();
            out.sort_by(|a, b| a.partial_cmp(b).unwrap());
            out
        };
        for (a, b) in pairs(&p).iter().zip(pairs(&q).iter()) {
            // Products are reassociated by the permutation, so compare up
            // to rounding, not bitwise.
            assert!((a.0 - b.0).abs() < 1e-15 && (a.1 - b.1).abs() < 1e-15);
        }
    }
}
