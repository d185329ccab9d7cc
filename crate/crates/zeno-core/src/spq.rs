//! Single-qubit readout: a controlled rotation by a guess angle θ replaces
//! the final CNOT layer, the RPQs are discarded, and only the SPQ is
//! measured in the X basis. Sensitivity depends on the guess mismatch
//! δ_θ = ωt − θ.
//!
//! `spq_probabilities` is the exact product form; the two CFI expressions
//! are second-order expansions in δ_θ and carry a validity flag,
//! δ_θ² t² (n+1) ≤ 0.1, beyond which the dropped fourth-order terms exceed
//! the percent level.

use crate::fisher::EncodingParams;
use crate::probe::{NoiseModel, PurityVector};
use serde::Serialize;

/// Validity bound for the small-δ expansion: δ_θ² t² (n+1) ≤ this.
pub const EXPANSION_VALIDITY_BOUND: f64 = 0.1;

/// The guess angle θ (same phase convention as ωt).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReadoutGuess {
    pub theta: f64,
}

impl ReadoutGuess {
    pub fn new(theta: f64) -> Self {
        Self { theta }
    }

    /// δ_θ = ωt − θ.
    pub fn delta(&self, omega_t: f64) -> f64 {
        omega_t - self.theta
    }

    /// Whether the second-order expansion is trustworthy for this probe
    /// size and run time.
    pub fn expansion_valid(&self, omega_t: f64, t: f64, n: usize) -> bool {
        let delta = self.delta(omega_t);
        delta * delta * t * t * (n as f64 + 1.0) <= EXPANSION_VALIDITY_BOUND
    }
}

/// A CFI value from one of the expanded expressions, together with the
/// expansion-validity flag (false means the value comes with a warning,
/// not an error).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpqCfi {
    pub value: f64,
    pub expansion_valid: bool,
}

/// Exact SPQ measurement probabilities:
///
///   q± = 1/2 ± (1/2) e^(−(n+1) g t^α) Re[e^(−iδ)(λ₀ Π x_i − λ₁ Π x_i*)],
///   x_i = cos δ − i p_i sin δ,
///
/// with λ's from the SPQ purity. The pair always sums to one.
pub fn spq_probabilities(
    p: &PurityVector,
    enc: &EncodingParams,
    noise: &NoiseModel,
    guess: &ReadoutGuess,
) -> (f64, f64) {
    let n = p.num_rpqs();
    let delta = guess.delta(enc.omega_t);
    let decay = noise.collective_decay(enc.t, n + 1);
    let (sin_d, cos_d) = delta.sin_cos();

    // Product over RPQs of (cos δ − i p_i sin δ) as (re, im).
    let (mut prod_re, mut prod_im) = (1.0, 0.0);
    for &p_i in p.rpqs() {
        let (re, im) = (cos_d, -p_i * sin_d);
        let next_re = prod_re * re - prod_im * im;
        let next_im = prod_re * im + prod_im * re;
        prod_re = next_re;
        prod_im = next_im;
    }

    let lambda0 = (1.0 + p.spq()) / 2.0;
    let lambda1 = 1.0 - lambda0;
    // w = λ₀ Π x − λ₁ Π x*; conjugating the product flips its imaginary part.
    let w_re = (lambda0 - lambda1) * prod_re;
    let w_im = (lambda0 + lambda1) * prod_im;
    // Re[e^(−iδ) w] = cos δ · Re w + sin δ · Im w.
    let contrast = cos_d * w_re + sin_d * w_im;

    let bias = 0.5 * decay * contrast;
    (0.5 + bias, 0.5 - bias)
}

struct ExpansionTerms {
    /// Σ_{i≥1} p_i (exact) or n⟨p⟩ (averaged).
    linear: f64,
    /// Σ_{i<j} p_i p_j (exact) or n(n−1)⟨p⟩²/2 (averaged).
    pair: f64,
}

fn expanded_cfi(
    p: &PurityVector,
    enc: &EncodingParams,
    noise: &NoiseModel,
    guess: &ReadoutGuess,
    terms: ExpansionTerms,
) -> SpqCfi {
    let n = p.num_rpqs();
    let t = enc.t;
    let delta = guess.delta(enc.omega_t);
    let p0 = p.spq();
    let damping = noise.collective_decay_squared(t, n + 1);
    let dt2 = delta * t * t;

    let numerator_root =
        -2.0 * dt2 * terms.linear + p0 * (-(n as f64 + 1.0) * dt2 - 2.0 * dt2 * terms.pair);
    let expanded_contrast = -delta * dt2 * terms.linear
        + p0 * (1.0 - (n as f64 + 1.0) * delta * dt2 / 2.0 - delta * dt2 * terms.pair);
    // δ = 0 with a pure SPQ and g = 0 makes the ratio 0/0; the numerator is
    // O(δ²) so the value is 0 there.
    let value = if numerator_root == 0.0 {
        0.0
    } else {
        damping * numerator_root * numerator_root
            / (1.0 - damping * expanded_contrast * expanded_contrast)
    };

    SpqCfi {
        value,
        expansion_valid: guess.expansion_valid(enc.omega_t, t, n),
    }
}

/// CFI of the single-qubit readout from the δ_θ-expanded probabilities,
/// with the exact RPQ sums Σ p_i and Σ_{i<j} p_i p_j.
pub fn spq_cfi_exact(
    p: &PurityVector,
    enc: &EncodingParams,
    noise: &NoiseModel,
    guess: &ReadoutGuess,
) -> SpqCfi {
    let rpqs = p.rpqs();
    let linear: f64 = rpqs.iter().sum();
    let mut pair = 0.0;
    for (i, &pi) in rpqs.iter().enumerate() {
        for &pj in &rpqs[i + 1..] {
            pair += pi * pj;
        }
    }
    expanded_cfi(p, enc, noise, guess, ExpansionTerms { linear, pair })
}

/// The averaged form: the pair sum is replaced by n(n−1)⟨**p**⟩²/2 with
/// ⟨**p**⟩ the RPQ mean. Coincides with `spq_cfi_exact` for uniform RPQs.
pub fn spq_cfi_averaged(
    p: &PurityVector,
    enc: &EncodingParams,
    noise: &NoiseModel,
    guess: &ReadoutGuess,
) -> SpqCfi {
    let n = p.num_rpqs() as f64;
    let mean = p.rpq_mean();
    expanded_cfi(
        p,
        enc,
        noise,
        guess,
        ExpansionTerms {
            linear: n * mean,
            pair: n * (n - 1.0) / 2.0 * mean * mean,
        },
    )
}

/// The guess mismatch that sets the averaged-CFI denominator to one at
/// large n: δ_θ t = sqrt(2 / (n (1 + n⟨**p**⟩²))).
pub fn spq_special_delta(p: &PurityVector, t: f64) -> f64 {
    let n = p.num_rpqs() as f64;
    let mean = p.rpq_mean();
    (2.0 / (n * (1.0 + n * mean * mean))).sqrt() / t
}

/// Large-n simplification of the averaged CFI at the special mismatch:
/// 2 e^(−2(n+1) g t^α) t² n² [2⟨**p**⟩² + p₀(1+n)]² / (n (1 + n⟨**p**⟩²)).
pub fn spq_cfi_large_n(p: &PurityVector, t: f64, noise: &NoiseModel) -> f64 {
    let n = p.num_rpqs() as f64;
    let mean = p.rpq_mean();
    let p0 = p.spq();
    let damping = noise.collective_decay_squared(t, p.num_qubits());
    let bracket = 2.0 * mean * mean + p0 * (1.0 + n);
    2.0 * damping * t * t * n * n * bracket * bracket / (n * (1.0 + n * mean * mean))
}
