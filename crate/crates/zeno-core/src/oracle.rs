//! Brute-force dense density-matrix simulation of the full protocol:
//! preparation circuit, noisy encoding, measurement statistics,
//! finite-difference CFI and spectral QFI. Everything here is independent of
//! the closed forms in `fisher` — it is the oracle they are validated
//! against.
//!
//! Qubit layout: the SPQ is the most significant bit of a basis index;
//! RPQ i (1-based) sits at bit i−1, matching the little-endian bitstring
//! convention in `probe`.

use crate::error::{Error, Result};
use crate::fisher::EncodingParams;
use crate::probe::{NoiseModel, PurityVector};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Dense simulation cap: 2^12 = 4096-dimensional matrices.
pub const SIM_QUBIT_CAP: usize = 12;
/// Cap for the dense eigensolve used by the spectral QFI.
pub const EIG_QUBIT_CAP: usize = 10;

/// Outcomes with probability below this are skipped in Fisher sums; their
/// derivative numerators vanish at the same order.
pub const OUTCOME_FLOOR: f64 = 1e-14;

/// Eigenvalue pairs closer than this are treated as degenerate in the QFI
/// double sum (a removable singularity: the matrix element is irrelevant).
pub const DEGENERACY_FLOOR: f64 = 1e-12;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Dense complex Hermitian state of n+1 qubits with unit trace.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    /// Number of RPQs; total qubits = n + 1.
    n: usize,
    mat: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn num_rpqs(&self) -> usize {
        self.n
    }

    pub fn num_qubits(&self) -> usize {
        self.n + 1
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).sum()
    }

    /// Largest |ρ[i,j] − conj(ρ[j,i])| over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for j in 0..dim {
            for i in 0..=j {
                let d = self.mat[(i, j)] - self.mat[(j, i)].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// Bit position of a qubit index (0 = SPQ at the top bit).
    fn bit_of(&self, qubit: usize) -> usize {
        if qubit == 0 {
            self.n
        } else {
            qubit - 1
        }
    }

    /// ρ → M ρ M† for a single-qubit operator M (not necessarily unitary),
    /// in place: a row pass applies M, a column pass applies M†.
    fn apply_one_qubit(&mut self, qubit: usize, m: [[Complex64; 2]; 2]) {
        let dim = self.dim();
        let mask = 1usize << self.bit_of(qubit);
        for col in 0..dim {
            for base in 0..dim {
                if base & mask != 0 {
                    continue;
                }
                let hi = base | mask;
                let a = self.mat[(base, col)];
                let b = self.mat[(hi, col)];
                self.mat[(base, col)] = m[0][0] * a + m[0][1] * b;
                self.mat[(hi, col)] = m[1][0] * a + m[1][1] * b;
            }
        }
        for row in 0..dim {
            for base in 0..dim {
                if base & mask != 0 {
                    continue;
                }
                let hi = base | mask;
                let a = self.mat[(row, base)];
                let b = self.mat[(row, hi)];
                self.mat[(row, base)] = a * m[0][0].conj() + b * m[0][1].conj();
                self.mat[(row, hi)] = a * m[1][0].conj() + b * m[1][1].conj();
            }
        }
    }

    /// Two-operator Kraus channel on one qubit: ρ → K₀ρK₀† + K₁ρK₁†.
    fn apply_kraus_pair(&mut self, qubit: usize, k0: [[Complex64; 2]; 2], k1: [[Complex64; 2]; 2]) {
        let mut branch = self.clone();
        self.apply_one_qubit(qubit, k0);
        branch.apply_one_qubit(qubit, k1);
        self.mat += branch.mat;
    }

    /// CNOT with the SPQ as control and one RPQ as target — a basis
    /// permutation, applied in place (the permutation is an involution, so
    /// every two-element orbit is swapped exactly once).
    fn apply_cnot_from_spq(&mut self, target_rpq: usize) {
        let dim = self.dim();
        let spq_mask = 1usize << self.n;
        let target_mask = 1usize << (target_rpq - 1);
        let sigma = |j: usize| {
            if j & spq_mask != 0 {
                j ^ target_mask
            } else {
                j
            }
        };
        for row in 0..dim {
            let row2 = sigma(row);
            for col in 0..dim {
                let col2 = sigma(col);
                if (row2, col2) > (row, col) {
                    let tmp = self.mat[(row, col)];
                    self.mat[(row, col)] = self.mat[(row2, col2)];
                    self.mat[(row2, col2)] = tmp;
                }
            }
        }
    }

    fn apply_cnot_layer(&mut self) {
        for i in 1..=self.n {
            self.apply_cnot_from_spq(i);
        }
    }

    fn apply_hadamard_spq(&mut self) {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        self.apply_one_qubit(0, [[h, h], [h, -h]]);
    }

    /// Controlled single-RPQ gate with the SPQ as control: acts only inside
    /// the SPQ = |1⟩ block.
    fn apply_controlled_rpq_gate(&mut self, target_rpq: usize, m: [[Complex64; 2]; 2]) {
        let dim = self.dim();
        let spq_mask = 1usize << self.n;
        let mask = 1usize << (target_rpq - 1);
        for col in 0..dim {
            for base in 0..dim {
                if base & mask != 0 || base & spq_mask == 0 {
                    continue;
                }
                let hi = base | mask;
                let a = self.mat[(base, col)];
                let b = self.mat[(hi, col)];
                self.mat[(base, col)] = m[0][0] * a + m[0][1] * b;
                self.mat[(hi, col)] = m[1][0] * a + m[1][1] * b;
            }
        }
        for row in 0..dim {
            for base in 0..dim {
                if base & mask != 0 || base & spq_mask == 0 {
                    continue;
                }
                let hi = base | mask;
                let a = self.mat[(row, base)];
                let b = self.mat[(row, hi)];
                self.mat[(row, base)] = a * m[0][0].conj() + b * m[0][1].conj();
                self.mat[(row, hi)] = a * m[1][0].conj() + b * m[1][1].conj();
            }
        }
    }

    /// Reduced 2×2 SPQ state after tracing out every RPQ.
    fn trace_out_rpqs(&self) -> [[Complex64; 2]; 2] {
        let n = self.n;
        let mut out = [[Complex64::ZERO; 2]; 2];
        for (a, row) in out.iter_mut().enumerate() {
            for (b, entry) in row.iter_mut().enumerate() {
                let mut acc = Complex64::ZERO;
                for k in 0..(1usize << n) {
                    acc += self.mat[((a << n) | k, (b << n) | k)];
                }
                *entry = acc;
            }
        }
        out
    }
}

/// Tensor product of the diagonal initial qubit states, Ω₀ = ⊗ ρ_i.
pub fn build_initial(p: &PurityVector) -> Result<DensityMatrix> {
    let qubits = p.num_qubits();
    if qubits > SIM_QUBIT_CAP {
        return Err(Error::SimulatorCapExceeded {
            qubits,
            cap: SIM_QUBIT_CAP,
        });
    }
    let n = p.num_rpqs();
    let dim = 1usize << qubits;
    let weights = p.weights();
    let mut mat = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let mut diag = 1.0;
        for (qubit, w) in weights.iter().enumerate() {
            let bit_pos = if qubit == 0 { n } else { qubit - 1 };
            diag *= w.lambda(((j >> bit_pos) & 1) as u64);
        }
        mat[(j, j)] = Complex64::new(diag, 0.0);
    }
    Ok(DensityMatrix { n, mat })
}

/// Full preparation: CNOT layer, Hadamard on the SPQ, second CNOT layer.
pub fn prepare(mut state: DensityMatrix) -> DensityMatrix {
    state.apply_cnot_layer();
    state.apply_hadamard_spq();
    state.apply_cnot_layer();
    state
}

/// Preparation with the first CNOT layer omitted — the variant whose CFI is
/// not permutation symmetric.
pub fn prepare_without_first_cnots(mut state: DensityMatrix) -> DensityMatrix {
    state.apply_hadamard_spq();
    state.apply_cnot_layer();
    state
}

fn phase_gate(omega_t: f64) -> [[Complex64; 2]; 2] {
    let half = omega_t / 2.0;
    [
        [Complex64::from_polar(1.0, -half), Complex64::ZERO],
        [Complex64::ZERO, Complex64::from_polar(1.0, half)],
    ]
}

fn kraus_pair(noise: &NoiseModel, t: f64) -> ([[Complex64; 2]; 2], [[Complex64; 2]; 2]) {
    let d = noise.qubit_decay(t);
    let c0 = Complex64::new(((1.0 + d) / 2.0).sqrt(), 0.0);
    let c1 = Complex64::new(((1.0 - d) / 2.0).sqrt(), 0.0);
    (
        [[c0, Complex64::ZERO], [Complex64::ZERO, c0]],
        [[c1, Complex64::ZERO], [Complex64::ZERO, -c1]],
    )
}

/// Encoding unitary U = exp(−iωtZ/2) on every qubit.
pub fn apply_encoding_unitary(state: &mut DensityMatrix, omega_t: f64) {
    let u = phase_gate(omega_t);
    for q in 0..state.num_qubits() {
        state.apply_one_qubit(q, u);
    }
}

/// Dephasing channel Λ on every qubit, with Kraus operators
/// L₀ = sqrt((1+e^(−gt^α))/2)·I and L₁ = sqrt((1−e^(−gt^α))/2)·Z.
pub fn apply_dephasing(state: &mut DensityMatrix, noise: &NoiseModel, t: f64) {
    let (k0, k1) = kraus_pair(noise, t);
    for q in 0..state.num_qubits() {
        state.apply_kraus_pair(q, k0, k1);
    }
}

/// Noisy encoding: phase unitary and dephasing channel on every qubit.
/// The two commute, so the order is irrelevant (asserted in tests).
pub fn encode(mut state: DensityMatrix, omega_t: f64, noise: &NoiseModel, t: f64) -> DensityMatrix {
    apply_encoding_unitary(&mut state, omega_t);
    apply_dephasing(&mut state, noise, t);
    state
}

/// Full measurement distribution: probability of SPQ outcome ± together
/// with RPQ bitstring k, indexed as (s << n) | k with s = 0 for +.
#[derive(Debug, Clone)]
pub struct MeasurementDistribution {
    n: usize,
    probs: Vec<f64>,
}

impl MeasurementDistribution {
    pub fn num_rpqs(&self) -> usize {
        self.n
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn q_plus(&self, k: u64) -> f64 {
        self.probs[k as usize]
    }

    pub fn q_minus(&self, k: u64) -> f64 {
        self.probs[(1usize << self.n) | k as usize]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// Readout: third CNOT layer, RPQs in the Z basis, SPQ in the X basis
/// (realized as a Hadamard followed by a Z-basis read of the diagonal).
pub fn measure(mut state: DensityMatrix) -> MeasurementDistribution {
    state.apply_cnot_layer();
    state.apply_hadamard_spq();
    let probs = (0..state.dim()).map(|j| state.mat[(j, j)].re).collect();
    MeasurementDistribution { n: state.n, probs }
}

#[derive(Clone, Copy)]
enum PrepVariant {
    Full,
    NoFirstCnots,
}

fn pipeline_distribution(
    p: &PurityVector,
    omega_t: f64,
    noise: &NoiseModel,
    t: f64,
    variant: PrepVariant,
) -> Result<MeasurementDistribution> {
    let state = build_initial(p)?;
    let state = match variant {
        PrepVariant::Full => prepare(state),
        PrepVariant::NoFirstCnots => prepare_without_first_cnots(state),
    };
    Ok(measure(encode(state, omega_t, noise, t)))
}

fn finite_difference_cfi(
    p: &PurityVector,
    enc: &EncodingParams,
    noise: &NoiseModel,
    variant: PrepVariant,
) -> Result<f64> {
    let t = enc.t;
    let omega = enc.omega_t / t;
    let h = 1e-6 / t;
    let dist = |w: f64| pipeline_distribution(p, w * t, noise, t, variant);

    let hi = dist(omega + h)?;
    let lo = dist(omega - h)?;
    let hi_half = dist(omega + h / 2.0)?;
    let lo_half = dist(omega - h / 2.0)?;
    let center = dist(omega)?;

    let mut cfi = 0.0;
    for i in 0..center.probs.len() {
        let q = center.probs[i];
        if q < OUTCOME_FLOOR {
            continue;
        }
        let coarse = (hi.probs[i] - lo.probs[i]) / (2.0 * h);
        let fine = (hi_half.probs[i] - lo_half.probs[i]) / h;
        // One Richardson step: error drops from O(h²) to O(h⁴).
        let deriv = (4.0 * fine - coarse) / 3.0;
        cfi += deriv * deriv / q;
    }
    Ok(cfi)
}

/// CFI of the simulated protocol via central finite differences in ω
/// (step h = 1e−6/t) with one Richardson extrapolation step.
pub fn oracle_cfi(p: &PurityVector, enc: &EncodingParams, noise: &NoiseModel) -> Result<f64> {
    finite_difference_cfi(p, enc, noise, PrepVariant::Full)
}

/// Same finite-difference CFI for the no-first-CNOT preparation variant.
pub fn oracle_cfi_without_first_cnots(
    p: &PurityVector,
    enc: &EncodingParams,
    noise: &NoiseModel,
) -> Result<f64> {
    finite_difference_cfi(p, enc, noise, PrepVariant::NoFirstCnots)
}

/// QFI from a dense eigendecomposition of the noisy probe: prepare, apply
/// the channel, diagonalize, and evaluate
/// 2 Σ (g−g')²/(g+g') |⟨G|𝒢|G'⟩|² with 𝒢 = (t/2) Σ Z_i.
pub fn oracle_qfi(p: &PurityVector, t: f64, noise: &NoiseModel) -> Result<f64> {
    if p.num_qubits() > EIG_QUBIT_CAP {
        return Err(Error::SimulatorCapExceeded {
            qubits: p.num_qubits(),
            cap: EIG_QUBIT_CAP,
        });
    }
    let mut state = prepare(build_initial(p)?);
    apply_dephasing(&mut state, noise, t);

    let dim = state.dim();
    let qubits = state.num_qubits();
    // Scrub rounding noise off Hermiticity before the eigensolve.
    let herm = (state.mat.clone() + state.mat.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();

    // The generator is diagonal in the computational basis:
    // (t/2) * (#zeros - #ones) over all n+1 bits.
    let gen_diag: Vec<f64> = (0..dim)
        .map(|j| {
            let ones = (j as u64).count_ones() as f64;
            t / 2.0 * (qubits as f64 - 2.0 * ones)
        })
        .collect();

    let mut qfi = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            let ga = eig.eigenvalues[a];
            let gb = eig.eigenvalues[b];
            let sum = ga + gb;
            if sum < OUTCOME_FLOOR || (ga - gb).abs() < DEGENERACY_FLOOR {
                continue;
            }
            let mut element = Complex64::ZERO;
            for (j, &gen) in gen_diag.iter().enumerate() {
                element += eig.eigenvectors[(j, a)].conj() * gen * eig.eigenvectors[(j, b)];
            }
            qfi += 2.0 * (ga - gb) * (ga - gb) / sum * element.norm_sqr();
        }
    }
    Ok(qfi)
}

/// SPQ readout probabilities simulated with the controlled rotation of the
/// appendix protocol: in place of the final CNOTs, a controlled
/// [X·exp(iθZ)] on each RPQ plus the controlled phase on the SPQ; the RPQs
/// are then traced out and the SPQ is measured in the X basis.
pub fn oracle_spq_probabilities(
    p: &PurityVector,
    enc: &EncodingParams,
    noise: &NoiseModel,
    theta: f64,
) -> Result<(f64, f64)> {
    let state = prepare(build_initial(p)?);
    let mut state = encode(state, enc.omega_t, noise, enc.t);

    // X·exp(iθZ) = [[0, e^(−iθ)], [e^(iθ), 0]].
    let gate = [
        [Complex64::ZERO, Complex64::from_polar(1.0, -theta)],
        [Complex64::from_polar(1.0, theta), Complex64::ZERO],
    ];
    for i in 1..=state.num_rpqs() {
        state.apply_controlled_rpq_gate(i, gate);
    }
    // Controlled global phase of the RPQ rotation, seen by the SPQ.
    state.apply_one_qubit(
        0,
        [
            [Complex64::ONE, Complex64::ZERO],
            [Complex64::ZERO, Complex64::from_polar(1.0, -theta)],
        ],
    );

    let spq = state.trace_out_rpqs();
    let off_diag_re = 0.5 * (spq[0][1] + spq[1][0]).re;
    let half_trace = 0.5 * (spq[0][0] + spq[1][1]).re;
    Ok((half_trace + off_diag_re, half_trace - off_diag_re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn pv(entries: &[f64]) -> PurityVector {
        PurityVector::new(entries.to_vec()).unwrap()
    }

    #[test]
    fn initial_state_examples() {
        let state = build_initial(&pv(&[1.0, 1.0])).unwrap();
        assert_eq!(state.mat[(0, 0)], Complex64::ONE);
        for j in 1..4 {
            assert_eq!(state.mat[(j, j)], Complex64::ZERO);
        }
        let state = build_initial(&pv(&[0.0, 0.0])).unwrap();
        for j in 0..4 {
            assert!((state.mat[(j, j)].re - 0.25).abs() < 1e-15);
        }
        let state = build_initial(&pv(&[0.3, 0.8, 0.1])).unwrap();
        assert!((state.trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn initial_state_cap() {
        let p = PurityVector::uniform(0.5, SIM_QUBIT_CAP).unwrap(); // 13 qubits
        assert!(matches!(
            build_initial(&p),
            Err(Error::SimulatorCapExceeded { .. })
        ));
    }

    #[test]
    fn prepare_pure_input_gives_ghz_projector() {
        let state = prepare(build_initial(&pv(&[1.0, 1.0])).unwrap());
        // (|00> + |11>)/sqrt(2): entries 0 and 3.
        let half = Complex64::new(0.5, 0.0);
        for (i, j, want) in [
            (0, 0, half),
            (0, 3, half),
            (3, 0, half),
            (3, 3, half),
            (1, 1, Complex64::ZERO),
            (2, 2, Complex64::ZERO),
        ] {
            assert!((state.mat[(i, j)] - want).norm() < 1e-14);
        }
    }

    #[test]
    fn prepare_leaves_identity_invariant() {
        let state = prepare(build_initial(&pv(&[0.0, 0.0])).unwrap());
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 0.25 } else { 0.0 };
                assert!((state.mat[(i, j)] - Complex64::new(want, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn channel_is_unital() {
        // The maximally mixed state is a fixed point of the noisy encoding.
        let noise = NoiseModel::new(0.7, 1.9).unwrap();
        let state = encode(
            build_initial(&pv(&[0.0, 0.0, 0.0])).unwrap(),
            0.9,
            &noise,
            1.3,
        );
        for i in 0..state.dim() {
            for j in 0..state.dim() {
                let want = if i == j { 0.125 } else { 0.0 };
                assert!((state.mat[(i, j)] - Complex64::new(want, 0.0)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn encode_preserves_trace_and_hermiticity() {
        let noise = NoiseModel::new(0.4, 1.6).unwrap();
        let state = prepare(build_initial(&pv(&[0.7, 0.2, 0.9])).unwrap());
        let state = encode(state, 1.3, &noise, 0.8);
        assert!((state.trace() - 1.0).abs() < 1e-13);
        assert!(state.hermiticity_defect() < 1e-13);
    }

    #[test]
    fn channel_and_unitary_commute() {
        let noise = NoiseModel::new(0.5, 2.0).unwrap();
        let base = prepare(build_initial(&pv(&[0.8, 0.4, 0.6])).unwrap());
        let mut a = base.clone();
        apply_encoding_unitary(&mut a, 0.9);
        apply_dephasing(&mut a, &noise, 0.7);
        let mut b = base;
        apply_dephasing(&mut b, &noise, 0.7);
        apply_encoding_unitary(&mut b, 0.9);
        let mut worst = 0.0f64;
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                worst = worst.max((a.mat[(i, j)] - b.mat[(i, j)]).norm());
            }
        }
        assert!(worst < 1e-13);
    }

    #[test]
    fn strong_dephasing_kills_spq_coherence() {
        // decay -> 0: blocks that connect different SPQ values vanish.
        let noise = NoiseModel::new(200.0, 1.0).unwrap();
        let state = encode(
            prepare(build_initial(&pv(&[1.0, 1.0])).unwrap()),
            0.4,
            &noise,
            1.0,
        );
        assert!(state.mat[(0, 3)].norm() < 1e-15);
        assert!(state.mat[(3, 0)].norm() < 1e-15);
    }

    #[test]
    fn unitary_encoding_preserves_purity() {
        let state = prepare(build_initial(&pv(&[1.0, 1.0, 1.0])).unwrap());
        let state = encode(state, 0.77, &NoiseModel::noiseless(), 1.0);
        let purity = (state.mat.clone() * state.mat.clone())
            .diagonal()
            .iter()
            .map(|z| z.re)
            .sum::<f64>();
        assert!((purity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measurement_distribution_is_normalized() {
        let noise = NoiseModel::new(0.2, 1.4).unwrap();
        let state = prepare(build_initial(&pv(&[0.33, 0.74, 0.51])).unwrap());
        let dist = measure(encode(state, 0.6, &noise, 1.1));
        assert!((dist.total() - 1.0).abs() < 1e-12);
        assert!(dist.probabilities().iter().all(|&q| q >= -1e-14));
    }

    #[test]
    fn measurement_matches_closed_form_entrywise() {
        // q± per bitstring against the analytic expression.
        let p = pv(&[0.42, 0.87, 0.13, 0.66]);
        let (omega_t, t) = (1.1, 0.9);
        let noise = NoiseModel::new(0.15, 1.7).unwrap();
        let n = p.num_rpqs();
        let dist = measure(encode(
            prepare(build_initial(&p).unwrap()),
            omega_t,
            &noise,
            t,
        ));
        let weights = p.weights();
        let damp = noise.collective_decay(t, n + 1);
        for k in 0u64..(1 << n) {
            let m = k.count_ones() as f64;
            let cosine = ((n as f64 + 1.0 - 2.0 * m) * omega_t).cos();
            let mut prod0 = 1.0;
            let mut prod1 = 1.0;
            for (i, w) in weights.iter().enumerate().skip(1) {
                let bit = (k >> (i - 1)) & 1;
                prod0 *= w.lambda(bit);
                prod1 *= w.lambda(1 - bit);
            }
            let q_plus = weights[0].lambda0 / 2.0 * prod0 * (1.0 + damp * cosine)
                + weights[0].lambda1 / 2.0 * prod1 * (1.0 - damp * cosine);
            let q_minus = weights[0].lambda0 / 2.0 * prod0 * (1.0 - damp * cosine)
                + weights[0].lambda1 / 2.0 * prod1 * (1.0 + damp * cosine);
            assert!((dist.q_plus(k) - q_plus).abs() < 1e-12, "k = {k}");
            assert!((dist.q_minus(k) - q_minus).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn pure_ghz_outcome_concentration() {
        // p = (1,…,1), ωt = π/2, g = 0, n even: only k = 0 survives and the
        // cos factor vanishes, so q± = 1/2 on that string.
        let dist = measure(encode(
            prepare(build_initial(&pv(&[1.0, 1.0, 1.0])).unwrap()),
            FRAC_PI_2,
            &NoiseModel::noiseless(),
            1.0,
        ));
        assert!((dist.q_plus(0) - 0.5).abs() < 1e-12);
        assert!((dist.q_minus(0) - 0.5).abs() < 1e-12);
        for k in 1..4 {
            assert!(dist.q_plus(k).abs() < 1e-12);
            assert!(dist.q_minus(k).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_cfi_heisenberg_anchor() {
        let enc = EncodingParams::new(1.0, FRAC_PI_2).unwrap();
        let f = oracle_cfi(&pv(&[1.0, 1.0, 1.0]), &enc, &NoiseModel::noiseless()).unwrap();
        assert!((f - 9.0).abs() < 1e-6);
    }

    #[test]
    fn oracle_cfi_zero_probe() {
        let enc = EncodingParams::new(1.0, 0.8).unwrap();
        let f = oracle_cfi(&pv(&[0.0, 0.0, 0.0]), &enc, &NoiseModel::noiseless()).unwrap();
        assert!(f.abs() < 1e-10);
    }

    #[test]
    fn richardson_step_is_converged() {
        // Halving h changes the result by < 1e-8 relative.
        let p = pv(&[0.8, 0.3, 0.6]);
        let noise = NoiseModel::new(0.1, 2.0).unwrap();
        let enc = EncodingParams::new(1.0, 1.0).unwrap();
        let f = oracle_cfi(&p, &enc, &noise).unwrap();

        // Re-run the pipeline with h/2 by exploiting ω-scaling: evaluate the
        // same distributions directly here.
        let t = enc.t;
        let omega = enc.omega_t / t;
        let h = 0.5e-6 / t;
        let dist = |w: f64| {
            measure(encode(
                prepare(build_initial(&p).unwrap()),
                w * t,
                &noise,
                t,
            ))
        };
        let hi = dist(omega + h);
        let lo = dist(omega - h);
        let hi_half = dist(omega + h / 2.0);
        let lo_half = dist(omega - h / 2.0);
        let center = dist(omega);
        let mut f_half = 0.0;
        for i in 0..center.probabilities().len() {
            let q = center.probabilities()[i];
            if q < OUTCOME_FLOOR {
                continue;
            }
            let coarse = (hi.probabilities()[i] - lo.probabilities()[i]) / (2.0 * h);
            let fine = (hi_half.probabilities()[i] - lo_half.probabilities()[i]) / h;
            let deriv = (4.0 * fine - coarse) / 3.0;
            f_half += deriv * deriv / q;
        }
        assert!((f - f_half).abs() < 1e-8 * f);
    }

    #[test]
    fn oracle_qfi_heisenberg_anchor() {
        let f = oracle_qfi(&pv(&[1.0, 1.0, 1.0]), 1.0, &NoiseModel::noiseless()).unwrap();
        assert!((f - 9.0).abs() < 1e-8);
    }

    #[test]
    fn oracle_qfi_tilted_closed_form() {
        let noise = NoiseModel::new(0.3, 1.5).unwrap();
        let t = 0.8;
        let f = oracle_qfi(&PurityVector::tilted(2).unwrap(), t, &noise).unwrap();
        let expect = 3.0 * t * t * noise.collective_decay_squared(t, 3);
        assert!((f - expect).abs() < 1e-8 * expect);
    }

    #[test]
    fn cnot_layer_is_unitary() {
        // Permutation gates preserve the trace and Frobenius norm.
        let mut state = prepare(build_initial(&pv(&[0.6, 0.9, 0.2])).unwrap());
        let norm_before: f64 = state.mat.iter().map(|z| z.norm_sqr()).sum();
        state.apply_cnot_layer();
        let norm_after: f64 = state.mat.iter().map(|z| z.norm_sqr()).sum();
        assert!((state.trace() - 1.0).abs() < 1e-13);
        assert!((norm_before - norm_after).abs() < 1e-13);
    }

    #[test]
    fn spq_oracle_at_zero_theta_matches_marginal() {
        // θ = 0 reduces the controlled rotation to the plain CNOT layer, so
        // the SPQ marginal of the full distribution must match.
        let p = pv(&[0.7, 0.3, 0.8]);
        let noise = NoiseModel::new(0.2, 1.0).unwrap();
        let enc = EncodingParams::new(1.0, 0.9).unwrap();
        let (qp, qm) = oracle_spq_probabilities(&p, &enc, &noise, 0.0).unwrap();
        let dist = measure(encode(
            prepare(build_initial(&p).unwrap()),
            enc.omega_t,
            &noise,
            enc.t,
        ));
        let marginal_plus: f64 = (0..4).map(|k| dist.q_plus(k)).sum();
        let marginal_minus: f64 = (0..4).map(|k| dist.q_minus(k)).sum();
        assert!((qp - marginal_plus).abs() < 1e-12);
        assert!((qm - marginal_minus).abs() < 1e-12);
    }
}
