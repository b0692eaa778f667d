//! Kraus-operator channels, their classification flags, and contractivity
//! reports for the partitioned trace distances.
//!
//! A channel is classified by its two Gram sums: `Σ E†E` against the input
//! identity (trace preservation) and `Σ E E†` against the output identity
//! (unitality, and the weaker sub-unitality bound `Σ E E† ≤ 1`). Sub-unital
//! trace-nonincreasing channels contract every partitioned distance; general
//! trace-preserving channels only contract the whole trace distance, and the
//! coarse-graining constructor below is the stock counterexample for the
//! partitioned ones.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::distance::{DistanceError, DistanceProfile};
use crate::eigen::{hermitian_eigensystem, EigenError};
use crate::majorization::{compare, OrderedVector, SubmajorizationReport};
use crate::matrix::ComplexMatrix;
use crate::measurement::{random_rank_one_povm, MeasurementError, Povm};
use crate::random::{random_isometry, random_probability_vector, random_unitary};
use crate::state::{DensityMatrix, StateError};
use crate::tol;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("channel must contain at least one Kraus operator")]
    Empty,
    #[error(
        "Kraus operator {index} has shape {rows}x{cols}, expected {expected_rows}x{expected_cols}"
    )]
    ShapeMismatch {
        index: usize,
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("map increases trace (largest eigenvalue of Σ E†E exceeds one by {excess:.3e})")]
    TraceIncreasing { excess: f64 },
    #[error("state dimension {state_dim} does not match channel input dimension {dim_in}")]
    DimensionMismatch { state_dim: usize, dim_in: usize },
    #[error("channel output has vanishing trace for this input")]
    ZeroTrace,
    #[error("channel is not trace-preserving; use the unnormalized comparison instead")]
    NotTracePreserving,
    #[error("parameter {name} = {value} out of range")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error("operator square root of element {index} failed: eigenvalue {min_eigenvalue:.3e}")]
    SqrtOfIndefinite { index: usize, min_eigenvalue: f64 },
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Measurement(#[from] MeasurementError),
    #[error(transparent)]
    Distance(#[from] DistanceError),
}

/// Classification of a channel by its Gram sums, with residual magnitudes.
#[derive(Debug, Clone, Copy)]
pub struct ChannelFlags {
    /// `Σ E†E = 1` within tolerance.
    pub trace_preserving: bool,
    /// `Σ E†E ≤ 1`; always true for a constructed channel.
    pub trace_nonincreasing: bool,
    /// `Σ E E† = 1` within tolerance.
    pub unital: bool,
    /// `Σ E E† ≤ 1`; the condition under which every partitioned distance
    /// contracts.
    pub subunital: bool,
    /// Max-entry residual of `Σ E†E − 1`.
    pub trace_residual: f64,
    /// Max-entry residual of `Σ E E† − 1`.
    pub unital_residual: f64,
    /// How far the largest eigenvalue of `Σ E E†` exceeds one (zero if it
    /// does not).
    pub subunital_excess: f64,
}

impl ChannelFlags {
    /// Trace-preserving and unital.
    pub fn bistochastic(&self) -> bool {
        self.trace_preserving && self.unital
    }
}

/// Completely positive map in operator-sum form.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
    flags: ChannelFlags,
}

impl KrausChannel {
    /// Build a channel from Kraus operators, computing its flags. Maps whose
    /// input Gram sum exceeds the identity are rejected: they would increase
    /// trace on some input and describe no physical operation.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self, ChannelError> {
        let first = kraus.first().ok_or(ChannelError::Empty)?;
        let (dim_out, dim_in) = (first.rows(), first.cols());
        for (index, e) in kraus.iter().enumerate() {
            if e.rows() != dim_out || e.cols() != dim_in {
                return Err(ChannelError::ShapeMismatch {
                    index,
                    rows: e.rows(),
                    cols: e.cols(),
                    expected_rows: dim_out,
                    expected_cols: dim_in,
                });
            }
        }

        let mut input_gram = ComplexMatrix::zeros(dim_in, dim_in);
        let mut output_gram = ComplexMatrix::zeros(dim_out, dim_out);
        for e in &kraus {
            let adj = e.adjoint();
            input_gram = &input_gram + &adj.matmul(e);
            output_gram = &output_gram + &e.matmul(&adj);
        }
        let input_gram = input_gram.hermitian_part();
        let output_gram = output_gram.hermitian_part();

        let input_top = hermitian_eigensystem(&input_gram)?.eigenvalues[0];
        if input_top > 1.0 + tol::SWEEP {
            return Err(ChannelError::TraceIncreasing {
                excess: input_top - 1.0,
            });
        }
        let output_top = hermitian_eigensystem(&output_gram)?.eigenvalues[0];

        let trace_residual = input_gram.max_abs_diff(&ComplexMatrix::identity(dim_in));
        let unital_residual = output_gram.max_abs_diff(&ComplexMatrix::identity(dim_out));
        let flags = ChannelFlags {
            trace_preserving: trace_residual <= tol::SWEEP,
            trace_nonincreasing: true,
            unital: unital_residual <= tol::SWEEP,
            subunital: output_top <= 1.0 + tol::SWEEP,
            trace_residual,
            unital_residual,
            subunital_excess: (output_top - 1.0).max(0.0),
        };

        Ok(Self {
            dim_in,
            dim_out,
            kraus,
            flags,
        })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn flags(&self) -> &ChannelFlags {
        &self.flags
    }

    /// Raw operator-sum action `Σ E ρ E†`, no normalization.
    pub fn apply_raw(&self, m: &ComplexMatrix) -> Result<ComplexMatrix, ChannelError> {
        if m.rows() != self.dim_in || m.cols() != self.dim_in {
            return Err(ChannelError::DimensionMismatch {
                state_dim: m.rows(),
                dim_in: self.dim_in,
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for e in &self.kraus {
            out = &out + &e.matmul(m).matmul(&e.adjoint());
        }
        Ok(out.hermitian_part())
    }

    /// Apply to a state, renormalizing when the operation succeeds with
    /// probability below one. Returns the output state and that probability.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<(DensityMatrix, f64), ChannelError> {
        let raw = self.apply_raw(rho.matrix())?;
        let success = raw.trace().re;
        if success <= tol::KERNEL {
            return Err(ChannelError::ZeroTrace);
        }
        // Dividing by a trace within rounding of one would only inject noise;
        // trace-preserving channels in particular must act bit-stably.
        let normalized = if (success - 1.0).abs() <= tol::KERNEL {
            raw
        } else {
            raw.scale_real(1.0 / success)
        };
        let state = DensityMatrix::new_with_tol(normalized, tol::SWEEP)?;
        Ok((state, success))
    }

    /// Single-unitary channel `ρ → U ρ U†`.
    pub fn unitary(u: ComplexMatrix) -> Result<Self, ChannelError> {
        Self::new(vec![u])
    }

    /// The identity channel.
    pub fn identity(dim: usize) -> Self {
        Self::unitary(ComplexMatrix::identity(dim)).expect("identity is unitary")
    }

    /// Depolarizing channel `ρ → (1−p) ρ + p 1/d`, realized as a mixture of
    /// the d² shift-and-phase unitaries. Bistochastic for every `p`.
    pub fn depolarizing(dim: usize, p: f64) -> Result<Self, ChannelError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(ChannelError::ParameterOutOfRange {
                name: "p",
                value: p,
            });
        }
        if dim == 0 {
            return Err(ChannelError::Empty);
        }
        let d = dim as f64;
        let uniform_weight = p / (d * d);
        let mut kraus = Vec::with_capacity(dim * dim);
        for a in 0..dim {
            for b in 0..dim {
                let weight = if a == 0 && b == 0 {
                    1.0 - p + uniform_weight
                } else {
                    uniform_weight
                };
                if weight == 0.0 {
                    continue;
                }
                let scale = weight.sqrt();
                // (XᵃZᵇ)[i][j] = δ_{i,(j+a) mod d} · exp(2πi·b·j/d)
                let op = ComplexMatrix::from_fn(dim, dim, |i, j| {
                    if i == (j + a) % dim {
                        let angle = std::f64::consts::TAU * (b * j) as f64 / d;
                        Complex64::from_polar(scale, angle)
                    } else {
                        Complex64::ZERO
                    }
                });
                kraus.push(op);
            }
        }
        Self::new(kraus)
    }

    /// Qubit phase damping with parameter `λ`; bistochastic.
    pub fn phase_damping(lambda: f64) -> Result<Self, ChannelError> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(ChannelError::ParameterOutOfRange {
                name: "lambda",
                value: lambda,
            });
        }
        Ok(Self::new(vec![
            ComplexMatrix::from_diagonal(&[1.0, (1.0 - lambda).sqrt()]),
            ComplexMatrix::from_diagonal(&[0.0, lambda.sqrt()]),
        ])
        .expect("valid Kraus pair"))
    }

    /// Qubit amplitude damping with parameter `γ`; trace-preserving but not
    /// unital (and not sub-unital for `γ > 0`).
    pub fn amplitude_damping(gamma: f64) -> Result<Self, ChannelError> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(ChannelError::ParameterOutOfRange {
                name: "gamma",
                value: gamma,
            });
        }
        let e0 = ComplexMatrix::from_diagonal(&[1.0, (1.0 - gamma).sqrt()]);
        let mut e1 = ComplexMatrix::zeros(2, 2);
        e1[(0, 1)] = Complex64::new(gamma.sqrt(), 0.0);
        Ok(Self::new(vec![e0, e1]).expect("valid Kraus pair"))
    }

    /// Mixture of unitaries `E_m = √w_m U_m`; bistochastic by construction.
    pub fn unitary_mixture(
        weights: &[f64],
        unitaries: Vec<ComplexMatrix>,
    ) -> Result<Self, ChannelError> {
        if weights.len() != unitaries.len() || weights.is_empty() {
            return Err(ChannelError::Empty);
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|&w| w < 0.0) || (total - 1.0).abs() > tol::SWEEP {
            return Err(ChannelError::ParameterOutOfRange {
                name: "weights",
                value: total,
            });
        }
        let kraus = weights
            .iter()
            .zip(unitaries)
            .map(|(&w, u)| u.scale_real(w.sqrt()))
            .collect();
        Self::new(kraus)
    }

    /// Deterministic relabeling of basis states: one Kraus operator
    /// `|f(i)⟩⟨i|` per input index. Trace-preserving always; sub-unital
    /// exactly when `f` is injective.
    pub fn coarse_graining(dim_out: usize, f: &[usize]) -> Result<Self, ChannelError> {
        if f.is_empty() || dim_out == 0 {
            return Err(ChannelError::Empty);
        }
        let dim_in = f.len();
        for &target in f {
            if target >= dim_out {
                return Err(ChannelError::ParameterOutOfRange {
                    name: "f",
                    value: target as f64,
                });
            }
        }
        // E_i has a single 1 at (f(i), i).
        let kraus: Vec<ComplexMatrix> = f
            .iter()
            .enumerate()
            .map(|(i, &target)| {
                let mut e = ComplexMatrix::zeros(dim_out, dim_in);
                e[(target, i)] = Complex64::ONE;
                e
            })
            .collect();
        Self::new(kraus)
    }

    /// The unread generalized measurement `ρ → Σ M_m^{1/2} ρ M_m^{1/2}`;
    /// completeness of the POVM makes it bistochastic.
    pub fn measurement(povm: &Povm) -> Result<Self, ChannelError> {
        let mut kraus = Vec::with_capacity(povm.n_outcomes());
        for (index, m) in povm.elements().iter().enumerate() {
            let eig = hermitian_eigensystem(m)?;
            let min_eigenvalue = *eig.eigenvalues.last().expect("non-empty");
            if min_eigenvalue < -tol::SQRT_CLAMP {
                return Err(ChannelError::SqrtOfIndefinite {
                    index,
                    min_eigenvalue,
                });
            }
            kraus.push(eig.apply_spectral(|l| l.max(0.0).sqrt()));
        }
        Self::new(kraus)
    }
}

/// One row of a contractivity table.
#[derive(Debug, Clone, Copy)]
pub struct ContractivityRow {
    pub k: usize,
    pub distance_in: f64,
    pub distance_out: f64,
    pub violated: bool,
}

/// Per-k comparison of distances across a channel, plus the submajorization
/// verdict for the singular-value vectors of the two differences.
#[derive(Debug, Clone)]
pub struct ContractivityReport {
    pub rows: Vec<ContractivityRow>,
    /// Singular values of the input difference, zero-padded.
    pub spectrum_in: Vec<f64>,
    /// Singular values of the output difference, zero-padded.
    pub spectrum_out: Vec<f64>,
    /// `s(out) ≺_w s(in)` within tolerance.
    pub submajorized: bool,
    pub submajorization: SubmajorizationReport,
    /// Largest `D_k(out) − D_k(in)` across k.
    pub worst_increase: f64,
}

impl ContractivityReport {
    pub fn any_violation(&self) -> bool {
        self.rows.iter().any(|r| r.violated)
    }
}

fn difference_spectrum(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<Vec<f64>, ChannelError> {
    let diff = (x - y).hermitian_part();
    let eig = hermitian_eigensystem(&diff)?;
    let mut s: Vec<f64> = eig.eigenvalues.iter().map(|l| l.abs()).collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(s)
}

fn report_from_spectra(
    spectrum_in: Vec<f64>,
    spectrum_out: Vec<f64>,
) -> Result<ContractivityReport, ChannelError> {
    let len = spectrum_in.len().max(spectrum_out.len());
    let mut s_in = spectrum_in;
    let mut s_out = spectrum_out;
    s_in.resize(len, 0.0);
    s_out.resize(len, 0.0);

    // Distances past a space's own dimension stay constant at the whole
    // distance, which is exactly what prefix sums over the zero-padded
    // spectrum produce.
    let profile_in = DistanceProfile::from_singular_values(&s_in);
    let profile_out = DistanceProfile::from_singular_values(&s_out);

    let mut rows = Vec::with_capacity(len);
    let mut worst_increase = f64::NEG_INFINITY;
    for k in 1..=len {
        let distance_in = profile_in.values()[k - 1];
        let distance_out = profile_out.values()[k - 1];
        let increase = distance_out - distance_in;
        worst_increase = worst_increase.max(increase);
        rows.push(ContractivityRow {
            k,
            distance_in,
            distance_out,
            violated: increase > tol::SWEEP,
        });
    }

    let in_vec = OrderedVector::new(s_in.clone()).expect("singular values are non-negative");
    let out_vec = OrderedVector::new(s_out.clone()).expect("singular values are non-negative");
    let submajorization = compare(&out_vec, &in_vec, tol::SWEEP);

    Ok(ContractivityReport {
        rows,
        spectrum_in: s_in,
        spectrum_out: s_out,
        submajorized: submajorization.weak,
        submajorization,
        worst_increase,
    })
}

/// Compare distance profiles before and after a trace-preserving channel.
pub fn contractivity_report(
    channel: &KrausChannel,
    a: &DensityMatrix,
    b: &DensityMatrix,
) -> Result<ContractivityReport, ChannelError> {
    if !channel.flags().trace_preserving {
        return Err(ChannelError::NotTracePreserving);
    }
    let (out_a, _) = channel.apply(a)?;
    let (out_b, _) = channel.apply(b)?;
    let spectrum_in = difference_spectrum(a.matrix(), b.matrix())?;
    let spectrum_out = difference_spectrum(out_a.matrix(), out_b.matrix())?;
    report_from_spectra(spectrum_in, spectrum_out)
}

/// Contractivity comparison on unnormalized outputs, for trace-nonincreasing
/// maps that are not trace-preserving. Normalizing would break linearity;
/// the distance bound applies to the raw operator-sum outputs.
pub fn contractivity_report_raw(
    channel: &KrausChannel,
    a: &DensityMatrix,
    b: &DensityMatrix,
) -> Result<ContractivityReport, ChannelError> {
    let out_a = channel.apply_raw(a.matrix())?;
    let out_b = channel.apply_raw(b.matrix())?;
    let spectrum_in = difference_spectrum(a.matrix(), b.matrix())?;
    let spectrum_out = difference_spectrum(&out_a, &out_b)?;
    report_from_spectra(spectrum_in, spectrum_out)
}

/// Random bistochastic channel: a unitary mixture or the measurement channel
/// of a random rank-one POVM, even odds.
pub fn random_bistochastic(dim: usize, rng: &mut impl Rng) -> Result<KrausChannel, ChannelError> {
    if rng.random::<bool>() {
        random_unitary_mixture(dim, rng)
    } else {
        let povm = random_rank_one_povm(dim, dim + 2, rng)?;
        KrausChannel::measurement(&povm)
    }
}

/// Random mixture of 2–5 Haar unitaries with flat-Dirichlet weights.
pub fn random_unitary_mixture(
    dim: usize,
    rng: &mut impl Rng,
) -> Result<KrausChannel, ChannelError> {
    let count = rng.random_range(2..=5);
    let weights = random_probability_vector(count, rng);
    let unitaries = (0..count).map(|_| random_unitary(dim, rng)).collect();
    KrausChannel::unitary_mixture(&weights, unitaries)
}

/// Random sub-unital trace-nonincreasing map that is not trace-preserving:
/// `E_m = √(c w_m) U_m P` for a rank-r projector `P`, Haar unitaries, and a
/// total weight `c < 1`. Both Gram sums stay at or below `c·1`.
pub fn random_subunital_nonincreasing(
    dim: usize,
    rng: &mut impl Rng,
) -> Result<KrausChannel, ChannelError> {
    let rank = rng.random_range(1..=dim);
    let basis = random_unitary(dim, rng);
    let projector = ComplexMatrix::from_fn(dim, dim, |i, j| {
        (0..rank)
            .map(|l| basis[(i, l)] * basis[(j, l)].conj())
            .sum()
    });
    let count = rng.random_range(2..=4);
    let weights = random_probability_vector(count, rng);
    let scale = rng.random_range(0.3..0.95);
    let kraus = (0..count)
        .map(|m| {
            let u = random_unitary(dim, rng);
            u.matmul(&projector).scale_real((scale * weights[m]).sqrt())
        })
        .collect();
    KrausChannel::new(kraus)
}

/// Random trace-preserving channel from a Haar isometry split into Kraus
/// blocks; generically not sub-unital.
pub fn random_trace_preserving(
    dim: usize,
    kraus_count: usize,
    rng: &mut impl Rng,
) -> Result<KrausChannel, ChannelError> {
    let isometry = random_isometry(dim * kraus_count, dim, rng);
    let kraus = (0..kraus_count)
        .map(|m| ComplexMatrix::from_fn(dim, dim, |i, j| isometry[(m * dim + i, j)]))
        .collect();
    KrausChannel::new(kraus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_full_rank_state, rng_from_seed};

    fn diag_state(p: &[f64]) -> DensityMatrix {
        DensityMatrix::from_probabilities(p).unwrap()
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn unitary_channel_flags() {
        let mut rng = rng_from_seed(3);
        let ch = KrausChannel::unitary(random_unitary(3, &mut rng)).unwrap();
        let f = ch.flags();
        assert!(f.trace_preserving && f.unital && f.subunital);
        assert!(f.bistochastic());
    }

    // 2x2 Gram arithmetic: E0 = diag(1, √(1−γ)), E1 = √γ |0⟩⟨1| gives
    // Σ E†E = diag(1, 1) and Σ EE† = diag(1+γ, 1−γ).
    #[test]
    fn amplitude_damping_gram_sums() {
        let ch = KrausChannel::amplitude_damping(0.5).unwrap();
        let f = ch.flags();
        assert!(f.trace_preserving);
        assert!(!f.unital);
        assert!(!f.subunital);
        assert_close(f.subunital_excess, 0.5, 1e-12);

        let mut output_gram = ComplexMatrix::zeros(2, 2);
        for e in ch.kraus() {
            output_gram = &output_gram + &e.matmul(&e.adjoint());
        }
        assert!(output_gram.approx_eq(&ComplexMatrix::from_diagonal(&[1.5, 0.5]), 1e-12));
    }

    #[test]
    fn phase_damping_is_bistochastic() {
        for lambda in [0.0, 0.3, 1.0] {
            let ch = KrausChannel::phase_damping(lambda).unwrap();
            assert!(ch.flags().bistochastic(), "lambda = {lambda}");
            assert!(ch.flags().subunital);
        }
    }

    #[test]
    fn depolarizing_flags_and_action() {
        let ch = KrausChannel::depolarizing(2, 1.0).unwrap();
        assert!(ch.flags().bistochastic());
        let mut rng = rng_from_seed(10);
        let rho = random_full_rank_state(2, &mut rng);
        let (out, prob) = ch.apply(&rho).unwrap();
        assert_close(prob, 1.0, 1e-12);
        assert!(out
            .matrix()
            .approx_eq(&ComplexMatrix::from_diagonal(&[0.5, 0.5]), 1e-10));

        // Partial depolarizing on a qutrit: (1−p)ρ + p/3.
        let ch = KrausChannel::depolarizing(3, 0.4).unwrap();
        assert!(ch.flags().bistochastic());
        let rho = random_full_rank_state(3, &mut rng);
        let (out, _) = ch.apply(&rho).unwrap();
        let expected =
            &rho.matrix().scale_real(0.6) + &ComplexMatrix::identity(3).scale_real(0.4 / 3.0);
        assert!(out.matrix().approx_eq(&expected, 1e-10));
    }

    #[test]
    fn unitary_mixture_is_bistochastic() {
        let mut rng = rng_from_seed(5);
        let weights = [0.5, 0.3, 0.2];
        let unitaries = (0..3).map(|_| random_unitary(4, &mut rng)).collect();
        let ch = KrausChannel::unitary_mixture(&weights, unitaries).unwrap();
        assert!(ch.flags().bistochastic());
        assert!(ch.flags().subunital);
    }

    // Diagonal Gram arithmetic: with three inputs mapped to 0 and two to 1,
    // Σ EE† = diag(3, 2, 0, 0, 0).
    #[test]
    fn coarse_graining_violates_subunitality() {
        let ch = KrausChannel::coarse_graining(5, &[0, 0, 0, 1, 1]).unwrap();
        let f = ch.flags();
        assert!(f.trace_preserving);
        assert!(!f.subunital);
        assert_close(f.subunital_excess, 2.0, 1e-12);

        let mut output_gram = ComplexMatrix::zeros(5, 5);
        for e in ch.kraus() {
            output_gram = &output_gram + &e.matmul(&e.adjoint());
        }
        let expected = ComplexMatrix::from_diagonal(&[3.0, 2.0, 0.0, 0.0, 0.0]);
        assert!(output_gram.approx_eq(&expected, 1e-12));
    }

    #[test]
    fn coarse_graining_injective_is_subunital() {
        let ch = KrausChannel::coarse_graining(3, &[2, 0, 1]).unwrap();
        assert!(ch.flags().trace_preserving);
        assert!(ch.flags().subunital);
    }

    #[test]
    fn measurement_channel_of_computational_pvm_dephases() {
        let povm = Povm::new(vec![
            ComplexMatrix::from_diagonal(&[1.0, 0.0]),
            ComplexMatrix::from_diagonal(&[0.0, 1.0]),
        ])
        .unwrap();
        let ch = KrausChannel::measurement(&povm).unwrap();
        assert!(ch.flags().bistochastic());

        let plus =
            DensityMatrix::new(ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]])).unwrap();
        let (out, _) = ch.apply(&plus).unwrap();
        assert!(out
            .matrix()
            .approx_eq(&ComplexMatrix::from_diagonal(&[0.5, 0.5]), 1e-12));

        // A state already diagonal in the measured basis is untouched.
        let rho = diag_state(&[0.8, 0.2]);
        let (out, _) = ch.apply(&rho).unwrap();
        assert!(out.matrix().approx_eq(rho.matrix(), 1e-12));
    }

    #[test]
    fn measurement_channel_of_identity_povm_is_identity() {
        let povm = Povm::new(vec![ComplexMatrix::identity(3)]).unwrap();
        let ch = KrausChannel::measurement(&povm).unwrap();
        let mut rng = rng_from_seed(9);
        let rho = random_full_rank_state(3, &mut rng);
        let (out, _) = ch.apply(&rho).unwrap();
        assert!(out.matrix().approx_eq(rho.matrix(), 1e-12));
    }

    #[test]
    fn measurement_channel_of_random_povm_is_bistochastic() {
        let mut rng = rng_from_seed(14);
        let povm = random_rank_one_povm(3, 6, &mut rng).unwrap();
        let ch = KrausChannel::measurement(&povm).unwrap();
        assert!(ch.flags().trace_residual <= 1e-9);
        assert!(ch.flags().unital_residual <= 1e-9);
    }

    #[test]
    fn unitary_apply_conjugates() {
        let mut rng = rng_from_seed(8);
        let u = random_unitary(3, &mut rng);
        let ch = KrausChannel::unitary(u.clone()).unwrap();
        let rho = random_full_rank_state(3, &mut rng);
        let (out, prob) = ch.apply(&rho).unwrap();
        assert_close(prob, 1.0, 1e-12);
        let expected = u.matmul(rho.matrix()).matmul(&u.adjoint());
        assert!(out.matrix().approx_eq(&expected, 1e-12));
    }

    #[test]
    fn rejects_trace_increasing_map() {
        let e = ComplexMatrix::from_diagonal(&[1.1, 1.0]);
        assert!(matches!(
            KrausChannel::new(vec![e]),
            Err(ChannelError::TraceIncreasing { .. })
        ));
    }

    #[test]
    fn zero_trace_output_detected() {
        // E = |0⟩⟨1| annihilates |0⟩⟨0|.
        let mut e = ComplexMatrix::zeros(2, 2);
        e[(0, 1)] = Complex64::ONE;
        let ch = KrausChannel::new(vec![e]).unwrap();
        let rho = diag_state(&[1.0, 0.0]);
        assert!(matches!(ch.apply(&rho), Err(ChannelError::ZeroTrace)));
    }

    #[test]
    fn contractivity_identity_channel_is_exact() {
        let mut rng = rng_from_seed(12);
        let a = random_full_rank_state(3, &mut rng);
        let b = random_full_rank_state(3, &mut rng);
        let report = contractivity_report(&KrausChannel::identity(3), &a, &b).unwrap();
        for row in &report.rows {
            assert_eq!(row.distance_in, row.distance_out);
            assert!(!row.violated);
        }
        assert!(report.submajorized);
    }

    // Independent diagonal oracle for the non-contractivity witness: the
    // channel relabels basis states, so input and output distances reduce to
    // sorted-gap arithmetic on the diagonals.
    #[test]
    fn coarse_graining_witness_values() {
        let rho = diag_state(&[0.2, 0.2, 0.2, 0.2, 0.2]);
        let sigma = diag_state(&[0.0, 0.0, 0.0, 0.5, 0.5]);

        // Oracle: input gaps |0.2−0| ×3, |0.2−0.5| ×2 → sorted (.3,.3,.2,.2,.2);
        // output diagonals (0.6, 0.4) vs (0, 1) → gaps (0.6, 0.6).
        let gaps_in = {
            let mut g = vec![0.2f64, 0.2, 0.2, 0.3, 0.3];
            g.sort_by(|a, b| b.partial_cmp(a).unwrap());
            g
        };
        let prefix = |g: &[f64], k: usize| 0.5 * g[..k].iter().sum::<f64>();
        assert_close(prefix(&gaps_in, 1), 0.15, 1e-15);
        assert_close(prefix(&gaps_in, 2), 0.30, 1e-15);
        assert_close(prefix(&gaps_in, 5), 0.60, 1e-15);

        let ch = KrausChannel::coarse_graining(5, &[0, 0, 0, 1, 1]).unwrap();
        let report = contractivity_report(&ch, &rho, &sigma).unwrap();
        assert_close(report.rows[0].distance_in, 0.15, 1e-12);
        assert_close(report.rows[0].distance_out, 0.30, 1e-12);
        assert!(report.rows[0].violated);
        assert_close(report.rows[1].distance_in, 0.30, 1e-12);
        assert_close(report.rows[1].distance_out, 0.60, 1e-12);
        assert!(report.rows[1].violated);
        assert_close(report.rows[4].distance_in, 0.60, 1e-12);
        assert_close(report.rows[4].distance_out, 0.60, 1e-12);
        assert!(!report.rows[4].violated);
        assert!(!report.submajorized);

        let expected_spectrum_in = [0.3, 0.3, 0.2, 0.2, 0.2];
        let expected_spectrum_out = [0.6, 0.6, 0.0, 0.0, 0.0];
        for (s, e) in report.spectrum_in.iter().zip(expected_spectrum_in) {
            assert_close(*s, e, 1e-12);
        }
        for (s, e) in report.spectrum_out.iter().zip(expected_spectrum_out) {
            assert_close(*s, e, 1e-12);
        }
    }

    #[test]
    fn bistochastic_channels_contract_every_k() {
        let mut rng = rng_from_seed(33);
        for _ in 0..10 {
            let dim = rng.random_range(2..=4);
            let ch = random_bistochastic(dim, &mut rng).unwrap();
            assert!(ch.flags().bistochastic());
            let a = random_full_rank_state(dim, &mut rng);
            let b = random_full_rank_state(dim, &mut rng);
            let report = contractivity_report(&ch, &a, &b).unwrap();
            assert!(!report.any_violation(), "worst {}", report.worst_increase);
            assert!(report.submajorized);
        }
    }

    #[test]
    fn subunital_nonincreasing_channels_contract_raw() {
        let mut rng = rng_from_seed(44);
        for _ in 0..10 {
            let dim = rng.random_range(2..=4);
            let ch = random_subunital_nonincreasing(dim, &mut rng).unwrap();
            let f = ch.flags();
            assert!(f.subunital && f.trace_nonincreasing && !f.trace_preserving);
            let a = random_full_rank_state(dim, &mut rng);
            let b = random_full_rank_state(dim, &mut rng);
            let report = contractivity_report_raw(&ch, &a, &b).unwrap();
            assert!(!report.any_violation(), "worst {}", report.worst_increase);
            assert!(report.submajorized);
        }
    }

    #[test]
    fn generic_tpcp_contracts_whole_trace_distance() {
        let mut rng = rng_from_seed(55);
        for _ in 0..10 {
            let dim = rng.random_range(2..=4);
            let ch = random_trace_preserving(dim, 3, &mut rng).unwrap();
            assert!(ch.flags().trace_preserving);
            let a = random_full_rank_state(dim, &mut rng);
            let b = random_full_rank_state(dim, &mut rng);
            let report = contractivity_report(&ch, &a, &b).unwrap();
            let last = report.rows.last().unwrap();
            assert!(last.distance_out <= last.distance_in + 1e-9);
        }
    }

    #[test]
    fn raw_report_requires_nothing_but_shape() {
        // Trace-preserving channels work through the raw comparison too and
        // agree with the normalized one.
        let mut rng = rng_from_seed(66);
        let ch = random_unitary_mixture(3, &mut rng).unwrap();
        let a = random_full_rank_state(3, &mut rng);
        let b = random_full_rank_state(3, &mut rng);
        let normalized = contractivity_report(&ch, &a, &b).unwrap();
        let raw = contractivity_report_raw(&ch, &a, &b).unwrap();
        for (x, y) in normalized.rows.iter().zip(&raw.rows) {
            assert_close(x.distance_out, y.distance_out, 1e-10);
        }
    }

    #[test]
    fn normalized_report_rejects_non_tp() {
        let mut rng = rng_from_seed(77);
        let ch = random_subunital_nonincreasing(3, &mut rng).unwrap();
        let a = random_full_rank_state(3, &mut rng);
        let b = random_full_rank_state(3, &mut rng);
        assert!(matches!(
            contractivity_report(&ch, &a, &b),
            Err(ChannelError::NotTracePreserving)
        ));
    }

    #[test]
    fn parameter_ranges_enforced() {
        assert!(matches!(
            KrausChannel::depolarizing(2, 1.5),
            Err(ChannelError::ParameterOutOfRange { .. })
        ));
        assert!(matches!(
            KrausChannel::amplitude_damping(-0.1),
            Err(ChannelError::ParameterOutOfRange { .. })
        ));
        assert!(matches!(
            KrausChannel::coarse_graining(2, &[0, 2]),
            Err(ChannelError::ParameterOutOfRange { .. })
        ));
    }
}
