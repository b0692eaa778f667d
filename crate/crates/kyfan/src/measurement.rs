//! POVMs, measurement statistics on state pairs, and the extremal
//! measurement that exhausts every partitioned trace distance.
//!
//! The central fact this module exercises numerically: over POVMs whose
//! elements all have trace at most one, the largest per-k classical distance
//! between outcome distributions equals the k-th partitioned trace distance,
//! and the eigenbasis of ρ − ϱ attains it for every k simultaneously.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::distance::{
    classical_partitioned_distance, jordan_decomposition, partitioned_distance, DistanceError,
};
use crate::eigen::{hermitian_eigensystem, EigenError};
use crate::exec::run_trials;
use crate::matrix::ComplexMatrix;
use crate::random::{derive_seed, rng_from_seed};
use crate::state::DensityMatrix;
use crate::tol;

#[derive(Debug, Error)]
pub enum MeasurementError {
    #[error("POVM must contain at least one element")]
    Empty,
    #[error("element {index} is not Hermitian (residual {residual:.3e})")]
    ElementNotHermitian { index: usize, residual: f64 },
    #[error("element {index} is not positive semidefinite (eigenvalue {min_eigenvalue:.3e})")]
    ElementNotPositive { index: usize, min_eigenvalue: f64 },
    #[error("elements do not sum to the identity (residual {residual:.3e})")]
    CompletenessViolated { residual: f64 },
    #[error("element {index} has shape {rows}x{cols}, expected {dim}x{dim}")]
    ShapeMismatch {
        index: usize,
        rows: usize,
        cols: usize,
        dim: usize,
    },
    #[error("state dimension {state_dim} does not match POVM dimension {povm_dim}")]
    DimensionMismatch { state_dim: usize, povm_dim: usize },
    #[error("need at least {dim} outcomes for dimension {dim}, got {outcomes}")]
    TooFewOutcomes { dim: usize, outcomes: usize },
    #[error("normalizer stayed near-singular after {attempts} resampling attempts")]
    SingularNormalizer { attempts: usize },
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Distance(#[from] DistanceError),
}

/// Finite list of positive operators summing to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    dim: usize,
    elements: Vec<ComplexMatrix>,
    traces: Vec<f64>,
    small_trace: bool,
}

impl Povm {
    /// Validate with default tolerances: positivity within [`tol::STATE`],
    /// completeness within [`tol::COMPLETENESS`].
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self, MeasurementError> {
        Self::new_with_tol(elements, tol::STATE, tol::COMPLETENESS)
    }

    pub fn new_with_tol(
        elements: Vec<ComplexMatrix>,
        positivity_tol: f64,
        completeness_tol: f64,
    ) -> Result<Self, MeasurementError> {
        let first = elements.first().ok_or(MeasurementError::Empty)?;
        let dim = first.rows();
        for (index, m) in elements.iter().enumerate() {
            if !m.is_square() || m.rows() != dim {
                return Err(MeasurementError::ShapeMismatch {
                    index,
                    rows: m.rows(),
                    cols: m.cols(),
                    dim,
                });
            }
            let residual = m.hermiticity_residual();
            if residual > positivity_tol {
                return Err(MeasurementError::ElementNotHermitian { index, residual });
            }
            let eig = hermitian_eigensystem(m)?;
            let min_eigenvalue = *eig.eigenvalues.last().expect("non-empty");
            if min_eigenvalue < -positivity_tol {
                return Err(MeasurementError::ElementNotPositive {
                    index,
                    min_eigenvalue,
                });
            }
        }
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for m in &elements {
            sum = &sum + m;
        }
        let residual = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if residual > completeness_tol {
            return Err(MeasurementError::CompletenessViolated { residual });
        }
        let traces: Vec<f64> = elements.iter().map(|m| m.trace().re).collect();
        let small_trace = traces.iter().all(|&t| t <= 1.0 + completeness_tol);
        Ok(Self {
            dim,
            elements,
            traces,
            small_trace,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_outcomes(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn traces(&self) -> &[f64] {
        &self.traces
    }

    /// Whether every element satisfies `tr(M_m) ≤ 1`; rank-one POVMs always do.
    pub fn small_trace(&self) -> bool {
        self.small_trace
    }

    /// Outcome distribution `p_m = tr(M_m ρ)` for a single state.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>, MeasurementError> {
        if rho.dim() != self.dim {
            return Err(MeasurementError::DimensionMismatch {
                state_dim: rho.dim(),
                povm_dim: self.dim,
            });
        }
        Ok(self
            .elements
            .iter()
            .map(|m| m.trace_product(rho.matrix()).re)
            .collect())
    }
}

/// Outcome distributions for a state pair plus their sorted gaps.
#[derive(Debug, Clone)]
pub struct MeasurementStats {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    /// `|p_m − q_m|` in decreasing order, zero-padded to `max(n, d)` so it is
    /// directly comparable against the singular values of ρ − ϱ.
    pub gaps_sorted: Vec<f64>,
}

/// Measure both states and collect the gap vector.
pub fn measure_pair(
    povm: &Povm,
    a: &DensityMatrix,
    b: &DensityMatrix,
) -> Result<MeasurementStats, MeasurementError> {
    if a.dim() != b.dim() {
        return Err(MeasurementError::DimensionMismatch {
            state_dim: b.dim(),
            povm_dim: a.dim(),
        });
    }
    let p = povm.probabilities(a)?;
    let q = povm.probabilities(b)?;
    let mut gaps_sorted: Vec<f64> = p.iter().zip(&q).map(|(x, y)| (x - y).abs()).collect();
    gaps_sorted.sort_by(|x, y| y.partial_cmp(x).unwrap());
    gaps_sorted.resize(povm.n_outcomes().max(a.dim()), 0.0);
    Ok(MeasurementStats { p, q, gaps_sorted })
}

/// The projector-valued measure onto the eigenbasis of ρ − ϱ.
///
/// Support eigenvectors contribute gaps equal to the singular values of the
/// difference; kernel eigenvectors complete the measure and contribute zero
/// gaps. For this PVM the sorted gaps reproduce the singular-value vector
/// entrywise, so it saturates every partitioned trace distance at once.
pub fn optimal_pvm(a: &DensityMatrix, b: &DensityMatrix) -> Result<Povm, MeasurementError> {
    let jordan = jordan_decomposition(a, b)?;
    let mut elements = Vec::with_capacity(a.dim());
    for i in 0..jordan.kappa.len() {
        let v = jordan.positive_vector(i);
        elements.push(ComplexMatrix::outer(&v, &v));
    }
    for i in 0..jordan.tau.len() {
        let v = jordan.negative_vector(i);
        elements.push(ComplexMatrix::outer(&v, &v));
    }
    for v in jordan.kernel_vectors() {
        elements.push(ComplexMatrix::outer(&v, &v));
    }
    Povm::new(elements)
}

/// Random POVM with rank-one elements: sample `n` Haar-random unit vectors,
/// form `S = Σ |ψ_m⟩⟨ψ_m|`, and return `M_m = S^{-1/2} |ψ_m⟩⟨ψ_m| S^{-1/2}`.
///
/// Every element keeps rank one, hence trace at most one. A near-singular
/// normalizer (smallest eigenvalue under [`tol::NORMALIZER_FLOOR`]) triggers
/// a resample; with `n ≥ dim` outcomes that is almost surely unnecessary.
pub fn random_rank_one_povm(
    dim: usize,
    n_outcomes: usize,
    rng: &mut impl Rng,
) -> Result<Povm, MeasurementError> {
    if n_outcomes < dim {
        return Err(MeasurementError::TooFewOutcomes {
            dim,
            outcomes: n_outcomes,
        });
    }
    const MAX_ATTEMPTS: usize = 32;
    for _ in 0..MAX_ATTEMPTS {
        let vectors: Vec<Vec<Complex64>> = (0..n_outcomes)
            .map(|_| {
                let g = crate::random::ginibre(dim, 1, rng);
                let norm: f64 = g.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                g.entries().iter().map(|z| z / norm).collect()
            })
            .collect();
        let mut normalizer = ComplexMatrix::zeros(dim, dim);
        for v in &vectors {
            normalizer = &normalizer + &ComplexMatrix::outer(v, v);
        }
        let eig = hermitian_eigensystem(&normalizer.hermitian_part())?;
        if eig.eigenvalues.last().copied().unwrap_or(0.0) < tol::NORMALIZER_FLOOR {
            continue;
        }
        let inv_sqrt = eig.apply_spectral(|l| 1.0 / l.sqrt());
        let elements: Vec<ComplexMatrix> = vectors
            .iter()
            .map(|v| {
                let w = inv_sqrt.matvec(v);
                ComplexMatrix::outer(&w, &w)
            })
            .collect();
        return Povm::new(elements);
    }
    Err(MeasurementError::SingularNormalizer {
        attempts: MAX_ATTEMPTS,
    })
}

/// Result of a randomized sweep over small-trace POVMs for one `k`.
#[derive(Debug, Clone)]
pub struct MeasurementBoundReport {
    /// Largest classical distance observed across the sampled POVMs and the
    /// optimal PVM.
    pub max_observed: f64,
    /// The partitioned trace distance `D_k` the observations may not exceed.
    pub bound: f64,
    /// Whether the optimal PVM attained the bound within tolerance.
    pub saturated: bool,
    pub trials: usize,
}

/// Sweep random rank-one POVMs (plus the optimal PVM) and compare the per-k
/// classical distance of their outcome statistics against `D_k`.
///
/// Trials run in parallel with per-trial RNG streams derived from `seed`, so
/// the report is reproducible regardless of thread scheduling.
pub fn verify_measurement_bound(
    a: &DensityMatrix,
    b: &DensityMatrix,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<MeasurementBoundReport, MeasurementError> {
    let bound = partitioned_distance(a, b, k)?;
    let dim = a.dim();

    let sampled: Vec<Result<f64, MeasurementError>> = run_trials(trials, false, |trial| {
        let mut rng = rng_from_seed(derive_seed(seed, trial as u64));
        let n_outcomes = dim + (trial % (dim + 3));
        let povm = random_rank_one_povm(dim, n_outcomes, &mut rng)?;
        let stats = measure_pair(&povm, a, b)?;
        let k_classical = k.min(stats.p.len());
        Ok(classical_partitioned_distance(
            &stats.p,
            &stats.q,
            k_classical,
        )?)
    });

    let mut max_observed = 0.0f64;
    for r in sampled {
        max_observed = max_observed.max(r?);
    }

    let pvm = optimal_pvm(a, b)?;
    let stats = measure_pair(&pvm, a, b)?;
    let attained = classical_partitioned_distance(&stats.p, &stats.q, k.min(stats.p.len()))?;
    max_observed = max_observed.max(attained);

    Ok(MeasurementBoundReport {
        max_observed,
        bound,
        saturated: (attained - bound).abs() <= tol::SWEEP,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_full_rank_state, rng_from_seed};

    fn diag_state(p: &[f64]) -> DensityMatrix {
        DensityMatrix::from_probabilities(p).unwrap()
    }

    #[test]
    fn computational_pvm_is_valid_small_trace() {
        let povm = Povm::new(vec![
            ComplexMatrix::from_diagonal(&[1.0, 0.0]),
            ComplexMatrix::from_diagonal(&[0.0, 1.0]),
        ])
        .unwrap();
        assert!(povm.small_trace());
    }

    #[test]
    fn identity_povm_is_valid_but_not_small_trace() {
        let povm = Povm::new(vec![ComplexMatrix::identity(2)]).unwrap();
        assert!(!povm.small_trace());
        assert!((povm.traces()[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn split_identity_is_small_trace() {
        let half = ComplexMatrix::from_diagonal(&[0.5, 0.5]);
        let povm = Povm::new(vec![half.clone(), half]).unwrap();
        assert!(povm.small_trace());
    }

    #[test]
    fn rejects_negative_element() {
        let err = Povm::new(vec![
            ComplexMatrix::from_diagonal(&[1.5, 0.0]),
            ComplexMatrix::from_diagonal(&[-0.5, 1.0]),
        ])
        .unwrap_err();
        assert!(matches!(
            err,
            MeasurementError::ElementNotPositive { index: 1, .. }
        ));
    }

    #[test]
    fn rejects_incomplete_set() {
        let err = Povm::new(vec![ComplexMatrix::from_diagonal(&[0.5, 0.5])]).unwrap_err();
        assert!(matches!(err, MeasurementError::CompletenessViolated { .. }));
    }

    #[test]
    fn measure_pair_example() {
        let povm = Povm::new(vec![
            ComplexMatrix::from_diagonal(&[1.0, 0.0]),
            ComplexMatrix::from_diagonal(&[0.0, 1.0]),
        ])
        .unwrap();
        let a = diag_state(&[0.5, 0.5]);
        let b = diag_state(&[1.0, 0.0]);
        let stats = measure_pair(&povm, &a, &b).unwrap();
        assert_eq!(stats.p, vec![0.5, 0.5]);
        assert_eq!(stats.q, vec![1.0, 0.0]);
        assert_eq!(stats.gaps_sorted, vec![0.5, 0.5]);
    }

    #[test]
    fn equal_states_have_zero_gaps() {
        let mut rng = rng_from_seed(4);
        let povm = random_rank_one_povm(3, 5, &mut rng).unwrap();
        let a = random_full_rank_state(3, &mut rng);
        let stats = measure_pair(&povm, &a, &a).unwrap();
        assert!(stats.gaps_sorted.iter().all(|&g| g < 1e-14));
    }

    #[test]
    fn optimal_pvm_orthogonal_pure_states() {
        let a = diag_state(&[1.0, 0.0]);
        let b = diag_state(&[0.0, 1.0]);
        let pvm = optimal_pvm(&a, &b).unwrap();
        assert_eq!(pvm.n_outcomes(), 2);
        let stats = measure_pair(&pvm, &a, &b).unwrap();
        assert!((stats.gaps_sorted[0] - 1.0).abs() < 1e-12);
        assert!((stats.gaps_sorted[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn optimal_pvm_of_identical_states_is_complete() {
        let a = diag_state(&[0.3, 0.7]);
        let pvm = optimal_pvm(&a, &a).unwrap();
        assert_eq!(pvm.n_outcomes(), 2);
        let stats = measure_pair(&pvm, &a, &a).unwrap();
        assert!(stats.gaps_sorted.iter().all(|&g| g < 1e-14));
    }

    // The gap vector of the extremal PVM reproduces the singular values of
    // the difference entrywise; checked against the Jordan spectrum.
    #[test]
    fn optimal_pvm_gaps_match_singular_values() {
        let mut rng = rng_from_seed(13);
        for dim in [2, 3, 4] {
            let a = random_full_rank_state(dim, &mut rng);
            let b = random_full_rank_state(dim, &mut rng);
            let pvm = optimal_pvm(&a, &b).unwrap();
            let stats = measure_pair(&pvm, &a, &b).unwrap();
            let jordan = jordan_decomposition(&a, &b).unwrap();
            for (g, s) in stats.gaps_sorted.iter().zip(&jordan.singular_values) {
                assert!((g - s).abs() < 1e-9, "gap {g} vs singular value {s}");
            }
        }
    }

    #[test]
    fn rank_one_povm_properties() {
        let mut rng = rng_from_seed(6);
        let povm = random_rank_one_povm(3, 6, &mut rng).unwrap();
        assert_eq!(povm.n_outcomes(), 6);
        assert!(povm.small_trace());
        for m in povm.elements() {
            let eig = hermitian_eigensystem(m).unwrap();
            // Rank one: a single non-negligible eigenvalue.
            assert!(eig.eigenvalues[0] <= 1.0 + 1e-9);
            for &l in &eig.eigenvalues[1..] {
                assert!(l.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rank_one_povm_deterministic_for_fixed_seed() {
        let p1 = random_rank_one_povm(2, 4, &mut rng_from_seed(77)).unwrap();
        let p2 = random_rank_one_povm(2, 4, &mut rng_from_seed(77)).unwrap();
        for (a, b) in p1.elements().iter().zip(p2.elements()) {
            assert_eq!(a.entries(), b.entries());
        }
    }

    #[test]
    fn too_few_outcomes_rejected() {
        let mut rng = rng_from_seed(1);
        assert!(matches!(
            random_rank_one_povm(3, 2, &mut rng),
            Err(MeasurementError::TooFewOutcomes { .. })
        ));
    }

    #[test]
    fn measurement_bound_on_equal_states() {
        let a = diag_state(&[0.5, 0.5]);
        let report = verify_measurement_bound(&a, &a, 1, 10, 3).unwrap();
        assert!(report.bound.abs() < 1e-12);
        assert!(report.max_observed < 1e-12);
        assert!(report.saturated);
    }

    #[test]
    fn measurement_bound_antipodal_qubits() {
        let a = diag_state(&[1.0, 0.0]);
        let b = diag_state(&[0.0, 1.0]);
        let report = verify_measurement_bound(&a, &b, 1, 50, 11).unwrap();
        assert!((report.bound - 0.5).abs() < 1e-12);
        assert!(report.max_observed <= report.bound + 1e-9);
        assert!(report.saturated);
    }

    #[test]
    fn measurement_bound_random_pair() {
        let mut rng = rng_from_seed(15);
        let a = random_full_rank_state(3, &mut rng);
        let b = random_full_rank_state(3, &mut rng);
        let report = verify_measurement_bound(&a, &b, 2, 100, 19).unwrap();
        assert!(report.max_observed <= report.bound + 1e-9);
        assert!(report.saturated);
    }

    // The small-trace hypothesis is load-bearing: a POVM with a trace-2
    // element can beat D_k for k < d. Recorded here as a demonstration, not
    // asserted as a bound anywhere.
    #[test]
    fn large_trace_povm_can_beat_the_bound() {
        let povm = Povm::new(vec![
            ComplexMatrix::from_diagonal(&[1.0, 1.0, 0.0, 0.0]),
            ComplexMatrix::from_diagonal(&[0.0, 0.0, 1.0, 1.0]),
        ])
        .unwrap();
        assert!(!povm.small_trace());

        let a = diag_state(&[0.4, 0.4, 0.1, 0.1]);
        let b = diag_state(&[0.1, 0.1, 0.4, 0.4]);
        let stats = measure_pair(&povm, &a, &b).unwrap();
        let classical = classical_partitioned_distance(&stats.p, &stats.q, 1).unwrap();
        let bound = partitioned_distance(&a, &b, 1).unwrap();
        // Gaps concentrate two singular values into one outcome: 0.3 > 0.15.
        assert!((classical - 0.3).abs() < 1e-12);
        assert!((bound - 0.15).abs() < 1e-12);
        assert!(classical > bound + 0.1);
    }
}
