//! Ky Fan norms and the partitioned trace distances they induce.
//!
//! For states ρ and ϱ on a d-dimensional space, the k-th partitioned trace
//! distance is half the sum of the k largest singular values of ρ − ϱ. The
//! k = d member is the ordinary trace distance; k = 1 is half the operator
//! norm. One Jordan decomposition of the difference yields the whole family
//! at once, along with the projector pair that attains each distance.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::eigen::{hermitian_eigensystem, singular_values, EigenError, HermitianEigensystem};
use crate::matrix::ComplexMatrix;
use crate::random::random_unitary;
use crate::state::DensityMatrix;
use crate::tol;

#[derive(Debug, Error)]
pub enum DistanceError {
    #[error("state dimensions differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("k = {k} outside 1..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("vector lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("not a probability distribution: {reason}")]
    NotDistribution { reason: String },
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

fn check_k(k: usize, max: usize) -> Result<(), DistanceError> {
    if k == 0 || k > max {
        Err(DistanceError::KOutOfRange { k, max })
    } else {
        Ok(())
    }
}

fn check_dims(a: &DensityMatrix, b: &DensityMatrix) -> Result<usize, DistanceError> {
    if a.dim() != b.dim() {
        Err(DistanceError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        })
    } else {
        Ok(a.dim())
    }
}

/// Sum of the `k` largest singular values. `k = 1` is the operator norm,
/// `k = min(rows, cols)` the trace norm.
pub fn ky_fan_norm(x: &ComplexMatrix, k: usize) -> Result<f64, DistanceError> {
    check_k(k, x.rows().min(x.cols()))?;
    let s = singular_values(x)?;
    Ok(s[..k].iter().sum())
}

/// The full vector `(D_1, …, D_d)` for one state pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceProfile {
    values: Vec<f64>,
}

impl DistanceProfile {
    /// Half prefix sums of a decreasing singular-value vector.
    pub(crate) fn from_singular_values(s: &[f64]) -> Self {
        let mut values = Vec::with_capacity(s.len());
        let mut acc = 0.0;
        for &x in s {
            acc += 0.5 * x;
            values.push(acc);
        }
        Self { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `D_k` for 1-based `k`.
    pub fn get(&self, k: usize) -> Result<f64, DistanceError> {
        check_k(k, self.values.len())?;
        Ok(self.values[k - 1])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Whole trace distance `D_d`.
    pub fn trace_distance(&self) -> f64 {
        *self.values.last().expect("non-empty profile")
    }

    /// Extend to length `len`, holding `D_k` constant at `D_d` past the
    /// space's own dimension. Used when comparing profiles across spaces of
    /// different size.
    pub fn padded(&self, len: usize) -> Self {
        let mut values = self.values.clone();
        let last = self.trace_distance();
        values.resize(len.max(values.len()), last);
        Self { values }
    }
}

/// Splitting of ρ − ϱ into positive parts `R − T` with orthogonal supports,
/// together with their spectra and the merged singular values.
#[derive(Debug, Clone)]
pub struct JordanDecomposition {
    dim: usize,
    /// R, carrying the positive eigenvalues of the difference.
    pub positive_part: ComplexMatrix,
    /// T, carrying the negated negative eigenvalues.
    pub negative_part: ComplexMatrix,
    /// Decreasing positive eigenvalues of R.
    pub kappa: Vec<f64>,
    /// Decreasing positive eigenvalues of T.
    pub tau: Vec<f64>,
    /// Decreasing merge of `kappa` and `tau`, zero-padded to length d.
    pub singular_values: Vec<f64>,
    eigensystem: HermitianEigensystem,
    positive_columns: Vec<usize>,
    negative_columns: Vec<usize>,
    kernel_columns: Vec<usize>,
}

impl JordanDecomposition {
    /// Decompose ρ − ϱ. Eigenvalues within [`tol::KERNEL`] of zero are
    /// assigned to neither support.
    pub fn new(a: &DensityMatrix, b: &DensityMatrix) -> Result<Self, DistanceError> {
        let dim = check_dims(a, b)?;
        let diff = a.matrix() - b.matrix();
        let eigensystem = hermitian_eigensystem(&diff)?;

        let mut positive_columns = Vec::new();
        let mut negative_columns = Vec::new();
        let mut kernel_columns = Vec::new();
        for (j, &lambda) in eigensystem.eigenvalues.iter().enumerate() {
            if lambda > tol::KERNEL {
                positive_columns.push(j);
            } else if lambda < -tol::KERNEL {
                negative_columns.push(j);
            } else {
                kernel_columns.push(j);
            }
        }
        // Eigenvalues arrive in decreasing order, so kappa is already sorted
        // and the negative block must be reversed to sort |tau| decreasingly.
        negative_columns.reverse();

        let kappa: Vec<f64> = positive_columns
            .iter()
            .map(|&j| eigensystem.eigenvalues[j])
            .collect();
        let tau: Vec<f64> = negative_columns
            .iter()
            .map(|&j| -eigensystem.eigenvalues[j])
            .collect();

        let mut singular_values = Vec::with_capacity(dim);
        let (mut i, mut j) = (0, 0);
        while i < kappa.len() || j < tau.len() {
            if j >= tau.len() || (i < kappa.len() && kappa[i] >= tau[j]) {
                singular_values.push(kappa[i]);
                i += 1;
            } else {
                singular_values.push(tau[j]);
                j += 1;
            }
        }
        singular_values.resize(dim, 0.0);

        let positive_part = sum_weighted_projectors(&eigensystem, &positive_columns, &kappa, dim);
        let negative_part = sum_weighted_projectors(&eigensystem, &negative_columns, &tau, dim);

        Ok(Self {
            dim,
            positive_part,
            negative_part,
            kappa,
            tau,
            singular_values,
            eigensystem,
            positive_columns,
            negative_columns,
            kernel_columns,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Eigenvector for `kappa[i]`.
    pub fn positive_vector(&self, i: usize) -> Vec<Complex64> {
        self.eigensystem.vector(self.positive_columns[i])
    }

    /// Eigenvector for `tau[i]`.
    pub fn negative_vector(&self, i: usize) -> Vec<Complex64> {
        self.eigensystem.vector(self.negative_columns[i])
    }

    /// Orthonormal basis of the kernel of the difference.
    pub fn kernel_vectors(&self) -> Vec<Vec<Complex64>> {
        self.kernel_columns
            .iter()
            .map(|&j| self.eigensystem.vector(j))
            .collect()
    }

    /// Distance profile derived from these singular values.
    pub fn profile(&self) -> DistanceProfile {
        DistanceProfile::from_singular_values(&self.singular_values)
    }
}

fn sum_weighted_projectors(
    eig: &HermitianEigensystem,
    columns: &[usize],
    weights: &[f64],
    dim: usize,
) -> ComplexMatrix {
    let v = &eig.eigenvectors;
    ComplexMatrix::from_fn(dim, dim, |i, j| {
        columns
            .iter()
            .zip(weights)
            .map(|(&l, &w)| v[(i, l)] * w * v[(j, l)].conj())
            .sum()
    })
}

/// Convenience wrapper around [`JordanDecomposition::new`].
pub fn jordan_decomposition(
    a: &DensityMatrix,
    b: &DensityMatrix,
) -> Result<JordanDecomposition, DistanceError> {
    JordanDecomposition::new(a, b)
}

/// The k-th partitioned trace distance `(1/2) Σ_{j≤k} s_j(ρ − ϱ)`.
///
/// Singular values come from the Hermitian eigendecomposition of the
/// difference directly, never from a Gram matrix.
pub fn partitioned_distance(
    a: &DensityMatrix,
    b: &DensityMatrix,
    k: usize,
) -> Result<f64, DistanceError> {
    let dim = check_dims(a, b)?;
    check_k(k, dim)?;
    let jordan = JordanDecomposition::new(a, b)?;
    Ok(jordan.profile().values()[k - 1])
}

/// Ordinary trace distance, the `k = d` member of the family.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64, DistanceError> {
    let dim = check_dims(a, b)?;
    partitioned_distance(a, b, dim)
}

/// All partitioned distances from a single eigendecomposition, so ties are
/// resolved consistently across k.
pub fn distance_profile(
    a: &DensityMatrix,
    b: &DensityMatrix,
) -> Result<DistanceProfile, DistanceError> {
    Ok(JordanDecomposition::new(a, b)?.profile())
}

/// Per-k distance between probability vectors: half the sum of the k largest
/// `|p_i − q_i|`. `k = n` is the ordinary L1 (Kolmogorov) distance.
///
/// Inputs may carry rounding from measurement simulations; sums within 1e-9
/// of one are renormalized, anything worse is rejected.
pub fn classical_partitioned_distance(
    p: &[f64],
    q: &[f64],
    k: usize,
) -> Result<f64, DistanceError> {
    if p.len() != q.len() {
        return Err(DistanceError::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    check_k(k, p.len())?;
    let p = normalized_distribution(p)?;
    let q = normalized_distribution(q)?;
    let mut gaps: Vec<f64> = p.iter().zip(&q).map(|(a, b)| (a - b).abs()).collect();
    gaps.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(0.5 * gaps[..k].iter().sum::<f64>())
}

/// L1 distance between probability vectors.
pub fn l1_distance(p: &[f64], q: &[f64]) -> Result<f64, DistanceError> {
    classical_partitioned_distance(p, q, p.len().max(1))
}

fn normalized_distribution(p: &[f64]) -> Result<Vec<f64>, DistanceError> {
    for (i, &x) in p.iter().enumerate() {
        if x < -1e-12 {
            return Err(DistanceError::NotDistribution {
                reason: format!("entry {i} is {x:.3e}"),
            });
        }
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(DistanceError::NotDistribution {
            reason: format!("sum is {total}"),
        });
    }
    Ok(p.iter().map(|&x| x.max(0.0) / total).collect())
}

/// Projector pair `(P_R, P_T)` with `tr[(P_R − P_T)(ρ − ϱ)] = 2 D_k`.
///
/// `P_R` spans the R-side eigenvectors whose eigenvalues rank among the k
/// largest singular values, `P_T` the T-side ones. Ties at the cut prefer the
/// R side, then solver order; zero singular values contribute no projector,
/// so the combined rank can fall below k.
pub fn optimal_projectors(
    a: &DensityMatrix,
    b: &DensityMatrix,
    k: usize,
) -> Result<(ComplexMatrix, ComplexMatrix), DistanceError> {
    let dim = check_dims(a, b)?;
    check_k(k, dim)?;
    let jordan = JordanDecomposition::new(a, b)?;

    #[derive(Clone, Copy)]
    struct Candidate {
        value: f64,
        is_negative_side: bool,
        index: usize,
    }
    let mut candidates: Vec<Candidate> = Vec::new();
    for (i, &v) in jordan.kappa.iter().enumerate() {
        candidates.push(Candidate {
            value: v,
            is_negative_side: false,
            index: i,
        });
    }
    for (i, &v) in jordan.tau.iter().enumerate() {
        candidates.push(Candidate {
            value: v,
            is_negative_side: true,
            index: i,
        });
    }
    candidates.sort_by(|x, y| {
        y.value
            .partial_cmp(&x.value)
            .unwrap()
            .then(x.is_negative_side.cmp(&y.is_negative_side))
            .then(x.index.cmp(&y.index))
    });

    let mut p_r = ComplexMatrix::zeros(dim, dim);
    let mut p_t = ComplexMatrix::zeros(dim, dim);
    for cand in candidates.into_iter().take(k) {
        let vec = if cand.is_negative_side {
            jordan.negative_vector(cand.index)
        } else {
            jordan.positive_vector(cand.index)
        };
        let proj = ComplexMatrix::outer(&vec, &vec);
        if cand.is_negative_side {
            p_t = &p_t + &proj;
        } else {
            p_r = &p_r + &proj;
        }
    }
    Ok((p_r, p_t))
}

/// Sum of the k largest eigenvalues of a Hermitian matrix.
pub fn top_eigenvalue_sum(h: &ComplexMatrix, k: usize) -> Result<f64, DistanceError> {
    if !h.is_square() || h.hermiticity_residual() > tol::HERMITICITY {
        return Err(DistanceError::Eigen(EigenError::NotHermitian {
            residual: h.hermiticity_residual(),
        }));
    }
    check_k(k, h.rows())?;
    let eig = hermitian_eigensystem(h)?;
    Ok(eig.eigenvalues[..k].iter().sum())
}

/// Randomized check of the extremal characterization behind
/// [`top_eigenvalue_sum`]: the maximum of `tr(Θ H)` over operators
/// `0 ≤ Θ ≤ 1` with `tr Θ = k` equals the top-k eigenvalue sum.
///
/// Samples random rank-k projectors and random constrained operators, always
/// including the projector onto the top-k eigenvectors (which attains the
/// maximum), and returns the largest trace observed.
pub fn max_over_constrained_operators(
    h: &ComplexMatrix,
    k: usize,
    trials: usize,
    rng: &mut impl Rng,
) -> Result<f64, DistanceError> {
    if !h.is_square() || h.hermiticity_residual() > tol::HERMITICITY {
        return Err(DistanceError::Eigen(EigenError::NotHermitian {
            residual: h.hermiticity_residual(),
        }));
    }
    let dim = h.rows();
    check_k(k, dim)?;

    let eig = hermitian_eigensystem(h)?;
    let mut best = (0..k)
        .map(|j| h.quadratic_form(&eig.vector(j)).re)
        .sum::<f64>();

    for trial in 0..trials {
        let value = if trial % 2 == 0 {
            // Random rank-k projector from k Haar-orthonormal columns.
            let u = random_unitary(dim, rng);
            (0..k).map(|j| h.quadratic_form(&u.column(j)).re).sum()
        } else {
            // Random 0 ≤ Θ ≤ 1 with tr Θ = k: Haar basis plus a spectrum
            // projected onto the box-constrained simplex by a bisection shift.
            let u = random_unitary(dim, rng);
            let spectrum = box_simplex_sample(dim, k, rng);
            (0..dim)
                .map(|j| spectrum[j] * h.quadratic_form(&u.column(j)).re)
                .sum()
        };
        best = best.max(value);
    }
    Ok(best)
}

/// Uniform draw in `[0,1]^dim` shifted so the clamped coordinates sum to `k`.
fn box_simplex_sample(dim: usize, k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    let target = k as f64;
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        let total: f64 = raw.iter().map(|&x| (x + mid).clamp(0.0, 1.0)).sum();
        if total < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let shift = 0.5 * (lo + hi);
    raw.iter().map(|&x| (x + shift).clamp(0.0, 1.0)).collect()
}
