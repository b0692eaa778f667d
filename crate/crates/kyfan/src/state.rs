//! Validated density matrices and the qubit Bloch-vector correspondence.

use num_complex::Complex64;
use thiserror::Error;

use crate::eigen::{hermitian_eigensystem, EigenError};
use crate::matrix::ComplexMatrix;
use crate::tol;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("trace differs from one by {deviation:+.3e}")]
    TraceNotOne { deviation: f64 },
    #[error("expected dimension {expected}, found {found}")]
    WrongDimension { expected: usize, found: usize },
    #[error("Bloch vector length {length} exceeds the unit ball")]
    OutsideBall { length: f64 },
    #[error("rank {rank} invalid for dimension {dim}")]
    InvalidRank { dim: usize, rank: usize },
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

/// A Hermitian, positive semidefinite, unit-trace matrix. Construction always
/// validates, so a value of this type is a usable quantum state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validate with the default tolerance [`tol::STATE`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self, StateError> {
        Self::new_with_tol(matrix, tol::STATE)
    }

    /// Validate with an explicit tolerance. Checks run in order: shape,
    /// Hermiticity, unit trace, positivity; the first violation is reported
    /// with its magnitude.
    pub fn new_with_tol(matrix: ComplexMatrix, tolerance: f64) -> Result<Self, StateError> {
        if !matrix.is_square() {
            return Err(StateError::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let residual = matrix.hermiticity_residual();
        if residual > tolerance {
            return Err(StateError::NotHermitian { residual });
        }
        let deviation = matrix.trace().re - 1.0;
        if deviation.abs() > tolerance {
            return Err(StateError::TraceNotOne { deviation });
        }
        let eig = hermitian_eigensystem(&matrix)?;
        let min_eigenvalue = *eig.eigenvalues.last().expect("non-empty spectrum");
        if min_eigenvalue < -tolerance {
            return Err(StateError::NotPositive { min_eigenvalue });
        }
        Ok(Self {
            dim: matrix.rows(),
            matrix,
        })
    }

    /// Pure state `|ψ⟩⟨ψ|` from an (unnormalized) state vector.
    pub fn from_vector(psi: &[Complex64]) -> Result<Self, StateError> {
        let norm_sqr: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm_sqr <= 0.0 {
            return Err(StateError::NotPositive {
                min_eigenvalue: 0.0,
            });
        }
        let m = ComplexMatrix::outer(psi, psi).scale_real(1.0 / norm_sqr);
        Self::new(m)
    }

    /// Diagonal state from a probability vector (renormalized internally).
    pub fn from_probabilities(p: &[f64]) -> Result<Self, StateError> {
        let total: f64 = p.iter().sum();
        if total <= 0.0 {
            return Err(StateError::TraceNotOne { deviation: -1.0 });
        }
        let scaled: Vec<f64> = p.iter().map(|&x| x / total).collect();
        Self::new(ComplexMatrix::from_diagonal(&scaled))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `tr(ρ²)`; equals 1 exactly for pure states.
    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    /// Conjugate by a unitary: `U ρ U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self, StateError> {
        let m = u.matmul(&self.matrix).matmul(&u.adjoint());
        Self::new(m.hermitian_part())
    }
}

/// Real three-vector `u` with `|u| ≤ 1`, identifying the qubit state
/// `(1 + u·σ)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn length(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Euclidean distance `|u − v|`.
    pub fn distance(&self, other: &Self) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// Build the qubit state `(1 + u·σ)/2`.
pub fn qubit_from_bloch(u: &BlochVector) -> Result<DensityMatrix, StateError> {
    let length = u.length();
    if length > 1.0 + tol::STATE {
        return Err(StateError::OutsideBall { length });
    }
    let m = ComplexMatrix::new(
        2,
        2,
        vec![
            Complex64::new(0.5 * (1.0 + u.z), 0.0),
            Complex64::new(0.5 * u.x, -0.5 * u.y),
            Complex64::new(0.5 * u.x, 0.5 * u.y),
            Complex64::new(0.5 * (1.0 - u.z), 0.0),
        ],
    )
    .expect("finite entries");
    // A length within rounding of 1 can put the smallest eigenvalue a hair
    // below zero; validation tolerance absorbs that.
    DensityMatrix::new(m)
}

/// Read off `u_a = tr(ρ σ_a)` from a qubit state.
pub fn bloch_from_qubit(rho: &DensityMatrix) -> Result<BlochVector, StateError> {
    if rho.dim() != 2 {
        return Err(StateError::WrongDimension {
            expected: 2,
            found: rho.dim(),
        });
    }
    let m = rho.matrix();
    let x = (m[(0, 1)] + m[(1, 0)]).re;
    let y = -(m[(0, 1)] - m[(1, 0)]).im;
    let z = (m[(0, 0)] - m[(1, 1)]).re;
    Ok(BlochVector::new(x, y, z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_maximally_mixed() {
        let m = ComplexMatrix::from_diagonal(&[0.5, 0.5]);
        assert!(DensityMatrix::new(m).is_ok());
    }

    #[test]
    fn rejects_negative_eigenvalue() {
        let m = ComplexMatrix::from_diagonal(&[1.5, -0.5]);
        match DensityMatrix::new(m) {
            Err(StateError::NotPositive { min_eigenvalue }) => {
                assert!((min_eigenvalue + 0.5).abs() < 1e-12);
            }
            other => panic!("expected NotPositive, got {other:?}"),
        }
    }

    #[test]
    fn rejects_wrong_trace() {
        let m = ComplexMatrix::from_diagonal(&[0.6, 0.6]);
        match DensityMatrix::new(m) {
            Err(StateError::TraceNotOne { deviation }) => {
                assert!((deviation - 0.2).abs() < 1e-12);
            }
            other => panic!("expected TraceNotOne, got {other:?}"),
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.5, 0.3], &[0.0, 0.5]]);
        assert!(matches!(
            DensityMatrix::new(m),
            Err(StateError::NotHermitian { .. })
        ));
    }

    #[test]
    fn bloch_north_pole() {
        let rho = qubit_from_bloch(&BlochVector::new(0.0, 0.0, 1.0)).unwrap();
        assert!(rho
            .matrix()
            .approx_eq(&ComplexMatrix::from_diagonal(&[1.0, 0.0]), 1e-15));
    }

    #[test]
    fn bloch_origin_is_maximally_mixed() {
        let rho = qubit_from_bloch(&BlochVector::new(0.0, 0.0, 0.0)).unwrap();
        assert!(rho
            .matrix()
            .approx_eq(&ComplexMatrix::from_diagonal(&[0.5, 0.5]), 1e-15));
    }

    #[test]
    fn bloch_x_axis() {
        let rho = qubit_from_bloch(&BlochVector::new(1.0, 0.0, 0.0)).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!(rho.matrix().approx_eq(&expected, 1e-15));
    }

    #[test]
    fn bloch_round_trip_examples() {
        for (m, expected) in [
            (ComplexMatrix::from_diagonal(&[1.0, 0.0]), (0.0, 0.0, 1.0)),
            (ComplexMatrix::from_diagonal(&[0.5, 0.5]), (0.0, 0.0, 0.0)),
            (
                ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]),
                (1.0, 0.0, 0.0),
            ),
        ] {
            let u = bloch_from_qubit(&DensityMatrix::new(m).unwrap()).unwrap();
            assert!((u.x - expected.0).abs() < 1e-12);
            assert!((u.y - expected.1).abs() < 1e-12);
            assert!((u.z - expected.2).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_outside_ball() {
        assert!(matches!(
            qubit_from_bloch(&BlochVector::new(0.8, 0.8, 0.8)),
            Err(StateError::OutsideBall { .. })
        ));
    }

    #[test]
    fn wrong_dimension_for_bloch_readout() {
        let rho = DensityMatrix::from_probabilities(&[0.4, 0.3, 0.3]).unwrap();
        assert!(matches!(
            bloch_from_qubit(&rho),
            Err(StateError::WrongDimension { .. })
        ));
    }
}
