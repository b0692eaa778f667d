//! Hermitian eigendecomposition by cyclic Jacobi rotations, and singular
//! values derived from it.
//!
//! The solver runs two-sided unitary rotations that zero one off-diagonal
//! entry at a time, sweeping all `(p, q)` pairs in a fixed cyclic order until
//! the off-diagonal Frobenius mass drops below [`tol::JACOBI_RELATIVE`] times
//! the matrix norm. At the dimensions this crate targets the method converges
//! in a handful of sweeps and keeps eigenvectors orthonormal to machine
//! precision, which the distance layer depends on.

use num_complex::Complex64;
use thiserror::Error;

use crate::matrix::ComplexMatrix;
use crate::tol;

#[derive(Debug, Error)]
pub enum EigenError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("Jacobi iteration did not converge (off-diagonal mass {off_diagonal:.3e})")]
    NoConvergence { off_diagonal: f64 },
}

/// Eigenvalues in decreasing order with matching orthonormal eigenvector
/// columns: `H = V diag(λ) V†`.
#[derive(Debug, Clone)]
pub struct HermitianEigensystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigensystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvector column for eigenvalue index `j`.
    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        self.eigenvectors.column(j)
    }

    /// Rebuild `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.dim();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(d, d, |i, j| {
            (0..d)
                .map(|l| v[(i, l)] * self.eigenvalues[l] * v[(j, l)].conj())
                .sum()
        })
    }

    /// Rebuild `V f(λ) V†` for a spectral function `f`.
    pub fn apply_spectral(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = self.dim();
        let v = &self.eigenvectors;
        let mapped: Vec<f64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        ComplexMatrix::from_fn(d, d, |i, j| {
            (0..d)
                .map(|l| v[(i, l)] * mapped[l] * v[(j, l)].conj())
                .sum()
        })
    }

    /// Projector onto the eigenvector columns listed in `indices`.
    pub fn projector(&self, indices: &[usize]) -> ComplexMatrix {
        let d = self.dim();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(d, d, |i, j| {
            indices.iter().map(|&l| v[(i, l)] * v[(j, l)].conj()).sum()
        })
    }
}

/// Off-diagonal Frobenius mass `sqrt(Σ_{i≠j} |a_ij|²)` of a Hermitian matrix.
fn off_diagonal_mass(a: &ComplexMatrix) -> f64 {
    let d = a.rows();
    let mut acc = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            acc += 2.0 * a[(i, j)].norm_sqr();
        }
    }
    acc.sqrt()
}

/// Diagonalize a Hermitian matrix.
///
/// Accepts inputs Hermitian up to [`tol::HERMITICITY`] (they are symmetrized
/// exactly before iterating) and returns eigenvalues sorted in decreasing
/// order. Ties keep the order in which the solver produced them.
pub fn hermitian_eigensystem(h: &ComplexMatrix) -> Result<HermitianEigensystem, EigenError> {
    if !h.is_square() {
        return Err(EigenError::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let residual = h.hermiticity_residual();
    if residual > tol::HERMITICITY {
        return Err(EigenError::NotHermitian { residual });
    }

    let d = h.rows();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(d);

    let norm = a.frobenius_norm();
    if norm == 0.0 || d == 1 {
        let eigenvalues = (0..d).map(|i| a[(i, i)].re).collect();
        return Ok(HermitianEigensystem {
            eigenvalues,
            eigenvectors: v,
        });
    }
    let threshold = tol::JACOBI_RELATIVE * norm;

    let mut converged = false;
    for _sweep in 0..tol::JACOBI_MAX_SWEEPS {
        if off_diagonal_mass(&a) < threshold {
            converged = true;
            break;
        }
        for p in 0..d - 1 {
            for q in (p + 1)..d {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_mass(&a) >= threshold {
        return Err(EigenError::NoConvergence {
            off_diagonal: off_diagonal_mass(&a),
        });
    }

    // Sort eigenpairs by decreasing eigenvalue; stable sort keeps solver order
    // on ties.
    let mut order: Vec<usize> = (0..d).collect();
    let diag: Vec<f64> = (0..d).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(d, d, |i, j| v[(i, order[j])]);
    Ok(HermitianEigensystem {
        eigenvalues,
        eigenvectors,
    })
}

/// One Jacobi rotation zeroing `a[(p, q)]`, accumulating into `v`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let abs_apq = apq.norm();
    if abs_apq == 0.0 {
        return;
    }
    let phase = apq / abs_apq;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let theta = (app - aqq) / (2.0 * abs_apq);
    // Smaller root of t² + 2θt − 1 = 0; asymptotic form when θ² would overflow.
    let t = if theta.abs() > 1e150 {
        1.0 / (2.0 * theta)
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let d = a.rows();
    for i in 0..d {
        if i == p || i == q {
            continue;
        }
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        let new_ip = c * aip + s * phase.conj() * aiq;
        let new_iq = -s * phase * aip + c * aiq;
        a[(i, p)] = new_ip;
        a[(p, i)] = new_ip.conj();
        a[(i, q)] = new_iq;
        a[(q, i)] = new_iq.conj();
    }
    let new_pp = app * c * c + 2.0 * abs_apq * c * s + aqq * s * s;
    let new_qq = app * s * s - 2.0 * abs_apq * c * s + aqq * c * c;
    a[(p, p)] = Complex64::new(new_pp, 0.0);
    a[(q, q)] = Complex64::new(new_qq, 0.0);
    a[(p, q)] = Complex64::ZERO;
    a[(q, p)] = Complex64::ZERO;

    for i in 0..d {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = c * vip + s * phase.conj() * viq;
        v[(i, q)] = -s * phase * vip + c * viq;
    }
}

/// Singular values in decreasing order.
///
/// Hermitian inputs take the direct route (absolute eigenvalues); everything
/// else goes through the Gram matrix `X†X` with tiny negative eigenvalues
/// clamped to zero before the square root.
pub fn singular_values(x: &ComplexMatrix) -> Result<Vec<f64>, EigenError> {
    if x.is_square() && x.hermiticity_residual() <= tol::HERMITICITY {
        let eig = hermitian_eigensystem(x)?;
        let mut s: Vec<f64> = eig.eigenvalues.iter().map(|l| l.abs()).collect();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        return Ok(s);
    }

    let n = x.cols();
    let gram = ComplexMatrix::from_fn(n, n, |i, j| {
        (0..x.rows())
            .map(|k| x[(k, i)].conj() * x[(k, j)])
            .sum::<Complex64>()
    })
    .hermitian_part();
    let eig = hermitian_eigensystem(&gram)?;
    let count = x.rows().min(x.cols());
    let s = eig
        .eigenvalues
        .iter()
        .take(count)
        .map(|&l| {
            debug_assert!(
                l >= -tol::GRAM_CLAMP,
                "Gram eigenvalue {l} below clamp window"
            );
            l.max(0.0).sqrt()
        })
        .collect();
    Ok(s)
}
