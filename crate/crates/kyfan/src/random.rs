//! Seeded sampling of unitaries, states, and probability vectors.
//!
//! All randomness flows through [`ChaCha12Rng`] seeded explicitly, so every
//! randomized suite in this crate is replayable: the same seed produces
//! bit-identical samples. Independent streams for parallel trials come from
//! [`derive_seed`], which mixes a base seed with the trial index.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::matrix::ComplexMatrix;
use crate::state::{DensityMatrix, StateError};
use crate::tol;

/// The crate-wide deterministic generator.
pub type SeededRng = ChaCha12Rng;

/// Fresh generator for a bare seed.
pub fn rng_from_seed(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// Stream seed for trial `index` under a base seed (SplitMix64 finalizer, so
/// neighbouring indices land far apart).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e3779b97f4a7c15);
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Standard complex Gaussian entry (independent N(0,1) components).
fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix of independent standard complex Gaussians.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Orthonormalize the columns of a tall matrix by modified Gram-Schmidt.
/// Two passes keep orthonormality at machine level, and the positive real
/// diagonal the process produces for the triangular factor is exactly the
/// phase convention Haar sampling needs.
fn orthonormalize_columns(g: &ComplexMatrix) -> ComplexMatrix {
    let (rows, cols) = (g.rows(), g.cols());
    let mut v: Vec<Vec<Complex64>> = (0..cols).map(|j| g.column(j)).collect();
    for j in 0..cols {
        for _ in 0..2 {
            for i in 0..j {
                let proj: Complex64 = v[i].iter().zip(&v[j]).map(|(a, b)| a.conj() * b).sum();
                let corrections: Vec<Complex64> = v[i].iter().map(|&x| proj * x).collect();
                for (target, correction) in v[j].iter_mut().zip(corrections) {
                    *target -= correction;
                }
            }
        }
        let norm: f64 = v[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v[j] {
            *z /= norm;
        }
    }
    ComplexMatrix::from_fn(rows, cols, |i, j| v[j][i])
}

/// Haar-distributed unitary: orthonormalized Ginibre sample.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    assert!(dim >= 1, "dimension must be positive");
    orthonormalize_columns(&ginibre(dim, dim, rng))
}

/// Haar-random isometry (`rows ≥ cols` columns of an orthonormal frame):
/// satisfies `V†V = 1`.
pub fn random_isometry(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    assert!(rows >= cols && cols >= 1, "need rows ≥ cols ≥ 1");
    orthonormalize_columns(&ginibre(rows, cols, rng))
}

/// Random density matrix `G G† / tr(G G†)` with `G` a `dim × rank` Ginibre
/// sample; rank 1 gives Haar-random pure states.
pub fn random_density_matrix(
    dim: usize,
    rank: usize,
    rng: &mut impl Rng,
) -> Result<DensityMatrix, StateError> {
    if rank == 0 || rank > dim {
        return Err(StateError::InvalidRank { dim, rank });
    }
    let g = ginibre(dim, rank, rng);
    let mut m = ComplexMatrix::from_fn(dim, dim, |i, j| {
        (0..rank)
            .map(|k| g[(i, k)] * g[(j, k)].conj())
            .sum::<Complex64>()
    })
    .hermitian_part();
    let trace = m.trace().re;
    m = m.scale_real(1.0 / trace);
    // Renormalization leaves the trace within rounding of one.
    debug_assert!((m.trace().re - 1.0).abs() <= tol::TRACE_UNIT);
    DensityMatrix::new(m)
}

/// Haar-random pure state.
pub fn random_pure_state(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
    random_density_matrix(dim, 1, rng).expect("rank 1 is always valid")
}

/// Random full-rank state.
pub fn random_full_rank_state(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
    random_density_matrix(dim, dim, rng).expect("full rank is always valid")
}

/// Random state with rank drawn uniformly from `1..=dim`.
pub fn random_mixed_rank_state(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
    let rank = rng.random_range(1..=dim);
    random_density_matrix(dim, rank, rng).expect("rank in range")
}

/// Flat-Dirichlet probability vector (normalized exponential samples).
pub fn random_probability_vector(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = v.iter().sum();
    for x in &mut v {
        *x /= total;
    }
    v
}

/// Random Hermitian matrix with Gaussian entries (GUE-like, unnormalized).
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ginibre(dim, dim, rng).hermitian_part()
}
