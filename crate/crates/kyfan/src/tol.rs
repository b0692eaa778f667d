//! Fixed numerical tolerances used across the crate.
//!
//! These are accuracy budgets, not tuning knobs: the eigensolver converges to
//! near machine precision at the dimensions this crate targets (d ≲ 64), and
//! every downstream threshold sits a few orders of magnitude above that floor.

/// Max-entry residual below which a matrix is accepted as Hermitian.
pub const HERMITICITY: f64 = 1e-10;

/// Default validation tolerance for density matrices (trace, positivity).
pub const STATE: f64 = 1e-10;

/// Trace accuracy required of freshly sampled random density matrices.
pub const TRACE_UNIT: f64 = 1e-12;

/// Eigenvalue magnitude treated as zero when splitting support from kernel.
pub const KERNEL: f64 = 1e-12;

/// Clamp window for tiny negative eigenvalues of a Gram matrix before sqrt.
pub const GRAM_CLAMP: f64 = 1e-12;

/// POVM completeness residual (sum of elements vs identity, max-entry norm).
pub const COMPLETENESS: f64 = 1e-9;

/// Default slack for randomized sweep comparisons (bounds, contractivity).
pub const SWEEP: f64 = 1e-9;

/// Slack for closed-form identities (metric axioms, convexity margins).
pub const STRICT: f64 = 1e-10;

/// Jacobi convergence: off-diagonal Frobenius mass relative to the full norm.
pub const JACOBI_RELATIVE: f64 = 1e-14;

/// Jacobi sweep cap.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Negative-eigenvalue clamp when taking operator square roots; values below
/// `-SQRT_CLAMP` are an error rather than noise.
pub const SQRT_CLAMP: f64 = 1e-10;

/// Smallest eigenvalue of a POVM normalizer accepted before resampling.
pub const NORMALIZER_FLOOR: f64 = 1e-10;

/// Distance increase a black-box probe treats as a genuine violation.
/// Looser than the compute tolerances so oracle-side rounding cannot
/// produce a false accusation.
pub const PROBE: f64 = 1e-7;
