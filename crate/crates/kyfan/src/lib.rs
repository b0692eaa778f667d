//! Ky Fan norm distances between quantum states.
//!
//! For density matrices ρ and ϱ on a d-dimensional space, this crate computes
//! the whole family of partitioned trace distances
//! `D_k(ρ, ϱ) = (1/2) Σ_{j≤k} s_j(ρ − ϱ)` — half the Ky Fan k-norm of the
//! difference — together with the structures that make the family useful:
//!
//! - [`distance`]: Ky Fan norms, distance profiles, the Jordan decomposition
//!   of the difference, the optimal projector pair per k, and the classical
//!   (probability-vector) counterparts.
//! - [`measurement`]: POVMs, outcome statistics for state pairs, the extremal
//!   projective measurement whose outcome gaps reproduce the singular values,
//!   and randomized sweeps checking that no small-trace POVM beats `D_k`.
//! - [`majorization`]: weak submajorization and majorization predicates
//!   connecting measurement gaps to the singular-value vector.
//! - [`channel`]: Kraus channels with trace/unitality classification,
//!   standard constructors, and per-k contractivity reports. Sub-unital
//!   channels (`Σ E E† ≤ 1`) contract every `D_k`; the coarse-graining
//!   constructor shows the general trace-preserving case does not.
//! - [`harness`]: seeded property suites for all of the above plus a
//!   black-box probe that certifies sub-unitality violations from observed
//!   distance increases.
//!
//! Randomized machinery is deterministic: every sampler takes an explicit
//! seed or RNG state (ChaCha12), and parallel sweeps derive one stream per
//! trial so results do not depend on scheduling. The `parallel` feature
//! (default) runs sweeps on rayon; disabling it gives a dependency-free
//! sequential build with identical outputs.
//!
//! ```
//! use kyfan::{distance_profile, measure_pair, optimal_pvm, DensityMatrix};
//!
//! let rho = DensityMatrix::from_probabilities(&[0.5, 0.3, 0.2])?;
//! let sigma = DensityMatrix::from_probabilities(&[0.2, 0.5, 0.3])?;
//!
//! // All d distances from one decomposition: D_1 ≤ D_2 ≤ D_3.
//! let profile = distance_profile(&rho, &sigma)?;
//! assert!((profile.values()[0] - 0.15).abs() < 1e-12);
//! assert!((profile.trace_distance() - 0.30).abs() < 1e-12);
//!
//! // The projective measurement that attains every one of them: its sorted
//! // outcome gaps are the singular values of the difference.
//! let pvm = optimal_pvm(&rho, &sigma)?;
//! let stats = measure_pair(&pvm, &rho, &sigma)?;
//! assert!((stats.gaps_sorted[0] - 0.30).abs() < 1e-9);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod channel;
pub mod distance;
pub mod eigen;
mod exec;
pub mod harness;
pub mod majorization;
pub mod matrix;
pub mod measurement;
pub mod random;
pub mod state;
pub mod tol;

pub use num_complex::Complex64;

pub use exec::configure_thread_pool;

pub use channel::{
    contractivity_report, contractivity_report_raw, ChannelError, ChannelFlags,
    ContractivityReport, ContractivityRow, KrausChannel,
};
pub use distance::{
    classical_partitioned_distance, distance_profile, jordan_decomposition, ky_fan_norm,
    l1_distance, max_over_constrained_operators, optimal_projectors, partitioned_distance,
    top_eigenvalue_sum, trace_distance, DistanceError, DistanceProfile, JordanDecomposition,
};
pub use eigen::{hermitian_eigensystem, singular_values, EigenError, HermitianEigensystem};
pub use harness::{
    blackbox_probe, probe_channel, run_suite, HarnessError, ProbeOptions, ProbeOutcome,
    ProbeVerdict, ProbeWitness, SuiteConfig, SuiteKind, SuiteReport, TrialFailure,
};
pub use majorization::{
    check_measurement_majorization, compare as submajorization_compare, majorized,
    weakly_submajorized, MajorizationError, MeasurementMajorization, OrderedVector,
    SubmajorizationReport,
};
pub use matrix::{ComplexMatrix, MatrixError};
pub use measurement::{
    measure_pair, optimal_pvm, random_rank_one_povm, verify_measurement_bound,
    MeasurementBoundReport, MeasurementError, MeasurementStats, Povm,
};
pub use random::{derive_seed, random_density_matrix, random_unitary, rng_from_seed, SeededRng};
pub use state::{bloch_from_qubit, qubit_from_bloch, BlochVector, DensityMatrix, StateError};
