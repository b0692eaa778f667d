//! Randomized verification suites and the black-box channel probe.
//!
//! Each suite maps a pure check over seeded trials (in parallel when the
//! `parallel` feature is on) and aggregates worst-case margins per assertion.
//! Margins are slack: the checked inequality holds with `margin ≥ 0`, a
//! margin below the suite tolerance is recorded as a failure together with
//! the trial seed that reproduces it.
//!
//! The probe treats a channel purely as a state-in/state-out oracle: it feeds
//! a mixed diet of state pairs through and watches for any partitioned
//! distance increasing. An increase certifies that the channel violates the
//! sub-unitality condition `Σ E E† ≤ 1`; silence proves nothing, and the
//! verdict says so.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng;
use thiserror::Error;

use crate::channel::{
    contractivity_report, contractivity_report_raw, random_bistochastic,
    random_subunital_nonincreasing, random_trace_preserving, ChannelError, KrausChannel,
};
use crate::distance::{
    classical_partitioned_distance, distance_profile, DistanceError, DistanceProfile,
};
use crate::majorization::{
    check_measurement_majorization, compare, MajorizationError, OrderedVector,
};
use crate::measurement::{measure_pair, optimal_pvm, random_rank_one_povm, MeasurementError};
use crate::random::{
    derive_seed, random_full_rank_state, random_mixed_rank_state, random_probability_vector,
    random_pure_state, random_unitary, rng_from_seed,
};
use crate::state::{DensityMatrix, StateError};
use crate::tol;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown suite '{0}' (expected metric, convexity, povm-bound, majorization, or contractivity)")]
    UnknownSuite(String),
    #[error("suite needs dim ≥ 2 and trials ≥ 1 (got dim {dim}, trials {trials})")]
    BadConfig { dim: usize, trials: usize },
    #[error("trial {trial} could not run: {message}")]
    TrialFailed { trial: usize, message: String },
    #[error("oracle failed on trial {trial}: {message}")]
    OracleFailed { trial: usize, message: String },
    #[error("oracle returned an invalid state on trial {trial}: {source}")]
    OracleReturnedInvalidState { trial: usize, source: StateError },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error(transparent)]
    Measurement(#[from] MeasurementError),
    #[error(transparent)]
    Majorization(#[from] MajorizationError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// The available verification suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteKind {
    /// Metric axioms plus unitary invariance, pure-state collapse, and the
    /// commuting-state reduction to classical distances.
    Metric,
    /// Strong convexity of every distance in the family, with joint and
    /// single-input convexity as specializations.
    Convexity,
    /// Measurement statistics never beat the distance bound; the extremal
    /// PVM saturates it.
    PovmBound,
    /// Measurement gaps are weakly submajorized by the singular values.
    Majorization,
    /// Sub-unital channels contract every distance; any trace-preserving
    /// channel contracts the whole trace distance.
    Contractivity,
}

impl SuiteKind {
    pub const ALL: [SuiteKind; 5] = [
        SuiteKind::Metric,
        SuiteKind::Convexity,
        SuiteKind::PovmBound,
        SuiteKind::Majorization,
        SuiteKind::Contractivity,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SuiteKind::Metric => "metric",
            SuiteKind::Convexity => "convexity",
            SuiteKind::PovmBound => "povm-bound",
            SuiteKind::Majorization => "majorization",
            SuiteKind::Contractivity => "contractivity",
        }
    }
}

impl FromStr for SuiteKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "metric" => Ok(SuiteKind::Metric),
            "convexity" => Ok(SuiteKind::Convexity),
            "povm-bound" | "povmbound" => Ok(SuiteKind::PovmBound),
            "majorization" => Ok(SuiteKind::Majorization),
            "contractivity" => Ok(SuiteKind::Contractivity),
            other => Err(HarnessError::UnknownSuite(other.to_string())),
        }
    }
}

impl fmt::Display for SuiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    /// Force single-threaded execution even when the `parallel` feature is on.
    pub sequential: bool,
}

impl SuiteConfig {
    pub fn new(dim: usize, trials: usize, seed: u64) -> Self {
        Self {
            dim,
            trials,
            seed,
            sequential: false,
        }
    }
}

/// One failed assertion with enough context to replay it.
#[derive(Debug, Clone)]
pub struct TrialFailure {
    pub trial: usize,
    pub seed: u64,
    pub assertion: &'static str,
    pub margin: f64,
    pub summary: String,
}

/// Aggregated result of one suite run. Identical for identical
/// `(kind, config)` apart from `wall_time`, which the display omits.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: SuiteKind,
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub failures: Vec<TrialFailure>,
    /// Worst (most negative) margin seen per assertion name.
    pub worst_margins: BTreeMap<&'static str, f64>,
    pub wall_time: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Deterministic text form; excludes wall time so identical runs render
    /// byte-identically.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("suite: {}\n", self.suite));
        out.push_str(&format!("dim: {}\n", self.dim));
        out.push_str(&format!("trials: {}\n", self.trials));
        out.push_str(&format!("seed: {}\n", self.seed));
        out.push_str("assertions:\n");
        for (name, margin) in &self.worst_margins {
            out.push_str(&format!("  {name}: worst_margin = {margin:.17e}\n"));
        }
        out.push_str(&format!("failures: {}\n", self.failures.len()));
        for f in &self.failures {
            out.push_str(&format!(
                "  trial {} (seed {}): {} margin {:.17e} — {}\n",
                f.trial, f.seed, f.assertion, f.margin, f.summary
            ));
        }
        out.push_str(&format!(
            "verdict: {}\n",
            if self.passed() { "pass" } else { "FAIL" }
        ));
        out
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_text())
    }
}

/// Margin observations for a single trial.
#[derive(Debug, Clone, Default)]
struct TrialOutcome {
    /// (assertion, margin, summary); margin below the tolerance fails.
    observations: Vec<(&'static str, f64, String)>,
}

impl TrialOutcome {
    fn observe(&mut self, assertion: &'static str, margin: f64, summary: impl Into<String>) {
        self.observations.push((assertion, margin, summary.into()));
    }
}

/// Run one suite and aggregate its report.
pub fn run_suite(kind: SuiteKind, config: &SuiteConfig) -> Result<SuiteReport, HarnessError> {
    if config.dim < 2 || config.trials < 1 {
        return Err(HarnessError::BadConfig {
            dim: config.dim,
            trials: config.trials,
        });
    }
    let started = Instant::now();
    let outcomes: Vec<Result<TrialOutcome, String>> =
        crate::exec::run_trials(config.trials, config.sequential, |trial| {
            let seed = derive_seed(config.seed, trial as u64);
            let mut rng = rng_from_seed(seed);
            let result = match kind {
                SuiteKind::Metric => metric_trial(config.dim, &mut rng),
                SuiteKind::Convexity => convexity_trial(config.dim, &mut rng),
                SuiteKind::PovmBound => povm_bound_trial(config.dim, &mut rng),
                SuiteKind::Majorization => majorization_trial(config.dim, &mut rng),
                SuiteKind::Contractivity => contractivity_trial(config.dim, &mut rng),
            };
            result.map_err(|e| e.to_string())
        });

    let mut failures = Vec::new();
    let mut worst_margins: BTreeMap<&'static str, f64> = BTreeMap::new();
    for (trial, outcome) in outcomes.into_iter().enumerate() {
        let seed = derive_seed(config.seed, trial as u64);
        let outcome = outcome.map_err(|message| HarnessError::TrialFailed { trial, message })?;
        for (assertion, margin, summary) in outcome.observations {
            let entry = worst_margins.entry(assertion).or_insert(f64::INFINITY);
            *entry = entry.min(margin);
            if margin < -suite_tolerance(assertion) {
                failures.push(TrialFailure {
                    trial,
                    seed,
                    assertion,
                    margin,
                    summary,
                });
            }
        }
    }

    Ok(SuiteReport {
        suite: kind,
        dim: config.dim,
        trials: config.trials,
        seed: config.seed,
        failures,
        worst_margins,
        wall_time: started.elapsed(),
    })
}

/// Assertion-specific slack. Inequality assertions record their raw slack
/// and equality assertions record `−|gap|`, so in both cases a margin below
/// `−tolerance` is a failure. Closed-form identities get the strict budget,
/// sweeps over sampled objects the looser one.
fn suite_tolerance(assertion: &str) -> f64 {
    match assertion {
        "unitary-invariance"
        | "povm-bound"
        | "pvm-saturation"
        | "pvm-gaps"
        | "weak-submajorization"
        | "optimal-pvm-majorized"
        | "contract-per-k"
        | "contract-submajorized"
        | "contract-whole-distance"
        | "measurement-bistochastic" => tol::SWEEP,
        _ => tol::STRICT,
    }
}

fn metric_trial(dim: usize, rng: &mut impl Rng) -> Result<TrialOutcome, HarnessError> {
    let mut out = TrialOutcome::default();
    let a = random_mixed_rank_state(dim, rng);
    let b = random_mixed_rank_state(dim, rng);
    let c = random_mixed_rank_state(dim, rng);

    let ab = distance_profile(&a, &b)?;
    let ba = distance_profile(&b, &a)?;
    let ac = distance_profile(&a, &c)?;
    let cb = distance_profile(&c, &b)?;
    let aa = distance_profile(&a, &a)?;

    // D_1 dominates half the largest entry of the difference, so zero
    // distance forces equal states; this is the quantitative half of
    // identity-of-indiscernibles.
    out.observe(
        "separation",
        ab.values()[0] - 0.5 * a.matrix().max_abs_diff(b.matrix()),
        "D_1 vs max entry gap",
    );

    for k in 1..=dim {
        let d_ab = ab.values()[k - 1];
        // Symmetry is exact: the two orders produce bit-identical values.
        let sym = if d_ab == ba.values()[k - 1] {
            0.0
        } else {
            -1.0
        };
        out.observe("symmetry-exact", sym, format!("k={k}"));
        out.observe("non-negativity", d_ab, format!("k={k}"));
        out.observe("upper-bound", 1.0 - d_ab, format!("k={k}"));
        out.observe(
            "identity-of-indiscernibles",
            -aa.values()[k - 1],
            format!("k={k}"),
        );
        out.observe(
            "triangle",
            ac.values()[k - 1] + cb.values()[k - 1] - d_ab,
            format!("k={k}"),
        );
        if k < dim {
            out.observe("monotone-in-k", ab.values()[k] - d_ab, format!("k={k}"));
            // Each step grows by at most half the largest singular value.
            out.observe(
                "bounded-step",
                ab.values()[0] - (ab.values()[k] - d_ab),
                format!("k={k}"),
            );
        }
    }

    // Unitary invariance. Equality assertions record margin = −|gap|, so the
    // uniform failure rule margin ≥ −tol reads as |gap| ≤ tol.
    let u = random_unitary(dim, rng);
    let ua = a.conjugate_by(&u)?;
    let ub = b.conjugate_by(&u)?;
    let rotated = distance_profile(&ua, &ub)?;
    for k in 1..=dim {
        let gap = (rotated.values()[k - 1] - ab.values()[k - 1]).abs();
        out.observe("unitary-invariance", -gap, format!("k={k}"));
    }

    // Pure pairs collapse to two values: D_1 = D_d/2 and D_k = D_d beyond.
    let p = random_pure_state(dim, rng);
    let q = random_pure_state(dim, rng);
    let pure = distance_profile(&p, &q)?;
    let whole = pure.trace_distance();
    out.observe(
        "pure-collapse-first",
        -(pure.values()[0] - 0.5 * whole).abs(),
        "k=1",
    );
    for k in 2..=dim {
        out.observe(
            "pure-collapse-rest",
            -(pure.values()[k - 1] - whole).abs(),
            format!("k={k}"),
        );
    }

    // States diagonal in a shared basis reduce to the classical distance of
    // their spectra.
    let basis = random_unitary(dim, rng);
    let mu = random_probability_vector(dim, rng);
    let nu = random_probability_vector(dim, rng);
    let rho = DensityMatrix::from_probabilities(&mu)?.conjugate_by(&basis)?;
    let sigma = DensityMatrix::from_probabilities(&nu)?.conjugate_by(&basis)?;
    let commuting = distance_profile(&rho, &sigma)?;
    for k in 1..=dim {
        let classical = classical_partitioned_distance(&mu, &nu, k)?;
        out.observe(
            "commuting-classical",
            -(commuting.values()[k - 1] - classical).abs(),
            format!("k={k}"),
        );
    }

    Ok(out)
}

fn convexity_trial(dim: usize, rng: &mut impl Rng) -> Result<TrialOutcome, HarnessError> {
    let mut out = TrialOutcome::default();
    let components = rng.random_range(1..=5);
    let p = random_probability_vector(components, rng);
    let q = random_probability_vector(components, rng);
    let rhos: Vec<DensityMatrix> = (0..components)
        .map(|_| random_mixed_rank_state(dim, rng))
        .collect();
    let sigmas: Vec<DensityMatrix> = (0..components)
        .map(|_| random_mixed_rank_state(dim, rng))
        .collect();

    let mix = |weights: &[f64], states: &[DensityMatrix]| -> Result<DensityMatrix, StateError> {
        let mut m = crate::matrix::ComplexMatrix::zeros(dim, dim);
        for (w, s) in weights.iter().zip(states) {
            m = &m + &s.matrix().scale_real(*w);
        }
        DensityMatrix::new(m)
    };

    let classical = classical_partitioned_distance(&p, &q, components)?;
    let rho_mix = mix(&p, &rhos)?;
    let sigma_mix_q = mix(&q, &sigmas)?;
    let lhs_strong = distance_profile(&rho_mix, &sigma_mix_q)?;

    let sigma_mix_p = mix(&p, &sigmas)?;
    let lhs_joint = distance_profile(&rho_mix, &sigma_mix_p)?;

    let fixed = &sigmas[0];
    let lhs_first_input = distance_profile(&rho_mix, fixed)?;

    for k in 1..=dim {
        let per_component: Result<Vec<f64>, DistanceError> = rhos
            .iter()
            .zip(&sigmas)
            .map(|(r, s)| crate::distance::partitioned_distance(r, s, k))
            .collect();
        let per_component = per_component?;
        let avg: f64 = p.iter().zip(&per_component).map(|(w, d)| w * d).sum();

        out.observe(
            "strong-convexity",
            avg + classical - lhs_strong.values()[k - 1],
            format!("k={k}, components={components}"),
        );
        out.observe(
            "joint-convexity",
            avg - lhs_joint.values()[k - 1],
            format!("k={k}"),
        );

        let avg_first: f64 = p
            .iter()
            .zip(&rhos)
            .map(|(w, r)| crate::distance::partitioned_distance(r, fixed, k).map(|d| w * d))
            .collect::<Result<Vec<f64>, _>>()?
            .iter()
            .sum();
        out.observe(
            "first-input-convexity",
            avg_first - lhs_first_input.values()[k - 1],
            format!("k={k}"),
        );
    }
    Ok(out)
}

fn povm_bound_trial(dim: usize, rng: &mut impl Rng) -> Result<TrialOutcome, HarnessError> {
    let mut out = TrialOutcome::default();
    let a = random_mixed_rank_state(dim, rng);
    let b = random_mixed_rank_state(dim, rng);
    let profile = distance_profile(&a, &b)?;

    let n_outcomes = rng.random_range(dim..=2 * dim + 2);
    let povm = random_rank_one_povm(dim, n_outcomes, rng)?;
    let stats = measure_pair(&povm, &a, &b)?;
    for k in 1..=dim {
        let classical = classical_partitioned_distance(&stats.p, &stats.q, k.min(stats.p.len()))?;
        out.observe(
            "povm-bound",
            profile.values()[k - 1] - classical,
            format!("k={k}, outcomes={n_outcomes}"),
        );
    }

    let pvm = optimal_pvm(&a, &b)?;
    let pvm_stats = measure_pair(&pvm, &a, &b)?;
    for k in 1..=dim {
        let classical =
            classical_partitioned_distance(&pvm_stats.p, &pvm_stats.q, k.min(pvm_stats.p.len()))?;
        out.observe(
            "pvm-saturation",
            -(classical - profile.values()[k - 1]).abs(),
            format!("k={k}"),
        );
    }

    let jordan = crate::distance::jordan_decomposition(&a, &b)?;
    for (j, (gap, s)) in pvm_stats
        .gaps_sorted
        .iter()
        .zip(&jordan.singular_values)
        .enumerate()
    {
        out.observe("pvm-gaps", -(gap - s).abs(), format!("j={}", j + 1));
    }
    Ok(out)
}

fn majorization_trial(dim: usize, rng: &mut impl Rng) -> Result<TrialOutcome, HarnessError> {
    let mut out = TrialOutcome::default();
    let a = random_mixed_rank_state(dim, rng);
    let b = random_mixed_rank_state(dim, rng);

    let n_outcomes = rng.random_range(dim..=2 * dim);
    let povm = random_rank_one_povm(dim, n_outcomes, rng)?;
    let verdict = check_measurement_majorization(&povm, &a, &b)?;
    out.observe(
        "weak-submajorization",
        verdict.report.worst_margin(),
        format!("outcomes={n_outcomes}"),
    );

    let pvm = optimal_pvm(&a, &b)?;
    let pvm_verdict = check_measurement_majorization(&pvm, &a, &b)?;
    out.observe(
        "optimal-pvm-majorized",
        if pvm_verdict.full { 0.0 } else { -1.0 },
        "extremal PVM",
    );

    // Predicate sanity on random non-negative vectors: reflexivity and
    // transitivity (with composed tolerance), and padding neutrality.
    let x = OrderedVector::new((0..dim).map(|_| rng.random::<f64>()).collect::<Vec<_>>())?;
    out.observe(
        "reflexive",
        compare(&x, &x, tol::STRICT).worst_margin(),
        "x vs x",
    );
    let y_raw: Vec<f64> = x
        .sorted()
        .iter()
        .map(|v| v + rng.random::<f64>() * 0.1)
        .collect();
    let y = OrderedVector::new(y_raw)?;
    let z_raw: Vec<f64> = y
        .sorted()
        .iter()
        .map(|v| v + rng.random::<f64>() * 0.1)
        .collect();
    let z = OrderedVector::new(z_raw)?;
    let xz = compare(&x, &z, 2.0 * tol::STRICT);
    let transitive = compare(&x, &y, tol::STRICT).weak && compare(&y, &z, tol::STRICT).weak;
    out.observe(
        "transitive",
        if transitive && xz.weak {
            xz.worst_margin()
        } else {
            -1.0
        },
        "x ≺w y ≺w z",
    );
    let padded = compare(&x.padded(dim + 3), &z, 2.0 * tol::STRICT);
    out.observe(
        "padding-neutral",
        if padded.weak == xz.weak { 0.0 } else { -1.0 },
        "padded comparison agrees",
    );
    Ok(out)
}

fn contractivity_trial(dim: usize, rng: &mut impl Rng) -> Result<TrialOutcome, HarnessError> {
    let mut out = TrialOutcome::default();
    let a = random_full_rank_state(dim, rng);
    let b = random_mixed_rank_state(dim, rng);

    match rng.random_range(0..4) {
        0 | 1 => {
            // Bistochastic: every distance contracts, spectra submajorize.
            let ch = random_bistochastic(dim, rng)?;
            out.observe(
                "measurement-bistochastic",
                -ch.flags().trace_residual.max(ch.flags().unital_residual),
                "gram residuals",
            );
            let report = contractivity_report(&ch, &a, &b)?;
            out.observe("contract-per-k", -report.worst_increase, "bistochastic");
            out.observe(
                "contract-submajorized",
                report.submajorization.worst_margin(),
                "bistochastic",
            );
        }
        2 => {
            // Sub-unital trace-nonincreasing: compare raw outputs.
            let ch = random_subunital_nonincreasing(dim, rng)?;
            let report = contractivity_report_raw(&ch, &a, &b)?;
            out.observe("contract-per-k", -report.worst_increase, "sub-unital raw");
            out.observe(
                "contract-submajorized",
                report.submajorization.worst_margin(),
                "sub-unital raw",
            );
        }
        _ => {
            // Generic trace-preserving channel: only the whole trace
            // distance is guaranteed to contract.
            let ch = random_trace_preserving(dim, rng.random_range(2..=4), rng)?;
            let report = contractivity_report(&ch, &a, &b)?;
            let last = report.rows.last().expect("non-empty");
            out.observe(
                "contract-whole-distance",
                last.distance_in - last.distance_out,
                "generic TPCP",
            );
        }
    }
    Ok(out)
}

/// How a probe classified the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeOutcome {
    /// No distance increase observed. Not a proof of sub-unitality.
    ConsistentWithSubunital,
    /// Some partitioned distance increased beyond tolerance; the channel
    /// certainly violates `Σ E E† ≤ 1`.
    ViolatesSubunital,
}

impl fmt::Display for ProbeOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbeOutcome::ConsistentWithSubunital => f.write_str("consistent_with_subunital"),
            ProbeOutcome::ViolatesSubunital => f.write_str("violates_subunital"),
        }
    }
}

/// The state pair that exhibited a distance increase.
#[derive(Debug, Clone)]
pub struct ProbeWitness {
    pub input_a: DensityMatrix,
    pub input_b: DensityMatrix,
    pub k: usize,
    pub distance_in: f64,
    pub distance_out: f64,
}

#[derive(Debug, Clone)]
pub struct ProbeVerdict {
    pub outcome: ProbeOutcome,
    pub pairs_probed: usize,
    /// The increase threshold the probe ran with.
    pub tolerance: f64,
    /// Largest observed `D_k(out) − D_k(in)` per k (1-based, padded across
    /// input/output dimensions).
    pub max_increase: Vec<f64>,
    pub witness: Option<ProbeWitness>,
}

impl ProbeVerdict {
    /// Verdict sentence, including the caveat that a quiet probe is not a
    /// proof.
    pub fn summary(&self) -> String {
        match (&self.outcome, &self.witness) {
            (ProbeOutcome::ViolatesSubunital, Some(w)) => format!(
                "violates_subunital: D_{} increased {:.6e} -> {:.6e} on a witness pair \
                 ({} pairs probed)",
                w.k, w.distance_in, w.distance_out, self.pairs_probed
            ),
            _ => format!(
                "consistent_with_subunital: no partitioned-distance increase above {:.1e} \
                 across {} pairs; absence of a witness is not a proof of sub-unitality",
                self.tolerance, self.pairs_probed
            ),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ProbeOptions {
    pub pairs: usize,
    pub seed: u64,
    /// Increase needed before declaring a violation; defaults to [`tol::PROBE`].
    pub tolerance: f64,
    /// Run the oracle single-threaded (for non-reentrant oracles such as
    /// external processes).
    pub sequential: bool,
}

impl ProbeOptions {
    pub fn new(pairs: usize, seed: u64) -> Self {
        Self {
            pairs,
            seed,
            tolerance: tol::PROBE,
            sequential: false,
        }
    }
}

/// Generate the probe pair for one trial. The diet mixes full-rank pairs,
/// pure pairs, commuting pairs (half of them diagonal in the computational
/// basis, the known witness family for relabeling channels), and
/// near-identical pairs.
fn probe_pair(dim: usize, trial: usize, rng: &mut impl Rng) -> (DensityMatrix, DensityMatrix) {
    match trial % 10 {
        // 40%: independent full-rank states.
        0 | 3 | 5 | 8 => (
            random_full_rank_state(dim, rng),
            random_full_rank_state(dim, rng),
        ),
        // 30%: pure pairs.
        1 | 4 | 9 => (random_pure_state(dim, rng), random_pure_state(dim, rng)),
        // 20%: shared-eigenbasis pairs with block-structured spectra.
        2 | 7 => {
            let mu = random_probability_vector(dim, rng);
            // Concentrate the partner on a random subset so the gap vector
            // has the block structure that exposes relabeling channels.
            let subset_size = rng.random_range(1..=dim.max(2) - 1);
            let mut nu = vec![0.0; dim];
            let mut indices: Vec<usize> = (0..dim).collect();
            for i in (1..dim).rev() {
                let j = rng.random_range(0..=i);
                indices.swap(i, j);
            }
            for &i in indices.iter().take(subset_size) {
                nu[i] = 1.0 / subset_size as f64;
            }
            let rho = DensityMatrix::from_probabilities(&mu).expect("valid spectrum");
            let sigma = DensityMatrix::from_probabilities(&nu).expect("valid spectrum");
            if trial % 4 == 2 {
                (rho, sigma)
            } else {
                let basis = random_unitary(dim, rng);
                (
                    rho.conjugate_by(&basis).expect("unitary conjugation"),
                    sigma.conjugate_by(&basis).expect("unitary conjugation"),
                )
            }
        }
        // 10%: a state against a slight perturbation of itself.
        _ => {
            let rho = random_full_rank_state(dim, rng);
            let noise = random_full_rank_state(dim, rng);
            let eps = 1e-3;
            let m = &rho.matrix().scale_real(1.0 - eps) + &noise.matrix().scale_real(eps);
            let sigma = DensityMatrix::new(m).expect("convex combination");
            (rho, sigma)
        }
    }
}

/// Probe a black-box channel with seeded state pairs and flag any
/// partitioned-distance increase.
///
/// A violation is only declared after the witness pair has been re-run
/// through the oracle and reproduced the increase.
pub fn blackbox_probe<F>(
    oracle: F,
    dim_in: usize,
    options: &ProbeOptions,
) -> Result<ProbeVerdict, HarnessError>
where
    F: Fn(&DensityMatrix) -> Result<DensityMatrix, HarnessError> + Sync,
{
    struct PairResult {
        increases: Vec<f64>,
        worst_k: usize,
        worst_increase: f64,
        pair: (DensityMatrix, DensityMatrix),
    }

    let run_pair = |trial: usize| -> Result<PairResult, HarnessError> {
        let mut rng = rng_from_seed(derive_seed(options.seed, trial as u64));
        let (a, b) = probe_pair(dim_in, trial, &mut rng);
        let out_a = oracle(&a)?;
        let out_b = oracle(&b)?;
        let profile_in = distance_profile(&a, &b)?;
        let profile_out = distance_profile(&out_a, &out_b)?;
        let len = profile_in.dim().max(profile_out.dim());
        let padded_in = profile_in.padded(len);
        let padded_out = profile_out.padded(len);

        let mut increases = Vec::with_capacity(len);
        let mut worst_k = 1;
        let mut worst_increase = f64::NEG_INFINITY;
        for k in 1..=len {
            let inc = padded_out.values()[k - 1] - padded_in.values()[k - 1];
            increases.push(inc);
            if inc > worst_increase {
                worst_increase = inc;
                worst_k = k;
            }
        }
        Ok(PairResult {
            increases,
            worst_k,
            worst_increase,
            pair: (a, b),
        })
    };

    let results: Vec<Result<PairResult, HarnessError>> =
        crate::exec::run_trials(options.pairs, options.sequential, run_pair);

    let mut max_increase: Vec<f64> = Vec::new();
    let mut worst: Option<PairResult> = None;
    for (trial, result) in results.into_iter().enumerate() {
        let r = result.map_err(|e| match e {
            HarnessError::State(source) => {
                HarnessError::OracleReturnedInvalidState { trial, source }
            }
            HarnessError::OracleFailed { message, .. } => {
                HarnessError::OracleFailed { trial, message }
            }
            other => other,
        })?;
        if r.increases.len() > max_increase.len() {
            max_increase.resize(r.increases.len(), f64::NEG_INFINITY);
        }
        for (k, &inc) in r.increases.iter().enumerate() {
            max_increase[k] = max_increase[k].max(inc);
        }
        if worst
            .as_ref()
            .is_none_or(|w| r.worst_increase > w.worst_increase)
        {
            worst = Some(r);
        }
    }

    let worst = worst.expect("at least one pair probed");
    if worst.worst_increase > options.tolerance {
        // Replay the witness before accusing the channel.
        let (a, b) = &worst.pair;
        let out_a = oracle(a)?;
        let out_b = oracle(b)?;
        let len = worst.increases.len();
        let replay_in = distance_profile(a, b)?.padded(len);
        let replay_out = distance_profile(&out_a, &out_b)?.padded(len);
        let replay_increase =
            replay_out.values()[worst.worst_k - 1] - replay_in.values()[worst.worst_k - 1];
        if replay_increase > options.tolerance {
            return Ok(ProbeVerdict {
                outcome: ProbeOutcome::ViolatesSubunital,
                pairs_probed: options.pairs,
                max_increase,
                witness: Some(ProbeWitness {
                    input_a: a.clone(),
                    input_b: b.clone(),
                    k: worst.worst_k,
                    distance_in: replay_in.values()[worst.worst_k - 1],
                    distance_out: replay_out.values()[worst.worst_k - 1],
                }),
            });
        }
    }

    Ok(ProbeVerdict {
        outcome: ProbeOutcome::ConsistentWithSubunital,
        pairs_probed: options.pairs,
        max_increase,
        witness: None,
    })
}

/// Convenience: probe a Kraus channel through its `apply` action.
pub fn probe_channel(
    channel: &KrausChannel,
    options: &ProbeOptions,
) -> Result<ProbeVerdict, HarnessError> {
    blackbox_probe(
        |rho| {
            let (out, _) = channel.apply(rho).map_err(|e| HarnessError::OracleFailed {
                trial: 0,
                message: e.to_string(),
            })?;
            Ok(out)
        },
        channel.dim_in(),
        options,
    )
}

/// Padded distance profile helper shared by probe consumers.
pub fn padded_profile(profile: &DistanceProfile, len: usize) -> DistanceProfile {
    profile.padded(len)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for kind in SuiteKind::ALL {
            assert_eq!(kind.name().parse::<SuiteKind>().unwrap(), kind);
        }
        assert!("nonsense".parse::<SuiteKind>().is_err());
        assert_eq!(
            "povm_bound".parse::<SuiteKind>().unwrap(),
            SuiteKind::PovmBound
        );
    }

    #[test]
    fn metric_suite_passes_small() {
        let report = run_suite(SuiteKind::Metric, &SuiteConfig::new(3, 40, 7)).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn convexity_suite_passes_small() {
        let report = run_suite(SuiteKind::Convexity, &SuiteConfig::new(3, 40, 11)).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn povm_bound_suite_passes_small() {
        let report = run_suite(SuiteKind::PovmBound, &SuiteConfig::new(3, 30, 13)).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn majorization_suite_passes_small() {
        let report = run_suite(SuiteKind::Majorization, &SuiteConfig::new(3, 30, 17)).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn contractivity_suite_passes_small() {
        let report = run_suite(SuiteKind::Contractivity, &SuiteConfig::new(3, 30, 19)).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn reports_are_replayable() {
        let a = run_suite(SuiteKind::Metric, &SuiteConfig::new(2, 25, 5)).unwrap();
        let b = run_suite(SuiteKind::Metric, &SuiteConfig::new(2, 25, 5)).unwrap();
        assert_eq!(a.canonical_text(), b.canonical_text());

        // Sequential execution produces the identical report.
        let mut config = SuiteConfig::new(2, 25, 5);
        config.sequential = true;
        let c = run_suite(SuiteKind::Metric, &config).unwrap();
        assert_eq!(a.canonical_text(), c.canonical_text());
    }

    #[test]
    fn bad_config_rejected() {
        assert!(matches!(
            run_suite(SuiteKind::Metric, &SuiteConfig::new(1, 10, 0)),
            Err(HarnessError::BadConfig { .. })
        ));
        assert!(matches!(
            run_suite(SuiteKind::Metric, &SuiteConfig::new(3, 0, 0)),
            Err(HarnessError::BadConfig { .. })
        ));
    }

    #[test]
    fn probe_identity_is_consistent() {
        let verdict = blackbox_probe(|rho| Ok(rho.clone()), 3, &ProbeOptions::new(30, 23)).unwrap();
        assert_eq!(verdict.outcome, ProbeOutcome::ConsistentWithSubunital);
        assert!(verdict.witness.is_none());
        assert!(verdict.max_increase.iter().all(|&x| x <= 0.0 + 1e-12));
        assert!(verdict.summary().contains("not a proof"));
    }

    #[test]
    fn probe_bistochastic_is_consistent() {
        let mut rng = rng_from_seed(31);
        let ch = crate::channel::random_bistochastic(3, &mut rng).unwrap();
        let verdict = probe_channel(&ch, &ProbeOptions::new(40, 37)).unwrap();
        assert_eq!(verdict.outcome, ProbeOutcome::ConsistentWithSubunital);
    }

    #[test]
    fn probe_detects_relabeling_channel() {
        let ch = KrausChannel::coarse_graining(5, &[0, 0, 0, 1, 1]).unwrap();
        let verdict = probe_channel(&ch, &ProbeOptions::new(60, 41)).unwrap();
        assert_eq!(verdict.outcome, ProbeOutcome::ViolatesSubunital);
        let w = verdict.witness.expect("violation carries a witness");
        // The witness replays through the distance layer.
        let profile_in = distance_profile(&w.input_a, &w.input_b).unwrap();
        let (out_a, _) = ch.apply(&w.input_a).unwrap();
        let (out_b, _) = ch.apply(&w.input_b).unwrap();
        let profile_out = distance_profile(&out_a, &out_b).unwrap();
        let increase = profile_out.values()[w.k - 1] - profile_in.values()[w.k - 1];
        assert!((increase - (w.distance_out - w.distance_in)).abs() < 1e-9);
        assert!(increase > tol::PROBE);
    }

    #[test]
    fn probe_sequential_matches_parallel() {
        let ch = KrausChannel::coarse_graining(5, &[0, 0, 0, 1, 1]).unwrap();
        let parallel = probe_channel(&ch, &ProbeOptions::new(30, 43)).unwrap();
        let mut options = ProbeOptions::new(30, 43);
        options.sequential = true;
        let sequential = probe_channel(&ch, &options).unwrap();
        assert_eq!(parallel.outcome, sequential.outcome);
        assert_eq!(parallel.max_increase, sequential.max_increase);
    }
}
