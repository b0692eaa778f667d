//! Weak submajorization and majorization over non-negative vectors.
//!
//! `x ≺_w y` holds when every prefix sum of the decreasing rearrangement of
//! `x` is bounded by the matching prefix sum of `y`; equal totals upgrade the
//! relation to full majorization. Vectors of different length are zero-padded
//! to the common maximum, which changes neither predicate.

use thiserror::Error;

use crate::distance::{classical_partitioned_distance, trace_distance, DistanceError};
use crate::measurement::{measure_pair, MeasurementError, Povm};
use crate::state::DensityMatrix;
use crate::tol;

#[derive(Debug, Error)]
pub enum MajorizationError {
    #[error("entry {index} is negative ({value:.3e})")]
    NegativeEntry { index: usize, value: f64 },
    #[error("element {index} has trace {trace} > 1, outside the small-trace hypothesis")]
    HypothesisViolated { index: usize, trace: f64 },
    #[error(transparent)]
    Measurement(#[from] MeasurementError),
    #[error(transparent)]
    Distance(#[from] DistanceError),
}

/// Non-negative vector stored with its decreasing rearrangement and prefix
/// sums. Entries within `1e-12` of zero are clamped; anything more negative
/// is rejected.
#[derive(Debug, Clone)]
pub struct OrderedVector {
    values: Vec<f64>,
    sorted: Vec<f64>,
    prefix: Vec<f64>,
}

impl OrderedVector {
    pub fn new(values: Vec<f64>) -> Result<Self, MajorizationError> {
        for (index, &value) in values.iter().enumerate() {
            if value < -1e-12 {
                return Err(MajorizationError::NegativeEntry { index, value });
            }
        }
        let values: Vec<f64> = values.into_iter().map(|v| v.max(0.0)).collect();
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let mut prefix = Vec::with_capacity(sorted.len());
        let mut acc = 0.0;
        for &v in &sorted {
            acc += v;
            prefix.push(acc);
        }
        Ok(Self {
            values,
            sorted,
            prefix,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Entries in decreasing order.
    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn total(&self) -> f64 {
        self.prefix.last().copied().unwrap_or(0.0)
    }

    /// Sum of the k largest entries (k past the length saturates at the total).
    pub fn prefix_sum(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.prefix[(k - 1).min(self.prefix.len() - 1)]
        }
    }

    /// Zero-extend to length `len`.
    pub fn padded(&self, len: usize) -> Self {
        if len <= self.len() {
            return self.clone();
        }
        let mut values = self.values.clone();
        values.resize(len, 0.0);
        Self::new(values).expect("padding preserves non-negativity")
    }
}

/// Outcome of a prefix-sum comparison, with the per-k slack margins
/// (`margin[k-1] = Σ_{j≤k} y_j^↓ − Σ_{j≤k} x_j^↓`; negative means violated
/// at that k).
#[derive(Debug, Clone)]
pub struct SubmajorizationReport {
    pub weak: bool,
    pub equal_totals: bool,
    pub margins: Vec<f64>,
    pub total_difference: f64,
    pub padded_len: usize,
}

impl SubmajorizationReport {
    pub fn majorized(&self) -> bool {
        self.weak && self.equal_totals
    }

    /// Most negative slack across k.
    pub fn worst_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Compare `x` against `y` after zero-padding both to the common length.
pub fn compare(x: &OrderedVector, y: &OrderedVector, tol: f64) -> SubmajorizationReport {
    let len = x.len().max(y.len()).max(1);
    let x = x.padded(len);
    let y = y.padded(len);
    let margins: Vec<f64> = (1..=len)
        .map(|k| y.prefix_sum(k) - x.prefix_sum(k))
        .collect();
    let weak = margins.iter().all(|&m| m >= -tol);
    let total_difference = y.total() - x.total();
    SubmajorizationReport {
        weak,
        equal_totals: total_difference.abs() <= tol,
        margins,
        total_difference,
        padded_len: len,
    }
}

/// `x ≺_w y` within `tol` on every prefix sum.
pub fn weakly_submajorized(x: &OrderedVector, y: &OrderedVector, tol: f64) -> bool {
    compare(x, y, tol).weak
}

/// `x ≺ y`: weak submajorization plus equal totals.
pub fn majorized(x: &OrderedVector, y: &OrderedVector, tol: f64) -> bool {
    compare(x, y, tol).majorized()
}

/// Verdict for one (POVM, state pair) instance of the measurement
/// majorization bound.
#[derive(Debug, Clone)]
pub struct MeasurementMajorization {
    /// `|p − q| ≺_w s(ρ − ϱ)`; guaranteed whenever every element has trace
    /// at most one.
    pub weak: bool,
    /// Additionally, the measurement exhausts the whole trace distance, which
    /// upgrades the relation to full majorization.
    pub full: bool,
    pub report: SubmajorizationReport,
}

/// Check that measurement gaps are weakly submajorized by the singular values
/// of the state difference. Requires the small-trace hypothesis
/// (`tr(M_m) ≤ 1` for every element).
pub fn check_measurement_majorization(
    povm: &Povm,
    a: &DensityMatrix,
    b: &DensityMatrix,
) -> Result<MeasurementMajorization, MajorizationError> {
    if !povm.small_trace() {
        let (index, &trace) = povm
            .traces()
            .iter()
            .enumerate()
            .max_by(|(_, s), (_, t)| s.partial_cmp(t).unwrap())
            .expect("POVM is non-empty");
        return Err(MajorizationError::HypothesisViolated { index, trace });
    }
    let stats = measure_pair(povm, a, b)?;
    let jordan = crate::distance::jordan_decomposition(a, b)?;

    let gaps = OrderedVector::new(stats.gaps_sorted.clone())?;
    let spectrum = OrderedVector::new(jordan.singular_values.clone())?;
    let report = compare(&gaps, &spectrum, tol::SWEEP);

    let n = stats.p.len();
    let whole_classical = classical_partitioned_distance(&stats.p, &stats.q, n)?;
    let whole_quantum = trace_distance(a, b)?;
    let full = report.weak && (whole_classical - whole_quantum).abs() <= tol::SWEEP;

    Ok(MeasurementMajorization {
        weak: report.weak,
        full,
        report,
    })
}
