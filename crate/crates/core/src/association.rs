//! Max-associability, the sum/max association pairing, the two-norm-system
//! equivalence test, and stationarity/self-similarity transfer checks.
//!
//! A sum-stable process given by spectral functions `{f_t}` admits an
//! associated max-stable process exactly when `f_{t_1}(s)·f_{t_2}(s) ≥ 0`
//! at every positive-mass point for every pair of times; the associated pair
//! then shares the rectified kernel `|f_t|`. On discrete spaces the μ-a.e.
//! condition is a pointwise condition, so the checker here is exact.
//!
//! The norm-system equivalence test probes both sides of the linear/max-linear
//! correspondence: equality of all sum-norms of one nonnegative collection
//! against another holds iff equality of all max-norms does. Finite probe
//! sets cannot certify the full ∀-coefficient statement; verdicts are
//! reported as probe-relative.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Result, StableError};
use crate::integrals::{rel_diff, sample_cauchy, Probe, ProcessHandle};
use crate::kernels::ScalableKernelFamily;
use crate::marginals::SeededStream;
use crate::measure::{SignClass, SpectralKernel, StabilityIndex};

/// Default relative tolerance for norm-functional comparisons.
pub const DEFAULT_NORM_TOLERANCE: f64 = 1e-9;

/// A pair of time rows whose product is strictly negative at a
/// positive-mass point.
#[derive(Debug, Clone, Serialize)]
pub struct ViolatingPair {
    pub t_i: usize,
    pub t_j: usize,
    pub point_index: usize,
    pub point_id: String,
    pub product: f64,
}

/// Outcome of the associability check. When associable, `rectified_kernel`
/// carries the association map `f ↦ |f|`.
#[derive(Debug, Clone, Serialize)]
pub struct AssociabilityReport {
    pub associable: bool,
    pub violating_pair: Option<ViolatingPair>,
    pub rectified_kernel: Option<SpectralKernel>,
}

/// Decides max-associability: for all time pairs `(i, j)` and every
/// positive-mass point `s`, `f_{t_i}(s)·f_{t_j}(s) ≥ 0`.
///
/// Equivalent per-point formulation used here: no point carries both a
/// strictly positive and a strictly negative kernel value.
pub fn check_max_associable(kernel: &SpectralKernel) -> AssociabilityReport {
    for j in 0..kernel.n_points() {
        let mut pos: Option<usize> = None;
        let mut neg: Option<usize> = None;
        for i in 0..kernel.n_times() {
            let v = kernel.values()[i][j];
            if v > 0.0 && pos.is_none() {
                pos = Some(i);
            } else if v < 0.0 && neg.is_none() {
                neg = Some(i);
            }
            if let (Some(p), Some(q)) = (pos, neg) {
                let (t_i, t_j) = if p < q { (p, q) } else { (q, p) };
                return AssociabilityReport {
                    associable: false,
                    violating_pair: Some(ViolatingPair {
                        t_i,
                        t_j,
                        point_index: j,
                        point_id: kernel.space().points()[j].clone(),
                        product: kernel.values()[t_i][j] * kernel.values()[t_j][j],
                    }),
                    rectified_kernel: None,
                };
            }
        }
    }
    AssociabilityReport {
        associable: true,
        violating_pair: None,
        rectified_kernel: Some(kernel.rectified()),
    }
}

/// An associated sum/max process pair driven by one shared nonnegative
/// kernel object.
#[derive(Debug, Clone)]
pub struct AssociatedPair {
    pub sum: ProcessHandle,
    pub max: ProcessHandle,
}

/// Pairs the SαS and α-Fréchet processes sharing the given nonnegative
/// kernel. Signed kernels are rejected; rectify via
/// [`check_max_associable`] first.
pub fn associate(kernel: &SpectralKernel, alpha: f64) -> Result<AssociatedPair> {
    if kernel.sign_class() != SignClass::Nonnegative {
        return Err(StableError::SignedKernel(
            "associate requires a nonnegative kernel; rectify via check_max_associable".into(),
        ));
    }
    let sum_index = StabilityIndex::sum(alpha)?;
    let max_index = StabilityIndex::max(alpha)?;
    let shared = Arc::new(kernel.clone());
    Ok(AssociatedPair {
        sum: ProcessHandle::new(Arc::clone(&shared), sum_index)?,
        max: ProcessHandle::new(shared, max_index)?,
    })
}

/// Witness of a norm discrepancy for one probe coefficient vector.
#[derive(Debug, Clone, Serialize)]
pub struct NormWitness {
    pub coeffs: Vec<f64>,
    pub norm_a: f64,
    pub norm_b: f64,
}

/// Probe-relative verdicts for the two sides of the norm-system equivalence.
#[derive(Debug, Clone, Serialize)]
pub struct Theorem1Report {
    pub sum_equal: bool,
    pub max_equal: bool,
    pub sum_witness: Option<NormWitness>,
    pub max_witness: Option<NormWitness>,
    pub tolerance: f64,
    pub probes: Vec<Vec<f64>>,
}

/// Tests whether two equally-sized nonnegative collections have equal
/// sum-norm systems and equal max-norm systems, over unit/all-ones probes
/// plus `trials` heavy-tailed random coefficient vectors (signed for the sum
/// side; their absolute values for the max side). Both sides are evaluated
/// on every probe so that the verdicts can be compared.
pub fn theorem1_equivalence_test(
    kernel_a: &SpectralKernel,
    kernel_b: &SpectralKernel,
    alpha: f64,
    trials: usize,
    stream: &SeededStream,
) -> Result<Theorem1Report> {
    if kernel_a.sign_class() != SignClass::Nonnegative
        || kernel_b.sign_class() != SignClass::Nonnegative
    {
        return Err(StableError::SignedKernel(
            "theorem1_equivalence_test requires nonnegative kernels".into(),
        ));
    }
    if kernel_a.n_times() != kernel_b.n_times() {
        return Err(StableError::DimensionMismatch(format!(
            "{} vs {} rows",
            kernel_a.n_times(),
            kernel_b.n_times()
        )));
    }
    let n = kernel_a.n_times();
    let sum_index = StabilityIndex::sum(alpha)?;
    let max_index = StabilityIndex::max(alpha)?;
    let all: Vec<usize> = (0..n).collect();

    let mut probes: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        probes.push(e);
    }
    probes.push(vec![1.0; n]);
    let mut rng = stream.rng();
    for _ in 0..trials {
        probes.push((0..n).map(|_| sample_cauchy(&mut rng)).collect());
    }

    let tol = DEFAULT_NORM_TOLERANCE;
    let mut sum_witness = None;
    let mut max_witness = None;
    for coeffs in &probes {
        let sa = kernel_a.sum_norm(&all, coeffs, &sum_index)?;
        let sb = kernel_b.sum_norm(&all, coeffs, &sum_index)?;
        if sum_witness.is_none() && rel_diff(sa, sb) > tol {
            sum_witness = Some(NormWitness {
                coeffs: coeffs.clone(),
                norm_a: sa,
                norm_b: sb,
            });
        }
        let abs: Vec<f64> = coeffs.iter().map(|c| c.abs()).collect();
        let ma = kernel_a.max_norm(&all, &abs, &max_index)?;
        let mb = kernel_b.max_norm(&all, &abs, &max_index)?;
        if max_witness.is_none() && rel_diff(ma, mb) > tol {
            max_witness = Some(NormWitness {
                coeffs: abs,
                norm_a: ma,
                norm_b: mb,
            });
        }
    }
    Ok(Theorem1Report {
        sum_equal: sum_witness.is_none(),
        max_equal: max_witness.is_none(),
        sum_witness,
        max_witness,
        tolerance: tol,
        probes,
    })
}

/// Shift-invariance verdicts of the sum- and max-norm functionals.
#[derive(Debug, Clone, Serialize)]
pub struct StationarityReport {
    pub sum_stationary: bool,
    pub max_stationary: bool,
    pub max_sum_deviation: f64,
    pub max_max_deviation: f64,
    pub tolerance: f64,
}

/// Compares both norms at `(t_j)` against `(t_j + h)` for every probe and
/// index shift; the kernel must be nonnegative so that both functionals are
/// defined (the max side uses the absolute coefficients of each probe).
pub fn check_stationarity(
    kernel: &SpectralKernel,
    alpha: f64,
    shifts: &[usize],
    probes: &[Probe],
    tolerance: f64,
) -> Result<StationarityReport> {
    if kernel.sign_class() != SignClass::Nonnegative {
        return Err(StableError::SignedKernel(
            "check_stationarity evaluates both regimes and requires a nonnegative kernel".into(),
        ));
    }
    let sum_index = StabilityIndex::sum(alpha)?;
    let max_index = StabilityIndex::max(alpha)?;
    let n = kernel.n_times();
    let mut max_sum_dev = 0.0_f64;
    let mut max_max_dev = 0.0_f64;
    for probe in probes {
        let abs: Vec<f64> = probe.coeffs.iter().map(|c| c.abs()).collect();
        let base_sum = kernel.sum_norm(&probe.time_indices, &probe.coeffs, &sum_index)?;
        let base_max = kernel.max_norm(&probe.time_indices, &abs, &max_index)?;
        for &h in shifts {
            let shifted: Vec<usize> = probe
                .time_indices
                .iter()
                .map(|&i| {
                    let s = i + h;
                    if s >= n {
                        Err(StableError::ShiftOutOfRange(format!(
                            "time index {i} shifted by {h} leaves the grid of {n} times"
                        )))
                    } else {
                        Ok(s)
                    }
                })
                .collect::<Result<_>>()?;
            let s = kernel.sum_norm(&shifted, &probe.coeffs, &sum_index)?;
            let m = kernel.max_norm(&shifted, &abs, &max_index)?;
            max_sum_dev = max_sum_dev.max(rel_diff(s, base_sum));
            max_max_dev = max_max_dev.max(rel_diff(m, base_max));
        }
    }
    Ok(StationarityReport {
        sum_stationary: max_sum_dev <= tolerance,
        max_stationary: max_max_dev <= tolerance,
        max_sum_deviation: max_sum_dev,
        max_max_deviation: max_max_dev,
        tolerance,
    })
}

/// A probe over real (not grid-index) times, for parametric kernel families.
#[derive(Debug, Clone, Serialize)]
pub struct TimeProbe {
    pub times: Vec<f64>,
    pub coeffs: Vec<f64>,
}

/// Self-similarity verdicts with the quadrature-limited tolerance used.
#[derive(Debug, Clone, Serialize)]
pub struct SelfSimilarityReport {
    pub sum_consistent: bool,
    pub max_consistent: bool,
    pub max_sum_deviation: f64,
    pub max_max_deviation: f64,
    pub tolerance: f64,
    pub quadrature_self_error: f64,
}

/// Checks `‖Σ c_j f_{a·t_j}‖ = a^H·‖Σ c_j f_{t_j}‖` (and the max-norm
/// analogue) for each probe and scale factor.
///
/// With `tolerance = None` the tolerance defaults to 10× the observed
/// quadrature self-error: the relative change of the probe norms when the
/// family's quadrature is refined by a factor of 2 at the identity scale.
pub fn check_self_similarity(
    family: &dyn ScalableKernelFamily,
    h: f64,
    alpha: f64,
    scales: &[f64],
    probes: &[TimeProbe],
    refine: u32,
    tolerance: Option<f64>,
) -> Result<SelfSimilarityReport> {
    if probes.is_empty() {
        return Err(StableError::InvalidParameter(
            "check_self_similarity needs at least one probe".into(),
        ));
    }
    for &a in scales {
        if !(a.is_finite() && a > 0.0) {
            return Err(StableError::InvalidParameter(format!(
                "scale factor must be positive, got {a}"
            )));
        }
    }
    let sum_index = StabilityIndex::sum(alpha)?;
    let max_index = StabilityIndex::max(alpha)?;
    let refine = refine.max(1);

    let mut base_sum = Vec::with_capacity(probes.len());
    let mut base_max = Vec::with_capacity(probes.len());
    let mut self_error = 0.0_f64;
    for probe in probes {
        let kernel = family.kernel_at_times(&probe.times, refine)?;
        let all: Vec<usize> = (0..probe.times.len()).collect();
        let abs: Vec<f64> = probe.coeffs.iter().map(|c| c.abs()).collect();
        let s = kernel.sum_norm(&all, &probe.coeffs, &sum_index)?;
        let m = kernel.max_norm(&all, &abs, &max_index)?;
        let fine = family.kernel_at_times(&probe.times, refine * 2)?;
        let sf = fine.sum_norm(&all, &probe.coeffs, &sum_index)?;
        let mf = fine.max_norm(&all, &abs, &max_index)?;
        self_error = self_error.max(rel_diff(s, sf)).max(rel_diff(m, mf));
        base_sum.push(s);
        base_max.push(m);
    }
    let tol = tolerance.unwrap_or_else(|| 10.0 * self_error.max(1e-12));

    let mut max_sum_dev = 0.0_f64;
    let mut max_max_dev = 0.0_f64;
    for (p, probe) in probes.iter().enumerate() {
        let all: Vec<usize> = (0..probe.times.len()).collect();
        let abs: Vec<f64> = probe.coeffs.iter().map(|c| c.abs()).collect();
        for &a in scales {
            let scaled_times: Vec<f64> = probe.times.iter().map(|&t| a * t).collect();
            let kernel = family.kernel_at_times(&scaled_times, refine)?;
            let s = kernel.sum_norm(&all, &probe.coeffs, &sum_index)?;
            let m = kernel.max_norm(&all, &abs, &max_index)?;
            max_sum_dev = max_sum_dev.max(rel_diff(s, a.powf(h) * base_sum[p]));
            max_max_dev = max_max_dev.max(rel_diff(m, a.powf(h) * base_max[p]));
        }
    }
    Ok(SelfSimilarityReport {
        sum_consistent: max_sum_dev <= tol,
        max_consistent: max_max_dev <= tol,
        max_sum_deviation: max_sum_dev,
        max_max_deviation: max_max_dev,
        tolerance: tol,
        quadrature_self_error: self_error,
    })
}

/// The two convergence metrics along a sequence of rows: the sum-side
/// `‖f_{t_n} − f_t‖_α^{α∧1}` and the max-side `ρ_{μ,α}(|f_{t_n}|, |f_t|)`.
/// On discrete spaces one vanishes along the sequence iff the other does.
#[derive(Debug, Clone, Serialize)]
pub struct LalphaDistances {
    pub sum: Vec<f64>,
    pub max: Vec<f64>,
}

pub fn lalpha_distance(
    kernel: &SpectralKernel,
    t_index: usize,
    sequence: &[usize],
    alpha: f64,
) -> Result<LalphaDistances> {
    let sum_index = StabilityIndex::sum(alpha)?;
    let max_index = StabilityIndex::max(alpha)?;
    let target = kernel.row(t_index)?.to_vec();
    let target_abs: Vec<f64> = target.iter().map(|v| v.abs()).collect();
    let exponent = alpha.min(1.0);
    let mut sum = Vec::with_capacity(sequence.len());
    let mut max = Vec::with_capacity(sequence.len());
    for &i in sequence {
        let row = kernel.row(i)?;
        let d = kernel
            .space()
            .sum_norm(&[row, &target], &[1.0, -1.0], &sum_index)?;
        sum.push(d.powf(exponent));
        let row_abs: Vec<f64> = row.iter().map(|v| v.abs()).collect();
        max.push(kernel.space().rho_metric(&row_abs, &target_abs, &max_index)?);
    }
    Ok(LalphaDistances { sum, max })
}
