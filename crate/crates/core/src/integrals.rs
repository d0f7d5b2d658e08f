//! Exact simulation of stable and extremal integrals over discrete measure
//! spaces, and exact evaluation of the fdd functionals.
//!
//! On a finite space the stable integral is `∫f dM_{α,+} = Σ_j f(s_j)·Z_j`
//! with independent SαS atoms `Z_j` of scale `μ_j^{1/α}`, and the extremal
//! integral is `⨍ f dM_{α,∨} = ⋁_j f(s_j)·W_j` with independent Fréchet
//! atoms of the same scales. Joint draws across times share one atom vector
//! per sample, which is the exact joint law of the representation — no
//! series truncation is involved anywhere.
//!
//! The fdd functionals return the exponents
//! `∫|Σ a_j f_{t_j}|^α dμ` (sum case: the characteristic-function exponent)
//! and `∫(⋁ f_{t_j}/a_j)^α dμ` (max case: the joint-CDF exponent).

use std::io::Write;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, StableError};
use crate::marginals::{standard_frechet, standard_sas, SeededStream};
use crate::measure::{KahanSum, Regime, SignClass, SpectralKernel, StabilityIndex};

/// A finite-dimensional query: selected grid times with a coefficient per
/// time. Max-regime queries require nonnegative coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FddQuery {
    time_indices: Vec<usize>,
    coeffs: Vec<f64>,
    regime: Regime,
}

impl FddQuery {
    pub fn sum(time_indices: Vec<usize>, coeffs: Vec<f64>) -> Result<Self> {
        Self::build(time_indices, coeffs, Regime::Sum)
    }

    pub fn max(time_indices: Vec<usize>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|&c| c < 0.0) {
            return Err(StableError::NegativeValue(
                "max-regime query coefficient".into(),
            ));
        }
        Self::build(time_indices, coeffs, Regime::Max)
    }

    fn build(time_indices: Vec<usize>, coeffs: Vec<f64>, regime: Regime) -> Result<Self> {
        if time_indices.len() != coeffs.len() {
            return Err(StableError::DimensionMismatch(format!(
                "{} time indices vs {} coefficients",
                time_indices.len(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(StableError::NonFinite("query coefficient".into()));
        }
        Ok(Self {
            time_indices,
            coeffs,
            regime,
        })
    }

    pub fn time_indices(&self) -> &[usize] {
        &self.time_indices
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    fn validate_for(&self, kernel: &SpectralKernel) -> Result<()> {
        for &i in &self.time_indices {
            if i >= kernel.n_times() {
                return Err(StableError::DimensionMismatch(format!(
                    "query time index {i} out of range for {} grid times",
                    kernel.n_times()
                )));
            }
        }
        Ok(())
    }
}

/// A probe (selected times plus a coefficient or threshold vector) used by
/// randomized comparisons and factorization checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub time_indices: Vec<usize>,
    pub coeffs: Vec<f64>,
}

/// Seeded Monte-Carlo draws of process values on the kernel's time grid;
/// `draws[k][i]` is sample `k` at grid time `i`.
#[derive(Debug, Clone)]
pub struct SamplePaths {
    kernel: Arc<SpectralKernel>,
    index: StabilityIndex,
    draws: Vec<Vec<f64>>,
    seed: SeededStream,
}

impl SamplePaths {
    pub fn kernel(&self) -> &SpectralKernel {
        &self.kernel
    }

    pub fn index(&self) -> &StabilityIndex {
        &self.index
    }

    pub fn times(&self) -> &[f64] {
        self.kernel.grid().times()
    }

    pub fn n_samples(&self) -> usize {
        self.draws.len()
    }

    pub fn n_times(&self) -> usize {
        self.kernel.n_times()
    }

    pub fn draws(&self) -> &[Vec<f64>] {
        &self.draws
    }

    pub fn seed(&self) -> SeededStream {
        self.seed
    }

    /// All samples of the process at one grid time.
    pub fn column(&self, t_index: usize) -> Result<Vec<f64>> {
        if t_index >= self.n_times() {
            return Err(StableError::DimensionMismatch(format!(
                "time index {t_index} out of range for {} times",
                self.n_times()
            )));
        }
        Ok(self.draws.iter().map(|row| row[t_index]).collect())
    }

    /// CSV export with columns `sample_id,t,value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "sample_id,t,value")?;
        let times = self.times();
        for (k, row) in self.draws.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                writeln!(w, "{},{},{}", k, times[i], v)?;
            }
        }
        Ok(())
    }

    /// Summary with per-time empirical quantiles and empirical-vs-exact
    /// functional diagnostics.
    pub fn summary(&self) -> Result<PathsSummary> {
        let levels = [0.05, 0.25, 0.5, 0.75, 0.95];
        let n = self.n_samples();
        let alpha = self.index.alpha();
        let mut per_time = Vec::with_capacity(self.n_times());
        let mut max_gap = 0.0_f64;
        for i in 0..self.n_times() {
            let mut col = self.column(i)?;
            col.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let quantiles: Vec<(f64, f64)> = levels
                .iter()
                .map(|&q| {
                    let idx = ((q * n as f64) as usize).min(n - 1);
                    (q, col[idx])
                })
                .collect();
            let scale = self.kernel.scale_coefficient(i, &self.index)?;
            let gap = match self.index.regime() {
                Regime::Sum => {
                    // sup over a small θ-grid of |empirical CF − exp(−(σ|θ|)^α)|
                    [0.5, 1.0, 2.0]
                        .iter()
                        .map(|&theta| {
                            let emp = empirical_cf_cos(&col, theta);
                            let exact = (-(scale * theta.abs()).powf(alpha)).exp();
                            (emp - exact).abs()
                        })
                        .fold(0.0, f64::max)
                }
                Regime::Max => {
                    if scale == 0.0 {
                        0.0
                    } else {
                        [0.25_f64, 0.5, 0.75, 0.9]
                            .iter()
                            .map(|&q| {
                                let y = scale * (-q.ln()).powf(-1.0 / alpha);
                                let emp =
                                    col.iter().filter(|&&v| v <= y).count() as f64 / n as f64;
                                (emp - q).abs()
                            })
                            .fold(0.0, f64::max)
                    }
                }
            };
            max_gap = max_gap.max(gap);
            per_time.push(TimeMarginalSummary {
                t: self.times()[i],
                scale_coefficient: scale,
                empirical_quantiles: quantiles,
                marginal_gap: gap,
            });
        }

        let joint = self.joint_diagnostic()?;
        max_gap = max_gap.max(joint.gap);

        Ok(PathsSummary {
            schema_version: 1,
            regime: self.index.regime(),
            alpha,
            n_samples: n,
            seed: self.seed.seed,
            stream_id: self.seed.stream_id,
            times: self.times().to_vec(),
            per_time,
            joint,
            max_abs_gap: max_gap,
        })
    }

    fn joint_diagnostic(&self) -> Result<JointDiagnostic> {
        let all: Vec<usize> = (0..self.n_times()).collect();
        match self.index.regime() {
            Regime::Sum => {
                let coeffs = vec![1.0; self.n_times()];
                let query = FddQuery::sum(all.clone(), coeffs.clone())?;
                let exponent = fdd_cf_exponent(&self.kernel, &query, &self.index)?;
                let combos = linear_combination(self, &all, &coeffs)?;
                let empirical = empirical_cf_cos(&combos, 1.0);
                let exact = (-exponent).exp();
                Ok(JointDiagnostic {
                    description: "CF of the all-ones combination at theta=1".into(),
                    empirical,
                    exact,
                    gap: (empirical - exact).abs(),
                })
            }
            Regime::Max => {
                // joint CDF at the exact marginal medians
                let alpha = self.index.alpha();
                let mut thresholds = Vec::with_capacity(self.n_times());
                for i in 0..self.n_times() {
                    let scale = self.kernel.scale_coefficient(i, &self.index)?;
                    let y = if scale > 0.0 {
                        scale * (-(0.5_f64).ln()).powf(-1.0 / alpha)
                    } else {
                        1.0
                    };
                    thresholds.push(y);
                }
                let query = FddQuery::max(all.clone(), thresholds.clone())?;
                let exponent = fdd_cdf_exponent(&self.kernel, &query, &thresholds, &self.index)?;
                let empirical = empirical_joint_cdf(self, &all, &thresholds)?;
                let exact = (-exponent).exp();
                Ok(JointDiagnostic {
                    description: "joint CDF at the exact marginal medians".into(),
                    empirical,
                    exact,
                    gap: (empirical - exact).abs(),
                })
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TimeMarginalSummary {
    pub t: f64,
    pub scale_coefficient: f64,
    pub empirical_quantiles: Vec<(f64, f64)>,
    pub marginal_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct JointDiagnostic {
    pub description: String,
    pub empirical: f64,
    pub exact: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PathsSummary {
    pub schema_version: u32,
    pub regime: Regime,
    pub alpha: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub stream_id: u64,
    pub times: Vec<f64>,
    pub per_time: Vec<TimeMarginalSummary>,
    pub joint: JointDiagnostic,
    pub max_abs_gap: f64,
}

fn atom_scales(kernel: &SpectralKernel, alpha: f64) -> Vec<f64> {
    kernel
        .space()
        .masses()
        .iter()
        .map(|&m| m.powf(1.0 / alpha))
        .collect()
}

fn simulate_block(
    kernel: &SpectralKernel,
    index: &StabilityIndex,
    n_samples: usize,
    stream: &SeededStream,
) -> Vec<Vec<f64>> {
    let alpha = index.alpha();
    let scales = atom_scales(kernel, alpha);
    let m = kernel.n_points();
    let t = kernel.n_times();
    let values = kernel.values();
    let mut rng = stream.rng();
    let mut atoms = vec![0.0_f64; m];
    let mut draws = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        match index.regime() {
            Regime::Sum => {
                for j in 0..m {
                    atoms[j] = scales[j] * standard_sas(alpha, &mut rng);
                }
                let row = (0..t)
                    .map(|i| {
                        let mut acc = KahanSum::new();
                        for j in 0..m {
                            acc.add(values[i][j] * atoms[j]);
                        }
                        acc.value()
                    })
                    .collect();
                draws.push(row);
            }
            Regime::Max => {
                for j in 0..m {
                    atoms[j] = scales[j] * standard_frechet(alpha, &mut rng);
                }
                let row = (0..t)
                    .map(|i| {
                        let mut best = 0.0_f64;
                        for j in 0..m {
                            best = best.max(values[i][j] * atoms[j]);
                        }
                        best
                    })
                    .collect();
                draws.push(row);
            }
        }
    }
    draws
}

fn simulate(
    kernel: &SpectralKernel,
    index: &StabilityIndex,
    n_samples: usize,
    stream: &SeededStream,
    chunks: usize,
) -> Result<SamplePaths> {
    if n_samples == 0 {
        return Err(StableError::InvalidParameter(
            "sample count must be at least 1".into(),
        ));
    }
    kernel.validate_alpha_norms(index)?;
    let draws = if chunks <= 1 {
        simulate_block(kernel, index, n_samples, stream)
    } else {
        // Partitioned sampling: chunk k draws from substream(k); results are
        // concatenated in chunk order, so the output is independent of thread
        // scheduling.
        let per = n_samples.div_ceil(chunks);
        let mut plan = Vec::new();
        let mut left = n_samples;
        let mut k = 0u64;
        while left > 0 {
            let take = per.min(left);
            plan.push((k, take));
            left -= take;
            k += 1;
        }
        let mut blocks: Vec<Vec<Vec<f64>>> = Vec::with_capacity(plan.len());
        std::thread::scope(|scope| {
            let handles: Vec<_> = plan
                .iter()
                .map(|&(k, take)| {
                    let sub = stream.substream(k);
                    scope.spawn(move || simulate_block(kernel, index, take, &sub))
                })
                .collect();
            for h in handles {
                blocks.push(h.join().expect("simulation worker panicked"));
            }
        });
        blocks.into_iter().flatten().collect()
    };
    Ok(SamplePaths {
        kernel: Arc::new(kernel.clone()),
        index: *index,
        draws,
        seed: *stream,
    })
}

/// Joint draws of the sum-stable process `X_t = Σ_j f_t(s_j)·Z_j`.
pub fn simulate_sum_process(
    kernel: &SpectralKernel,
    alpha: &StabilityIndex,
    n_samples: usize,
    stream: &SeededStream,
) -> Result<SamplePaths> {
    if alpha.regime() != Regime::Sum {
        return Err(StableError::RegimeMismatch(
            "simulate_sum_process requires a sum-regime index".into(),
        ));
    }
    simulate(kernel, alpha, n_samples, stream, 1)
}

/// Joint draws of the max-stable process `Y_t = ⋁_j f_t(s_j)·W_j`; the
/// kernel must be declared nonnegative.
pub fn simulate_max_process(
    kernel: &SpectralKernel,
    alpha: &StabilityIndex,
    n_samples: usize,
    stream: &SeededStream,
) -> Result<SamplePaths> {
    if alpha.regime() != Regime::Max {
        return Err(StableError::RegimeMismatch(
            "simulate_max_process requires a max-regime index".into(),
        ));
    }
    if kernel.sign_class() != SignClass::Nonnegative {
        return Err(StableError::SignedKernel(
            "extremal integrals require a nonnegative kernel".into(),
        ));
    }
    simulate(kernel, alpha, n_samples, stream, 1)
}

/// Partitioned variant: samples are drawn in `chunks` blocks, block `k`
/// using `stream.substream(k)`, so blocks can run on worker threads while
/// the concatenated output stays deterministic for a fixed chunk count.
pub fn simulate_partitioned(
    kernel: &SpectralKernel,
    alpha: &StabilityIndex,
    n_samples: usize,
    stream: &SeededStream,
    chunks: usize,
) -> Result<SamplePaths> {
    if alpha.regime() == Regime::Max && kernel.sign_class() != SignClass::Nonnegative {
        return Err(StableError::SignedKernel(
            "extremal integrals require a nonnegative kernel".into(),
        ));
    }
    simulate(kernel, alpha, n_samples, stream, chunks.max(1))
}

/// The Eq.-(3) exponent `∫_S |Σ_j a_j f_{t_j}|^α dμ`; the characteristic
/// function of `Σ_j a_j X_{t_j}` at 1 is `exp(−result)`.
pub fn fdd_cf_exponent(
    kernel: &SpectralKernel,
    query: &FddQuery,
    alpha: &StabilityIndex,
) -> Result<f64> {
    if query.regime() != Regime::Sum || alpha.regime() != Regime::Sum {
        return Err(StableError::RegimeMismatch(
            "fdd_cf_exponent requires sum-regime query and index".into(),
        ));
    }
    query.validate_for(kernel)?;
    let a = alpha.alpha();
    let mut acc = KahanSum::new();
    for (j, &mass) in kernel.space().masses().iter().enumerate() {
        let mut combo = 0.0;
        for (pos, &i) in query.time_indices().iter().enumerate() {
            combo += query.coeffs()[pos] * kernel.values()[i][j];
        }
        acc.add(mass * combo.abs().powf(a));
    }
    let v = acc.value();
    if !v.is_finite() {
        return Err(StableError::NonFinite("fdd_cf_exponent".into()));
    }
    Ok(v)
}

/// The Eq.-(4) exponent `∫_S (⋁_j f_{t_j}/a_j)^α dμ` with `a_j` the
/// thresholds; `P(Y_{t_1} ≤ a_1, …, Y_{t_n} ≤ a_n) = exp(−result)`.
pub fn fdd_cdf_exponent(
    kernel: &SpectralKernel,
    query: &FddQuery,
    thresholds: &[f64],
    alpha: &StabilityIndex,
) -> Result<f64> {
    if query.regime() != Regime::Max || alpha.regime() != Regime::Max {
        return Err(StableError::RegimeMismatch(
            "fdd_cdf_exponent requires max-regime query and index".into(),
        ));
    }
    if kernel.sign_class() != SignClass::Nonnegative {
        return Err(StableError::SignedKernel(
            "fdd_cdf_exponent requires a nonnegative kernel".into(),
        ));
    }
    if thresholds.len() != query.time_indices().len() {
        return Err(StableError::DimensionMismatch(format!(
            "{} thresholds vs {} query times",
            thresholds.len(),
            query.time_indices().len()
        )));
    }
    for &t in thresholds {
        if !t.is_finite() || t <= 0.0 {
            return Err(StableError::InvalidParameter(format!(
                "threshold must be strictly positive, got {t}"
            )));
        }
    }
    query.validate_for(kernel)?;
    let a = alpha.alpha();
    let mut acc = KahanSum::new();
    for (j, &mass) in kernel.space().masses().iter().enumerate() {
        let mut best = 0.0_f64;
        for (pos, &i) in query.time_indices().iter().enumerate() {
            best = best.max(kernel.values()[i][j] / thresholds[pos]);
        }
        acc.add(mass * best.powf(a));
    }
    let v = acc.value();
    if !v.is_finite() {
        return Err(StableError::NonFinite("fdd_cdf_exponent".into()));
    }
    Ok(v)
}

/// Witness of a norm-functional discrepancy between two kernels.
#[derive(Debug, Clone, Serialize)]
pub struct FddWitness {
    pub time_indices: Vec<usize>,
    pub coeffs: Vec<f64>,
    pub norm_a: f64,
    pub norm_b: f64,
}

/// Outcome of a randomized representation-equality test. `consistent = true`
/// means no sampled query separated the kernels; it is explicitly not a
/// proof of distributional equality.
#[derive(Debug, Clone, Serialize)]
pub struct FddComparison {
    pub schema_version: u32,
    pub regime: Regime,
    pub alpha: f64,
    pub tolerance: f64,
    pub consistent: bool,
    pub witness: Option<FddWitness>,
    pub probes: Vec<Probe>,
}

pub(crate) fn rel_diff(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}

pub(crate) fn sample_cauchy<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    (PI_TIMES * (u - 0.5)).tan()
}

const PI_TIMES: f64 = std::f64::consts::PI;

/// Randomized check whether two kernels define the same process law, by
/// probing the norm functional with deterministic unit/all-ones probes and
/// heavy-tailed random coefficient vectors over random time subsets.
pub fn fdd_equal(
    kernel_a: &SpectralKernel,
    kernel_b: &SpectralKernel,
    alpha: &StabilityIndex,
    trials: usize,
    stream: &SeededStream,
) -> Result<FddComparison> {
    if kernel_a.n_times() != kernel_b.n_times() {
        return Err(StableError::GridMismatch(format!(
            "{} vs {} grid times",
            kernel_a.n_times(),
            kernel_b.n_times()
        )));
    }
    let n = kernel_a.n_times();
    let tolerance = 1e-9;
    let mut probes: Vec<Probe> = Vec::new();
    // deterministic probes: unit vectors and all-ones
    for i in 0..n {
        probes.push(Probe {
            time_indices: vec![i],
            coeffs: vec![1.0],
        });
    }
    probes.push(Probe {
        time_indices: (0..n).collect(),
        coeffs: vec![1.0; n],
    });
    let mut rng = stream.rng();
    for _ in 0..trials {
        let k = rng.gen_range(1..=n.min(6));
        let mut idx: Vec<usize> = (0..n).collect();
        for pos in 0..k {
            let swap = rng.gen_range(pos..n);
            idx.swap(pos, swap);
        }
        idx.truncate(k);
        idx.sort_unstable();
        let coeffs: Vec<f64> = (0..k)
            .map(|_| {
                let c = sample_cauchy(&mut rng);
                match alpha.regime() {
                    Regime::Sum => c,
                    Regime::Max => c.abs(),
                }
            })
            .collect();
        probes.push(Probe {
            time_indices: idx,
            coeffs,
        });
    }

    let mut ran: Vec<Probe> = Vec::with_capacity(probes.len());
    for probe in probes {
        let (na, nb) = match alpha.regime() {
            Regime::Sum => (
                kernel_a.sum_norm(&probe.time_indices, &probe.coeffs, alpha)?,
                kernel_b.sum_norm(&probe.time_indices, &probe.coeffs, alpha)?,
            ),
            Regime::Max => (
                kernel_a.max_norm(&probe.time_indices, &probe.coeffs, alpha)?,
                kernel_b.max_norm(&probe.time_indices, &probe.coeffs, alpha)?,
            ),
        };
        let separated = rel_diff(na, nb) > tolerance;
        ran.push(probe.clone());
        if separated {
            return Ok(FddComparison {
                schema_version: 1,
                regime: alpha.regime(),
                alpha: alpha.alpha(),
                tolerance,
                consistent: false,
                witness: Some(FddWitness {
                    time_indices: probe.time_indices,
                    coeffs: probe.coeffs,
                    norm_a: na,
                    norm_b: nb,
                }),
                probes: ran,
            });
        }
    }
    Ok(FddComparison {
        schema_version: 1,
        regime: alpha.regime(),
        alpha: alpha.alpha(),
        tolerance,
        consistent: true,
        witness: None,
        probes: ran,
    })
}

/// Handle over one spectral representation in a fixed regime, exposing the
/// simulate/fdd operations.
#[derive(Debug, Clone)]
pub struct ProcessHandle {
    kernel: Arc<SpectralKernel>,
    index: StabilityIndex,
}

impl ProcessHandle {
    pub fn new(kernel: Arc<SpectralKernel>, index: StabilityIndex) -> Result<Self> {
        if index.regime() == Regime::Max && kernel.sign_class() != SignClass::Nonnegative {
            return Err(StableError::SignedKernel(
                "a max-regime process handle requires a nonnegative kernel".into(),
            ));
        }
        Ok(Self { kernel, index })
    }

    pub fn from_kernel(kernel: SpectralKernel, index: StabilityIndex) -> Result<Self> {
        Self::new(Arc::new(kernel), index)
    }

    pub fn kernel(&self) -> &SpectralKernel {
        &self.kernel
    }

    /// The shared kernel object (clones refer to the same allocation).
    pub fn kernel_arc(&self) -> Arc<SpectralKernel> {
        Arc::clone(&self.kernel)
    }

    pub fn index(&self) -> &StabilityIndex {
        &self.index
    }

    pub fn simulate(&self, n_samples: usize, stream: &SeededStream) -> Result<SamplePaths> {
        simulate(&self.kernel, &self.index, n_samples, stream, 1)
    }

    pub fn cf_exponent(&self, time_indices: &[usize], coeffs: &[f64]) -> Result<f64> {
        let query = FddQuery::sum(time_indices.to_vec(), coeffs.to_vec())?;
        fdd_cf_exponent(&self.kernel, &query, &self.index)
    }

    pub fn cdf_exponent(&self, time_indices: &[usize], thresholds: &[f64]) -> Result<f64> {
        let query = FddQuery::max(time_indices.to_vec(), thresholds.to_vec())?;
        fdd_cdf_exponent(&self.kernel, &query, thresholds, &self.index)
    }

    pub fn scale_coefficient(&self, t_index: usize) -> Result<f64> {
        self.kernel.scale_coefficient(t_index, &self.index)
    }
}

/// Cosine average `(1/n) Σ cos(θ x_k)`; the sine part vanishes by symmetry
/// for SαS laws, so this is the empirical characteristic function.
pub fn empirical_cf_cos(samples: &[f64], theta: f64) -> f64 {
    if samples.is_empty() {
        return 1.0;
    }
    let mut acc = KahanSum::new();
    for &x in samples {
        acc.add((theta * x).cos());
    }
    acc.value() / samples.len() as f64
}

/// Per-sample linear combination `Σ_j coeffs[j]·X_{t_j}`.
pub fn linear_combination(
    paths: &SamplePaths,
    time_indices: &[usize],
    coeffs: &[f64],
) -> Result<Vec<f64>> {
    if time_indices.len() != coeffs.len() {
        return Err(StableError::DimensionMismatch(format!(
            "{} time indices vs {} coefficients",
            time_indices.len(),
            coeffs.len()
        )));
    }
    for &i in time_indices {
        if i >= paths.n_times() {
            return Err(StableError::DimensionMismatch(format!(
                "time index {i} out of range for {} times",
                paths.n_times()
            )));
        }
    }
    Ok(paths
        .draws()
        .iter()
        .map(|row| {
            let mut s = 0.0;
            for (pos, &i) in time_indices.iter().enumerate() {
                s += coeffs[pos] * row[i];
            }
            s
        })
        .collect())
}

/// Empirical `P(X_{t_1} ≤ a_1, …, X_{t_n} ≤ a_n)`.
pub fn empirical_joint_cdf(
    paths: &SamplePaths,
    time_indices: &[usize],
    thresholds: &[f64],
) -> Result<f64> {
    if time_indices.len() != thresholds.len() {
        return Err(StableError::DimensionMismatch(format!(
            "{} time indices vs {} thresholds",
            time_indices.len(),
            thresholds.len()
        )));
    }
    for &i in time_indices {
        if i >= paths.n_times() {
            return Err(StableError::DimensionMismatch(format!(
                "time index {i} out of range for {} times",
                paths.n_times()
            )));
        }
    }
    let hits = paths
        .draws()
        .iter()
        .filter(|row| {
            time_indices
                .iter()
                .enumerate()
                .all(|(pos, &i)| row[i] <= thresholds[pos])
        })
        .count();
    Ok(hits as f64 / paths.n_samples() as f64)
}
