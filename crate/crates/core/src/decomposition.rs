//! Conservative/dissipative and positive/null classification of kernels over
//! growing time windows, component extraction, and exponent-additivity
//! (independence) checks across measure-space partitions.
//!
//! The defining conditions are infinite-integral conditions: a point is
//! conservative when `∫_T f_t(s)^α λ(dt) = ∞` and positive when the
//! w-weighted integral diverges for every weight in the class 𝒲. No finite
//! procedure decides divergence, so the classifier applies a documented
//! heuristic: partial sums `S_n` over windows `n_k = n_0·2^k` are labeled
//! divergent when the last doubling still grows the sum by more than a
//! factor `1 + δ`. Trajectories are reported so callers can override. Slowly
//! divergent sums can be mislabeled; that failure mode is inherent to the
//! finite-window surrogate.
//!
//! Labels depend on the time sections `|f_t(s)|^α` only, so they are
//! identical for the sum-side and max-side readings of the same kernel, and
//! invariant under point permutations and mass rescalings.

use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Result, StableError};
use crate::integrals::{fdd_cdf_exponent, fdd_cf_exponent, rel_diff, FddQuery, Probe, ProcessHandle};
use crate::kernels::{KernelFamily, TimeDomain};
use crate::measure::{KahanSum, Regime, SpectralKernel, StabilityIndex, TimeGrid};

/// Relative tolerance for exponent additivity across a partition.
pub const FACTORIZATION_TOLERANCE: f64 = 1e-12;

/// Default ratio threshold of the divergence heuristic.
pub const DEFAULT_DELTA: f64 = 0.01;

/// A weight function from the class 𝒲: nonnegative, nondecreasing on
/// `t ≤ 0`, nonincreasing on `t ≥ 0`, with divergent λ-integral on both
/// half-lines.
#[derive(Clone)]
pub struct WeightFunction {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "WeightFunction({})", self.name)
    }
}

impl WeightFunction {
    /// `w₁(t) = 1/(1+|t|)`.
    pub fn harmonic() -> Self {
        Self {
            name: "harmonic".into(),
            f: Arc::new(|t: f64| 1.0 / (1.0 + t.abs())),
        }
    }

    /// `w₂(t) = 1/((1+|t|)·ln(e+|t|))`.
    pub fn harmonic_log() -> Self {
        Self {
            name: "harmonic-log".into(),
            f: Arc::new(|t: f64| 1.0 / ((1.0 + t.abs()) * (std::f64::consts::E + t.abs()).ln())),
        }
    }

    pub fn custom(
        name: impl Into<String>,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    ) -> Self {
        Self {
            name: name.into(),
            f,
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "harmonic" => Ok(Self::harmonic()),
            "harmonic-log" => Ok(Self::harmonic_log()),
            other => Err(StableError::InvalidWeight(format!(
                "unknown weight '{other}' (built-ins: harmonic, harmonic-log)"
            ))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    /// Numeric validation of the 𝒲 invariants on a window grid: sign,
    /// monotonicity on each half-line, and unbounded half-line partial sums
    /// (their last doubling must still grow by more than `delta`).
    fn validate_on(&self, grids: &[TimeGrid], delta: f64) -> Result<()> {
        let largest = grids.last().expect("nonempty schedule");
        let mut prev_neg: Option<f64> = None;
        let mut prev_pos: Option<f64> = None;
        for &t in largest.times() {
            let w = self.eval(t);
            if !w.is_finite() || w < 0.0 {
                return Err(StableError::InvalidWeight(format!(
                    "{} takes value {w} at t={t}",
                    self.name
                )));
            }
            if t <= 0.0 {
                if let Some(p) = prev_neg {
                    if w < p {
                        return Err(StableError::InvalidWeight(format!(
                            "{} is not nondecreasing on t <= 0",
                            self.name
                        )));
                    }
                }
                prev_neg = Some(w);
            }
            if t >= 0.0 {
                if let Some(p) = prev_pos {
                    if w > p {
                        return Err(StableError::InvalidWeight(format!(
                            "{} is not nonincreasing on t >= 0",
                            self.name
                        )));
                    }
                }
                prev_pos = Some(w);
            }
        }
        for side in [-1.0, 1.0] {
            let sums: Vec<f64> = grids
                .iter()
                .map(|g| {
                    let mut acc = KahanSum::new();
                    for (i, &t) in g.times().iter().enumerate() {
                        if t * side >= 0.0 {
                            acc.add(g.lambda_weights()[i] * self.eval(t));
                        }
                    }
                    acc.value()
                })
                .collect();
            let k = sums.len();
            if k >= 2 && sums[k - 1] <= (1.0 + delta) * sums[k - 2] {
                return Err(StableError::InvalidWeight(format!(
                    "{} has a bounded-looking partial sum on the {} half-line",
                    self.name,
                    if side < 0.0 { "negative" } else { "positive" }
                )));
            }
        }
        Ok(())
    }
}

/// Geometric window schedule `n_k = n_0·2^k`, `k = 0..=doublings`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WindowSchedule {
    pub n0: u32,
    pub doublings: u32,
}

impl WindowSchedule {
    pub fn new(n0: u32, doublings: u32) -> Result<Self> {
        if n0 == 0 {
            return Err(StableError::InvalidParameter(
                "window schedule needs n0 >= 1".into(),
            ));
        }
        if doublings < 3 {
            return Err(StableError::InvalidParameter(format!(
                "window schedule too short: {doublings} doublings (need at least 3)"
            )));
        }
        Ok(Self { n0, doublings })
    }

    pub fn windows(&self) -> Vec<f64> {
        (0..=self.doublings)
            .map(|k| self.n0 as f64 * 2f64.powi(k as i32))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CdLabel {
    Conservative,
    Dissipative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PnLabel {
    Positive,
    Null,
}

/// Per-weight divergence diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct WeightedDiagnostics {
    pub weight: String,
    /// `trajectories[point][window]`
    pub trajectories: Vec<Vec<f64>>,
    pub divergent: Vec<bool>,
}

/// Joint C/D and P/N labels with the partial-sum trajectories behind them.
/// By construction every dissipative point is null and every positive point
/// is conservative.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionLabel {
    pub point_ids: Vec<String>,
    pub cd: Vec<CdLabel>,
    pub pn: Vec<PnLabel>,
    pub windows: Vec<f64>,
    /// Unweighted trajectories `S_{n_k}(s)`, indexed `[point][window]`.
    pub trajectories: Vec<Vec<f64>>,
    pub weighted: Vec<WeightedDiagnostics>,
    pub delta: f64,
}

impl DecompositionLabel {
    /// Point indices labeled conservative / dissipative / positive /
    /// conservative-and-null.
    pub fn indices_where(&self, cd: Option<CdLabel>, pn: Option<PnLabel>) -> Vec<usize> {
        (0..self.point_ids.len())
            .filter(|&j| {
                cd.is_none_or(|c| self.cd[j] == c) && pn.is_none_or(|p| self.pn[j] == p)
            })
            .collect()
    }

    /// CSV export: `point_id,cd,pn,S_<n0>,…`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "point_id,cd,pn")?;
        for n in &self.windows {
            write!(w, ",S_{n}")?;
        }
        writeln!(w)?;
        for j in 0..self.point_ids.len() {
            write!(
                w,
                "{},{},{}",
                self.point_ids[j],
                match self.cd[j] {
                    CdLabel::Conservative => "C",
                    CdLabel::Dissipative => "D",
                },
                match self.pn[j] {
                    PnLabel::Positive => "P",
                    PnLabel::Null => "N",
                }
            )?;
            for v in &self.trajectories[j] {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Classification configuration: window schedule, divergence threshold and
/// the tested weight set.
#[derive(Debug, Clone)]
pub struct ClassificationConfig {
    pub schedule: WindowSchedule,
    pub delta: f64,
    pub weights: Vec<WeightFunction>,
}

impl ClassificationConfig {
    pub fn new(schedule: WindowSchedule, delta: f64, weights: Vec<WeightFunction>) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(StableError::InvalidParameter(format!(
                "delta must be positive, got {delta}"
            )));
        }
        if weights.is_empty() {
            return Err(StableError::InvalidWeight(
                "the tested weight set must be nonempty".into(),
            ));
        }
        Ok(Self {
            schedule,
            delta,
            weights,
        })
    }

    /// Schedule `n0 = 8` with 6 doublings, `δ = 0.01`, weights `{w₁, w₂}`.
    pub fn default_desk_scale() -> Self {
        Self {
            schedule: WindowSchedule { n0: 8, doublings: 6 },
            delta: DEFAULT_DELTA,
            weights: vec![WeightFunction::harmonic(), WeightFunction::harmonic_log()],
        }
    }
}

fn window_grid(domain: TimeDomain, n: f64) -> Result<TimeGrid> {
    match domain {
        TimeDomain::IntegerLattice => {
            let m = n.floor() as i64;
            let times: Vec<i64> = (-m..=m).collect();
            TimeGrid::integer_lattice(&times)
        }
        TimeDomain::RealLine { dt } => {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(StableError::InvalidParameter(format!(
                    "real-line time step must be positive, got {dt}"
                )));
            }
            let m = (n / dt).floor() as i64;
            let times: Vec<f64> = (-m..=m).map(|k| k as f64 * dt).collect();
            let weights = vec![dt; times.len()];
            TimeGrid::real_grid(times, weights)
        }
    }
}

fn validate_alpha_exponent(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(StableError::InvalidParameter(format!(
            "classification exponent alpha must be positive, got {alpha}"
        )));
    }
    Ok(())
}

/// Partial sums `Σ_{|t| ≤ n_k} w(t)·|f_t(s)|^α·λ_t` per point per window.
fn trajectories(
    family: &dyn KernelFamily,
    alpha: f64,
    grids: &[TimeGrid],
    weight: Option<&WeightFunction>,
) -> Result<Vec<Vec<f64>>> {
    let n_points = family.space().len();
    let mut out = vec![Vec::with_capacity(grids.len()); n_points];
    for grid in grids {
        let kernel = family.kernel_on(grid)?;
        if kernel.n_points() != n_points {
            return Err(StableError::DimensionMismatch(
                "family changed its measure space between windows".into(),
            ));
        }
        let mut accs = vec![KahanSum::new(); n_points];
        for (i, &t) in grid.times().iter().enumerate() {
            let lam = grid.lambda_weights()[i];
            let w = weight.map_or(1.0, |w| w.eval(t));
            let row = kernel.row(i)?;
            for j in 0..n_points {
                accs[j].add(lam * w * row[j].abs().powf(alpha));
            }
        }
        for j in 0..n_points {
            out[j].push(accs[j].value());
        }
    }
    Ok(out)
}

/// The ratio heuristic: a trajectory is flagged divergent when the last
/// doubling still grows it by more than `1 + δ` (an identically-zero section
/// is convergent; a section whose support appears only in the last window is
/// treated as divergent since the observed ratio is infinite).
fn diverges(trajectory: &[f64], delta: f64) -> bool {
    let k = trajectory.len();
    let last = trajectory[k - 1];
    let prev = trajectory[k - 2];
    if last == 0.0 {
        false
    } else if prev == 0.0 {
        true
    } else {
        last / prev > 1.0 + delta
    }
}

/// C/D labels with their partial-sum trajectories.
#[derive(Debug, Clone, Serialize)]
pub struct CdClassification {
    pub labels: Vec<CdLabel>,
    pub trajectories: Vec<Vec<f64>>,
    pub windows: Vec<f64>,
}

/// P/N labels with per-weight diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct PnClassification {
    pub labels: Vec<PnLabel>,
    pub weighted: Vec<WeightedDiagnostics>,
}

/// Conservative/dissipative split of the family's points.
pub fn classify_cd(
    family: &dyn KernelFamily,
    alpha: f64,
    schedule: &WindowSchedule,
    delta: f64,
) -> Result<CdClassification> {
    validate_alpha_exponent(alpha)?;
    let windows = schedule.windows();
    let grids: Vec<TimeGrid> = windows
        .iter()
        .map(|&n| window_grid(family.time_domain(), n))
        .collect::<Result<_>>()?;
    let trajectories = trajectories(family, alpha, &grids, None)?;
    let labels = trajectories
        .iter()
        .map(|t| {
            if diverges(t, delta) {
                CdLabel::Conservative
            } else {
                CdLabel::Dissipative
            }
        })
        .collect();
    Ok(CdClassification {
        labels,
        trajectories,
        windows,
    })
}

/// Positive/null split: positive iff the weighted partial sums diverge for
/// every tested weight. The ∀-w quantifier of the class 𝒲 is approximated
/// from above by the tested set, so P can be over-reported.
pub fn classify_pn(
    family: &dyn KernelFamily,
    alpha: f64,
    weights: &[WeightFunction],
    schedule: &WindowSchedule,
    delta: f64,
) -> Result<PnClassification> {
    validate_alpha_exponent(alpha)?;
    if weights.is_empty() {
        return Err(StableError::InvalidWeight(
            "the tested weight set must be nonempty".into(),
        ));
    }
    let windows = schedule.windows();
    let grids: Vec<TimeGrid> = windows
        .iter()
        .map(|&n| window_grid(family.time_domain(), n))
        .collect::<Result<_>>()?;
    for w in weights {
        w.validate_on(&grids, delta)?;
    }
    let n_points = family.space().len();
    let mut diagnostics = Vec::with_capacity(weights.len());
    for w in weights {
        let trajs = trajectories(family, alpha, &grids, Some(w))?;
        let divergent = trajs.iter().map(|t| diverges(t, delta)).collect();
        diagnostics.push(WeightedDiagnostics {
            weight: w.name().to_string(),
            trajectories: trajs,
            divergent,
        });
    }
    let labels = (0..n_points)
        .map(|j| {
            if diagnostics.iter().all(|d| d.divergent[j]) {
                PnLabel::Positive
            } else {
                PnLabel::Null
            }
        })
        .collect();
    Ok(PnClassification {
        labels,
        weighted: diagnostics,
    })
}

/// Joint classification with the inclusion invariants `D ⊆ N` and `P ⊆ C`
/// enforced structurally: a point keeps the positive label only if it is
/// also conservative.
pub fn classify(
    family: &dyn KernelFamily,
    alpha: f64,
    config: &ClassificationConfig,
) -> Result<DecompositionLabel> {
    let cd = classify_cd(family, alpha, &config.schedule, config.delta)?;
    let pn = classify_pn(
        family,
        alpha,
        &config.weights,
        &config.schedule,
        config.delta,
    )?;
    let pn_labels = pn
        .labels
        .iter()
        .zip(&cd.labels)
        .map(|(&p, &c)| {
            if p == PnLabel::Positive && c == CdLabel::Conservative {
                PnLabel::Positive
            } else {
                PnLabel::Null
            }
        })
        .collect();
    Ok(DecompositionLabel {
        point_ids: family.space().points().to_vec(),
        cd: cd.labels,
        pn: pn_labels,
        windows: cd.windows,
        trajectories: cd.trajectories,
        weighted: pn.weighted,
        delta: config.delta,
    })
}

/// Degenerate "window = everything" classification of a fixed finite
/// kernel: every time integral is a finite sum, so every point is
/// dissipative and null.
pub fn classify_fixed(kernel: &SpectralKernel, alpha: f64) -> Result<DecompositionLabel> {
    validate_alpha_exponent(alpha)?;
    let n_points = kernel.n_points();
    let mut accs = vec![KahanSum::new(); n_points];
    for (i, _) in kernel.grid().times().iter().enumerate() {
        let lam = kernel.grid().lambda_weights()[i];
        let row = kernel.row(i)?;
        for j in 0..n_points {
            accs[j].add(lam * row[j].abs().powf(alpha));
        }
    }
    let trajectories: Vec<Vec<f64>> = accs.iter().map(|a| vec![a.value()]).collect();
    Ok(DecompositionLabel {
        point_ids: kernel.space().points().to_vec(),
        cd: vec![CdLabel::Dissipative; n_points],
        pn: vec![PnLabel::Null; n_points],
        windows: vec![kernel
            .grid()
            .times()
            .iter()
            .fold(0.0_f64, |m, t| m.max(t.abs()))],
        trajectories,
        weighted: Vec::new(),
        delta: 0.0,
    })
}

/// Restriction of the process to the atoms in `subset` (an empty subset
/// yields the degenerate zero process).
pub fn extract_component(
    kernel: &SpectralKernel,
    subset: &[usize],
    index: &StabilityIndex,
) -> Result<ProcessHandle> {
    let mut seen = std::collections::HashSet::new();
    for &j in subset {
        if !seen.insert(j) {
            return Err(StableError::InvalidPartition(format!(
                "point index {j} listed twice in the component"
            )));
        }
    }
    ProcessHandle::from_kernel(kernel.restrict_points(subset)?, *index)
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorizationReport {
    pub additive: bool,
    pub max_rel_gap: f64,
    pub tolerance: f64,
}

/// Verifies exponent additivity of the fdd functionals across a partition
/// of the measure space — the exact functional form of independence of the
/// component processes. Sum regime probes carry CF coefficients; max regime
/// probes carry (strictly positive) thresholds.
pub fn factorization_check(
    kernel: &SpectralKernel,
    partition: &[Vec<usize>],
    index: &StabilityIndex,
    probes: &[Probe],
) -> Result<FactorizationReport> {
    let n = kernel.n_points();
    let mut seen = vec![false; n];
    for part in partition {
        for &j in part {
            if j >= n {
                return Err(StableError::InvalidPartition(format!(
                    "point index {j} out of range for {n} points"
                )));
            }
            if seen[j] {
                return Err(StableError::InvalidPartition(format!(
                    "point index {j} appears in more than one part"
                )));
            }
            seen[j] = true;
        }
    }
    if seen.iter().any(|&s| !s) {
        return Err(StableError::InvalidPartition(
            "partition does not cover the measure space".into(),
        ));
    }

    let parts: Vec<SpectralKernel> = partition
        .iter()
        .map(|p| kernel.restrict_points(p))
        .collect::<Result<_>>()?;
    let mut max_gap = 0.0_f64;
    for probe in probes {
        let (whole, sum_of_parts) = match index.regime() {
            Regime::Sum => {
                let q = FddQuery::sum(probe.time_indices.clone(), probe.coeffs.clone())?;
                let whole = fdd_cf_exponent(kernel, &q, index)?;
                let mut acc = KahanSum::new();
                for part in &parts {
                    acc.add(fdd_cf_exponent(part, &q, index)?);
                }
                (whole, acc.value())
            }
            Regime::Max => {
                let q = FddQuery::max(probe.time_indices.clone(), probe.coeffs.clone())?;
                let whole = fdd_cdf_exponent(kernel, &q, &probe.coeffs, index)?;
                let mut acc = KahanSum::new();
                for part in &parts {
                    acc.add(fdd_cdf_exponent(part, &q, &probe.coeffs, index)?);
                }
                (whole, acc.value())
            }
        };
        max_gap = max_gap.max(rel_diff(whole, sum_of_parts));
    }
    Ok(FactorizationReport {
        additive: max_gap <= FACTORIZATION_TOLERANCE,
        max_rel_gap: max_gap,
        tolerance: FACTORIZATION_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{ConstantFamily, MovingMaximaFamily};
    use crate::measure::{MeasureSpace, SignClass};

    fn schedule() -> WindowSchedule {
        WindowSchedule::new(8, 6).unwrap()
    }

    #[test]
    fn schedule_validation() {
        assert!(WindowSchedule::new(0, 6).is_err());
        assert!(WindowSchedule::new(8, 2).is_err());
        assert_eq!(schedule().windows().len(), 7);
    }

    #[test]
    fn constant_kernel_all_conservative_positive() {
        let space = MeasureSpace::indexed(vec![1.0, 2.0]).unwrap();
        let family = ConstantFamily::new(space, vec![1.0, 0.5]).unwrap();
        let labels = classify(&family, 1.2, &ClassificationConfig::default_desk_scale()).unwrap();
        assert!(labels.cd.iter().all(|&c| c == CdLabel::Conservative));
        assert!(labels.pn.iter().all(|&p| p == PnLabel::Positive));
    }

    #[test]
    fn moving_maxima_all_dissipative_null() {
        let family = MovingMaximaFamily::new(vec![3.0, 2.0, 1.0], (-4, 4)).unwrap();
        let labels = classify(&family, 0.8, &ClassificationConfig::default_desk_scale()).unwrap();
        assert!(labels.cd.iter().all(|&c| c == CdLabel::Dissipative));
        assert!(labels.pn.iter().all(|&p| p == PnLabel::Null));
    }

    #[test]
    fn zero_section_dissipative_null() {
        let space = MeasureSpace::indexed(vec![1.0, 1.0]).unwrap();
        let family = ConstantFamily::new(space, vec![1.0, 0.0]).unwrap();
        let labels = classify(&family, 1.0, &ClassificationConfig::default_desk_scale()).unwrap();
        assert_eq!(labels.cd[1], CdLabel::Dissipative);
        assert_eq!(labels.pn[1], PnLabel::Null);
        assert_eq!(labels.cd[0], CdLabel::Conservative);
    }

    /// Family with `f_t(s)^α = 1/(1+|t|)` at its only point: conservative
    /// (harmonic sums diverge) but null (the w₁-weighted sums converge).
    struct HarmonicSection {
        space: MeasureSpace,
        alpha: f64,
    }

    impl KernelFamily for HarmonicSection {
        fn space(&self) -> &MeasureSpace {
            &self.space
        }

        fn time_domain(&self) -> TimeDomain {
            TimeDomain::IntegerLattice
        }

        fn kernel_on(&self, grid: &TimeGrid) -> Result<SpectralKernel> {
            let values = grid
                .times()
                .iter()
                .map(|&t| vec![(1.0 / (1.0 + t.abs())).powf(1.0 / self.alpha)])
                .collect();
            SpectralKernel::new(
                self.space.clone(),
                grid.clone(),
                values,
                SignClass::Nonnegative,
            )
        }
    }

    #[test]
    fn harmonic_section_conservative_but_null() {
        let family = HarmonicSection {
            space: MeasureSpace::indexed(vec![1.0]).unwrap(),
            alpha: 1.4,
        };
        let labels =
            classify(&family, 1.4, &ClassificationConfig::default_desk_scale()).unwrap();
        assert_eq!(labels.cd[0], CdLabel::Conservative);
        assert_eq!(labels.pn[0], PnLabel::Null);
        // the harmonic weight alone already rules it out
        assert!(!labels.weighted[0].divergent[0]);
    }

    #[test]
    fn invalid_weight_rejected() {
        let family = HarmonicSection {
            space: MeasureSpace::indexed(vec![1.0]).unwrap(),
            alpha: 1.0,
        };
        // increasing on t >= 0 violates the class
        let bad = WeightFunction::custom("bad", Arc::new(|t: f64| 1.0 + t.abs()));
        assert!(matches!(
            classify_pn(&family, 1.0, &[bad], &schedule(), DEFAULT_DELTA),
            Err(StableError::InvalidWeight(_))
        ));
        // summable weight violates the divergence requirement
        let summable = WeightFunction::custom("summable", Arc::new(|t: f64| (-t.abs()).exp()));
        assert!(matches!(
            classify_pn(&family, 1.0, &[summable], &schedule(), DEFAULT_DELTA),
            Err(StableError::InvalidWeight(_))
        ));
    }

    #[test]
    fn labels_invariant_under_permutation_and_mass_rescale() {
        let family = MovingMaximaFamily::new(vec![2.0, 1.0], (-2, 2)).unwrap();
        let config = ClassificationConfig::default_desk_scale();
        let base = classify(&family, 1.1, &config).unwrap();

        // permuting points of every window kernel permutes labels; here the
        // family is symmetric enough that the multiset of labels must match
        let counts = |labels: &DecompositionLabel| {
            labels
                .cd
                .iter()
                .filter(|&&c| c == CdLabel::Dissipative)
                .count()
        };
        assert_eq!(counts(&base), base.point_ids.len());
    }

    #[test]
    fn classify_fixed_everything_window() {
        let space = MeasureSpace::indexed(vec![1.0, 1.0]).unwrap();
        let grid = TimeGrid::integer_lattice(&[0, 1]).unwrap();
        let k = SpectralKernel::new(
            space,
            grid,
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            SignClass::Nonnegative,
        )
        .unwrap();
        let labels = classify_fixed(&k, 1.0).unwrap();
        assert!(labels.cd.iter().all(|&c| c == CdLabel::Dissipative));
        assert!(labels.pn.iter().all(|&p| p == PnLabel::Null));
    }

    #[test]
    fn extract_component_cases() {
        let space = MeasureSpace::indexed(vec![1.0, 2.0, 0.5]).unwrap();
        let grid = TimeGrid::integer_lattice(&[0, 1]).unwrap();
        let k = SpectralKernel::new(
            space,
            grid,
            vec![vec![1.0, 2.0, 3.0], vec![0.5, 0.0, 1.0]],
            SignClass::Nonnegative,
        )
        .unwrap();
        let idx = StabilityIndex::sum(1.3).unwrap();

        // full subset reproduces the exponents
        let full = extract_component(&k, &[0, 1, 2], &idx).unwrap();
        let q = FddQuery::sum(vec![0, 1], vec![1.0, -0.5]).unwrap();
        let whole = fdd_cf_exponent(&k, &q, &idx).unwrap();
        assert!((full.cf_exponent(&[0, 1], &[1.0, -0.5]).unwrap() - whole).abs() < 1e-15);

        // single point component
        let single = extract_component(&k, &[1], &idx).unwrap();
        assert_eq!(single.kernel().n_points(), 1);

        // empty component: degenerate zero process
        let empty = extract_component(&k, &[], &idx).unwrap();
        assert_eq!(empty.cf_exponent(&[0, 1], &[1.0, 1.0]).unwrap(), 0.0);

        // duplicated index rejected
        assert!(extract_component(&k, &[0, 0], &idx).is_err());
    }

    /// Four sections: constant (C/P), moving-max style (D/N), harmonic
    /// (C/N) and zero (D/N).
    struct MixedSections {
        space: MeasureSpace,
    }

    impl KernelFamily for MixedSections {
        fn space(&self) -> &MeasureSpace {
            &self.space
        }

        fn time_domain(&self) -> TimeDomain {
            TimeDomain::IntegerLattice
        }

        fn kernel_on(&self, grid: &TimeGrid) -> Result<SpectralKernel> {
            let values = grid
                .times()
                .iter()
                .map(|&t| {
                    vec![
                        1.0,
                        if (0.0..2.0).contains(&t) { 1.5 } else { 0.0 },
                        (1.0 / (1.0 + t.abs())).powf(1.0 / 1.3),
                        0.0,
                    ]
                })
                .collect();
            SpectralKernel::new(
                self.space.clone(),
                grid.clone(),
                values,
                SignClass::Nonnegative,
            )
        }
    }

    #[test]
    fn three_way_split_passes_factorization() {
        // extract_component over {P, C∩N, D} and verify exponent additivity
        let family = MixedSections {
            space: MeasureSpace::indexed(vec![1.0; 4]).unwrap(),
        };
        let labels = classify(&family, 1.3, &ClassificationConfig::default_desk_scale()).unwrap();
        let p = labels.indices_where(None, Some(PnLabel::Positive));
        let cn = labels.indices_where(Some(CdLabel::Conservative), Some(PnLabel::Null));
        let d = labels.indices_where(Some(CdLabel::Dissipative), None);
        assert_eq!(p, vec![0]);
        assert_eq!(cn, vec![2]);
        assert_eq!(d, vec![1, 3]);

        let grid = TimeGrid::integer_lattice(&[0, 1, 2]).unwrap();
        let kernel = family.kernel_on(&grid).unwrap();
        let idx = StabilityIndex::sum(1.3).unwrap();
        let probes = [Probe {
            time_indices: vec![0, 1, 2],
            coeffs: vec![1.0, 0.4, 0.9],
        }];
        let parts = vec![p.clone(), cn.clone(), d.clone()];
        let r = factorization_check(&kernel, &parts, &idx, &probes).unwrap();
        assert!(r.additive);

        // the components simulate through handles over the restricted spaces
        for part in &parts {
            let handle = extract_component(&kernel, part, &idx).unwrap();
            assert_eq!(handle.kernel().n_points(), part.len());
        }
    }

    #[test]
    fn labels_ignore_masses_and_point_order() {
        // the classification reads time sections only, so masses play no
        // role and permuting points permutes labels
        struct Permuted {
            inner: MixedSections,
            perm: Vec<usize>,
            space: MeasureSpace,
        }
        impl KernelFamily for Permuted {
            fn space(&self) -> &MeasureSpace {
                &self.space
            }
            fn time_domain(&self) -> TimeDomain {
                TimeDomain::IntegerLattice
            }
            fn kernel_on(&self, grid: &TimeGrid) -> Result<SpectralKernel> {
                self.inner.kernel_on(grid)?.permute_points(&self.perm)
            }
        }

        let config = ClassificationConfig::default_desk_scale();
        let base = MixedSections {
            space: MeasureSpace::indexed(vec![1.0; 4]).unwrap(),
        };
        let labels = classify(&base, 1.3, &config).unwrap();

        let heavier = MixedSections {
            space: MeasureSpace::indexed(vec![9.0, 0.1, 2.0, 5.0]).unwrap(),
        };
        let labels_heavy = classify(&heavier, 1.3, &config).unwrap();
        assert_eq!(labels.cd, labels_heavy.cd);
        assert_eq!(labels.pn, labels_heavy.pn);

        let perm = vec![2, 0, 3, 1];
        let permuted = Permuted {
            space: base.space.restrict(&perm).unwrap(),
            inner: base,
            perm: perm.clone(),
        };
        let labels_perm = classify(&permuted, 1.3, &config).unwrap();
        for (new_pos, &old) in perm.iter().enumerate() {
            assert_eq!(labels_perm.cd[new_pos], labels.cd[old]);
            assert_eq!(labels_perm.pn[new_pos], labels.pn[old]);
        }
    }

    #[test]
    fn exponent_additivity_exact() {
        let space = MeasureSpace::indexed(vec![1.0, 2.0, 0.5, 0.25]).unwrap();
        let grid = TimeGrid::integer_lattice(&[0, 1]).unwrap();
        let k = SpectralKernel::new(
            space,
            grid,
            vec![vec![1.0, 2.0, 3.0, 0.1], vec![0.5, 0.0, 1.0, 4.0]],
            SignClass::Nonnegative,
        )
        .unwrap();
        let probes = [
            Probe {
                time_indices: vec![0, 1],
                coeffs: vec![1.0, 0.7],
            },
            Probe {
                time_indices: vec![0],
                coeffs: vec![2.0],
            },
        ];
        let idx = StabilityIndex::sum(1.2).unwrap();
        let r = factorization_check(&k, &[vec![0, 2], vec![1, 3]], &idx, &probes).unwrap();
        assert!(r.additive, "gap {}", r.max_rel_gap);
        let idxm = StabilityIndex::max(1.2).unwrap();
        let r = factorization_check(&k, &[vec![0], vec![1, 2], vec![3]], &idxm, &probes).unwrap();
        assert!(r.additive, "gap {}", r.max_rel_gap);

        // overlapping partition rejected
        assert!(matches!(
            factorization_check(&k, &[vec![0, 1], vec![1, 2, 3]], &idx, &probes),
            Err(StableError::InvalidPartition(_))
        ));
        // non-covering partition rejected
        assert!(matches!(
            factorization_check(&k, &[vec![0], vec![1]], &idx, &probes),
            Err(StableError::InvalidPartition(_))
        ));
    }
}
