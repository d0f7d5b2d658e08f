//! Discrete measure spaces, time grids, spectral kernels and the α-norms
//! every other module consumes.
//!
//! A kernel stores the values `f_t(s)` of a family of spectral functions on a
//! finite point set `S` with strictly positive masses `μ({s})`. On such a
//! space the stable integral is a finite weighted sum and the extremal
//! integral a finite weighted maximum, so the norm functionals below are exact
//! up to floating point:
//!
//! * `sum_norm`:  `(Σ_s μ_s |Σ_j a_j f_{t_j}(s)|^α)^{1/α}`
//! * `max_norm`:  `(Σ_s μ_s (⋁_j a_j f_{t_j}(s))^α)^{1/α}` for `a_j, f ≥ 0`
//! * `rho_metric`: `Σ_s μ_s |f(s)^α − g(s)^α|`
//!
//! Accumulations over points use compensated (Kahan/Neumaier) summation since
//! the results feed exponentials downstream.

use serde::{Deserialize, Serialize};

use crate::error::{Result, StableError};

/// Compensated accumulator (Neumaier variant of Kahan summation).
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Stability regime: linear (sum-stable) or max-linear (max-stable) world.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Sum,
    Max,
}

/// Index of stability α together with the regime it is used in.
///
/// The sum regime requires `0 < α < 2`; the max regime allows any `α > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityIndex {
    alpha: f64,
    regime: Regime,
}

impl StabilityIndex {
    /// Sum-regime index; requires `0 < α < 2`.
    pub fn sum(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 || alpha >= 2.0 {
            return Err(StableError::InvalidParameter(format!(
                "sum regime requires 0 < alpha < 2, got {alpha}"
            )));
        }
        Ok(Self {
            alpha,
            regime: Regime::Sum,
        })
    }

    /// Max-regime index; requires `α > 0`.
    pub fn max(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(StableError::InvalidParameter(format!(
                "max regime requires alpha > 0, got {alpha}"
            )));
        }
        Ok(Self {
            alpha,
            regime: Regime::Max,
        })
    }

    pub fn for_regime(alpha: f64, regime: Regime) -> Result<Self> {
        match regime {
            Regime::Sum => Self::sum(alpha),
            Regime::Max => Self::max(alpha),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }
}

/// Finite point set with strictly positive masses; the discrete `(S, μ)`.
///
/// Optional per-point coordinates identify points of quadrature grids
/// (e.g. the `(x, u)` position of a cell midpoint).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpace {
    points: Vec<String>,
    masses: Vec<f64>,
    coords: Option<Vec<Vec<f64>>>,
}

impl MeasureSpace {
    /// Space with named points. Masses must be strictly positive and finite,
    /// point names distinct. An empty space is allowed (degenerate zero
    /// process after a restriction to the empty set).
    pub fn new(points: Vec<String>, masses: Vec<f64>) -> Result<Self> {
        Self::build(points, masses, None)
    }

    /// Space with auto-generated point names `p0, p1, …`.
    pub fn indexed(masses: Vec<f64>) -> Result<Self> {
        let points = (0..masses.len()).map(|i| format!("p{i}")).collect();
        Self::build(points, masses, None)
    }

    /// Space carrying a coordinate vector per point.
    pub fn with_coords(
        points: Vec<String>,
        masses: Vec<f64>,
        coords: Vec<Vec<f64>>,
    ) -> Result<Self> {
        Self::build(points, masses, Some(coords))
    }

    fn build(points: Vec<String>, masses: Vec<f64>, coords: Option<Vec<Vec<f64>>>) -> Result<Self> {
        if points.len() != masses.len() {
            return Err(StableError::DimensionMismatch(format!(
                "{} points vs {} masses",
                points.len(),
                masses.len()
            )));
        }
        for (i, &m) in masses.iter().enumerate() {
            if !m.is_finite() || m <= 0.0 {
                return Err(StableError::InvalidParameter(format!(
                    "mass of point {} must be strictly positive and finite, got {m}",
                    points[i]
                )));
            }
        }
        let mut sorted = points.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(StableError::InvalidParameter(
                "point identifiers must be distinct".into(),
            ));
        }
        if let Some(c) = &coords {
            if c.len() != points.len() {
                return Err(StableError::DimensionMismatch(format!(
                    "{} coordinate rows vs {} points",
                    c.len(),
                    points.len()
                )));
            }
            if c.iter().flatten().any(|v| !v.is_finite()) {
                return Err(StableError::NonFinite("point coordinate".into()));
            }
        }
        Ok(Self {
            points,
            masses,
            coords,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    pub fn total_mass(&self) -> f64 {
        let mut acc = KahanSum::new();
        for &m in &self.masses {
            acc.add(m);
        }
        acc.value()
    }

    /// Restriction to a subset of point indices, preserving order.
    pub fn restrict(&self, keep: &[usize]) -> Result<Self> {
        let mut points = Vec::with_capacity(keep.len());
        let mut masses = Vec::with_capacity(keep.len());
        let mut coords = self.coords.as_ref().map(|_| Vec::with_capacity(keep.len()));
        for &j in keep {
            if j >= self.len() {
                return Err(StableError::DimensionMismatch(format!(
                    "point index {j} out of range for {} points",
                    self.len()
                )));
            }
            points.push(self.points[j].clone());
            masses.push(self.masses[j]);
            if let (Some(cs), Some(all)) = (&mut coords, &self.coords) {
                cs.push(all[j].clone());
            }
        }
        Self::build(points, masses, coords)
    }

    /// `‖Σ_i coeffs[i]·rows[i]‖_{L^α(S,μ)}`.
    ///
    /// Defined for either regime: on a finite space the norm exists for any
    /// `α > 0`.
    pub fn sum_norm(&self, rows: &[&[f64]], coeffs: &[f64], alpha: &StabilityIndex) -> Result<f64> {
        self.check_rows(rows, coeffs)?;
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(StableError::NonFinite("coefficient".into()));
        }
        let a = alpha.alpha();
        let mut acc = KahanSum::new();
        for j in 0..self.len() {
            let mut combo = 0.0;
            for (i, row) in rows.iter().enumerate() {
                combo += coeffs[i] * row[j];
            }
            acc.add(self.masses[j] * combo.abs().powf(a));
        }
        let total = acc.value();
        if !total.is_finite() {
            return Err(StableError::NonFinite("sum_norm accumulation".into()));
        }
        Ok(total.powf(1.0 / a))
    }

    /// `‖⋁_i coeffs[i]·rows[i]‖_{L^α_+(S,μ)}`; rows and coefficients must be
    /// nonnegative.
    pub fn max_norm(&self, rows: &[&[f64]], coeffs: &[f64], alpha: &StabilityIndex) -> Result<f64> {
        self.check_rows(rows, coeffs)?;
        for &c in coeffs {
            if !c.is_finite() || c < 0.0 {
                return Err(StableError::NegativeValue(format!(
                    "max-regime coefficient {c}"
                )));
            }
        }
        for row in rows {
            if row.iter().any(|&v| v < 0.0) {
                return Err(StableError::NegativeValue(
                    "max-regime kernel value".into(),
                ));
            }
        }
        let a = alpha.alpha();
        let mut acc = KahanSum::new();
        for j in 0..self.len() {
            let mut best = 0.0_f64;
            for (i, row) in rows.iter().enumerate() {
                best = best.max(coeffs[i] * row[j]);
            }
            acc.add(self.masses[j] * best.powf(a));
        }
        let total = acc.value();
        if !total.is_finite() {
            return Err(StableError::NonFinite("max_norm accumulation".into()));
        }
        Ok(total.powf(1.0 / a))
    }

    /// `ρ_{μ,α}(f, g) = Σ_s μ_s |f(s)^α − g(s)^α|` for nonnegative `f`, `g`.
    ///
    /// Zero exactly when `f = g` at every (positive-mass) point.
    pub fn rho_metric(&self, f: &[f64], g: &[f64], alpha: &StabilityIndex) -> Result<f64> {
        if f.len() != self.len() || g.len() != self.len() {
            return Err(StableError::DimensionMismatch(format!(
                "rho_metric rows of length {} and {} on a space of {} points",
                f.len(),
                g.len(),
                self.len()
            )));
        }
        for &v in f.iter().chain(g.iter()) {
            if !v.is_finite() {
                return Err(StableError::NonFinite("rho_metric input".into()));
            }
            if v < 0.0 {
                return Err(StableError::NegativeValue(format!("rho_metric input {v}")));
            }
        }
        let a = alpha.alpha();
        let mut acc = KahanSum::new();
        for j in 0..self.len() {
            acc.add(self.masses[j] * (f[j].powf(a) - g[j].powf(a)).abs());
        }
        Ok(acc.value())
    }

    fn check_rows(&self, rows: &[&[f64]], coeffs: &[f64]) -> Result<()> {
        if rows.len() != coeffs.len() {
            return Err(StableError::DimensionMismatch(format!(
                "{} rows vs {} coefficients",
                rows.len(),
                coeffs.len()
            )));
        }
        for row in rows {
            if row.len() != self.len() {
                return Err(StableError::DimensionMismatch(format!(
                    "row of length {} on a space of {} points",
                    row.len(),
                    self.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(StableError::NonFinite("kernel value".into()));
            }
        }
        Ok(())
    }
}

/// Discretized index set `T` with λ-weights.
///
/// `IntegerLattice` models `T = ℤ` with counting measure (unit weights,
/// integer times); `RealGrid` models `T = ℝ` with λ-weights equal to grid
/// cell widths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    IntegerLattice,
    RealGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    times: Vec<f64>,
    lambda_weights: Vec<f64>,
    kind: GridKind,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>, lambda_weights: Vec<f64>, kind: GridKind) -> Result<Self> {
        if times.len() != lambda_weights.len() {
            return Err(StableError::DimensionMismatch(format!(
                "{} times vs {} lambda weights",
                times.len(),
                lambda_weights.len()
            )));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(StableError::NonFinite("grid time".into()));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(StableError::InvalidParameter(
                "grid times must be strictly increasing".into(),
            ));
        }
        for &w in &lambda_weights {
            if !w.is_finite() || w < 0.0 {
                return Err(StableError::InvalidParameter(format!(
                    "lambda weight must be nonnegative and finite, got {w}"
                )));
            }
        }
        if kind == GridKind::IntegerLattice {
            if times.iter().any(|&t| t != t.round()) {
                return Err(StableError::InvalidParameter(
                    "integer-lattice grid requires integer times".into(),
                ));
            }
            if lambda_weights.iter().any(|&w| w != 1.0) {
                return Err(StableError::InvalidParameter(
                    "integer-lattice grid requires unit lambda weights".into(),
                ));
            }
        }
        Ok(Self {
            times,
            lambda_weights,
            kind,
        })
    }

    /// Lattice grid over the given integers with unit counting weights.
    pub fn integer_lattice(times: &[i64]) -> Result<Self> {
        let t: Vec<f64> = times.iter().map(|&k| k as f64).collect();
        let w = vec![1.0; t.len()];
        Self::new(t, w, GridKind::IntegerLattice)
    }

    /// Real grid with per-cell Lebesgue weights.
    pub fn real_grid(times: Vec<f64>, lambda_weights: Vec<f64>) -> Result<Self> {
        Self::new(times, lambda_weights, GridKind::RealGrid)
    }

    /// Uniform real grid `t0, t0+dt, …` with λ-weight `dt` per cell.
    pub fn uniform_real(t0: f64, dt: f64, n: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(StableError::InvalidParameter(format!(
                "grid step must be positive, got {dt}"
            )));
        }
        let times: Vec<f64> = (0..n).map(|i| t0 + dt * i as f64).collect();
        let weights = vec![dt; n];
        Self::new(times, weights, GridKind::RealGrid)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn lambda_weights(&self) -> &[f64] {
        &self.lambda_weights
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }
}

/// Declared sign structure of a kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignClass {
    Signed,
    Nonnegative,
}

/// Matrix of spectral-function values `values[i][j] = f_{t_i}(s_j)` over a
/// time grid × measure-space point set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralKernel {
    space: MeasureSpace,
    grid: TimeGrid,
    values: Vec<Vec<f64>>,
    sign_class: SignClass,
}

impl SpectralKernel {
    pub fn new(
        space: MeasureSpace,
        grid: TimeGrid,
        values: Vec<Vec<f64>>,
        sign_class: SignClass,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(StableError::DimensionMismatch(format!(
                "{} value rows vs {} grid times",
                values.len(),
                grid.len()
            )));
        }
        for row in &values {
            if row.len() != space.len() {
                return Err(StableError::DimensionMismatch(format!(
                    "value row of length {} vs {} space points",
                    row.len(),
                    space.len()
                )));
            }
            for &v in row {
                if !v.is_finite() {
                    return Err(StableError::NonFinite("kernel value".into()));
                }
                if sign_class == SignClass::Nonnegative && v < 0.0 {
                    return Err(StableError::NegativeValue(format!(
                        "kernel declared nonnegative contains {v}"
                    )));
                }
            }
        }
        Ok(Self {
            space,
            grid,
            values,
            sign_class,
        })
    }

    pub fn space(&self) -> &MeasureSpace {
        &self.space
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn sign_class(&self) -> SignClass {
        self.sign_class
    }

    pub fn n_times(&self) -> usize {
        self.grid.len()
    }

    pub fn n_points(&self) -> usize {
        self.space.len()
    }

    pub fn row(&self, t_index: usize) -> Result<&[f64]> {
        self.values
            .get(t_index)
            .map(|r| r.as_slice())
            .ok_or_else(|| {
                StableError::DimensionMismatch(format!(
                    "time index {t_index} out of range for {} times",
                    self.n_times()
                ))
            })
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Checks that every row has a finite α-norm (can fail by overflow for
    /// large values and large α).
    pub fn validate_alpha_norms(&self, alpha: &StabilityIndex) -> Result<()> {
        for i in 0..self.n_times() {
            let n = self.space.sum_norm(&[&self.values[i]], &[1.0], alpha)?;
            if !n.is_finite() {
                return Err(StableError::NonFinite(format!("alpha-norm of row {i}")));
            }
        }
        Ok(())
    }

    fn rows_for(&self, time_indices: &[usize]) -> Result<Vec<&[f64]>> {
        time_indices
            .iter()
            .map(|&i| self.row(i))
            .collect::<Result<Vec<_>>>()
    }

    /// `‖Σ_j coeffs[j]·f_{t_j}‖_{L^α}` over the selected rows.
    pub fn sum_norm(
        &self,
        time_indices: &[usize],
        coeffs: &[f64],
        alpha: &StabilityIndex,
    ) -> Result<f64> {
        let rows = self.rows_for(time_indices)?;
        self.space.sum_norm(&rows, coeffs, alpha)
    }

    /// `‖⋁_j coeffs[j]·f_{t_j}‖_{L^α_+}` over the selected rows.
    pub fn max_norm(
        &self,
        time_indices: &[usize],
        coeffs: &[f64],
        alpha: &StabilityIndex,
    ) -> Result<f64> {
        let rows = self.rows_for(time_indices)?;
        self.space.max_norm(&rows, coeffs, alpha)
    }

    /// Scale coefficient `‖f_t‖_α` of the single row `t`.
    pub fn scale_coefficient(&self, t_index: usize, alpha: &StabilityIndex) -> Result<f64> {
        let row = self.row(t_index)?;
        let a = alpha.alpha();
        let mut acc = KahanSum::new();
        for (&mass, &v) in self.space.masses().iter().zip(row) {
            acc.add(mass * v.abs().powf(a));
        }
        Ok(acc.value().powf(1.0 / a))
    }

    /// Kernel with every value replaced by its absolute value; the
    /// association map `f ↦ |f|`.
    pub fn rectified(&self) -> SpectralKernel {
        let values = self
            .values
            .iter()
            .map(|row| row.iter().map(|v| v.abs()).collect())
            .collect();
        SpectralKernel {
            space: self.space.clone(),
            grid: self.grid.clone(),
            values,
            sign_class: SignClass::Nonnegative,
        }
    }

    /// Point permutation: point `j` of the result is point `perm[j]` of
    /// `self` (a measure-preserving isometry when masses match, which they do
    /// here by construction).
    pub fn permute_points(&self, perm: &[usize]) -> Result<SpectralKernel> {
        if perm.len() != self.n_points() {
            return Err(StableError::DimensionMismatch(format!(
                "permutation of length {} on {} points",
                perm.len(),
                self.n_points()
            )));
        }
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p >= perm.len() || seen[p] {
                return Err(StableError::InvalidParameter(
                    "not a permutation of point indices".into(),
                ));
            }
            seen[p] = true;
        }
        let space = self.space.restrict(perm)?;
        let values = self
            .values
            .iter()
            .map(|row| perm.iter().map(|&p| row[p]).collect())
            .collect();
        SpectralKernel::new(space, self.grid.clone(), values, self.sign_class)
    }

    /// Mass rescaling `μ'_j = c_j·μ_j` with rows scaled by `c_j^{-1/α}`,
    /// which preserves every sum- and max-norm functional exactly in the
    /// continuum (an isometry of representations).
    pub fn rescale_masses(&self, factors: &[f64], alpha: &StabilityIndex) -> Result<SpectralKernel> {
        if factors.len() != self.n_points() {
            return Err(StableError::DimensionMismatch(format!(
                "{} factors on {} points",
                factors.len(),
                self.n_points()
            )));
        }
        for &c in factors {
            if !c.is_finite() || c <= 0.0 {
                return Err(StableError::InvalidParameter(format!(
                    "mass factor must be strictly positive, got {c}"
                )));
            }
        }
        let a = alpha.alpha();
        let masses: Vec<f64> = self
            .space
            .masses()
            .iter()
            .zip(factors)
            .map(|(&m, &c)| m * c)
            .collect();
        let space = match self.space.coords() {
            Some(c) => {
                MeasureSpace::with_coords(self.space.points().to_vec(), masses, c.to_vec())?
            }
            None => MeasureSpace::new(self.space.points().to_vec(), masses)?,
        };
        let values = self
            .values
            .iter()
            .map(|row| {
                row.iter()
                    .zip(factors)
                    .map(|(&v, &c)| v * c.powf(-1.0 / a))
                    .collect()
            })
            .collect();
        SpectralKernel::new(space, self.grid.clone(), values, self.sign_class)
    }

    /// Restriction of the kernel (and its measure space) to a point subset.
    pub fn restrict_points(&self, keep: &[usize]) -> Result<SpectralKernel> {
        let space = self.space.restrict(keep)?;
        let values = self
            .values
            .iter()
            .map(|row| keep.iter().map(|&j| row[j]).collect())
            .collect();
        SpectralKernel::new(space, self.grid.clone(), values, self.sign_class)
    }
}
