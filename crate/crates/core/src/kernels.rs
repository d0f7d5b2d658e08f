//! Parametric spectral-kernel builders: linear fractional stable motion,
//! Telecom, Chentzov indicator fields, mixed moving averages with stationary
//! increments, mixed fractional motions and moving maxima — plus the
//! two-value structure checker for tabulated `G`.
//!
//! Continuum base spaces are represented by quadrature grids (midpoint rule,
//! per-cell mass = cell width). For the power-law families the u-window is
//! chosen so the omitted tail's α-mass stays below `TAIL_MASS_FRACTION` of
//! the row norm, using closed-form power/exponential tail bounds; far tails
//! get geometrically stretched cells so the window can be very wide at a
//! small cell count.

use std::io::{BufRead, BufReader, Read};
use std::sync::Arc;

use crate::error::{Result, StableError};
use crate::measure::{
    GridKind, KahanSum, MeasureSpace, SignClass, SpectralKernel, StabilityIndex, TimeGrid,
};

/// Relative α-mass allowed in the truncated quadrature tails.
pub const TAIL_MASS_FRACTION: f64 = 1e-6;

/// One-dimensional quadrature: cell boundaries, midpoint evaluation, cell
/// widths as masses.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature1d {
    boundaries: Vec<f64>,
}

impl Quadrature1d {
    pub fn from_boundaries(boundaries: Vec<f64>) -> Result<Self> {
        if boundaries.len() < 2 {
            return Err(StableError::InvalidParameter(
                "quadrature needs at least one cell".into(),
            ));
        }
        if boundaries.iter().any(|b| !b.is_finite()) {
            return Err(StableError::NonFinite("quadrature boundary".into()));
        }
        if boundaries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(StableError::InvalidParameter(
                "quadrature boundaries must be strictly increasing".into(),
            ));
        }
        Ok(Self { boundaries })
    }

    pub fn uniform(lo: f64, hi: f64, cells: usize) -> Result<Self> {
        if cells == 0 || !(lo < hi) {
            return Err(StableError::InvalidParameter(format!(
                "uniform quadrature needs lo < hi and cells > 0, got [{lo}, {hi}] x {cells}"
            )));
        }
        let step = (hi - lo) / cells as f64;
        let boundaries = (0..=cells)
            .map(|i| if i == cells { hi } else { lo + step * i as f64 })
            .collect();
        Self::from_boundaries(boundaries)
    }

    pub fn n_cells(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn midpoints(&self) -> Vec<f64> {
        self.boundaries
            .windows(2)
            .map(|w| 0.5 * (w[0] + w[1]))
            .collect()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.boundaries.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Splits every cell into `factor` equal parts.
    pub fn refined(&self, factor: u32) -> Quadrature1d {
        let factor = factor.max(1) as usize;
        if factor == 1 {
            return self.clone();
        }
        let mut boundaries = Vec::with_capacity(self.n_cells() * factor + 1);
        for w in self.boundaries.windows(2) {
            let step = (w[1] - w[0]) / factor as f64;
            for i in 0..factor {
                boundaries.push(w[0] + step * i as f64);
            }
        }
        boundaries.push(*self.boundaries.last().unwrap());
        Quadrature1d { boundaries }
    }
}

/// Geometric boundary ladder from `lo_abs` up to at least `hi_abs`
/// (magnitudes, ascending). The ratio is raised if the cell cap would be
/// exceeded.
fn geometric_ladder(lo_abs: f64, hi_abs: f64, ratio: f64, max_cells: usize) -> Vec<f64> {
    if hi_abs <= lo_abs {
        return vec![lo_abs];
    }
    let needed = (hi_abs / lo_abs).ln() / ratio.ln();
    let ratio = if needed > max_cells as f64 {
        (hi_abs / lo_abs).powf(1.0 / max_cells as f64)
    } else {
        ratio
    };
    let mut out = vec![lo_abs];
    let mut x = lo_abs;
    while x < hi_abs {
        x *= ratio;
        out.push(x.min(hi_abs * ratio));
        if x >= hi_abs {
            break;
        }
    }
    out
}

fn quadrature_space(prefix: &str, quad: &Quadrature1d) -> Result<MeasureSpace> {
    let mids = quad.midpoints();
    let widths = quad.widths();
    let points = (0..mids.len()).map(|j| format!("{prefix}{j}")).collect();
    let coords = mids.iter().map(|&u| vec![u]).collect();
    MeasureSpace::with_coords(points, widths, coords)
}

/// `x_+^d` with the convention `0^d = 0` for every `d`.
fn pos_pow(x: f64, d: f64) -> f64 {
    if x > 0.0 {
        x.powf(d)
    } else {
        0.0
    }
}

fn validate_lfsm_params(h: f64, alpha: f64, a: f64, b: f64) -> Result<f64> {
    StabilityIndex::sum(alpha)?;
    if !(h > 0.0 && h < 1.0) {
        return Err(StableError::InvalidParameter(format!(
            "lfsm requires H in (0,1), got {h}"
        )));
    }
    let d = h - 1.0 / alpha;
    if d.abs() < 1e-9 {
        return Err(StableError::InvalidParameter(
            "lfsm requires H != 1/alpha".into(),
        ));
    }
    if !a.is_finite() || !b.is_finite() || a.abs() + b.abs() == 0.0 {
        return Err(StableError::InvalidParameter(
            "lfsm requires |a| + |b| > 0".into(),
        ));
    }
    Ok(d)
}

fn lfsm_value(t: f64, u: f64, d: f64, a: f64, b: f64) -> f64 {
    a * (pos_pow(t + u, d) - pos_pow(u, d)) + b * (pos_pow(-(t + u), d) - pos_pow(-u, d))
}

/// Linear-fractional-stable-motion kernel
/// `f_t(u) = a((t+u)_+^{H-1/α} − u_+^{H-1/α}) + b((t+u)_-^{H-1/α} − u_-^{H-1/α})`
/// on the given u-quadrature.
pub fn build_lfsm(
    h: f64,
    alpha: f64,
    a: f64,
    b: f64,
    grid: &TimeGrid,
    quad: &Quadrature1d,
) -> Result<SpectralKernel> {
    let d = validate_lfsm_params(h, alpha, a, b)?;
    let space = quadrature_space("u", quad)?;
    let mids = quad.midpoints();
    let values = grid
        .times()
        .iter()
        .map(|&t| mids.iter().map(|&u| lfsm_value(t, u, d, a, b)).collect())
        .collect();
    let kernel = SpectralKernel::new(space, grid.clone(), values, SignClass::Signed)?;
    kernel.validate_alpha_norms(&StabilityIndex::sum(alpha)?)?;
    Ok(kernel)
}

/// u-quadrature for the LFSM kernel whose truncated tails carry less than
/// `TAIL_MASS_FRACTION` of each nonzero row's α-mass.
///
/// Both tails of `|f_t|` are bounded by `(|a|+|b|)|d||t| 2^{1-d} u^{d-1}`
/// for `|u| ≥ max(2|t|, W0)`, so the tail α-mass beyond `W` is at most
/// `C(t)·W^{α(H-1)}/(α(1-H))`; the window solves that bound against the
/// core-grid row mass. Far cells are geometrically stretched.
pub fn lfsm_auto_quadrature(
    h: f64,
    alpha: f64,
    a: f64,
    b: f64,
    times: &[f64],
) -> Result<Quadrature1d> {
    let d = validate_lfsm_params(h, alpha, a, b)?;
    let t_abs_max = times.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
    let w0 = (2.0 * t_abs_max).max(4.0);
    let core_cells = 256;
    let core = Quadrature1d::uniform(-w0, w0, core_cells)?;

    if t_abs_max == 0.0 {
        return Ok(core);
    }

    // smallest nonzero-row α-mass on the core grid
    let mids = core.midpoints();
    let widths = core.widths();
    let mut min_mass = f64::INFINITY;
    for &t in times {
        if t == 0.0 {
            continue;
        }
        let mut acc = KahanSum::new();
        for (j, &u) in mids.iter().enumerate() {
            acc.add(widths[j] * lfsm_value(t, u, d, a, b).abs().powf(alpha));
        }
        min_mass = min_mass.min(acc.value());
    }
    if !min_mass.is_finite() || min_mass <= 0.0 {
        return Ok(core);
    }

    let p = alpha * (h - 1.0); // tail-mass exponent, strictly negative
    let mut w_far = 2.0 * w0;
    for &t in times {
        if t == 0.0 {
            continue;
        }
        let c = ((a.abs() + b.abs()) * d.abs() * t.abs() * 2f64.powf(1.0 - d)).powf(alpha);
        // 2 sides; solve 2·c·W^p/|p| = TAIL_MASS_FRACTION·min_mass
        let w = (2.0 * c / (TAIL_MASS_FRACTION * min_mass * p.abs())).powf(1.0 / -p);
        w_far = w_far.max(w);
    }

    let right = geometric_ladder(w0, w_far, 1.15, 512);
    let mut boundaries: Vec<f64> = right.iter().rev().map(|&x| -x).collect();
    boundaries.pop(); // drop duplicate -w0; core re-adds it
    boundaries.extend_from_slice(core.boundaries());
    boundaries.extend_from_slice(&right[1..]);
    Quadrature1d::from_boundaries(boundaries)
}

/// The Telecom ramp `F(z) = (z ∧ 0 + 1)_+`: 0 below −1, linear on
/// `(−1, 0)`, 1 above 0.
pub fn telecom_ramp(z: f64) -> f64 {
    (z.min(0.0) + 1.0).max(0.0)
}

fn validate_telecom_params(h: f64, alpha: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(StableError::InvalidParameter(format!(
            "telecom requires 1 < alpha < 2, got {alpha}"
        )));
    }
    if !(h > 1.0 / alpha && h < 1.0) {
        return Err(StableError::InvalidParameter(format!(
            "telecom requires 1/alpha < H < 1, got H={h}, alpha={alpha}"
        )));
    }
    Ok(())
}

/// Telecom kernel `f_t(s,u) = e^{s(1/α-H)}(F(e^s(t+u)) − F(e^s u))` on the
/// product of the two quadratures, with control measure `ds·du`.
///
/// The exponential tilt `e^{s(1/α-H)}` is the one that makes every row an
/// `L^α(ds·du)` function on the whole plane.
pub fn build_telecom(
    h: f64,
    alpha: f64,
    s_quad: &Quadrature1d,
    u_quad: &Quadrature1d,
    grid: &TimeGrid,
) -> Result<SpectralKernel> {
    validate_telecom_params(h, alpha)?;
    let kappa = 1.0 / alpha - h;
    let s_mids = s_quad.midpoints();
    let s_widths = s_quad.widths();
    let u_mids = u_quad.midpoints();
    let u_widths = u_quad.widths();

    let mut points = Vec::with_capacity(s_mids.len() * u_mids.len());
    let mut masses = Vec::with_capacity(points.capacity());
    let mut coords = Vec::with_capacity(points.capacity());
    for (i, &s) in s_mids.iter().enumerate() {
        for (j, &u) in u_mids.iter().enumerate() {
            points.push(format!("s{i}u{j}"));
            masses.push(s_widths[i] * u_widths[j]);
            coords.push(vec![s, u]);
        }
    }
    let space = MeasureSpace::with_coords(points, masses, coords)?;

    let values = grid
        .times()
        .iter()
        .map(|&t| {
            let mut row = Vec::with_capacity(s_mids.len() * u_mids.len());
            for &s in &s_mids {
                let tilt = (kappa * s).exp();
                let es = s.exp();
                for &u in &u_mids {
                    row.push(tilt * (telecom_ramp(es * (t + u)) - telecom_ramp(es * u)));
                }
            }
            row
        })
        .collect();
    let kernel = SpectralKernel::new(space, grid.clone(), values, SignClass::Signed)?;
    kernel.validate_alpha_norms(&StabilityIndex::sum(alpha)?)?;
    Ok(kernel)
}

/// (s, u) quadratures for the Telecom kernel. The s-integrand decays like
/// `e^{α(1-H)s}` on the left and `e^{(1-αH)s}` on the right, giving
/// closed-form windows for a `TAIL_MASS_FRACTION` cut; the u-window must
/// reach `-(t⁺ + e^{s_max-})`, covered with geometric far cells.
pub fn telecom_auto_quadratures(
    h: f64,
    alpha: f64,
    times: &[f64],
) -> Result<(Quadrature1d, Quadrature1d)> {
    validate_telecom_params(h, alpha)?;
    let t_pos = times.iter().fold(0.0_f64, |m, &t| m.max(t));
    let t_neg = times.iter().fold(0.0_f64, |m, &t| m.max(-t));
    let t_scale = t_pos.max(t_neg).max(1.0);
    let margin = (1.0 / TAIL_MASS_FRACTION).ln() + t_scale.ln().max(0.0);
    let s1 = margin / (alpha * (1.0 - h));
    let s2 = margin / (alpha * h - 1.0);
    let s_cells = 192;
    let s_quad = Quadrature1d::uniform(-s1, s2, s_cells)?;

    let core_lo = -(t_pos + 2.0);
    let core_hi = t_neg + 1.0;
    let core_cells = (((core_hi - core_lo) * 8.0).ceil() as usize).clamp(16, 256);
    let u_far = t_pos + s1.exp();
    let ladder = geometric_ladder(-core_lo, u_far, 1.2, 384);
    let mut boundaries: Vec<f64> = ladder.iter().rev().map(|&x| -x).collect();
    boundaries.pop();
    let core = Quadrature1d::uniform(core_lo, core_hi, core_cells)?;
    boundaries.extend_from_slice(core.boundaries());
    let u_quad = Quadrature1d::from_boundaries(boundaries)?;
    Ok((s_quad, u_quad))
}

/// Set family for Chentzov-type indicator kernels.
#[derive(Debug, Clone)]
pub enum ChentzovSets {
    /// `V_t` is the interval between 0 and `t` over the first point
    /// coordinate (endpoints included).
    IntervalZeroT,
    /// Explicit membership: `sets[i][j]` says point `j` belongs to `V_{t_i}`.
    Custom(Vec<Vec<bool>>),
}

/// Indicator kernel `f_t = 1_{V_t}`; always nonnegative, hence always
/// max-associable.
pub fn build_chentzov(
    sets: &ChentzovSets,
    space: &MeasureSpace,
    grid: &TimeGrid,
) -> Result<SpectralKernel> {
    let values: Vec<Vec<f64>> = match sets {
        ChentzovSets::IntervalZeroT => {
            let coords = space.coords().ok_or_else(|| {
                StableError::InvalidParameter(
                    "interval sets need point coordinates on the measure space".into(),
                )
            })?;
            grid.times()
                .iter()
                .map(|&t| {
                    let (lo, hi) = if t >= 0.0 { (0.0, t) } else { (t, 0.0) };
                    coords
                        .iter()
                        .map(|c| {
                            let u = c[0];
                            if u >= lo && u <= hi {
                                1.0
                            } else {
                                0.0
                            }
                        })
                        .collect()
                })
                .collect()
        }
        ChentzovSets::Custom(sets) => {
            if sets.len() != grid.len() {
                return Err(StableError::DimensionMismatch(format!(
                    "{} set rows vs {} grid times",
                    sets.len(),
                    grid.len()
                )));
            }
            sets.iter()
                .map(|row| {
                    if row.len() != space.len() {
                        Err(StableError::DimensionMismatch(format!(
                            "set row of length {} vs {} points",
                            row.len(),
                            space.len()
                        )))
                    } else {
                        Ok(row.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect())
                    }
                })
                .collect::<Result<_>>()?
        }
    };
    SpectralKernel::new(space.clone(), grid.clone(), values, SignClass::Nonnegative)
}

/// A function `G(x, u)` tabulated on an `x`-set × uniform `u`-grid.
#[derive(Debug, Clone)]
pub struct TabulatedG {
    x_values: Vec<f64>,
    x_masses: Vec<f64>,
    u_values: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl TabulatedG {
    pub fn new(x_values: Vec<f64>, u_values: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        let x_masses = vec![1.0; x_values.len()];
        Self::with_x_masses(x_values, x_masses, u_values, values)
    }

    pub fn with_x_masses(
        x_values: Vec<f64>,
        x_masses: Vec<f64>,
        u_values: Vec<f64>,
        values: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if u_values.len() < 2 {
            return Err(StableError::InvalidParameter(
                "tabulated G needs at least two u-grid values".into(),
            ));
        }
        if x_values.len() != values.len() || x_values.len() != x_masses.len() {
            return Err(StableError::DimensionMismatch(format!(
                "{} x-values vs {} value rows vs {} x-masses",
                x_values.len(),
                values.len(),
                x_masses.len()
            )));
        }
        let du = u_values[1] - u_values[0];
        if !(du > 0.0) {
            return Err(StableError::InvalidParameter(
                "u-grid must be strictly increasing".into(),
            ));
        }
        for w in u_values.windows(2) {
            if ((w[1] - w[0]) - du).abs() > 1e-9 * du.max(1.0) {
                return Err(StableError::GridMismatch(
                    "tabulated G requires a uniform u-grid".into(),
                ));
            }
        }
        for row in &values {
            if row.len() != u_values.len() {
                return Err(StableError::DimensionMismatch(format!(
                    "G row of length {} vs {} u-grid values",
                    row.len(),
                    u_values.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(StableError::NonFinite("tabulated G value".into()));
            }
        }
        Ok(Self {
            x_values,
            x_masses,
            u_values,
            values,
        })
    }

    /// Reads `x,u,value` triples (optional header) and assembles the table;
    /// every (x, u) combination must be present.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut triples: Vec<(f64, f64, f64)> = Vec::new();
        for (lineno, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(StableError::KernelSpec(format!(
                    "line {}: expected 3 fields, got {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            match (
                fields[0].parse::<f64>(),
                fields[1].parse::<f64>(),
                fields[2].parse::<f64>(),
            ) {
                (Ok(x), Ok(u), Ok(v)) => triples.push((x, u, v)),
                _ if lineno == 0 => continue, // header row
                _ => {
                    return Err(StableError::KernelSpec(format!(
                        "line {}: expected numeric x,u,value",
                        lineno + 1
                    )))
                }
            }
        }
        if triples.is_empty() {
            return Err(StableError::KernelSpec("empty G table".into()));
        }
        let mut xs: Vec<f64> = triples.iter().map(|t| t.0).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup();
        let mut us: Vec<f64> = triples.iter().map(|t| t.1).collect();
        us.sort_by(|a, b| a.partial_cmp(b).unwrap());
        us.dedup();
        let mut values = vec![vec![f64::NAN; us.len()]; xs.len()];
        for (x, u, v) in triples {
            let i = xs.partition_point(|&c| c < x);
            let j = us.partition_point(|&c| c < u);
            values[i][j] = v;
        }
        if values.iter().flatten().any(|v| v.is_nan()) {
            return Err(StableError::KernelSpec(
                "G table is missing (x,u) combinations".into(),
            ));
        }
        Self::new(xs, us, values)
    }

    pub fn du(&self) -> f64 {
        self.u_values[1] - self.u_values[0]
    }

    pub fn n_x(&self) -> usize {
        self.x_values.len()
    }

    pub fn n_u(&self) -> usize {
        self.u_values.len()
    }

    pub fn x_values(&self) -> &[f64] {
        &self.x_values
    }

    pub fn u_values(&self) -> &[f64] {
        &self.u_values
    }

    pub fn value(&self, x_index: usize, u_index: usize) -> f64 {
        self.values[x_index][u_index]
    }
}

/// Increment kernel `G_t(x,u) = G(x, t+u) − G(x, u)` computed with index
/// shifts on the uniform u-grid; G is extended constantly beyond the
/// tabulated window. Every grid time must be an integer multiple of the
/// u-step.
pub fn build_mixed_moving_average(g: &TabulatedG, grid: &TimeGrid) -> Result<SpectralKernel> {
    let du = g.du();
    let shifts: Vec<i64> = grid
        .times()
        .iter()
        .map(|&t| {
            let k = (t / du).round();
            if (t - k * du).abs() > 1e-9 * t.abs().max(1.0) {
                Err(StableError::GridMismatch(format!(
                    "time {t} is not an integer multiple of the u-step {du}"
                )))
            } else {
                Ok(k as i64)
            }
        })
        .collect::<Result<_>>()?;

    let n_u = g.n_u();
    let mut points = Vec::with_capacity(g.n_x() * n_u);
    let mut masses = Vec::with_capacity(points.capacity());
    let mut coords = Vec::with_capacity(points.capacity());
    for i in 0..g.n_x() {
        for j in 0..n_u {
            points.push(format!("x{i}u{j}"));
            masses.push(g.x_masses[i] * du);
            coords.push(vec![g.x_values[i], g.u_values[j]]);
        }
    }
    let space = MeasureSpace::with_coords(points, masses, coords)?;

    let values = shifts
        .iter()
        .map(|&k| {
            let mut row = Vec::with_capacity(g.n_x() * n_u);
            for i in 0..g.n_x() {
                for j in 0..n_u {
                    let shifted = (j as i64 + k).clamp(0, n_u as i64 - 1) as usize;
                    row.push(g.values[i][shifted] - g.values[i][j]);
                }
            }
            row
        })
        .collect();
    SpectralKernel::new(space, grid.clone(), values, SignClass::Signed)
}

/// Witness that some x-slice of `G` takes three distinct values: feeding
/// `t_1 = u_1 − u_2 < 0 < t_2 = u_3 − u_2` back through
/// [`build_mixed_moving_average`] produces a strictly negative product
/// `G_{t_1}(x, u_2)·G_{t_2}(x, u_2)`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TwoValueWitness {
    pub x_index: usize,
    pub u_indices: [usize; 3],
    pub values: [f64; 3],
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SliceValues {
    pub x_index: usize,
    pub distinct_count: usize,
    /// Up to 16 cluster representatives, ascending.
    pub representatives: Vec<f64>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct TwoValueReport {
    pub conforms: bool,
    pub slices: Vec<SliceValues>,
    pub witness: Option<TwoValueWitness>,
}

/// Checks the two-value structure `G(x,u) = f(x)·1_{A_x}(u) + c(x)`: every
/// x-slice outside the optional mask may take at most two distinct values.
///
/// Values are clustered with absolute tolerance `1e-9` after slice-wise
/// normalization by the largest magnitude, since grids of analytic
/// functions never produce exact ties.
pub fn check_two_value_structure(
    g: &TabulatedG,
    mask: Option<&[Vec<bool>]>,
) -> Result<TwoValueReport> {
    if let Some(m) = mask {
        if m.len() != g.n_x() || m.iter().any(|row| row.len() != g.n_u()) {
            return Err(StableError::DimensionMismatch(
                "mask shape differs from the G table".into(),
            ));
        }
    }
    let mut slices = Vec::with_capacity(g.n_x());
    let mut witness: Option<TwoValueWitness> = None;
    for i in 0..g.n_x() {
        let mut entries: Vec<(usize, f64)> = (0..g.n_u())
            .filter(|&j| mask.is_none_or(|m| !m[i][j]))
            .map(|j| (j, g.values[i][j]))
            .collect();
        entries.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let scale = entries
            .iter()
            .fold(0.0_f64, |m, &(_, v)| m.max(v.abs()))
            .max(1e-300);
        let tol = 1e-9 * scale;
        // clusters anchored at their first (smallest) member
        let mut reps: Vec<(usize, f64)> = Vec::new();
        for &(j, v) in &entries {
            match reps.last() {
                Some(&(_, anchor)) if v - anchor <= tol => {}
                _ => reps.push((j, v)),
            }
        }
        if reps.len() > 2 && witness.is_none() {
            witness = Some(TwoValueWitness {
                x_index: i,
                u_indices: [reps[0].0, reps[1].0, reps[2].0],
                values: [reps[0].1, reps[1].1, reps[2].1],
            });
        }
        slices.push(SliceValues {
            x_index: i,
            distinct_count: reps.len(),
            representatives: reps.iter().take(16).map(|&(_, v)| v).collect(),
        });
    }
    Ok(TwoValueReport {
        conforms: witness.is_none(),
        slices,
        witness,
    })
}

/// Moving-maxima kernel `f_t(s) = φ(s − t)` on an integer point window,
/// with `φ` supported on offsets `0..φ.len()`.
pub fn build_moving_maxima(
    phi: &[f64],
    s_window: (i64, i64),
    grid: &TimeGrid,
) -> Result<SpectralKernel> {
    validate_phi(phi)?;
    if grid.kind() != GridKind::IntegerLattice {
        return Err(StableError::GridMismatch(
            "moving maxima kernels live on the integer lattice".into(),
        ));
    }
    let space = lattice_space(s_window)?;
    let values = grid
        .times()
        .iter()
        .map(|&t| {
            (s_window.0..=s_window.1)
                .map(|s| {
                    let off = s - t as i64;
                    if off >= 0 && (off as usize) < phi.len() {
                        phi[off as usize]
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    SpectralKernel::new(space, grid.clone(), values, SignClass::Nonnegative)
}

/// Circular moving-maxima kernel on `ℤ_m`: `f_t(s) = φ((s − t) mod m)`.
/// Shifting the time index permutes the points cyclically, so every
/// norm functional is exactly shift-invariant.
pub fn build_circular_moving_maxima(
    phi: &[f64],
    modulus: usize,
    grid: &TimeGrid,
) -> Result<SpectralKernel> {
    validate_phi(phi)?;
    if phi.len() > modulus {
        return Err(StableError::InvalidParameter(format!(
            "phi support {} exceeds the modulus {modulus}",
            phi.len()
        )));
    }
    if grid.kind() != GridKind::IntegerLattice {
        return Err(StableError::GridMismatch(
            "circular moving maxima kernels live on the integer lattice".into(),
        ));
    }
    let space = lattice_space((0, modulus as i64 - 1))?;
    let values = grid
        .times()
        .iter()
        .map(|&t| {
            (0..modulus as i64)
                .map(|s| {
                    let off = (s - t as i64).rem_euclid(modulus as i64) as usize;
                    if off < phi.len() {
                        phi[off]
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    SpectralKernel::new(space, grid.clone(), values, SignClass::Nonnegative)
}

fn validate_phi(phi: &[f64]) -> Result<()> {
    if phi.is_empty() {
        return Err(StableError::InvalidParameter(
            "phi shape must be nonempty".into(),
        ));
    }
    for &v in phi {
        if !v.is_finite() {
            return Err(StableError::NonFinite("phi value".into()));
        }
        if v < 0.0 {
            return Err(StableError::NegativeValue(format!("phi value {v}")));
        }
    }
    Ok(())
}

fn lattice_space(window: (i64, i64)) -> Result<MeasureSpace> {
    if window.0 > window.1 {
        return Err(StableError::InvalidParameter(format!(
            "empty lattice window [{}, {}]",
            window.0, window.1
        )));
    }
    let points: Vec<String> = (window.0..=window.1).map(|s| format!("s{s}")).collect();
    let masses = vec![1.0; points.len()];
    let coords = (window.0..=window.1).map(|s| vec![s as f64]).collect();
    MeasureSpace::with_coords(points, masses, coords)
}

/// Time domain a kernel family extends over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeDomain {
    IntegerLattice,
    RealLine { dt: f64 },
}

/// A kernel family evaluable on arbitrary time grids over a fixed measure
/// space; the interface the window-growing classifiers consume.
pub trait KernelFamily {
    fn space(&self) -> &MeasureSpace;
    fn time_domain(&self) -> TimeDomain;
    fn kernel_on(&self, grid: &TimeGrid) -> Result<SpectralKernel>;
}

/// A kernel family evaluable at arbitrary (positive) real times with a
/// refinable quadrature; the interface the self-similarity checker consumes.
pub trait ScalableKernelFamily {
    /// Kernel rows at the given strictly increasing times; `refine` splits
    /// every quadrature cell into that many parts.
    fn kernel_at_times(&self, times: &[f64], refine: u32) -> Result<SpectralKernel>;
}

/// Time-constant kernel family `f_t(s) = f(s)`.
#[derive(Debug, Clone)]
pub struct ConstantFamily {
    space: MeasureSpace,
    values: Vec<f64>,
}

impl ConstantFamily {
    pub fn new(space: MeasureSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(StableError::DimensionMismatch(format!(
                "{} values vs {} points",
                values.len(),
                space.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(StableError::NonFinite("constant kernel value".into()));
        }
        Ok(Self { space, values })
    }
}

impl KernelFamily for ConstantFamily {
    fn space(&self) -> &MeasureSpace {
        &self.space
    }

    fn time_domain(&self) -> TimeDomain {
        TimeDomain::IntegerLattice
    }

    fn kernel_on(&self, grid: &TimeGrid) -> Result<SpectralKernel> {
        let sign = if self.values.iter().all(|&v| v >= 0.0) {
            SignClass::Nonnegative
        } else {
            SignClass::Signed
        };
        let values = vec![self.values.clone(); grid.len()];
        SpectralKernel::new(self.space.clone(), grid.clone(), values, sign)
    }
}

/// Moving-maxima family over a fixed integer point window; rows vanish once
/// `|t|` outgrows the window, so its α-mass in time is finite.
#[derive(Debug, Clone)]
pub struct MovingMaximaFamily {
    phi: Vec<f64>,
    s_window: (i64, i64),
    space: MeasureSpace,
}

impl MovingMaximaFamily {
    pub fn new(phi: Vec<f64>, s_window: (i64, i64)) -> Result<Self> {
        validate_phi(&phi)?;
        let space = lattice_space(s_window)?;
        Ok(Self {
            phi,
            s_window,
            space,
        })
    }
}

impl KernelFamily for MovingMaximaFamily {
    fn space(&self) -> &MeasureSpace {
        &self.space
    }

    fn time_domain(&self) -> TimeDomain {
        TimeDomain::IntegerLattice
    }

    fn kernel_on(&self, grid: &TimeGrid) -> Result<SpectralKernel> {
        build_moving_maxima(&self.phi, self.s_window, grid)
    }
}

/// Mixed fractional motion `f_t(x, u) = t^{H-1/α} g(x, u/t)` over
/// `E × (0, ∞)` with control `ν(dx)·du`; defined for strictly positive
/// times. Self-similar with exponent `H` in the continuum by the change of
/// variables `u = t·v`.
#[derive(Clone)]
pub struct MixedFractionalMotion {
    h: f64,
    alpha: f64,
    x_points: Vec<f64>,
    x_masses: Vec<f64>,
    g: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    g_nonnegative: bool,
    u_quad: Quadrature1d,
}

impl std::fmt::Debug for MixedFractionalMotion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MixedFractionalMotion")
            .field("h", &self.h)
            .field("alpha", &self.alpha)
            .field("x_points", &self.x_points)
            .field("u_cells", &self.u_quad.n_cells())
            .finish()
    }
}

impl MixedFractionalMotion {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        h: f64,
        alpha: f64,
        x_points: Vec<f64>,
        x_masses: Vec<f64>,
        g: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
        g_nonnegative: bool,
        u_quad: Quadrature1d,
    ) -> Result<Self> {
        StabilityIndex::sum(alpha)?;
        if !(h > 0.0 && h.is_finite()) {
            return Err(StableError::InvalidParameter(format!(
                "mixed fractional motion requires H > 0, got {h}"
            )));
        }
        if x_points.len() != x_masses.len() || x_points.is_empty() {
            return Err(StableError::DimensionMismatch(
                "x points and masses must be nonempty and of equal length".into(),
            ));
        }
        if u_quad.boundaries()[0] < 0.0 {
            return Err(StableError::InvalidParameter(
                "mixed fractional motion integrates over u in (0, infinity)".into(),
            ));
        }
        Ok(Self {
            h,
            alpha,
            x_points,
            x_masses,
            g,
            g_nonnegative,
            u_quad,
        })
    }

    /// Exponential mixing family `g(x, v) = e^{-v/x}`, one component per
    /// x-scale with equal ν-masses.
    pub fn exp_mixture(h: f64, alpha: f64, x_scales: Vec<f64>, u_quad: Quadrature1d) -> Result<Self> {
        if x_scales.iter().any(|&x| !(x > 0.0)) {
            return Err(StableError::InvalidParameter(
                "x scales must be strictly positive".into(),
            ));
        }
        let n = x_scales.len() as f64;
        let masses = vec![1.0 / n; x_scales.len()];
        Self::new(
            h,
            alpha,
            x_scales,
            masses,
            Arc::new(|x: f64, v: f64| if v >= 0.0 { (-v / x).exp() } else { 0.0 }),
            true,
            u_quad,
        )
    }

    pub fn kernel_on_times(&self, times: &[f64]) -> Result<SpectralKernel> {
        self.kernel_at_times(times, 1)
    }
}

impl ScalableKernelFamily for MixedFractionalMotion {
    fn kernel_at_times(&self, times: &[f64], refine: u32) -> Result<SpectralKernel> {
        if times.iter().any(|&t| !(t > 0.0)) {
            return Err(StableError::InvalidParameter(
                "mixed fractional motion is indexed by strictly positive times".into(),
            ));
        }
        let quad = self.u_quad.refined(refine);
        let u_mids = quad.midpoints();
        let u_widths = quad.widths();
        let mut points = Vec::with_capacity(self.x_points.len() * u_mids.len());
        let mut masses = Vec::with_capacity(points.capacity());
        let mut coords = Vec::with_capacity(points.capacity());
        for (i, &x) in self.x_points.iter().enumerate() {
            for (j, &u) in u_mids.iter().enumerate() {
                points.push(format!("x{i}u{j}"));
                masses.push(self.x_masses[i] * u_widths[j]);
                coords.push(vec![x, u]);
            }
        }
        let space = MeasureSpace::with_coords(points, masses, coords)?;
        let exponent = self.h - 1.0 / self.alpha;
        let grid = TimeGrid::real_grid(times.to_vec(), vec![1.0; times.len()])?;
        let values = times
            .iter()
            .map(|&t| {
                let pre = t.powf(exponent);
                let mut row = Vec::with_capacity(self.x_points.len() * u_mids.len());
                for &x in &self.x_points {
                    for &u in &u_mids {
                        row.push(pre * (self.g)(x, u / t));
                    }
                }
                row
            })
            .collect();
        let sign = if self.g_nonnegative {
            SignClass::Nonnegative
        } else {
            SignClass::Signed
        };
        SpectralKernel::new(space, grid, values, sign)
    }
}

/// Constant-level kernel `f_t(s) = c`; the simplest associable family.
pub fn build_constant(c: f64, space: &MeasureSpace, grid: &TimeGrid) -> Result<SpectralKernel> {
    if !c.is_finite() {
        return Err(StableError::NonFinite("constant level".into()));
    }
    let sign = if c >= 0.0 {
        SignClass::Nonnegative
    } else {
        SignClass::Signed
    };
    let values = vec![vec![c; space.len()]; grid.len()];
    SpectralKernel::new(space.clone(), grid.clone(), values, sign)
}
