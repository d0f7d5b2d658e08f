//! Kernel-spec files: TOML declarations of a measure space, a time grid and
//! either an explicit value matrix or a named parametric kernel.
//!
//! ```toml
//! [space]                      # explicit spaces (matrix/constant/chentzov sets)
//! masses = [1.0, 1.0]
//! points = ["a", "b"]          # optional, default p0, p1, …
//! coords = [[0.5], [1.5]]      # optional per-point coordinates
//!
//! [grid]
//! kind = "integer-lattice"     # or "real-grid"
//! times = [0, 1]
//! lambda_weights = [1.0, 1.0]  # optional; defaults to 1 per time
//!
//! [kernel]
//! family = "matrix"            # lfsm | telecom | chentzov | constant |
//!                              # moving-maxima | mixed-moving-average |
//!                              # mixed-fractional
//! sign_class = "nonnegative"   # matrix only: or "signed"
//! values = [[1.0, 0.0], [0.0, 1.0]]
//! ```
//!
//! Parametric families build their own quadrature space and ignore `[space]`;
//! see the README for the per-family parameter tables.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Result, StableError};
use crate::kernels::{
    build_chentzov, build_lfsm, build_mixed_moving_average, build_moving_maxima, build_telecom,
    build_circular_moving_maxima, lfsm_auto_quadrature, telecom_auto_quadratures, ChentzovSets,
    ConstantFamily, KernelFamily, MixedFractionalMotion, MovingMaximaFamily, Quadrature1d,
    TabulatedG,
};
use crate::measure::{GridKind, MeasureSpace, SignClass, SpectralKernel, TimeGrid};

/// A kernel loaded from a spec file, together with its window-extendable
/// family when the declared family supports growing time windows
/// (classification needs that).
pub struct LoadedKernel {
    pub kernel: SpectralKernel,
    pub family: Option<Box<dyn KernelFamily>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    space: Option<SpaceSection>,
    grid: GridSection,
    kernel: KernelSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceSection {
    masses: Vec<f64>,
    points: Option<Vec<String>>,
    coords: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    kind: String,
    times: Vec<f64>,
    lambda_weights: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelSection {
    family: String,
    // matrix
    sign_class: Option<String>,
    values: Option<Vec<Vec<f64>>>,
    // power-law families
    h: Option<f64>,
    alpha: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    u_window: Option<[f64; 2]>,
    u_cells: Option<usize>,
    s_window: Option<[f64; 2]>,
    s_cells: Option<usize>,
    // constant
    level: Option<f64>,
    per_point: Option<Vec<f64>>,
    // moving maxima
    phi: Option<Vec<f64>>,
    lattice_window: Option<[i64; 2]>,
    circular: Option<bool>,
    modulus: Option<usize>,
    // mixed moving average
    g_csv: Option<String>,
    // mixed fractional
    x_scales: Option<Vec<f64>>,
    // chentzov
    sets: Option<Vec<Vec<bool>>>,
}

fn need<T: Copy>(v: &Option<T>, field: &str, family: &str) -> Result<T> {
    v.ok_or_else(|| StableError::KernelSpec(format!("{family} kernel requires '{field}'")))
}

fn need_ref<'a, T>(v: &'a Option<T>, field: &str, family: &str) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| StableError::KernelSpec(format!("{family} kernel requires '{field}'")))
}

fn build_grid(section: &GridSection) -> Result<TimeGrid> {
    let kind = match section.kind.as_str() {
        "integer-lattice" => GridKind::IntegerLattice,
        "real-grid" => GridKind::RealGrid,
        other => {
            return Err(StableError::KernelSpec(format!(
                "unknown grid kind '{other}' (integer-lattice | real-grid)"
            )))
        }
    };
    let weights = section
        .lambda_weights
        .clone()
        .unwrap_or_else(|| vec![1.0; section.times.len()]);
    TimeGrid::new(section.times.clone(), weights, kind)
}

fn build_space(section: &Option<SpaceSection>, family: &str) -> Result<MeasureSpace> {
    let s = section.as_ref().ok_or_else(|| {
        StableError::KernelSpec(format!("{family} kernel requires a [space] section"))
    })?;
    let points = s
        .points
        .clone()
        .unwrap_or_else(|| (0..s.masses.len()).map(|i| format!("p{i}")).collect());
    match &s.coords {
        Some(c) => MeasureSpace::with_coords(points, s.masses.clone(), c.clone()),
        None => MeasureSpace::new(points, s.masses.clone()),
    }
}

fn quadrature_from(
    window: Option<[f64; 2]>,
    cells: Option<usize>,
    default_cells: usize,
) -> Result<Option<Quadrature1d>> {
    match window {
        None => Ok(None),
        Some([lo, hi]) => Ok(Some(Quadrature1d::uniform(
            lo,
            hi,
            cells.unwrap_or(default_cells),
        )?)),
    }
}

/// Parses a kernel-spec document; `base_dir` resolves relative paths (the
/// mixed-moving-average `g_csv` table).
pub fn parse_kernel_spec(text: &str, base_dir: &Path) -> Result<LoadedKernel> {
    let spec: SpecFile =
        toml::from_str(text).map_err(|e| StableError::KernelSpec(e.to_string()))?;
    let grid = build_grid(&spec.grid)?;
    let k = &spec.kernel;
    match k.family.as_str() {
        "matrix" => {
            let space = build_space(&spec.space, "matrix")?;
            let sign = match need_ref(&k.sign_class, "sign_class", "matrix")?.as_str() {
                "signed" => SignClass::Signed,
                "nonnegative" => SignClass::Nonnegative,
                other => {
                    return Err(StableError::KernelSpec(format!(
                        "unknown sign_class '{other}' (signed | nonnegative)"
                    )))
                }
            };
            let values = need_ref(&k.values, "values", "matrix")?.clone();
            Ok(LoadedKernel {
                kernel: SpectralKernel::new(space, grid, values, sign)?,
                family: None,
            })
        }
        "lfsm" => {
            let h = need(&k.h, "h", "lfsm")?;
            let alpha = need(&k.alpha, "alpha", "lfsm")?;
            let a = k.a.unwrap_or(1.0);
            let b = k.b.unwrap_or(1.0);
            let quad = match quadrature_from(k.u_window, k.u_cells, 512)? {
                Some(q) => q,
                None => lfsm_auto_quadrature(h, alpha, a, b, grid.times())?,
            };
            Ok(LoadedKernel {
                kernel: build_lfsm(h, alpha, a, b, &grid, &quad)?,
                family: None,
            })
        }
        "telecom" => {
            let h = need(&k.h, "h", "telecom")?;
            let alpha = need(&k.alpha, "alpha", "telecom")?;
            let (s_quad, u_quad) = match (
                quadrature_from(k.s_window, k.s_cells, 128)?,
                quadrature_from(k.u_window, k.u_cells, 256)?,
            ) {
                (Some(s), Some(u)) => (s, u),
                (None, None) => telecom_auto_quadratures(h, alpha, grid.times())?,
                _ => {
                    return Err(StableError::KernelSpec(
                        "telecom needs both s_window and u_window, or neither".into(),
                    ))
                }
            };
            Ok(LoadedKernel {
                kernel: build_telecom(h, alpha, &s_quad, &u_quad, &grid)?,
                family: None,
            })
        }
        "chentzov" => {
            if let Some(sets) = &k.sets {
                let space = build_space(&spec.space, "chentzov")?;
                Ok(LoadedKernel {
                    kernel: build_chentzov(&ChentzovSets::Custom(sets.clone()), &space, &grid)?,
                    family: None,
                })
            } else {
                let [lo, hi] = need(&k.u_window, "u_window (or explicit sets)", "chentzov")?;
                let quad = Quadrature1d::uniform(lo, hi, k.u_cells.unwrap_or(64))?;
                let mids = quad.midpoints();
                let widths = quad.widths();
                let points = (0..mids.len()).map(|j| format!("u{j}")).collect();
                let coords = mids.iter().map(|&u| vec![u]).collect();
                let space = MeasureSpace::with_coords(points, widths, coords)?;
                Ok(LoadedKernel {
                    kernel: build_chentzov(&ChentzovSets::IntervalZeroT, &space, &grid)?,
                    family: None,
                })
            }
        }
        "constant" => {
            let space = build_space(&spec.space, "constant")?;
            let values = match (&k.per_point, k.level) {
                (Some(v), None) => v.clone(),
                (None, Some(c)) => vec![c; space.len()],
                _ => {
                    return Err(StableError::KernelSpec(
                        "constant kernel requires exactly one of 'per_point' or 'level'".into(),
                    ))
                }
            };
            let family = ConstantFamily::new(space, values)?;
            Ok(LoadedKernel {
                kernel: family.kernel_on(&grid)?,
                family: Some(Box::new(family)),
            })
        }
        "moving-maxima" => {
            let phi = need_ref(&k.phi, "phi", "moving-maxima")?.clone();
            if k.circular.unwrap_or(false) {
                let m = need(&k.modulus, "modulus", "circular moving-maxima")?;
                Ok(LoadedKernel {
                    kernel: build_circular_moving_maxima(&phi, m, &grid)?,
                    family: None,
                })
            } else {
                let [lo, hi] = need(&k.lattice_window, "lattice_window", "moving-maxima")?;
                let family = MovingMaximaFamily::new(phi.clone(), (lo, hi))?;
                Ok(LoadedKernel {
                    kernel: build_moving_maxima(&phi, (lo, hi), &grid)?,
                    family: Some(Box::new(family)),
                })
            }
        }
        "mixed-moving-average" => {
            let rel = need_ref(&k.g_csv, "g_csv", "mixed-moving-average")?;
            let path = base_dir.join(rel);
            let file = fs::File::open(&path).map_err(|e| {
                StableError::KernelSpec(format!("cannot open G table {}: {e}", path.display()))
            })?;
            let g = TabulatedG::from_csv(file)?;
            Ok(LoadedKernel {
                kernel: build_mixed_moving_average(&g, &grid)?,
                family: None,
            })
        }
        "mixed-fractional" => {
            let h = need(&k.h, "h", "mixed-fractional")?;
            let alpha = need(&k.alpha, "alpha", "mixed-fractional")?;
            let x_scales = need_ref(&k.x_scales, "x_scales", "mixed-fractional")?.clone();
            let [lo, hi] = need(&k.u_window, "u_window", "mixed-fractional")?;
            let quad = Quadrature1d::uniform(lo, hi, k.u_cells.unwrap_or(128))?;
            let family = MixedFractionalMotion::exp_mixture(h, alpha, x_scales, quad)?;
            Ok(LoadedKernel {
                kernel: family.kernel_on_times(grid.times())?,
                family: None,
            })
        }
        other => Err(StableError::KernelSpec(format!(
            "unknown kernel family '{other}'"
        ))),
    }
}

/// Loads a kernel-spec file from disk.
pub fn load_kernel_spec(path: &Path) -> Result<LoadedKernel> {
    let text = fs::read_to_string(path).map_err(|e| {
        StableError::KernelSpec(format!("cannot read {}: {e}", path.display()))
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_kernel_spec(&text, base)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_spec_round_trip() {
        let text = r#"
[space]
masses = [1.0, 2.0]
points = ["a", "b"]

[grid]
kind = "integer-lattice"
times = [0, 1]

[kernel]
family = "matrix"
sign_class = "nonnegative"
values = [[1.0, 0.0], [0.0, 1.0]]
"#;
        let loaded = parse_kernel_spec(text, Path::new(".")).unwrap();
        assert_eq!(loaded.kernel.n_times(), 2);
        assert_eq!(loaded.kernel.space().masses(), &[1.0, 2.0]);
        assert!(loaded.family.is_none());
    }

    #[test]
    fn lfsm_spec_with_auto_window() {
        let text = r#"
[grid]
kind = "real-grid"
times = [-1.0, 1.0]

[kernel]
family = "lfsm"
h = 0.7
alpha = 1.5
a = 1.0
b = 1.0
"#;
        let loaded = parse_kernel_spec(text, Path::new(".")).unwrap();
        assert_eq!(loaded.kernel.n_times(), 2);
        assert!(loaded.kernel.n_points() > 100);
    }

    #[test]
    fn constant_spec_has_family() {
        let text = r#"
[space]
masses = [1.0, 1.0]

[grid]
kind = "integer-lattice"
times = [0]

[kernel]
family = "constant"
level = 2.0
"#;
        let loaded = parse_kernel_spec(text, Path::new(".")).unwrap();
        assert!(loaded.family.is_some());
        assert_eq!(loaded.kernel.row(0).unwrap(), &[2.0, 2.0]);
    }

    #[test]
    fn bad_specs_rejected() {
        assert!(matches!(
            parse_kernel_spec("not toml at all [", Path::new(".")),
            Err(StableError::KernelSpec(_))
        ));
        let unknown_family = r#"
[grid]
kind = "integer-lattice"
times = [0]

[kernel]
family = "fancy"
"#;
        assert!(parse_kernel_spec(unknown_family, Path::new(".")).is_err());
        let missing_field = r#"
[grid]
kind = "real-grid"
times = [1.0]

[kernel]
family = "lfsm"
h = 0.7
"#;
        assert!(parse_kernel_spec(missing_field, Path::new(".")).is_err());
    }

    #[test]
    fn moving_maxima_spec() {
        let text = r#"
[grid]
kind = "integer-lattice"
times = [0, 1, 2]

[kernel]
family = "moving-maxima"
phi = [3.0, 2.0, 1.0]
lattice_window = [-8, 8]
"#;
        let loaded = parse_kernel_spec(text, Path::new(".")).unwrap();
        assert!(loaded.family.is_some());
        assert_eq!(loaded.kernel.n_points(), 17);
    }
}
