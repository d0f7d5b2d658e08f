//! Command implementations. Each returns the process exit code on success;
//! errors bubble to `main` where they map to exit codes 2/3.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use stablekit::association::{check_max_associable, AssociabilityReport};
use stablekit::decomposition::{
    classify as classify_family, classify_fixed, CdLabel, ClassificationConfig, PnLabel,
    WeightFunction, WindowSchedule, DEFAULT_DELTA,
};
use stablekit::integrals::{fdd_equal, simulate_partitioned, FddComparison};
use stablekit::kernel_spec::load_kernel_spec;
use stablekit::marginals::SeededStream;
use stablekit::measure::{Regime, StabilityIndex};
use stablekit::{Result, StableError};

use crate::config::{
    load, output_dir, resolve, CheckAssociableConfig, ClassifyConfig, CompareConfig,
    SimulateConfig,
};

fn parse_regime(s: &str) -> Result<Regime> {
    match s {
        "sum" => Ok(Regime::Sum),
        "max" => Ok(Regime::Max),
        other => Err(StableError::InvalidParameter(format!(
            "unknown regime '{other}' (sum | max)"
        ))),
    }
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut f = fs::File::create(&path)?;
    f.write_all(bytes)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| StableError::InvalidParameter(format!("serialization: {e}")))?;
    write_file(dir, name, text.as_bytes())
}

pub fn simulate(config_path: &Path) -> Result<u8> {
    let cfg: SimulateConfig = load(config_path)?;
    let regime = parse_regime(&cfg.regime)?;
    let index = StabilityIndex::for_regime(cfg.alpha, regime)?;
    let loaded = load_kernel_spec(&resolve(config_path, &cfg.kernel_spec))?;
    let stream = SeededStream::with_stream(cfg.seed, cfg.stream_id);
    let paths = simulate_partitioned(&loaded.kernel, &index, cfg.n_samples, &stream, cfg.threads)?;

    let dir = output_dir(config_path, &cfg.output_dir);
    let mut csv = Vec::new();
    paths.write_csv(&mut csv)?;
    write_file(&dir, "paths.csv", &csv)?;
    let summary = paths.summary()?;
    write_json(&dir, "summary.json", &summary)?;
    println!(
        "simulated {} samples x {} times; max |empirical - exact| gap {:.5}",
        summary.n_samples,
        summary.times.len(),
        summary.max_abs_gap
    );
    Ok(0)
}

#[derive(Serialize)]
struct AssociabilityOutput<'a> {
    schema_version: u32,
    kernel_spec: String,
    #[serde(flatten)]
    report: &'a AssociabilityReport,
}

pub fn check_associable(config_path: &Path) -> Result<u8> {
    let cfg: CheckAssociableConfig = load(config_path)?;
    let spec_path = resolve(config_path, &cfg.kernel_spec);
    let loaded = load_kernel_spec(&spec_path)?;
    let report = check_max_associable(&loaded.kernel);
    let dir = output_dir(config_path, &cfg.output_dir);
    write_json(
        &dir,
        "associability.json",
        &AssociabilityOutput {
            schema_version: 1,
            kernel_spec: spec_path.display().to_string(),
            report: &report,
        },
    )?;
    if report.associable {
        println!("associable: the rectified |f| kernel is embedded in the report");
        Ok(0)
    } else {
        let w = report.violating_pair.as_ref().expect("witness present");
        println!(
            "not max-associable: rows {} and {} have product {} at point {}",
            w.t_i, w.t_j, w.product, w.point_id
        );
        Ok(1)
    }
}

#[derive(Serialize)]
struct ClassifySummary {
    schema_version: u32,
    kernel_spec: String,
    alpha: f64,
    window: String,
    delta: f64,
    windows: Vec<f64>,
    weights: Vec<String>,
    n_points: usize,
    conservative: usize,
    dissipative: usize,
    positive: usize,
    null: usize,
}

pub fn classify(config_path: &Path) -> Result<u8> {
    let cfg: ClassifyConfig = load(config_path)?;
    let spec_path = resolve(config_path, &cfg.kernel_spec);
    let loaded = load_kernel_spec(&spec_path)?;
    let labels = match cfg.window.as_str() {
        "everything" => classify_fixed(&loaded.kernel, cfg.alpha)?,
        "auto" => {
            let family = loaded.family.as_deref().ok_or_else(|| {
                StableError::InvalidParameter(
                    "this kernel family does not extend over growing time windows; \
                     declare window = \"everything\" to classify the fixed grid"
                        .into(),
                )
            })?;
            let schedule = match &cfg.schedule {
                Some(s) => WindowSchedule::new(s.n0, s.doublings)?,
                None => WindowSchedule::new(8, 6)?,
            };
            let weights = match &cfg.weights {
                Some(names) => names
                    .iter()
                    .map(|n| WeightFunction::by_name(n))
                    .collect::<Result<Vec<_>>>()?,
                None => vec![WeightFunction::harmonic(), WeightFunction::harmonic_log()],
            };
            let config =
                ClassificationConfig::new(schedule, cfg.delta.unwrap_or(DEFAULT_DELTA), weights)?;
            classify_family(family, cfg.alpha, &config)?
        }
        other => {
            return Err(StableError::InvalidParameter(format!(
                "unknown window mode '{other}' (auto | everything)"
            )))
        }
    };

    let dir = output_dir(config_path, &cfg.output_dir);
    let mut csv = Vec::new();
    labels.write_csv(&mut csv)?;
    write_file(&dir, "labels.csv", &csv)?;
    let summary = ClassifySummary {
        schema_version: 1,
        kernel_spec: spec_path.display().to_string(),
        alpha: cfg.alpha,
        window: cfg.window.clone(),
        delta: labels.delta,
        windows: labels.windows.clone(),
        weights: labels.weighted.iter().map(|w| w.weight.clone()).collect(),
        n_points: labels.point_ids.len(),
        conservative: labels.cd.iter().filter(|&&c| c == CdLabel::Conservative).count(),
        dissipative: labels.cd.iter().filter(|&&c| c == CdLabel::Dissipative).count(),
        positive: labels.pn.iter().filter(|&&p| p == PnLabel::Positive).count(),
        null: labels.pn.iter().filter(|&&p| p == PnLabel::Null).count(),
    };
    write_json(&dir, "classification.json", &summary)?;
    println!(
        "classified {} points: {} conservative / {} dissipative, {} positive / {} null",
        summary.n_points,
        summary.conservative,
        summary.dissipative,
        summary.positive,
        summary.null
    );
    Ok(0)
}

#[derive(Serialize)]
struct CompareOutput<'a> {
    schema_version: u32,
    kernel_spec_a: String,
    kernel_spec_b: String,
    #[serde(flatten)]
    comparison: &'a FddComparison,
}

pub fn compare(config_path: &Path) -> Result<u8> {
    let cfg: CompareConfig = load(config_path)?;
    let regime = parse_regime(&cfg.regime)?;
    let index = StabilityIndex::for_regime(cfg.alpha, regime)?;
    let path_a = resolve(config_path, &cfg.kernel_spec_a);
    let path_b = resolve(config_path, &cfg.kernel_spec_b);
    let a = load_kernel_spec(&path_a)?;
    let b = load_kernel_spec(&path_b)?;
    let stream = SeededStream::with_stream(cfg.seed, cfg.stream_id);
    let comparison = fdd_equal(&a.kernel, &b.kernel, &index, cfg.trials, &stream)?;
    let dir = output_dir(config_path, &cfg.output_dir);
    write_json(
        &dir,
        "comparison.json",
        &CompareOutput {
            schema_version: 1,
            kernel_spec_a: path_a.display().to_string(),
            kernel_spec_b: path_b.display().to_string(),
            comparison: &comparison,
        },
    )?;
    if comparison.consistent {
        println!(
            "consistent over {} probes (no finite probe set certifies equality)",
            comparison.probes.len()
        );
        Ok(0)
    } else {
        let w = comparison.witness.as_ref().expect("witness present");
        println!(
            "representations differ: norms {} vs {} at times {:?}",
            w.norm_a, w.norm_b, w.time_indices
        );
        Ok(1)
    }
}
