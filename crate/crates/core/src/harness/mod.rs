//! Experiment orchestration: configuration, cached estimates, the Berry–Esseen,
//! local limit and large-deviation sweeps, the exact pipeline cross-checks and the
//! merged report. Every experiment writes CSV files into an output directory.

mod be;
mod cache;
mod config;
mod ld;
mod llt;
mod pipeline;
mod report;
mod spectrum;

use std::path::Path;

pub use be::{be_gap, run_be_experiment, run_be_llt, sample_coefficients, BeReport, BeRow, CoefficientSample};
pub use cache::{Estimates, ESTIMATES_FILE};
pub use config::ExperimentConfig;
pub use ld::{ld_frequencies_exact, run_ld_experiment, LdEvent, LdReport};
pub use llt::{llt_rows, run_llt_experiment, LltReport, LltRow};
pub use pipeline::{fn_pipeline_check, PipelineReport};
pub use report::{write_report, REPORT_FILE};
pub use spectrum::{run_spectrum, SpectrumReport};

use crate::error::Result;
use crate::estimators::{estimate_moments, MomentOptions};
use crate::measure::MatrixMeasure;
use crate::rng::cell_seed;

/// Seed tags separating the experiment families.
pub(crate) const TAG_ESTIMATE: u64 = 0xE57;
pub(crate) const TAG_LD: u64 = 0x1D;

/// Estimates `γ̂` and `ϱ̂²` from `estimate_samples` paths of length `estimate_n`.
pub fn run_estimate(cfg: &ExperimentConfig) -> Result<Estimates> {
    let opts = MomentOptions {
        n: cfg.estimate_n,
        samples: cfg.estimate_samples,
        seed: cell_seed(cfg.seed, TAG_ESTIMATE),
        workers: cfg.workers,
        burn_in: cfg.burn_in,
        start: Some(cfg.x.clone()),
    };
    let (g, v) = estimate_moments(&cfg.measure, &opts)?;
    Ok(Estimates::from_estimators(&g, &v))
}

/// `|supp μ|ⁿ` words fit under the enumeration cap.
pub(crate) fn enumerable(measure: &MatrixMeasure, n: usize) -> bool {
    (measure.len() as u128)
        .checked_pow(n as u32)
        .is_some_and(|t| t <= crate::measure::ENUMERATION_CAP as u128)
}

pub(crate) fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}
