//! Batch experiments: configuration, seeded parallel runs, and persisted
//! traces, aggregates and manifests.

mod config;
mod output;
mod runner;

use std::path::{Path, PathBuf};

pub use config::{derive_seed, preset, ExperimentConfig, GridConfig, Preset, Warning, PRESETS};
pub use output::{
    aggregate, aggregate_file_name, aggregate_to_csv, emit_plot_data, find_traces, mean_std, parse_trace_file_name,
    read_plot_data, read_trace, trace_file_name, trace_from_csv, trace_to_csv, Aggregate,
};
pub use runner::{
    environment_for, run_all, run_experiment, write_outputs, AlgorithmSummary, ExperimentOutput, Manifest, RunRecord,
};

use crate::error::Result;

/// Re-aggregates every `trace_*.csv` in `dir` and rewrites the aggregate files.
pub fn aggregate_dir(dir: &Path) -> Result<Vec<(String, Aggregate, PathBuf)>> {
    let mut out = Vec::new();
    for (algo, files) in find_traces(dir)? {
        let traces = files.iter().map(|(_, p)| read_trace(p)).collect::<Result<Vec<_>>>()?;
        let refs: Vec<_> = traces.iter().collect();
        let agg = aggregate(&refs)?;
        let path = dir.join(aggregate_file_name(&algo));
        emit_plot_data(&agg, &path)?;
        out.push((algo, agg, path));
    }
    Ok(out)
}
