use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{derive_seed, ExperimentConfig, Warning};
use super::output::{
    aggregate, aggregate_file_name, emit_plot_data, mean_std, trace_file_name, trace_to_csv, write_file, Aggregate,
};
use crate::acquisition::DecisionGrid;
use crate::algorithms::{run_episode, RegretTrace};
use crate::environments::Environment;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub algorithm: String,
    pub seed: u64,
    pub trace: RegretTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub name: String,
    pub final_regret_mean: f64,
    pub final_regret_std: f64,
    pub final_queries_mean: f64,
    pub final_queries_std: f64,
    pub final_queries_max: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub warnings: Vec<Warning>,
    /// `max_t (f*_t on an 8× refined grid − f*_t on the decision grid)`.
    pub grid_gap: f64,
    pub algorithms: Vec<AlgorithmSummary>,
    pub files: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub runs: Vec<RunRecord>,
    pub aggregates: Vec<(String, Aggregate)>,
    pub manifest: Manifest,
}

impl ExperimentOutput {
    pub fn aggregate_for(&self, algorithm: &str) -> Option<&Aggregate> {
        self.aggregates.iter().find(|(n, _)| n == algorithm).map(|(_, a)| a)
    }

    pub fn traces_for(&self, algorithm: &str) -> Vec<&RegretTrace> {
        self.runs.iter().filter(|r| r.algorithm == algorithm).map(|r| &r.trace).collect()
    }
}

/// The environment realization shared by every learner for `seed`.
pub fn environment_for(config: &ExperimentConfig, seed: u64) -> Result<Environment> {
    Environment::new(
        config.environment.clone(),
        config.horizon,
        derive_seed(config.master_seed, "environment", seed),
    )
}

fn grid_gap(config: &ExperimentConfig, grid: &DecisionGrid) -> Result<f64> {
    let fine = grid.refined(8)?;
    let env = environment_for(config, config.seeds[0])?;
    let mut gap = 0.0f64;
    for t in 1..=config.horizon {
        gap = gap.max(env.oracle_optimum(t, &fine).value - env.oracle_optimum(t, grid).value);
    }
    Ok(gap)
}

/// Runs every `(algorithm, seed)` pair in memory. Nothing is written.
pub fn run_all(config: &ExperimentConfig, threads: Option<usize>) -> Result<ExperimentOutput> {
    let warnings = config.validate()?;
    for w in &warnings {
        warn!("{w}");
    }
    let grid = config.grid.build()?;
    let jobs: Vec<(usize, u64)> = (0..config.algorithms.len())
        .flat_map(|a| config.seeds.iter().map(move |&s| (a, s)))
        .collect();

    let work = || -> Result<Vec<RunRecord>> {
        jobs.par_iter()
            .map(|&(a, seed)| {
                let alg = &config.algorithms[a];
                let env = environment_for(config, seed)?;
                let stream = derive_seed(config.master_seed, alg.name(), seed);
                let trace = run_episode(alg, &env, config.kernel, &grid, config.horizon, stream)?;
                info!("{} seed {seed}: R_T = {:.4}, N_T = {}", alg.name(), trace.final_regret(), trace.final_queries());
                Ok(RunRecord {
                    algorithm: alg.name().to_string(),
                    seed,
                    trace,
                })
            })
            .collect()
    };
    let runs = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config("threads", e.to_string()))?
            .install(work)?,
        None => work()?,
    };

    let mut aggregates = Vec::new();
    let mut summaries = Vec::new();
    let mut files = Vec::new();
    for alg in &config.algorithms {
        let name = alg.name();
        let traces: Vec<&RegretTrace> = runs.iter().filter(|r| r.algorithm == name).map(|r| &r.trace).collect();
        let agg = aggregate(&traces)?;
        let queries: Vec<f64> = traces.iter().map(|t| t.final_queries() as f64).collect();
        let (qm, qs) = mean_std(&queries);
        summaries.push(AlgorithmSummary {
            name: name.to_string(),
            final_regret_mean: agg.final_mean(),
            final_regret_std: agg.final_std(),
            final_queries_mean: qm,
            final_queries_std: qs,
            final_queries_max: traces.iter().map(|t| t.final_queries()).max().unwrap_or(0),
        });
        for r in runs.iter().filter(|r| r.algorithm == name) {
            files.push(trace_file_name(name, r.seed));
        }
        files.push(aggregate_file_name(name));
        aggregates.push((name.to_string(), agg));
    }
    files.push("manifest.json".to_string());

    let manifest = Manifest {
        name: config.name.clone(),
        config_hash: config.hash(),
        config: config.clone(),
        warnings,
        grid_gap: grid_gap(config, &grid)?,
        algorithms: summaries,
        files,
    };
    Ok(ExperimentOutput {
        runs,
        aggregates,
        manifest,
    })
}

/// Writes traces, aggregates and the manifest into `dir`.
///
/// Files are staged in a sibling directory first, so a failure leaves
/// previously written results untouched.
pub fn write_outputs(output: &ExperimentOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let staging = dir.join(format!(".staging-{}", std::process::id()));
    std::fs::create_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
    let staged = (|| -> Result<Vec<String>> {
        let mut names = Vec::new();
        for r in &output.runs {
            let name = trace_file_name(&r.algorithm, r.seed);
            write_file(&staging.join(&name), &trace_to_csv(&r.trace))?;
            names.push(name);
        }
        for (algo, agg) in &output.aggregates {
            let name = aggregate_file_name(algo);
            emit_plot_data(agg, &staging.join(&name))?;
            names.push(name);
        }
        let json = serde_json::to_string_pretty(&output.manifest)?;
        write_file(&staging.join("manifest.json"), &json)?;
        names.push("manifest.json".to_string());
        Ok(names)
    })();
    let names = match staged {
        Ok(n) => n,
        Err(e) => {
            let _ = std::fs::remove_dir_all(&staging);
            return Err(e);
        }
    };
    let mut written = Vec::with_capacity(names.len());
    for name in names {
        let to = dir.join(&name);
        std::fs::rename(staging.join(&name), &to).map_err(|e| Error::io(&to, e))?;
        written.push(to);
    }
    std::fs::remove_dir(&staging).map_err(|e| Error::io(&staging, e))?;
    Ok(written)
}

/// Runs the experiment and persists it. `out` overrides the configured directory.
pub fn run_experiment(config: &ExperimentConfig, out: Option<&Path>, threads: Option<usize>) -> Result<ExperimentOutput> {
    let output = run_all(config, threads)?;
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| config.output_dir());
    write_outputs(&output, &dir)?;
    info!("wrote {} files to {}", output.manifest.files.len(), dir.display());
    Ok(output)
}
