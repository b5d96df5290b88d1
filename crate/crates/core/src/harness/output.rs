use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::algorithms::{RegretTrace, TraceRow};
use crate::error::{Error, Result};

/// Mean and sample standard deviation of `R_t` across seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub runs: usize,
}

impl Aggregate {
    pub fn horizon(&self) -> usize {
        self.mean.len()
    }

    pub fn final_mean(&self) -> f64 {
        *self.mean.last().expect("non-empty aggregate")
    }

    pub fn final_std(&self) -> f64 {
        *self.std.last().expect("non-empty aggregate")
    }
}

/// Mean and (n − 1)-normalized std of `values`, independent of their order.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let mut sq: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
    sq.sort_by(f64::total_cmp);
    (mean, (sq.iter().sum::<f64>() / (n - 1.0)).sqrt())
}

/// Per-step aggregate of cumulative regret. All traces must share a horizon.
pub fn aggregate(traces: &[&RegretTrace]) -> Result<Aggregate> {
    let first = traces
        .first()
        .ok_or_else(|| Error::config("traces", "nothing to aggregate"))?;
    let horizon = first.horizon();
    for tr in traces {
        if tr.horizon() != horizon {
            return Err(Error::HorizonMismatch {
                expected: horizon,
                found: tr.horizon(),
            });
        }
    }
    let mut mean = Vec::with_capacity(horizon);
    let mut std = Vec::with_capacity(horizon);
    let mut column = vec![0.0; traces.len()];
    for t in 0..horizon {
        for (c, tr) in column.iter_mut().zip(traces) {
            *c = tr.rows[t].cumulative_regret;
        }
        let (m, s) = mean_std(&column);
        mean.push(m);
        std.push(s);
    }
    Ok(Aggregate {
        mean,
        std,
        runs: traces.len(),
    })
}

pub fn trace_file_name(algorithm: &str, seed: u64) -> String {
    format!("trace_{algorithm}_seed{seed}.csv")
}

pub fn aggregate_file_name(algorithm: &str) -> String {
    format!("aggregate_{algorithm}.csv")
}

/// Splits `trace_<algo>_seed<k>.csv` into its parts.
pub fn parse_trace_file_name(name: &str) -> Option<(String, u64)> {
    let stem = name.strip_prefix("trace_")?.strip_suffix(".csv")?;
    let (algo, seed) = stem.rsplit_once("_seed")?;
    Some((algo.to_string(), seed.parse().ok()?))
}

fn join(out: &mut String, values: &[f64]) {
    for v in values {
        write!(out, ",{v}").unwrap();
    }
}

/// Columns `t, window_id, x_0.., y_0.., r_t, R_t, N_t, beta_t`.
/// Floats use the shortest exact representation so they parse back bit-for-bit.
pub fn trace_to_csv(trace: &RegretTrace) -> String {
    let (d, m) = trace
        .rows
        .first()
        .map_or((0, 0), |r| (r.action.len(), r.observation.len()));
    let mut out = String::from("t,window_id");
    for i in 0..d {
        write!(out, ",x_{i}").unwrap();
    }
    for i in 0..m {
        write!(out, ",y_{i}").unwrap();
    }
    out.push_str(",r_t,R_t,N_t,beta_t\n");
    for r in &trace.rows {
        write!(out, "{},{}", r.t, r.window_id).unwrap();
        join(&mut out, &r.action);
        join(&mut out, &r.observation);
        writeln!(out, ",{},{},{},{}", r.instant_regret, r.cumulative_regret, r.queries, r.beta).unwrap();
    }
    out
}

pub fn trace_from_csv(text: &str, path: &Path) -> Result<RegretTrace> {
    let bad = |message: String| Error::TraceFormat {
        path: path.to_path_buf(),
        message,
    };
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().ok_or_else(|| bad("empty file".into()))?.split(',').collect();
    let d = header.iter().filter(|h| h.starts_with("x_")).count();
    let m = header.iter().filter(|h| h.starts_with("y_")).count();
    let width = 2 + d + m + 4;
    if header.len() != width || header[0] != "t" || header[1] != "window_id" || header[width - 4..] != ["r_t", "R_t", "N_t", "beta_t"] {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != width {
            return Err(bad(format!("line {}: expected {width} fields", lineno + 2)));
        }
        let float = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("line {}: {e}", lineno + 2)));
        let int = |s: &str| s.parse::<u64>().map_err(|e| bad(format!("line {}: {e}", lineno + 2)));
        let floats = |range: std::ops::Range<usize>| fields[range].iter().map(|s| float(s)).collect::<Result<Vec<_>>>();
        rows.push(TraceRow {
            t: int(fields[0])?,
            window_id: int(fields[1])? as usize,
            action: floats(2..2 + d)?,
            observation: floats(2 + d..2 + d + m)?,
            instant_regret: float(fields[width - 4])?,
            cumulative_regret: float(fields[width - 3])?,
            queries: int(fields[width - 2])?,
            beta: float(fields[width - 1])?,
            theta: None,
        });
    }
    Ok(RegretTrace { rows })
}

pub fn read_trace(path: &Path) -> Result<RegretTrace> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    trace_from_csv(&text, path)
}

/// Plot-ready columns `t, mean_R, std_R`.
pub fn aggregate_to_csv(agg: &Aggregate) -> String {
    let mut out = String::from("t,mean_R,std_R\n");
    for (i, (m, s)) in agg.mean.iter().zip(&agg.std).enumerate() {
        writeln!(out, "{},{m},{s}", i + 1).unwrap();
    }
    out
}

/// Writes [`aggregate_to_csv`] to `path`.
pub fn emit_plot_data(agg: &Aggregate, path: &Path) -> Result<()> {
    write_file(path, &aggregate_to_csv(agg))
}

/// Parses an aggregate file back; `runs` is not stored and comes back as 0.
pub fn read_plot_data(path: &Path) -> Result<Aggregate> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |message: String| Error::TraceFormat {
        path: path.to_path_buf(),
        message,
    };
    let mut lines = text.lines();
    if lines.next() != Some("t,mean_R,std_R") {
        return Err(bad("unexpected header".into()));
    }
    let (mut mean, mut std) = (Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        let parsed = match f.as_slice() {
            [t, m, s] if t.parse::<usize>().ok() == Some(i + 1) => m.parse::<f64>().ok().zip(s.parse::<f64>().ok()),
            _ => None,
        };
        let (m, s) = parsed.ok_or_else(|| bad(format!("line {}", i + 2)))?;
        mean.push(m);
        std.push(s);
    }
    Ok(Aggregate { mean, std, runs: 0 })
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// `(algorithm, [(seed, path)])`.
pub type TraceGroup = (String, Vec<(u64, PathBuf)>);

/// Trace files in `dir` grouped by algorithm, seeds ascending.
pub fn find_traces(dir: &Path) -> Result<Vec<TraceGroup>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut groups: std::collections::BTreeMap<String, Vec<(u64, PathBuf)>> = Default::default();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name();
        if let Some((algo, seed)) = name.to_str().and_then(parse_trace_file_name) {
            groups.entry(algo).or_default().push((seed, entry.path()));
        }
    }
    Ok(groups
        .into_iter()
        .map(|(k, mut v)| {
            v.sort();
            (k, v)
        })
        .collect())
}
