//! Data ingestion, constraint sampling, evaluation and benchmark
//! orchestration.

pub mod io;
pub mod metrics;
pub mod synth;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::consensus::{average_linkage, cut_dendrogram, eac_matrix, weac_matrix};
use crate::diversity::{self, UniformityMode, WeightMode};
use crate::error::{Error, Result};
use crate::generators::{build_schedule, generate_reference_set};
use crate::preprocess::constraint_projection;
use crate::types::{ConstraintSet, DataMatrix, Partition, validate_partition};

use self::io::LabelColumn;
use self::metrics::{accuracy_hungarian, nmi};

const MAX_SAMPLING_ATTEMPTS: usize = 100;

/// A data matrix with optional ground-truth class labels.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    data: DataMatrix,
    labels: Option<Vec<usize>>,
    name: String,
}

impl LabeledDataset {
    pub fn new(data: DataMatrix, labels: Option<Vec<usize>>, name: String) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != data.n_instances() {
                return Err(Error::LengthMismatch {
                    what: "dataset labels",
                    expected: data.n_instances(),
                    got: l.len(),
                });
            }
        }
        Ok(Self { data, labels, name })
    }

    pub fn data(&self) -> &DataMatrix {
        &self.data
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_instances(&self) -> usize {
        self.data.n_instances()
    }

    /// Ground truth as a canonical partition.
    pub fn truth_partition(&self) -> Option<Partition> {
        self.labels
            .as_ref()
            .and_then(|l| validate_partition(l, l.len()).ok())
    }
}

/// Per-feature standardization to zero mean and unit variance (population
/// variance). Zero-variance features map to all-zeros.
pub fn zscore_normalize(ds: &LabeledDataset) -> LabeledDataset {
    let x = ds.data.values();
    let (n, m) = x.dim();
    let mut out = Array2::zeros((n, m));
    for j in 0..m {
        let col = x.column(j);
        let mean: f64 = col.iter().sum::<f64>() / n as f64;
        let var: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let std = var.sqrt();
        if std > 0.0 {
            for i in 0..n {
                out[(i, j)] = (col[i] - mean) / std;
            }
        }
    }
    let data = DataMatrix::with_names(out, ds.data.feature_names().map(|s| s.to_vec()))
        .expect("normalization preserves validity");
    LabeledDataset {
        data,
        labels: ds.labels.clone(),
        name: ds.name.clone(),
    }
}

/// Samples pairwise constraints from ground truth: `round(percent * n / 100)`
/// instances (rounded down so the pairs split evenly, minimum 4), paired off
/// so each instance appears exactly once, half the pairs must-link and half
/// cannot-link. Deterministic given the seed; resamples up to 100 times when
/// a draw's class composition cannot satisfy the quota.
pub fn sample_constraints(ds: &LabeledDataset, percent: f64, seed: u64) -> Result<ConstraintSet> {
    if percent == 0.0 {
        return Ok(ConstraintSet::empty());
    }
    let labels = ds
        .labels()
        .ok_or_else(|| Error::InvalidData("constraint sampling needs labels".into()))?;
    let n = labels.len();
    let mut count = (percent * n as f64 / 100.0).round() as usize;
    count -= count % 4; // pairs must split evenly between the two types
    if count < 4 {
        return Err(Error::QuotaInfeasible(format!(
            "{percent}% of {n} instances leaves fewer than 4 usable instances"
        )));
    }
    let pairs_per_type = count / 4;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for _attempt in 0..MAX_SAMPLING_ATTEMPTS {
        // partial Fisher-Yates draw of `count` distinct indices
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..count {
            let j = rng.gen_range(i..n);
            pool.swap(i, j);
        }
        let sample = &pool[..count];

        let n_classes = labels.iter().max().map_or(0, |&c| c + 1);
        let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
        for &idx in sample {
            by_class[labels[idx]].push(idx);
        }

        let mut must = Vec::with_capacity(pairs_per_type);
        let mut ok = true;
        for _ in 0..pairs_per_type {
            // biggest class first keeps the leftover spread for cannot pairs
            let class = (0..n_classes)
                .filter(|&c| by_class[c].len() >= 2)
                .max_by_key(|&c| by_class[c].len());
            match class {
                Some(c) => {
                    let a = by_class[c].pop().expect("size checked");
                    let b = by_class[c].pop().expect("size checked");
                    must.push((a, b));
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let mut cannot = Vec::with_capacity(pairs_per_type);
        for _ in 0..pairs_per_type {
            let mut order: Vec<usize> = (0..n_classes).filter(|&c| !by_class[c].is_empty()).collect();
            order.sort_by_key(|&c| std::cmp::Reverse(by_class[c].len()));
            if order.len() < 2 {
                ok = false;
                break;
            }
            let a = by_class[order[0]].pop().expect("non-empty");
            let b = by_class[order[1]].pop().expect("non-empty");
            cannot.push((a, b));
        }
        if !ok {
            continue;
        }
        return ConstraintSet::new(must, cannot, n);
    }
    Err(Error::QuotaInfeasible(format!(
        "could not form {pairs_per_type} must-link and {pairs_per_type} cannot-link pairs \
         after {MAX_SAMPLING_ATTEMPTS} attempts"
    )))
}

/// Consensus flavors the benchmark can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Woce,
    Eac,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "woce" => Ok(Self::Woce),
            "eac" => Ok(Self::Eac),
            other => Err(Error::InvalidConfig(format!("unknown method {other:?}"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Woce => "woce",
            Self::Eac => "eac",
        })
    }
}

/// Full benchmark configuration, mirrored by the plain-text `key=value`
/// config file.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    pub label_col: LabelColumn,
    pub k: usize,
    pub ensemble_size: usize,
    pub d: usize,
    pub percent: f64,
    pub runs: usize,
    pub seed: u64,
    pub weight_mode: WeightMode,
    pub uniformity_mode: UniformityMode,
    pub methods: Vec<Method>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(dataset: PathBuf, k: usize) -> Self {
        Self {
            dataset,
            label_col: LabelColumn::Last,
            k,
            ensemble_size: 20,
            d: 0,
            percent: 0.0,
            runs: 10,
            seed: 0,
            weight_mode: WeightMode::default(),
            uniformity_mode: UniformityMode::default(),
            methods: vec![Method::Woce, Method::Eac],
            out: None,
        }
    }

    /// Parses `key=value` lines; `#` starts a comment. Required keys:
    /// `dataset`, `k`.
    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut dataset: Option<PathBuf> = None;
        let mut k: Option<usize> = None;
        let mut cfg = Self::new(PathBuf::new(), 2);
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                msg: format!("expected key=value, got {line:?}"),
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |msg: String| Error::Parse {
                line: idx + 1,
                msg,
            };
            match key {
                "dataset" => dataset = Some(PathBuf::from(value)),
                "k" => k = Some(value.parse().map_err(|_| bad(format!("bad k {value:?}")))?),
                "label_col" => cfg.label_col = value.parse()?,
                "ensemble_size" => {
                    cfg.ensemble_size = value
                        .parse()
                        .map_err(|_| bad(format!("bad ensemble_size {value:?}")))?
                }
                "d" => cfg.d = value.parse().map_err(|_| bad(format!("bad d {value:?}")))?,
                "percent" => {
                    cfg.percent = value
                        .parse()
                        .map_err(|_| bad(format!("bad percent {value:?}")))?
                }
                "runs" => {
                    cfg.runs = value.parse().map_err(|_| bad(format!("bad runs {value:?}")))?
                }
                "seed" => {
                    cfg.seed = value.parse().map_err(|_| bad(format!("bad seed {value:?}")))?
                }
                "weight_mode" => cfg.weight_mode = value.parse()?,
                "uniformity_mode" => cfg.uniformity_mode = value.parse()?,
                "methods" => {
                    cfg.methods = value
                        .split(',')
                        .map(|m| m.trim().parse())
                        .collect::<Result<Vec<Method>>>()?;
                }
                "out" => cfg.out = Some(PathBuf::from(value)),
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        cfg.dataset = dataset.ok_or_else(|| Error::InvalidConfig("missing dataset=".into()))?;
        cfg.k = k.ok_or_else(|| Error::InvalidConfig("missing k=".into()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs < 1 {
            return Err(Error::InvalidConfig("runs must be at least 1".into()));
        }
        if !(0.0..=5.0).contains(&self.percent) {
            return Err(Error::InvalidConfig(format!(
                "constraint percent must lie in [0, 5], got {}",
                self.percent
            )));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("at least one method required".into()));
        }
        Ok(())
    }
}

/// Aggregated scores for one (dataset, method) cell.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub dataset: String,
    pub method: Method,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub mean_nmi: f64,
    pub wall_time_s: f64,
    pub runs_completed: usize,
    pub runs_failed: usize,
}

/// Benchmark output: one row per method, plus any per-run failure notes.
#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    pub rows: Vec<ReportRow>,
    pub failures: Vec<String>,
}

impl BenchmarkReport {
    /// Fixed-width text table.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{:<16} {:<6} {:>10} {:>8} {:>10} {:>10} {:>7}",
            "dataset", "method", "mean_acc", "std", "mean_nmi", "wall_s", "failed"
        )
        .expect("string write");
        writeln!(out, "{}", "-".repeat(73)).expect("string write");
        for r in &self.rows {
            writeln!(
                out,
                "{:<16} {:<6} {:>10.4} {:>8.4} {:>10.4} {:>10.2} {:>7}",
                r.dataset,
                r.method.to_string(),
                r.mean_accuracy,
                r.std_accuracy,
                r.mean_nmi,
                r.wall_time_s,
                r.runs_failed
            )
            .expect("string write");
        }
        for f in &self.failures {
            writeln!(out, "note: {f}").expect("string write");
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("dataset,method,mean_accuracy,std_accuracy,mean_nmi,wall_time_s,runs_completed,runs_failed\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{:.6},{:.6},{:.6},{:.3},{},{}",
                r.dataset,
                r.method,
                r.mean_accuracy,
                r.std_accuracy,
                r.mean_nmi,
                r.wall_time_s,
                r.runs_completed,
                r.runs_failed
            )
            .expect("string write");
        }
        out
    }

    pub fn row(&self, method: Method) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.method == method)
    }
}

/// Loads the configured dataset and benchmarks it.
pub fn run_benchmark(cfg: &ExperimentConfig) -> Result<BenchmarkReport> {
    cfg.validate()?;
    let ds = io::load_csv(&cfg.dataset, cfg.label_col)?;
    run_benchmark_on(&ds, cfg)
}

/// Benchmarks an in-memory dataset: per run, normalize once, sample
/// constraints (shared across methods within the run), build one reference
/// set, then score each method's consensus against ground truth.
pub fn run_benchmark_on(ds: &LabeledDataset, cfg: &ExperimentConfig) -> Result<BenchmarkReport> {
    cfg.validate()?;
    let truth = ds
        .truth_partition()
        .ok_or_else(|| Error::InvalidData("benchmark needs ground-truth labels".into()))?;
    let normalized = zscore_normalize(ds);

    struct Acc {
        accuracies: Vec<f64>,
        nmis: Vec<f64>,
        wall: f64,
        failed: usize,
    }
    let mut per_method: Vec<(Method, Acc)> = cfg
        .methods
        .iter()
        .map(|&m| {
            (
                m,
                Acc {
                    accuracies: Vec::new(),
                    nmis: Vec::new(),
                    wall: 0.0,
                    failed: 0,
                },
            )
        })
        .collect();
    let mut failures = Vec::new();

    for run in 0..cfg.runs {
        let run_seed = cfg.seed.wrapping_add(run as u64);
        let shared_start = Instant::now();
        let shared = (|| -> Result<_> {
            let constraints = if cfg.percent > 0.0 {
                sample_constraints(&normalized, cfg.percent, run_seed)?
            } else {
                ConstraintSet::empty()
            };
            let z = constraint_projection(normalized.data(), &constraints, cfg.d)?;
            let schedule = build_schedule(cfg.k, cfg.ensemble_size, run_seed)?;
            let mut reference = generate_reference_set(&z, &schedule)?;
            let raws = diversity::uniformities(&reference, cfg.uniformity_mode)?;
            reference.set_uniformities(raws)?;
            Ok(reference)
        })();
        let shared_time = shared_start.elapsed().as_secs_f64();
        let reference = match shared {
            Ok(r) => r,
            Err(err) => {
                failures.push(format!("run {run}: {err}"));
                for (_, acc) in &mut per_method {
                    acc.failed += 1;
                }
                continue;
            }
        };

        for (method, acc) in &mut per_method {
            let start = Instant::now();
            let outcome = (|| -> Result<(f64, f64)> {
                let pi = match method {
                    Method::Woce => {
                        let weights = diversity::weight_vector(&reference, cfg.weight_mode)?;
                        weac_matrix(&reference, &weights)?
                    }
                    Method::Eac => eac_matrix(&reference)?,
                };
                let dendrogram = average_linkage(&pi)?;
                let partition = cut_dendrogram(&dendrogram, cfg.k)?;
                let acc_v = accuracy_hungarian(&partition, truth.labels())?;
                let nmi_v = nmi(&partition, &truth)?;
                Ok((acc_v, nmi_v))
            })();
            acc.wall += shared_time + start.elapsed().as_secs_f64();
            match outcome {
                Ok((a, v)) => {
                    acc.accuracies.push(a);
                    acc.nmis.push(v);
                }
                Err(err) => {
                    acc.failed += 1;
                    failures.push(format!("run {run} ({method}): {err}"));
                }
            }
        }
    }

    let rows = per_method
        .into_iter()
        .map(|(method, acc)| {
            let (mean_acc, std_acc) = mean_std(&acc.accuracies);
            let (mean_nmi, _) = mean_std(&acc.nmis);
            ReportRow {
                dataset: ds.name().to_owned(),
                method,
                mean_accuracy: mean_acc,
                std_accuracy: std_acc,
                mean_nmi,
                wall_time_s: acc.wall,
                runs_completed: acc.accuracies.len(),
                runs_failed: acc.failed,
            }
        })
        .collect();
    Ok(BenchmarkReport { rows, failures })
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}
