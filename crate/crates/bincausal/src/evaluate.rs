//! Graph-against-truth scoring, the frequent-pattern baseline, and the
//! benchmark harness.

use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::align::AlignedDataset;
use crate::dataset::BinaryDataset;
use crate::discovery::{self, DiscoveryConfig};
use crate::graph::CausalGraph;
use crate::seeds::stream_seed;
use crate::simulate;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("inferred and ground-truth graphs have different node sets")]
    NodeSetMismatch,
    #[error("threshold {0} out of range [0, 1]")]
    BadThreshold(f64),
    #[error("benchmark grid must be non-empty")]
    EmptyGrid,
    #[error("no methods selected")]
    NoMethods,
    #[error("unknown node {0:?} in edge list")]
    UnknownNode(String),
    #[error("edge list csv: {0}")]
    EdgeListCsv(String),
    #[error(transparent)]
    Align(#[from] crate::align::AlignError),
    #[error(transparent)]
    Model(#[from] crate::simulate::ModelError),
}

/// Which notion of causal relation is being scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    /// Only direct parent-child edges count.
    Directed,
    /// Any directed path counts; both graphs are compared after transitive
    /// closure.
    Transitive,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Task::Directed => write!(f, "directed"),
            Task::Transitive => write!(f, "transitive"),
        }
    }
}

/// Edge-set precision/recall/F1 of an inferred graph against ground truth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub method_name: String,
    pub task: Task,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Scores `inferred` against `truth` by edge-set counting.
///
/// For the transitive task both graphs are transitively closed first, so an
/// already-closed input is unaffected. Ratios with zero denominators are 0.
pub fn score(
    inferred: &CausalGraph,
    truth: &CausalGraph,
    task: Task,
    method_name: &str,
) -> Result<EvaluationReport, EvalError> {
    if inferred.node_names() != truth.node_names() {
        return Err(EvalError::NodeSetMismatch);
    }
    let (inferred_edges, truth_edges) = match task {
        Task::Directed => (inferred.edge_set().clone(), truth.edge_set().clone()),
        Task::Transitive => (
            inferred.transitive_closure().edge_set().clone(),
            truth.transitive_closure().edge_set().clone(),
        ),
    };
    let tp = inferred_edges.intersection(&truth_edges).count();
    let fp = inferred_edges.len() - tp;
    let fn_ = truth_edges.len() - tp;
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(EvaluationReport {
        method_name: method_name.to_string(),
        task,
        tp,
        fp,
        fn_,
        precision,
        recall,
        f1,
    })
}

/// Association-rule baseline: emits `i -> j` for every ordered pair whose
/// joint support and confidence clear the thresholds and whose confidence
/// dominates the reverse direction.
///
/// No confounder filtering and no significance testing; pairs with an
/// undefined conditional are skipped.
pub fn frequent_pattern_baseline(
    ds: &BinaryDataset,
    min_support: f64,
    min_confidence: f64,
) -> Result<CausalGraph, EvalError> {
    for t in [min_support, min_confidence] {
        if !(0.0..=1.0).contains(&t) {
            return Err(EvalError::BadThreshold(t));
        }
    }
    let ad = AlignedDataset::from_dataset(ds)?;
    let view = ad.view();
    let n = ad.n() as f64;
    let mut graph = CausalGraph::new(ds.column_names().to_vec());
    for i in 0..ds.d() {
        for j in (i + 1)..ds.d() {
            let t = view.joint2(i, j); // index a*2+b
            let joint11 = t[3] as f64;
            let support = joint11 / n;
            if support < min_support {
                continue;
            }
            let count_i1 = t[2] + t[3];
            let count_j1 = t[1] + t[3];
            if count_i1 == 0 || count_j1 == 0 {
                continue;
            }
            let conf_j_given_i = joint11 / count_i1 as f64;
            let conf_i_given_j = joint11 / count_j1 as f64;
            if conf_j_given_i > conf_i_given_j && conf_j_given_i >= min_confidence {
                graph.add_edge(i, j).expect("indices in range");
            } else if conf_i_given_j > conf_j_given_i && conf_i_given_j >= min_confidence {
                graph.add_edge(j, i).expect("indices in range");
            }
        }
    }
    Ok(graph)
}

/// A method the benchmark harness can run on a simulated dataset.
#[derive(Debug, Clone)]
pub enum Method {
    /// The full discovery pipeline (screen, filter, orient).
    Proposed,
    /// [`frequent_pattern_baseline`] with the given thresholds.
    FrequentPattern {
        min_support: f64,
        min_confidence: f64,
    },
    /// A fixed externally produced graph, scored against each cell's truth.
    External { name: String, graph: CausalGraph },
}

impl Method {
    pub fn name(&self) -> &str {
        match self {
            Method::Proposed => "proposed",
            Method::FrequentPattern { .. } => "freqpat",
            Method::External { name, .. } => name,
        }
    }
}

/// Defaults for the frequent-pattern baseline thresholds.
pub const DEFAULT_MIN_SUPPORT: f64 = 0.05;
pub const DEFAULT_MIN_CONFIDENCE: f64 = 0.6;

/// Grid description for [`run_benchmark`].
#[derive(Debug, Clone)]
pub struct BenchmarkSpec {
    pub methods: Vec<Method>,
    pub p_grid: Vec<f64>,
    pub n_grid: Vec<usize>,
    /// Number of simulation seeds per `(p, n)` cell.
    pub seeds: usize,
    /// Bootstrap replicates for the proposed method.
    pub replicates: usize,
    pub alpha: f64,
    pub master_seed: u64,
}

/// One scored `(method, task, p, n, seed)` cell.
#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkRow {
    pub method: String,
    pub task: Task,
    pub p: f64,
    pub n: usize,
    pub seed_index: usize,
    pub report: Option<EvaluationReport>,
    /// Failure message when the cell could not be scored.
    pub error: Option<String>,
}

/// Runs every method over the `(p, n, seed)` grid of the benchmark model
/// and scores both tasks per cell.
///
/// Cells are independent jobs with seeds derived from `master_seed`, so the
/// result is deterministic regardless of worker count; rows are ordered by
/// `(p, n, seed, method, task)`.
pub fn run_benchmark(spec: &BenchmarkSpec) -> Result<Vec<BenchmarkRow>, EvalError> {
    if spec.p_grid.is_empty() || spec.n_grid.is_empty() || spec.seeds == 0 {
        return Err(EvalError::EmptyGrid);
    }
    if spec.methods.is_empty() {
        return Err(EvalError::NoMethods);
    }
    let mut cells = Vec::new();
    for (pi, &p) in spec.p_grid.iter().enumerate() {
        for (ni, &n) in spec.n_grid.iter().enumerate() {
            for s in 0..spec.seeds {
                cells.push((pi, p, ni, n, s));
            }
        }
    }
    let rows: Vec<Vec<BenchmarkRow>> = cells
        .par_iter()
        .map(|&(pi, p, ni, n, s)| run_cell(spec, pi, p, ni, n, s))
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

fn run_cell(
    spec: &BenchmarkSpec,
    p_idx: usize,
    p: f64,
    n_idx: usize,
    n: usize,
    seed_index: usize,
) -> Vec<BenchmarkRow> {
    let cell_tag = ((p_idx as u64 * 10_000) + n_idx as u64) * 10_000 + seed_index as u64;
    let dataset_seed = stream_seed(spec.master_seed, cell_tag * 2);
    let discovery_seed = stream_seed(spec.master_seed, cell_tag * 2 + 1);

    let mut rows = Vec::new();
    let model = match simulate::benchmark_model(p) {
        Ok(m) => m,
        Err(e) => {
            for method in &spec.methods {
                for task in [Task::Directed, Task::Transitive] {
                    rows.push(BenchmarkRow {
                        method: method.name().to_string(),
                        task,
                        p,
                        n,
                        seed_index,
                        report: None,
                        error: Some(e.to_string()),
                    });
                }
            }
            return rows;
        }
    };
    let ds = model.sample(n, dataset_seed);
    let truths = [
        model.ground_truth(Task::Directed),
        model.ground_truth(Task::Transitive),
    ];

    for method in &spec.methods {
        let inferred: Result<CausalGraph, String> = match method {
            Method::Proposed => {
                let cfg = DiscoveryConfig {
                    alpha: spec.alpha,
                    replicates: spec.replicates,
                    seed: discovery_seed,
                    ..DiscoveryConfig::default()
                };
                discovery::discover(&ds, &cfg)
                    .map(|r| r.e_hat)
                    .map_err(|e| e.to_string())
            }
            Method::FrequentPattern {
                min_support,
                min_confidence,
            } => frequent_pattern_baseline(&ds, *min_support, *min_confidence)
                .map_err(|e| e.to_string()),
            Method::External { graph, .. } => Ok(graph.clone()),
        };
        for (task, truth) in [Task::Directed, Task::Transitive].iter().zip(&truths) {
            let (report, error) = match &inferred {
                Ok(g) => match score(g, truth, *task, method.name()) {
                    Ok(r) => (Some(r), None),
                    Err(e) => (None, Some(e.to_string())),
                },
                Err(e) => (None, Some(e.clone())),
            };
            rows.push(BenchmarkRow {
                method: method.name().to_string(),
                task: *task,
                p,
                n,
                seed_index,
                report,
                error,
            });
        }
    }
    rows
}

/// Median of a non-empty slice (average of the two middle order statistics
/// for even lengths).
pub fn median(values: &mut Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        (values[m / 2 - 1] + values[m / 2]) / 2.0
    }
}

/// Per-`(method, task, p, n)` medians over seeds.
#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkSummary {
    pub method: String,
    pub task: Task,
    pub p: f64,
    pub n: usize,
    pub cells: usize,
    pub failed_cells: usize,
    pub median_precision: f64,
    pub median_recall: f64,
    pub median_f1: f64,
}

/// Aggregates rows into medians; groups follow the row ordering.
pub fn summarize(rows: &[BenchmarkRow]) -> Vec<BenchmarkSummary> {
    let mut summaries: Vec<BenchmarkSummary> = Vec::new();
    for row in rows {
        let exists = summaries.iter().any(|s| {
            s.method == row.method && s.task == row.task && s.p == row.p && s.n == row.n
        });
        if exists {
            continue;
        }
        let group: Vec<&BenchmarkRow> = rows
            .iter()
            .filter(|r| {
                r.method == row.method && r.task == row.task && r.p == row.p && r.n == row.n
            })
            .collect();
        let mut precisions = Vec::new();
        let mut recalls = Vec::new();
        let mut f1s = Vec::new();
        let mut failed = 0usize;
        for r in &group {
            match &r.report {
                Some(rep) => {
                    precisions.push(rep.precision);
                    recalls.push(rep.recall);
                    f1s.push(rep.f1);
                }
                None => failed += 1,
            }
        }
        let med = |v: &mut Vec<f64>| if v.is_empty() { f64::NAN } else { median(v) };
        summaries.push(BenchmarkSummary {
            method: row.method.clone(),
            task: row.task,
            p: row.p,
            n: row.n,
            cells: group.len(),
            failed_cells: failed,
            median_precision: med(&mut precisions),
            median_recall: med(&mut recalls),
            median_f1: med(&mut f1s),
        });
    }
    summaries
}

/// Writes rows as CSV with columns
/// `method,task,p,n,seed,tp,fp,fn,precision,recall,f1,error`.
pub fn write_results_csv(rows: &[BenchmarkRow], path: impl AsRef<Path>) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_path(path.as_ref())
        .map_err(|e| EvalError::EdgeListCsv(e.to_string()))?;
    w.write_record([
        "method",
        "task",
        "p",
        "n",
        "seed",
        "tp",
        "fp",
        "fn",
        "precision",
        "recall",
        "f1",
        "error",
    ])
    .map_err(|e| EvalError::EdgeListCsv(e.to_string()))?;
    for row in rows {
        let record: Vec<String> = match (&row.report, &row.error) {
            (Some(r), _) => vec![
                row.method.clone(),
                row.task.to_string(),
                row.p.to_string(),
                row.n.to_string(),
                row.seed_index.to_string(),
                r.tp.to_string(),
                r.fp.to_string(),
                r.fn_.to_string(),
                r.precision.to_string(),
                r.recall.to_string(),
                r.f1.to_string(),
                String::new(),
            ],
            (None, err) => vec![
                row.method.clone(),
                row.task.to_string(),
                row.p.to_string(),
                row.n.to_string(),
                row.seed_index.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                err.clone().unwrap_or_else(|| "unknown error".into()),
            ],
        };
        w.write_record(&record)
            .map_err(|e| EvalError::EdgeListCsv(e.to_string()))?;
    }
    w.flush().map_err(|e| EvalError::EdgeListCsv(e.to_string()))
}

/// Plain-text summary tables, one block per task, rows by `(p, n)`.
pub fn render_summary(summaries: &[BenchmarkSummary]) -> String {
    let mut out = String::new();
    for task in [Task::Directed, Task::Transitive] {
        out.push_str(&format!("task: {task}\n"));
        out.push_str(&format!(
            "{:<12} {:>6} {:>6} {:>10} {:>8} {:>8}\n",
            "method", "p", "n", "precision", "recall", "f1"
        ));
        for s in summaries.iter().filter(|s| s.task == task) {
            out.push_str(&format!(
                "{:<12} {:>6} {:>6} {:>10.3} {:>8.3} {:>8.3}\n",
                s.method, s.p, s.n, s.median_precision, s.median_recall, s.median_f1
            ));
        }
        out.push('\n');
    }
    out
}

/// Loads an external edge list (CSV columns `src,dst`, names or 0-based
/// indices) as a graph over `node_names`.
pub fn load_edge_list_csv(
    path: impl AsRef<Path>,
    node_names: &[String],
) -> Result<CausalGraph, EvalError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path.as_ref())
        .map_err(|e| EvalError::EdgeListCsv(e.to_string()))?;
    let resolve = |token: &str| -> Result<usize, EvalError> {
        if let Some(pos) = node_names.iter().position(|n| n == token) {
            return Ok(pos);
        }
        token
            .parse::<usize>()
            .ok()
            .filter(|&i| i < node_names.len())
            .ok_or_else(|| EvalError::UnknownNode(token.to_string()))
    };
    let mut graph = CausalGraph::new(node_names.to_vec());
    for record in reader.records() {
        let record = record.map_err(|e| EvalError::EdgeListCsv(e.to_string()))?;
        if record.len() < 2 {
            return Err(EvalError::EdgeListCsv("edge rows need src and dst".into()));
        }
        let s = resolve(&record[0])?;
        let t = resolve(&record[1])?;
        graph
            .add_edge(s, t)
            .map_err(|e| EvalError::EdgeListCsv(e.to_string()))?;
    }
    Ok(graph)
}
