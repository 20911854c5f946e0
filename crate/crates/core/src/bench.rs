//! Benchmark harness: datasets, per-method runs, Avg Size / Drop / Time
//! aggregation and CSV/Markdown reports.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dimacs::{cnf_to_mis_graph, parse_graph, write_dimacs};
use crate::error::{Error, Result};
use crate::exact::{exact_mis, LabelRecord};
use crate::gcn::GcnModel;
use crate::graph::{erdos_renyi, Graph};
use crate::pipeline::{solve, train_supervised, LabeledGraph, Method, SolveConfig, SolveRecord, TrainedModel};
use crate::rng;

pub const CSV_HEADER: &str = "dataset,method,avg_size,drop_pct,time_s";

/// `100 · (exact − method) / exact`.
pub fn drop_pct(exact_avg: f64, method_avg: f64) -> Result<f64> {
    if !(exact_avg > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "exact average must be positive, got {exact_avg}"
        )));
    }
    Ok(100.0 * (exact_avg - method_avg) / exact_avg)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetDescriptor {
    pub name: String,
    pub num_graphs: usize,
    pub generator: String,
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub descriptor: DatasetDescriptor,
    /// `(graph_id, graph)` in a fixed order.
    pub graphs: Vec<(String, Graph)>,
}

/// Graph `i` uses seed `derive(seed, i)` and id `g{i:04}`.
pub fn er_dataset(name: &str, count: usize, n: usize, p: f64, seed: u64) -> Result<Dataset> {
    let graphs = (0..count)
        .map(|i| Ok((format!("g{i:04}"), erdos_renyi(n, p, rng::derive(seed, i as u64))?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        descriptor: DatasetDescriptor {
            name: name.to_string(),
            num_graphs: count,
            generator: "erdos-renyi".into(),
            n: Some(n),
            p: Some(p),
            seed: Some(seed),
        },
        graphs,
    })
}

const DESCRIPTOR_FILE: &str = "dataset.json";
const GRAPH_EXTENSIONS: &[&str] = &["dimacs", "col", "txt", "edges", "cnf"];

fn load_graph_file(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "cnf") {
        Ok(cnf_to_mis_graph(&text)?.0)
    } else {
        parse_graph(&text)
    }
}

impl Dataset {
    /// Writes `<id>.dimacs` per graph plus a `dataset.json` descriptor.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for (id, g) in &self.graphs {
            fs::write(dir.join(format!("{id}.dimacs")), write_dimacs(g))?;
        }
        fs::write(dir.join(DESCRIPTOR_FILE), serde_json::to_string_pretty(&self.descriptor)?)?;
        Ok(())
    }

    /// Loads a directory of graph files (sorted by file name, id = stem) or a
    /// single graph file. CNF files are converted to their clause graphs.
    pub fn load(path: &Path) -> Result<Dataset> {
        if path.is_file() {
            let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let g = load_graph_file(path)?;
            return Ok(Dataset {
                descriptor: DatasetDescriptor {
                    name: id.clone(),
                    num_graphs: 1,
                    generator: "file".into(),
                    n: Some(g.num_vertices()),
                    p: None,
                    seed: None,
                },
                graphs: vec![(id, g)],
            });
        }
        let mut files: Vec<_> = fs::read_dir(path)?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        files.retain(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| GRAPH_EXTENSIONS.contains(&e))
        });
        files.sort();
        let graphs = files
            .iter()
            .map(|p| {
                let id = p.file_stem().unwrap().to_string_lossy().into_owned();
                Ok((id, load_graph_file(p)?))
            })
            .collect::<Result<Vec<_>>>()?;
        if graphs.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let descriptor_path = path.join(DESCRIPTOR_FILE);
        let descriptor = if descriptor_path.is_file() {
            let mut d: DatasetDescriptor = serde_json::from_str(&fs::read_to_string(descriptor_path)?)?;
            d.num_graphs = graphs.len();
            d
        } else {
            DatasetDescriptor {
                name: path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
                num_graphs: graphs.len(),
                generator: "files".into(),
                n: None,
                p: None,
                seed: None,
            }
        };
        Ok(Dataset { descriptor, graphs })
    }

    /// Exact labels for every graph (parallel over graphs).
    pub fn label(&self, config: &SolveConfig) -> Vec<LabelRecord> {
        self.graphs
            .par_iter()
            .map(|(id, g)| LabelRecord::new(id.clone(), g, &exact_mis(g, config.exact_time_limit())))
            .collect()
    }

    /// Pairs each graph with its label; graphs whose label is missing or not
    /// optimal are skipped.
    pub fn supervised(&self, labels: &[LabelRecord]) -> Result<Vec<LabeledGraph>> {
        let mut out = Vec::new();
        for (id, g) in &self.graphs {
            let Some(label) = labels.iter().find(|l| &l.graph_id == id) else {
                continue;
            };
            if !label.optimal {
                continue;
            }
            if label.n != g.num_vertices() {
                return Err(Error::Dimension {
                    expected: g.num_vertices(),
                    got: label.n,
                });
            }
            out.push(LabeledGraph {
                graph: g.clone(),
                targets: label.targets(),
            });
        }
        Ok(out)
    }
}

/// Labels `count` ER(n, p) graphs exactly and trains the supervised model on
/// them; used when a run needs a model and none was supplied.
pub fn pretrain_on_er(count: usize, n: usize, p: f64, config: &SolveConfig) -> Result<TrainedModel> {
    let name = format!("er{n}-train");
    let ds = er_dataset(&name, count, n, p, rng::derive(config.seed, 0x7a11))?;
    let labels = ds.label(config);
    let mut trained = train_supervised(&ds.supervised(&labels)?, config.epochs_supervised, config)?;
    trained.metadata.dataset = Some(name);
    Ok(trained)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub dataset: String,
    pub method: Method,
    pub avg_size: f64,
    pub drop_pct: f64,
    pub time_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub dataset: DatasetDescriptor,
    pub exact_avg: f64,
    pub rows: Vec<BenchRow>,
    /// Per-graph results backing every row.
    pub witnesses: Vec<SolveRecord>,
}

impl BenchReport {
    pub fn row(&self, method: Method) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.method == method)
    }

    pub fn to_csv(&self, with_timing: bool) -> String {
        rows_to_csv(&self.rows, with_timing)
    }

    pub fn to_markdown(&self, with_timing: bool) -> String {
        rows_to_markdown(&self.rows, with_timing)
    }

    /// Witness records, one JSON object per line.
    pub fn witnesses_jsonl(&self, with_timing: bool) -> Result<String> {
        let mut out = String::new();
        for w in &self.witnesses {
            let mut w = w.clone();
            if !with_timing {
                w.elapsed_s = 0.0;
            }
            out.push_str(&serde_json::to_string(&w)?);
            out.push('\n');
        }
        Ok(out)
    }
}

fn time_cell(t: f64, with_timing: bool) -> String {
    if with_timing {
        format!("{t:.6}")
    } else {
        "0".into()
    }
}

pub fn rows_to_csv(rows: &[BenchRow], with_timing: bool) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{:.6},{:.4},{}",
            r.dataset,
            r.method,
            r.avg_size,
            r.drop_pct,
            time_cell(r.time_s, with_timing)
        )
        .unwrap();
    }
    out
}

pub fn rows_to_markdown(rows: &[BenchRow], with_timing: bool) -> String {
    let mut out = String::from("| Dataset | Method | Avg Size | Drop (%) | Time (s) |\n|---|---|---:|---:|---:|\n");
    for r in rows {
        writeln!(
            out,
            "| {} | {} | {:.3} | {:.2} | {} |",
            r.dataset,
            r.method,
            r.avg_size,
            r.drop_pct,
            time_cell(r.time_s, with_timing)
        )
        .unwrap();
    }
    out
}

pub struct BenchOptions<'a> {
    pub methods: Vec<Method>,
    pub model: Option<&'a GcnModel>,
    pub config: SolveConfig,
    /// Worker threads; 1 keeps timing columns comparable.
    pub jobs: usize,
}

/// Runs every method on every graph. Graph `i` is solved with seed
/// `derive(config.seed, i)`, so results do not depend on `jobs`.
pub fn bench_run(dataset: &Dataset, labels: Option<&[LabelRecord]>, options: &BenchOptions<'_>) -> Result<BenchReport> {
    options.config.validate()?;
    if dataset.graphs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| run_all(dataset, labels, options))
}

fn run_all(dataset: &Dataset, labels: Option<&[LabelRecord]>, options: &BenchOptions<'_>) -> Result<BenchReport> {
    let config = &options.config;
    let exact_sizes: Vec<usize> = dataset
        .graphs
        .par_iter()
        .map(|(id, g)| {
            labels
                .and_then(|ls| ls.iter().find(|l| &l.graph_id == id))
                .map(|l| l.alpha)
                .unwrap_or_else(|| exact_mis(g, config.exact_time_limit()).alpha)
        })
        .collect();
    let count = dataset.graphs.len() as f64;
    let exact_avg = exact_sizes.iter().sum::<usize>() as f64 / count;

    let mut rows = Vec::new();
    let mut witnesses = Vec::new();
    for &method in &options.methods {
        let results: Vec<(SolveRecord, f64)> = dataset
            .graphs
            .par_iter()
            .enumerate()
            .map(|(i, (id, g))| {
                let cfg = config.with_seed(rng::derive(config.seed, i as u64));
                let start = Instant::now();
                let r = solve(g, method, options.model, &cfg).map_err(|e| Error::MethodFailed {
                    method: method.to_string(),
                    graph_id: id.clone(),
                    msg: e.to_string(),
                })?;
                let elapsed = start.elapsed().as_secs_f64();
                let record = r.record(id, g);
                if !record.valid {
                    return Err(Error::MethodFailed {
                        method: method.to_string(),
                        graph_id: id.clone(),
                        msg: "invalid independent set".into(),
                    });
                }
                Ok((record, elapsed))
            })
            .collect::<Result<_>>()?;
        let avg_size = results.iter().map(|(r, _)| r.size as f64).sum::<f64>() / count;
        let time_s = results.iter().map(|(_, t)| t).sum();
        let drop = if method == Method::Exact {
            0.0
        } else if exact_avg > 0.0 {
            drop_pct(exact_avg, avg_size)?
        } else {
            0.0
        };
        rows.push(BenchRow {
            dataset: dataset.descriptor.name.clone(),
            method,
            avg_size,
            drop_pct: drop,
            time_s,
        });
        witnesses.extend(results.into_iter().map(|(r, _)| r));
    }
    Ok(BenchReport {
        dataset: dataset.descriptor.clone(),
        exact_avg,
        rows,
        witnesses,
    })
}
