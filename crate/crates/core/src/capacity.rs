//! Shannon-capacity lower bounds from independent sets in strong powers.
//!
//! For a confusion graph `G`, any independent set of `G^k` is a set of
//! pairwise non-confusable `k`-letter words, so `α(G^k)^(1/k)` bounds the
//! capacity from below for every `k`.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bench::{drop_pct, BenchRow};
use crate::decode::IndependentSet;
use crate::error::{Error, Result};
use crate::exact::exact_mis;
use crate::gcn::GcnModel;
use crate::graph::{decode_power_index, graph_power_with_budget, random_confusion_graph, Graph, DEFAULT_VERTEX_BUDGET};
use crate::pipeline::{solve, Method, SolveConfig};

pub const DEFAULT_EXACT_THRESHOLD: usize = 200;

/// How each power is solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverChoice {
    /// Exact up to `exact_threshold` vertices, `heuristic` beyond.
    Auto { heuristic: Method, exact_threshold: usize },
    /// The same method for every power.
    Fixed(Method),
}

impl Default for SolverChoice {
    fn default() -> Self {
        SolverChoice::Auto {
            heuristic: Method::QuboG,
            exact_threshold: DEFAULT_EXACT_THRESHOLD,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerRecord {
    pub k: usize,
    pub num_vertices: usize,
    pub alpha_lower: usize,
    /// Method that produced the witness, or `"product"` when the product of
    /// smaller witnesses beat the solver.
    pub solver: String,
    pub optimal: bool,
    /// Witness set as flat vertex indices of `G^k`.
    pub witness: Vec<usize>,
    pub elapsed_s: f64,
}

impl PowerRecord {
    /// Witness decoded into words over the alphabet `0..base`.
    pub fn witness_words(&self, base: usize) -> Vec<Vec<usize>> {
        self.witness
            .iter()
            .map(|&v| decode_power_index(v, base, self.k))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityEstimate {
    pub records: Vec<PowerRecord>,
    /// `max_k alpha_lower(k)^(1/k)`.
    pub capacity_lb: f64,
    /// Set when the vertex budget stopped the sweep before `k_max`.
    pub truncated_at: Option<usize>,
}

impl CapacityEstimate {
    fn from_records(records: Vec<PowerRecord>, truncated_at: Option<usize>) -> Self {
        let capacity_lb = records
            .iter()
            .map(|r| (r.alpha_lower as f64).powf(1.0 / r.k as f64))
            .fold(0.0, f64::max);
        CapacityEstimate {
            records,
            capacity_lb,
            truncated_at,
        }
    }
}

/// Products `I × J` of independent sets are independent in `G ⊠ H`.
fn product_set(left: &[usize], right: &[usize], right_n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = left
        .iter()
        .flat_map(|&u| right.iter().map(move |&x| u * right_n + x))
        .collect();
    out.sort_unstable();
    out
}

fn solve_power(
    power: &Graph,
    method: Method,
    model: Option<&GcnModel>,
    config: &SolveConfig,
) -> Result<(IndependentSet, bool, f64)> {
    let start = Instant::now();
    if method == Method::Exact {
        let r = exact_mis(power, config.exact_time_limit());
        return Ok((r.set, r.optimal, start.elapsed().as_secs_f64()));
    }
    let r = solve(power, method, model, config)?;
    Ok((r.set, false, r.elapsed_s))
}

/// Solves `G^1 … G^k_max` and reports the best root bound.
pub fn estimate_capacity(
    g: &Graph,
    k_max: usize,
    choice: SolverChoice,
    model: Option<&GcnModel>,
    config: &SolveConfig,
) -> Result<CapacityEstimate> {
    estimate_capacity_with_budget(g, k_max, choice, model, config, DEFAULT_VERTEX_BUDGET)
}

pub fn estimate_capacity_with_budget(
    g: &Graph,
    k_max: usize,
    choice: SolverChoice,
    model: Option<&GcnModel>,
    config: &SolveConfig,
    vertex_budget: usize,
) -> Result<CapacityEstimate> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be >= 1".into()));
    }
    if g.num_vertices() == 0 {
        return Err(Error::InvalidParameter("confusion graph has no letters".into()));
    }
    let base = g.num_vertices();
    let mut records: Vec<PowerRecord> = Vec::new();
    for k in 1..=k_max {
        let power = match graph_power_with_budget(g, k, vertex_budget) {
            Ok(p) => p,
            Err(Error::VertexBudget { .. }) if k > 1 => {
                return Ok(CapacityEstimate::from_records(records, Some(k)));
            }
            Err(e) => return Err(e),
        };
        let method = match choice {
            SolverChoice::Fixed(m) => m,
            SolverChoice::Auto {
                heuristic,
                exact_threshold,
            } => {
                if power.num_vertices() <= exact_threshold {
                    Method::Exact
                } else {
                    heuristic
                }
            }
        };
        let (set, optimal, elapsed_s) = solve_power(&power, method, model, config)?;
        let mut record = PowerRecord {
            k,
            num_vertices: power.num_vertices(),
            alpha_lower: set.size(),
            solver: method.to_string(),
            optimal,
            witness: set.members(),
            elapsed_s,
        };
        if k > 1 {
            let product = product_set(&records[k - 2].witness, &records[0].witness, base);
            if product.len() > record.alpha_lower {
                record.alpha_lower = product.len();
                record.witness = product;
                record.solver = "product".into();
                record.optimal = false;
            }
        }
        debug_assert!(power.is_independent(IndependentSet::from_members(power.num_vertices(), &record.witness).mask()));
        records.push(record);
    }
    Ok(CapacityEstimate::from_records(records, None))
}

/// One `(method, k)` cell of a confusion-graph comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfusionCell {
    pub method: Method,
    pub k: usize,
    pub num_vertices: usize,
    pub size: usize,
    pub drop_pct: f64,
    pub time_s: f64,
    pub valid: bool,
    pub optimal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfusionReport {
    pub graph: Graph,
    pub alphabet_size: usize,
    pub k_max: usize,
    pub methods: Vec<Method>,
    pub cells: Vec<ConfusionCell>,
    /// Bound sweep from the exact reference solves.
    pub estimate: CapacityEstimate,
}

impl ConfusionReport {
    pub fn cell(&self, method: Method, k: usize) -> Option<&ConfusionCell> {
        self.cells.iter().find(|c| c.method == method && c.k == k)
    }

    /// Rows in the benchmark schema; the dataset column names the power.
    pub fn rows(&self) -> Vec<BenchRow> {
        self.cells
            .iter()
            .map(|c| BenchRow {
                dataset: format!("confusion-{}letter", c.k),
                method: c.method,
                avg_size: c.size as f64,
                drop_pct: c.drop_pct,
                time_s: c.time_s,
            })
            .collect()
    }
}

/// Compares `methods` against the exact solver on `G, G², …, G^k_max` of a
/// random confusion graph.
pub fn confusion_experiment(
    alphabet_size: usize,
    p: f64,
    seed: u64,
    k_max: usize,
    methods: &[Method],
    model: Option<&GcnModel>,
    config: &SolveConfig,
) -> Result<ConfusionReport> {
    let g = random_confusion_graph(alphabet_size, p, seed)?;
    confusion_experiment_on(&g, k_max, methods, model, config)
}

/// Same comparison on a given confusion graph. The exact solver always runs
/// since it provides the reference for the drop column.
pub fn confusion_experiment_on(
    g: &Graph,
    k_max: usize,
    methods: &[Method],
    model: Option<&GcnModel>,
    config: &SolveConfig,
) -> Result<ConfusionReport> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be >= 1".into()));
    }
    let base = g.num_vertices();
    let mut cells = Vec::new();
    let mut records = Vec::new();
    for k in 1..=k_max {
        let power = graph_power_with_budget(g, k, DEFAULT_VERTEX_BUDGET)?;
        let (exact_set, exact_optimal, exact_time) = solve_power(&power, Method::Exact, None, config)?;
        let exact_size = exact_set.size();
        records.push(PowerRecord {
            k,
            num_vertices: power.num_vertices(),
            alpha_lower: exact_size,
            solver: Method::Exact.to_string(),
            optimal: exact_optimal,
            witness: exact_set.members(),
            elapsed_s: exact_time,
        });
        for &method in methods {
            let (set, optimal, time_s) = if method == Method::Exact {
                (exact_set.clone(), exact_optimal, exact_time)
            } else {
                solve_power(&power, method, model, config)?
            };
            let drop = if exact_size > 0 {
                drop_pct(exact_size as f64, set.size() as f64)?
            } else {
                0.0
            };
            cells.push(ConfusionCell {
                method,
                k,
                num_vertices: power.num_vertices(),
                size: set.size(),
                drop_pct: drop,
                time_s,
                valid: set.is_valid(&power),
                optimal,
            });
        }
    }
    Ok(ConfusionReport {
        graph: g.clone(),
        alphabet_size: base,
        k_max,
        methods: methods.to_vec(),
        cells,
        estimate: CapacityEstimate::from_records(records, None),
    })
}
