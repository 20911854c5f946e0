//! Exact maximum independent set: exhaustive enumeration for tiny graphs and
//! a bitset branch-and-bound for everything else.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::decode::{dga, IndependentSet};
use crate::error::{Error, Result};
use crate::graph::Graph;

pub const BRUTE_FORCE_MAX_N: usize = 25;
pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(60);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactResult {
    pub set: IndependentSet,
    pub alpha: usize,
    /// True when the search completed, so `alpha` is the independence number.
    pub optimal: bool,
    pub nodes_explored: u64,
    pub elapsed_s: f64,
}

/// Enumerates all `2^n` subsets. Ties keep the subset whose mask, read as an
/// integer with vertex 0 as bit 0, is smallest.
pub fn brute_force_mis(g: &Graph) -> Result<ExactResult> {
    let n = g.num_vertices();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge {
            n,
            max: BRUTE_FORCE_MAX_N,
        });
    }
    let start = Instant::now();
    let nbr: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    let mut best = 0u32;
    let mut best_size = 0u32;
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones();
        if size <= best_size {
            continue;
        }
        let mut rest = mask;
        let mut independent = true;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if nbr[v] & mask != 0 {
                independent = false;
                break;
            }
        }
        if independent {
            best = mask;
            best_size = size;
        }
    }
    let set = IndependentSet::from_mask((0..n).map(|v| best >> v & 1 == 1).collect());
    Ok(ExactResult {
        alpha: set.size(),
        set,
        optimal: true,
        nodes_explored: 1u64 << n,
        elapsed_s: start.elapsed().as_secs_f64(),
    })
}

/// Upper bound used to prune the branch-and-bound search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PruneBound {
    /// `|current| + |candidates|`.
    Remaining,
    /// `|current| + #cliques` of a greedy clique cover of the candidates.
    #[default]
    CliqueCover,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactOptions {
    pub time_limit: Duration,
    pub bound: PruneBound,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            time_limit: DEFAULT_TIME_LIMIT,
            bound: PruneBound::default(),
        }
    }
}

pub fn exact_mis(g: &Graph, time_limit: Duration) -> ExactResult {
    exact_mis_with(
        g,
        ExactOptions {
            time_limit,
            ..ExactOptions::default()
        },
    )
}

/// Branch and bound. Vertices of degree ≤ 1 in the candidate set are taken
/// outright; otherwise branch on a maximum-degree candidate, first including
/// it (dropping its closed neighborhood), then excluding it. The incumbent
/// starts from the degree-based greedy solution, so a timed-out search still
/// returns a valid set.
pub fn exact_mis_with(g: &Graph, options: ExactOptions) -> ExactResult {
    let start = Instant::now();
    let n = g.num_vertices();
    let words = n.div_ceil(64);
    let adj: Vec<Bits> = (0..n)
        .map(|v| {
            let mut b = Bits::zeros(words);
            for &w in g.neighbors(v) {
                b.set(w);
            }
            b
        })
        .collect();
    let incumbent = dga(g, 1.0).expect("degree features are defined for n >= 1");
    let mut search = Search {
        adj: &adj,
        best: incumbent.members(),
        current: Vec::new(),
        nodes: 0,
        deadline: start + options.time_limit,
        timed_out: false,
        bound: options.bound,
    };
    let mut all = Bits::zeros(words);
    for v in 0..n {
        all.set(v);
    }
    search.run(all);
    let set = IndependentSet::from_members(n, &search.best);
    ExactResult {
        alpha: set.size(),
        set,
        optimal: !search.timed_out,
        nodes_explored: search.nodes,
        elapsed_s: start.elapsed().as_secs_f64(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn zeros(words: usize) -> Self {
        Bits(vec![0; words])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn count_and(&self, other: &Bits) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn and_not_assign(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= !b;
        }
    }

    fn and_assign(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= b;
        }
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                (rest != 0).then(|| {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    wi * 64 + b
                })
            })
        })
    }
}

struct Search<'a> {
    adj: &'a [Bits],
    best: Vec<usize>,
    current: Vec<usize>,
    nodes: u64,
    deadline: Instant,
    timed_out: bool,
    bound: PruneBound,
}

impl Search<'_> {
    fn take(&mut self, v: usize, cand: &mut Bits) {
        self.current.push(v);
        cand.clear(v);
        cand.and_not_assign(&self.adj[v]);
    }

    fn run(&mut self, mut cand: Bits) {
        if self.timed_out {
            return;
        }
        self.nodes += 1;
        if self.nodes % 256 == 1 && Instant::now() >= self.deadline {
            self.timed_out = true;
            return;
        }
        let depth = self.current.len();

        // Degree 0/1 candidates belong to some maximum set of the residual graph.
        loop {
            let low = cand.iter().find(|&v| cand.count_and(&self.adj[v]) <= 1);
            match low {
                Some(v) => self.take(v, &mut cand),
                None => break,
            }
        }

        if cand.is_empty() {
            if self.current.len() > self.best.len() {
                self.best = self.current.clone();
            }
            self.current.truncate(depth);
            return;
        }

        if self.current.len() + self.upper_bound(&cand) <= self.best.len() {
            self.current.truncate(depth);
            return;
        }

        let pivot = cand
            .iter()
            .max_by_key(|&v| (cand.count_and(&self.adj[v]), std::cmp::Reverse(v)))
            .expect("candidate set is nonempty");

        let mut with = cand.clone();
        let mark = self.current.len();
        self.take(pivot, &mut with);
        self.run(with);
        self.current.truncate(mark);

        cand.clear(pivot);
        self.run(cand);
        self.current.truncate(depth);
    }

    fn upper_bound(&self, cand: &Bits) -> usize {
        match self.bound {
            PruneBound::Remaining => cand.count(),
            PruneBound::CliqueCover => {
                // Each clique holds at most one member of an independent set.
                // A clique is represented by the common neighborhood of its
                // members restricted to the candidates.
                let mut cliques: Vec<Bits> = Vec::new();
                for v in cand.iter() {
                    match cliques.iter_mut().find(|c| c.0[v / 64] >> (v % 64) & 1 == 1) {
                        Some(common) => common.and_assign(&self.adj[v]),
                        None => {
                            let mut common = cand.clone();
                            common.and_assign(&self.adj[v]);
                            cliques.push(common);
                        }
                    }
                }
                cliques.len()
            }
        }
    }
}

/// One line of a label file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub graph_id: String,
    pub n: usize,
    pub alpha: usize,
    pub members: Vec<usize>,
    pub optimal: bool,
}

impl LabelRecord {
    pub fn new(graph_id: impl Into<String>, g: &Graph, result: &ExactResult) -> Self {
        LabelRecord {
            graph_id: graph_id.into(),
            n: g.num_vertices(),
            alpha: result.alpha,
            members: result.set.members(),
            optimal: result.optimal,
        }
    }

    /// Per-node 0/1 targets.
    pub fn targets(&self) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for &v in &self.members {
            y[v] = 1.0;
        }
        y
    }
}

/// Label files hold one JSON record per line.
pub fn write_labels(records: &[LabelRecord]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn read_labels(text: &str) -> Result<Vec<LabelRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}
