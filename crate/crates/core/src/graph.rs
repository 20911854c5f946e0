//! Simple undirected graphs, random generators and strong products.

use std::collections::BTreeSet;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Default cap on the number of vertices [`graph_power`] may build.
pub const DEFAULT_VERTEX_BUDGET: usize = 1_000_000;

/// An immutable simple undirected graph on vertices `0..n`.
///
/// Edges are stored normalized (`u < v`) and sorted; adjacency lists are
/// sorted and symmetric.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = Error;

    fn try_from(raw: RawGraph) -> Result<Self> {
        Graph::new(raw.n, raw.edges)
    }
}

impl From<Graph> for RawGraph {
    fn from(g: Graph) -> Self {
        RawGraph {
            n: g.n,
            edges: g.edges,
        }
    }
}

impl Graph {
    /// Builds a graph, collapsing duplicate and reversed pairs.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Self::from_sorted_unique(n, set.into_iter().collect()))
    }

    /// `edges` must be sorted, unique, normalized and in range.
    fn from_sorted_unique(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { n, edges, adj }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_unique(n, Vec::new())
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Self::from_sorted_unique(n, edges)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!(
                "cycle needs at least 3 vertices, got {n}"
            )));
        }
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn path(n: usize) -> Self {
        Self::from_sorted_unique(n, (1..n).map(|i| (i - 1, i)).collect())
    }

    pub fn star(leaves: usize) -> Self {
        Self::from_sorted_unique(leaves + 1, (1..=leaves).map(|i| (0, i)).collect())
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// True if no edge joins two selected vertices.
    pub fn is_independent(&self, selected: &[bool]) -> bool {
        selected.len() == self.n && self.edges.iter().all(|&(u, v)| !(selected[u] && selected[v]))
    }

    /// True if every unselected vertex has a selected neighbor.
    pub fn is_maximal(&self, selected: &[bool]) -> bool {
        (0..self.n).all(|v| selected[v] || self.adj[v].iter().any(|&w| selected[w]))
    }
}

/// G(n, p): each of the `n(n-1)/2` pairs, visited in lexicographic order,
/// is kept when a uniform draw from the seeded stream falls below `p`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "edge probability {p} not in [0, 1]"
        )));
    }
    let mut rng = rng::from_seed(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_sorted_unique(n, edges))
}

/// Random confusion graph over an alphabet: letters are vertices and each
/// pair of letters is confusable with probability `p`.
pub fn random_confusion_graph(alphabet_size: usize, p: f64, seed: u64) -> Result<Graph> {
    erdos_renyi(alphabet_size, p, seed)
}

/// Strong product `g ⊠ h`. Vertex `(u, x)` has flat index `u * |V(h)| + x`.
pub fn strong_product(g: &Graph, h: &Graph) -> Graph {
    let m = h.n;
    let n = g.n * m;
    let mut edges = Vec::new();
    let closed = |graph: &Graph, v: usize| {
        let mut c = graph.adj[v].clone();
        let pos = c.partition_point(|&w| w < v);
        c.insert(pos, v);
        c
    };
    for u in 0..g.n {
        let nu = closed(g, u);
        for x in 0..m {
            let nx = closed(h, x);
            let a = u * m + x;
            for &v in &nu {
                for &y in &nx {
                    let b = v * m + y;
                    if a < b {
                        edges.push((a, b));
                    }
                }
            }
        }
    }
    edges.sort_unstable();
    Graph::from_sorted_unique(n, edges)
}

/// Decodes a flat product index of `G^k` (|V(G)| = `base`) into its
/// coordinate word, most significant coordinate first.
pub fn decode_power_index(mut index: usize, base: usize, k: usize) -> Vec<usize> {
    let mut word = vec![0; k];
    for slot in word.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    word
}

pub fn graph_power(g: &Graph, k: usize) -> Result<Graph> {
    graph_power_with_budget(g, k, DEFAULT_VERTEX_BUDGET)
}

/// `G^1 = G`, `G^k = G^(k-1) ⊠ G`.
pub fn graph_power_with_budget(g: &Graph, k: usize, budget: usize) -> Result<Graph> {
    if k == 0 {
        return Err(Error::InvalidParameter("graph power k must be >= 1".into()));
    }
    let requested = (g.n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if requested > budget as u128 {
        return Err(Error::VertexBudget { requested, budget });
    }
    let mut acc = g.clone();
    for _ in 1..k {
        acc = strong_product(&acc, g);
    }
    Ok(acc)
}
