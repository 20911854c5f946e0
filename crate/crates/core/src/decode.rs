//! Greedy decoding of node scores and the classical greedy baselines.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::degree_init;
use crate::graph::Graph;
use crate::rng;

/// A vertex subset stored as a membership mask.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndependentSet {
    mask: Vec<bool>,
}

impl IndependentSet {
    pub fn from_mask(mask: Vec<bool>) -> Self {
        IndependentSet { mask }
    }

    pub fn from_members(n: usize, members: &[usize]) -> Self {
        let mut mask = vec![false; n];
        for &v in members {
            mask[v] = true;
        }
        IndependentSet { mask }
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, v: usize) -> bool {
        self.mask[v]
    }

    pub fn size(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// Members in ascending order.
    pub fn members(&self) -> Vec<usize> {
        self.mask
            .iter()
            .enumerate()
            .filter_map(|(v, &b)| b.then_some(v))
            .collect()
    }

    pub fn is_valid(&self, g: &Graph) -> bool {
        g.is_independent(&self.mask)
    }

    pub fn is_maximal(&self, g: &Graph) -> bool {
        g.is_maximal(&self.mask)
    }
}

/// `c1 · p + c2 · x`.
pub fn combined_score(p_gnn: &[f64], x_init: &[f64], c1: f64, c2: f64) -> Result<Vec<f64>> {
    if p_gnn.len() != x_init.len() {
        return Err(Error::Dimension {
            expected: x_init.len(),
            got: p_gnn.len(),
        });
    }
    Ok(p_gnn
        .iter()
        .zip(x_init)
        .map(|(p, x)| c1 * p + c2 * x)
        .collect())
}

/// Vertex visiting order: descending score, ties by ascending index.
pub fn score_order(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// Takes each vertex in score order unless a neighbor is already taken.
pub fn greedy_decode(g: &Graph, scores: &[f64]) -> Result<IndependentSet> {
    if scores.len() != g.num_vertices() {
        return Err(Error::Dimension {
            expected: g.num_vertices(),
            got: scores.len(),
        });
    }
    Ok(greedy_in_order(g, &score_order(scores)))
}

fn greedy_in_order(g: &Graph, order: &[usize]) -> IndependentSet {
    let mut mask = vec![false; g.num_vertices()];
    let mut blocked = vec![false; g.num_vertices()];
    for &v in order {
        if !blocked[v] {
            mask[v] = true;
            blocked[v] = true;
            for &w in g.neighbors(v) {
                blocked[w] = true;
            }
        }
    }
    IndependentSet { mask }
}

/// Greedy algorithm over a seeded random vertex order.
pub fn greedy_random(g: &Graph, seed: u64) -> IndependentSet {
    let mut order: Vec<usize> = (0..g.num_vertices()).collect();
    order.shuffle(&mut rng::from_seed(seed));
    greedy_in_order(g, &order)
}

/// Degree-based greedy: static degree features as scores, so lower degree
/// goes first. Identical to decoding the combined score with `c1 = 0`.
pub fn dga(g: &Graph, k_exponent: f64) -> Result<IndependentSet> {
    if g.num_vertices() == 0 {
        return Ok(IndependentSet { mask: Vec::new() });
    }
    let x = degree_init(g, k_exponent)?;
    greedy_decode(g, x.as_slice())
}

/// Greedy on the residual graph: repeatedly take a minimum-degree vertex
/// (lowest index on ties) and delete its closed neighborhood.
pub fn dga_dynamic(g: &Graph) -> IndependentSet {
    let n = g.num_vertices();
    let mut alive = vec![true; n];
    let mut degree = g.degrees();
    let mut mask = vec![false; n];
    let mut remaining = n;
    while remaining > 0 {
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (degree[v], v))
            .expect("a live vertex remains");
        mask[v] = true;
        let mut removed = vec![v];
        removed.extend(g.neighbors(v).iter().copied().filter(|&w| alive[w]));
        for &r in &removed {
            alive[r] = false;
            remaining -= 1;
        }
        for &r in &removed {
            for &w in g.neighbors(r) {
                if alive[w] {
                    degree[w] -= 1;
                }
            }
        }
    }
    IndependentSet { mask }
}
