//! Degree-based node features.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DEFAULT_K_EXPONENT: f64 = 1.0;

/// Per-node scalar features in `(0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeFeatures {
    pub values: Vec<f64>,
    pub k_exponent: f64,
}

impl NodeFeatures {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

/// `x_i = 1 / (d̃_i + 1)^k` where `d̃` is the min-max normalized degree.
///
/// When every vertex has the same degree the normalized degree is taken to
/// be 0, so all features are 1. Low-degree vertices always get the larger
/// feature; the range is `[0.5^k, 1]`.
pub fn degree_init(g: &Graph, k_exponent: f64) -> Result<NodeFeatures> {
    if g.num_vertices() == 0 {
        return Err(Error::InvalidParameter(
            "degree features need at least one vertex".into(),
        ));
    }
    if !(k_exponent > 0.0 && k_exponent.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "k exponent must be positive, got {k_exponent}"
        )));
    }
    let degrees = g.degrees();
    let d_min = *degrees.iter().min().unwrap();
    let d_max = *degrees.iter().max().unwrap();
    let values = degrees
        .iter()
        .map(|&d| {
            let normalized = if d_max == d_min {
                0.0
            } else {
                (d - d_min) as f64 / (d_max - d_min) as f64
            };
            (normalized + 1.0).powf(-k_exponent)
        })
        .collect();
    Ok(NodeFeatures { values, k_exponent })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_k1() {
        let x = degree_init(&Graph::path(3), 1.0).unwrap();
        assert_eq!(x.values, vec![1.0, 0.5, 1.0]);
    }

    #[test]
    fn regular_graph_is_all_ones() {
        let x = degree_init(&Graph::cycle(6).unwrap(), 2.0).unwrap();
        assert!(x.values.iter().all(|&v| v == 1.0));
        let x = degree_init(&Graph::empty(4), 2.0).unwrap();
        assert!(x.values.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn star_k2() {
        let x = degree_init(&Graph::star(3), 2.0).unwrap();
        assert_eq!(x.values, vec![0.25, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn isolated_vertex_gets_one() {
        let g = Graph::new(4, [(0, 1), (1, 2)]).unwrap();
        let x = degree_init(&g, 1.0).unwrap();
        assert_eq!(x.values[3], 1.0);
        assert_eq!(x.values[1], 0.5);
        assert!((x.values[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(degree_init(&Graph::empty(0), 1.0).is_err());
        assert!(degree_init(&Graph::path(2), 0.0).is_err());
        assert!(degree_init(&Graph::path(2), f64::NAN).is_err());
    }
}
