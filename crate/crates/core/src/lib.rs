//! Maximum independent set solvers built around a degree-initialized QUBO
//! relaxation minimized by a small graph convolutional network, plus
//! supervised pretraining, greedy baselines, an exact branch-and-bound
//! oracle and Shannon-capacity lower bounds via strong graph products.

pub mod bench;
pub mod capacity;
pub mod decode;
pub mod dimacs;
pub mod error;
pub mod exact;
pub mod features;
pub mod gcn;
pub mod graph;
pub mod qubo;
pub mod pipeline;
pub mod rng;

pub use error::{Error, Result};
pub use graph::Graph;
