//! Independent sets of C5 powers: compares the two pruning bounds on C5^3
//! and prints the capacity bound with its witness words.
//!
//!     cargo run --release --example pentagon

use std::time::Duration;

use misgnn::capacity::{estimate_capacity, SolverChoice};
use misgnn::exact::{exact_mis_with, ExactOptions, PruneBound};
use misgnn::graph::{graph_power, Graph};
use misgnn::pipeline::{Method, SolveConfig};

fn main() -> misgnn::Result<()> {
    let c5 = Graph::cycle(5)?;
    let cube = graph_power(&c5, 3)?;
    for bound in [PruneBound::CliqueCover, PruneBound::Remaining] {
        let r = exact_mis_with(&cube, ExactOptions { time_limit: Duration::from_secs(120), bound });
        println!(
            "{bound:?}: alpha={} optimal={} nodes={} {:.2}s",
            r.alpha, r.optimal, r.nodes_explored, r.elapsed_s
        );
    }

    let est = estimate_capacity(&c5, 2, SolverChoice::Fixed(Method::Exact), None, &SolveConfig::default())?;
    println!("capacity >= {:.12}", est.capacity_lb);
    for word in est.records[1].witness_words(5) {
        println!("  {word:?}");
    }
    Ok(())
}
