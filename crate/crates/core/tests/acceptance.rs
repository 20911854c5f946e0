//! End-to-end acceptance checks, one PASS/FAIL line each. Runs without the
//! libtest harness so the lines always reach the terminal.

use std::fs;
use std::process::{Command, ExitCode};
use std::sync::OnceLock;
use std::time::Instant;

use misgnn::bench::{bench_run, er_dataset, BenchOptions, BenchReport, Dataset};
use misgnn::capacity::{estimate_capacity, SolverChoice};
use misgnn::decode::{combined_score, dga, greedy_decode};
use misgnn::dimacs::write_dimacs;
use misgnn::exact::{brute_force_mis, exact_mis, LabelRecord};
use misgnn::features::degree_init;
use misgnn::gcn::{bce_loss, feature_matrix, Activation, GcnModel, NormalizedAdjacency};
use misgnn::graph::{erdos_renyi, graph_power, Graph};
use misgnn::pipeline::{mean_bce, train_supervised, LabeledGraph, Method, SolveConfig, TrainedModel};
use misgnn::qubo::QuboInstance;
use misgnn::rng::{derive, from_seed};
use ndarray::Array2;
use rand::Rng;

type Outcome = Result<String, String>;
type LossFn<'a> = dyn Fn(&[f64]) -> (f64, Vec<f64>) + 'a;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn decoder_validity() -> Outcome {
    let mut rng = from_seed(101);
    for i in 0..1000u64 {
        let n = rng.gen_range(2..=200);
        let p = 0.05 * rng.gen_range(1..=18) as f64;
        let g = erdos_renyi(n, p, derive(101, i)).map_err(|e| e.to_string())?;
        let score_sets: [Vec<f64>; 3] = [
            (0..n).map(|_| rng.gen::<f64>()).collect(),
            (0..n).map(|_| rng.gen_range(0..4) as f64).collect(),
            (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect(),
        ];
        for scores in &score_sets {
            let set = greedy_decode(&g, scores).map_err(|e| e.to_string())?;
            if !set.is_valid(&g) || !set.is_maximal(&g) {
                return Err(format!("graph {i} (n={n}, p={p:.2}) decoded to a non-maximal or invalid set"));
            }
        }
    }
    Ok("1000 graphs x 3 score vectors valid and maximal".into())
}

fn reduction_identity() -> Outcome {
    let config = SolveConfig::default();
    let mut rng = from_seed(202);
    for i in 0..200u64 {
        let n = rng.gen_range(1..=120);
        let p = rng.gen_range(0.0..0.9);
        let g = erdos_renyi(n, p, derive(202, i)).map_err(|e| e.to_string())?;
        let x = degree_init(&g, config.k_exponent).map_err(|e| e.to_string())?;
        let p_gnn: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
        let scores = combined_score(&p_gnn, x.as_slice(), 0.0, config.c2).map_err(|e| e.to_string())?;
        let decoded = greedy_decode(&g, &scores).map_err(|e| e.to_string())?;
        let reference = dga(&g, config.k_exponent).map_err(|e| e.to_string())?;
        if decoded != reference {
            return Err(format!("graph {i}: c1 = 0 decode differs from dga"));
        }
    }
    Ok("200 graphs bit-identical".into())
}

fn oracle_equivalence() -> Outcome {
    let mut rng = from_seed(303);
    let config = SolveConfig::default();
    for i in 0..500u64 {
        let n = rng.gen_range(1..=16);
        let p = rng.gen_range(0.0..1.0);
        let g = erdos_renyi(n, p, derive(303, i)).map_err(|e| e.to_string())?;
        let brute = brute_force_mis(&g).map_err(|e| e.to_string())?;
        let exact = exact_mis(&g, config.exact_time_limit());
        if !exact.optimal || exact.alpha != brute.alpha || !exact.set.is_valid(&g) {
            return Err(format!("graph {i}: exact {} vs brute force {}", exact.alpha, brute.alpha));
        }
    }
    Ok("500 graphs agree on alpha".into())
}

/// `|a − b| / max(|a|, |b|, 1e-6)`; the floor keeps exactly-zero gradients
/// from dividing by rounding noise.
fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

/// Central differences of `loss` over every entry of `w1`, `w2` and `x`.
fn max_fd_error(
    model: &GcnModel,
    adj: &NormalizedAdjacency,
    x: &Array2<f64>,
    loss: &LossFn<'_>,
) -> Result<f64, String> {
    const H: f64 = 1e-5;
    let (p, cache) = model.forward(adj, x).map_err(|e| e.to_string())?;
    let (_, dl_dp) = loss(&p);
    let (grads, dx) = model.backward_with_input(adj, &cache, &dl_dp).map_err(|e| e.to_string())?;
    let eval = |m: &GcnModel, x: &Array2<f64>| -> Result<f64, String> {
        let (p, _) = m.forward(adj, x).map_err(|e| e.to_string())?;
        Ok(loss(&p).0)
    };
    let mut worst = 0.0f64;
    for which in 0..2 {
        let shape = if which == 0 { model.w1.dim() } else { model.w2.dim() };
        for r in 0..shape.0 {
            for c in 0..shape.1 {
                let mut plus = model.clone();
                let mut minus = model.clone();
                let (wp, wm, analytic) = if which == 0 {
                    (&mut plus.w1, &mut minus.w1, grads.w1[[r, c]])
                } else {
                    (&mut plus.w2, &mut minus.w2, grads.w2[[r, c]])
                };
                wp[[r, c]] += H;
                wm[[r, c]] -= H;
                let numeric = (eval(&plus, x)? - eval(&minus, x)?) / (2.0 * H);
                worst = worst.max(rel_err(analytic, numeric));
            }
        }
    }
    for r in 0..x.nrows() {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[[r, 0]] += H;
        xm[[r, 0]] -= H;
        let numeric = (eval(model, &xp)? - eval(model, &xm)?) / (2.0 * H);
        worst = worst.max(rel_err(dx[[r, 0]], numeric));
    }
    Ok(worst)
}

fn gradient_correctness() -> Outcome {
    let config = SolveConfig::default();
    let mut rng = from_seed(404);
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let n = rng.gen_range(2..=15);
        let g = erdos_renyi(n, rng.gen_range(0.1..0.8), derive(404, i)).map_err(|e| e.to_string())?;
        let adj = NormalizedAdjacency::new(&g);
        let feats = degree_init(&g, config.k_exponent).map_err(|e| e.to_string())?;
        let x = feature_matrix(feats.as_slice());

        let qubo = QuboInstance::modified(&g, feats.as_slice(), config.penalty, config.reward_exponent)
            .map_err(|e| e.to_string())?;
        let relu = GcnModel::init(1, 8, Activation::Relu, derive(405, i)).map_err(|e| e.to_string())?;
        let qubo_loss = |p: &[f64]| (qubo.loss(p).unwrap(), qubo.grad(p).unwrap());
        worst = worst.max(max_fd_error(&relu, &adj, &x, &qubo_loss)?);

        let y: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.4) { 1.0 } else { 0.0 }).collect();
        let tanh = GcnModel::init(1, 8, Activation::Tanh, derive(406, i)).map_err(|e| e.to_string())?;
        let bce = |p: &[f64]| bce_loss(p, &y).unwrap();
        worst = worst.max(max_fd_error(&tanh, &adj, &x, &bce)?);
    }
    check(worst < 1e-4, format!("50 pairs, QUBO and BCE losses, max relative error {worst:.2e}"))
}

fn labeled_graph(n: usize, bits: u64) -> Graph {
    let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    let edges: Vec<_> = pairs.enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, e)| e).collect();
    Graph::new(n, edges).expect("valid labeled graph")
}

/// Every binary minimizer of the Hamiltonian must be an independent set whose
/// reward equals the best reward over independent sets.
fn energy_semantics_on(g: &Graph) -> Result<(), String> {
    let n = g.num_vertices();
    let feats = degree_init(g, 1.0).map_err(|e| e.to_string())?;
    // Exponent 2 gives R = P|E|/n² < P, hence every r_i < P.
    let q = QuboInstance::modified(g, feats.as_slice(), 2.0, 2.0).map_err(|e| e.to_string())?;
    if q.rewards.iter().any(|&r| r >= q.penalty) {
        return Err(format!("reward not below P on n={n}"));
    }
    let mut energies = Vec::with_capacity(1 << n);
    let mut best_reward = f64::NEG_INFINITY;
    for mask in 0u32..1 << n {
        let sel: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        energies.push(q.energy_of_set(&sel).map_err(|e| e.to_string())?);
        if g.is_independent(&sel) {
            let reward: f64 = (0..n).filter(|&i| sel[i]).map(|i| q.rewards[i]).sum();
            best_reward = best_reward.max(reward);
        }
    }
    let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    for (mask, &e) in energies.iter().enumerate() {
        if e > min + 1e-12 {
            continue;
        }
        let sel: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        let reward: f64 = (0..n).filter(|&i| sel[i]).map(|i| q.rewards[i]).sum();
        if !g.is_independent(&sel) || (reward - best_reward).abs() > 1e-12 {
            return Err(format!("minimizer {mask:#b} on {:?} is not a max-reward independent set", g.edges()));
        }
    }
    Ok(())
}

fn energy_semantics() -> Outcome {
    let mut count = 0;
    for n in 1..=5usize {
        for bits in 0..1u64 << (n * (n - 1) / 2) {
            energy_semantics_on(&labeled_graph(n, bits))?;
            count += 1;
        }
    }
    let mut rng = from_seed(505);
    for _ in 0..500 {
        energy_semantics_on(&labeled_graph(6, rng.gen_range(0..1u64 << 15)))?;
        count += 1;
    }
    Ok(format!("{count} graphs, every minimizer is a max-reward independent set"))
}

struct Er10 {
    test: Dataset,
    test_labels: Vec<LabelRecord>,
    trained: TrainedModel,
    held_out: Vec<LabeledGraph>,
}

fn er10() -> &'static Result<Er10, String> {
    static CELL: OnceLock<Result<Er10, String>> = OnceLock::new();
    CELL.get_or_init(|| {
        let config = SolveConfig::default();
        let train = er_dataset("er10-train", 200, 10, 0.5, 2000).map_err(|e| e.to_string())?;
        let test = er_dataset("er10", 100, 10, 0.5, 1000).map_err(|e| e.to_string())?;
        let train_labels = train.label(&config);
        let test_labels = test.label(&config);
        let data = train.supervised(&train_labels).map_err(|e| e.to_string())?;
        let trained = train_supervised(&data, 60, &config).map_err(|e| e.to_string())?;
        let held_out = test.supervised(&test_labels).map_err(|e| e.to_string())?;
        Ok(Er10 {
            test,
            test_labels,
            trained,
            held_out,
        })
    })
}

fn er10_bench(methods: Vec<Method>) -> Result<BenchReport, String> {
    let er = er10().as_ref()?;
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let options = BenchOptions {
        methods,
        model: Some(&er.trained.model),
        config: SolveConfig::default().with_seed(7),
        jobs,
    };
    bench_run(&er.test, Some(&er.test_labels), &options).map_err(|e| e.to_string())
}

fn trend_reproduction() -> Outcome {
    let report = er10_bench(vec![Method::Dga, Method::QuboG, Method::SupG, Method::SupQuboG])?;
    let drop = |m| report.row(m).unwrap().drop_pct;
    let (d_dga, d_qubo, d_sup, d_supqubo) = (
        drop(Method::Dga),
        drop(Method::QuboG),
        drop(Method::SupG),
        drop(Method::SupQuboG),
    );
    check(
        d_qubo <= d_dga + 1.0 && d_supqubo <= d_sup + 1.0,
        format!(
            "drops: dga {d_dga:.2}, qubo-g {d_qubo:.2}, sup-g {d_sup:.2}, sup-qubo-g {d_supqubo:.2} (exact avg {:.2})",
            report.exact_avg
        ),
    )
}

fn strong_product_capacity() -> Outcome {
    let config = SolveConfig::default();
    let c5 = Graph::cycle(5).map_err(|e| e.to_string())?;
    let mut alphas = Vec::new();
    for k in 1..=3 {
        let power = graph_power(&c5, k).map_err(|e| e.to_string())?;
        let r = exact_mis(&power, config.exact_time_limit());
        if !r.optimal || !r.set.is_valid(&power) {
            return Err(format!("C5^{k} not solved to optimality"));
        }
        alphas.push(r.alpha);
    }
    let est = estimate_capacity(&c5, 2, SolverChoice::Fixed(Method::Exact), None, &config).map_err(|e| e.to_string())?;
    let gap = (est.capacity_lb - 5f64.sqrt()).abs();
    check(
        alphas == [2, 5, 10] && gap < 1e-12,
        format!("alpha(C5^k) = {alphas:?}, capacity bound {:.15} (gap {gap:.1e})", est.capacity_lb),
    )
}

fn pipeline_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let graph = dir.path().join("g.dimacs");
    let g = erdos_renyi(24, 0.3, 808).map_err(|e| e.to_string())?;
    fs::write(&graph, write_dimacs(&g)).map_err(|e| e.to_string())?;
    let model = dir.path().join("model.json");
    let er = er10().as_ref()?;
    fs::write(&model, er.trained.to_json().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;

    let run = |method: &str| -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_misgnn"))
            .args(["solve", "--method", method, "--seed", "42", "--no-timing", "--graph"])
            .arg(&graph)
            .arg("--model")
            .arg(&model)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("{method}: {}", String::from_utf8_lossy(&out.stderr)));
        }
        Ok(out.stdout)
    };
    let methods = ["exact", "dga", "dga-dynamic", "ga", "qubo-g", "sup-g", "sup-qubo-g"];
    for method in methods {
        let (a, b) = (run(method)?, run(method)?);
        if a != b {
            return Err(format!("{method}: outputs differ"));
        }
    }
    Ok(format!("{} methods byte-identical across runs", methods.len()))
}

fn supervised_sanity() -> Outcome {
    let er = er10().as_ref()?;
    let bce = mean_bce(&er.trained.model, &er.held_out, SolveConfig::default().k_exponent).map_err(|e| e.to_string())?;
    let report = er10_bench(vec![Method::Dga, Method::SupG])?;
    let (dga_avg, sup_avg) = (report.row(Method::Dga).unwrap().avg_size, report.row(Method::SupG).unwrap().avg_size);
    check(
        bce < std::f64::consts::LN_2 && sup_avg >= dga_avg,
        format!("held-out BCE {bce:.4} (ln 2 = 0.6931), sup-g avg {sup_avg:.3} vs dga {dga_avg:.3}"),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("decoder validity and maximality", decoder_validity),
        ("c1 = 0 reduces to dga", reduction_identity),
        ("exact solver matches brute force", oracle_equivalence),
        ("gradient correctness", gradient_correctness),
        ("qubo energy semantics", energy_semantics),
        ("er10 trend reproduction", trend_reproduction),
        ("strong product and capacity", strong_product_capacity),
        ("cli solve determinism", pipeline_determinism),
        ("supervised learning sanity", supervised_sanity),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
