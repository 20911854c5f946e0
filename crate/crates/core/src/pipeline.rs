//! Solver pipelines: QUBO+G (unsupervised), Supervised+G and
//! Supervised+QUBO+G, plus dispatch over all methods.
//!
//! The unsupervised procedure trains a fresh relu/sigmoid GCN to minimize the
//! modified Hamiltonian of the graph. Two retry rules guard against poor
//! random initializations:
//!
//! * reinit: at epoch `warmup_epochs` and after the last epoch, a positive
//!   loss discards the attempt and restarts from fresh parameters
//!   (at most `max_reinits` times per solve);
//! * rerun: a finished run whose penalty term exceeds `penalty_threshold` is
//!   repeated from fresh parameters (at most `max_reruns` times).
//!
//! The lowest-energy finished run is decoded greedily from
//! `c1 · p + c2 · features`, so every pipeline returns a valid maximal set.

use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::decode::{combined_score, dga, dga_dynamic, greedy_decode, greedy_random, IndependentSet};
use crate::error::{Error, Result};
use crate::exact::exact_mis;
use crate::features::{degree_init, DEFAULT_K_EXPONENT};
use crate::gcn::{
    bce_loss, feature_matrix, Activation, Adam, GcnModel, ModelFile, NormalizedAdjacency, TrainingMetadata,
    DEFAULT_HIDDEN,
};
use crate::graph::Graph;
use crate::qubo::{QuboInstance, DEFAULT_PENALTY, DEFAULT_REWARD_EXPONENT};
use crate::rng;

/// Every field is optional in JSON; missing fields take the defaults below.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    pub epochs_unsup: usize,
    /// QUBO refinement epochs in the Supervised+QUBO+G pipeline.
    pub epochs_sup_predictor_refine: usize,
    pub epochs_supervised: usize,
    /// `None` means `0.5 · penalty`.
    pub penalty_threshold: Option<f64>,
    pub max_reinits: usize,
    pub max_reruns: usize,
    pub warmup_epochs: usize,
    pub c1: f64,
    pub c2: f64,
    pub penalty: f64,
    pub reward_exponent: f64,
    pub k_exponent: f64,
    pub hidden: usize,
    pub lr_unsup: f64,
    pub lr_sup: f64,
    pub unsup_activation: Activation,
    /// Optimize the node embedding (initialized from the features) together
    /// with the weights in the QUBO pipelines.
    pub train_embedding: bool,
    pub exact_time_limit_s: f64,
    pub seed: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            epochs_unsup: 2000,
            epochs_sup_predictor_refine: 200,
            epochs_supervised: 60,
            penalty_threshold: None,
            max_reinits: 5,
            max_reruns: 3,
            warmup_epochs: 100,
            c1: 2.0,
            c2: 3.0,
            penalty: DEFAULT_PENALTY,
            reward_exponent: DEFAULT_REWARD_EXPONENT,
            k_exponent: DEFAULT_K_EXPONENT,
            hidden: DEFAULT_HIDDEN,
            lr_unsup: 1e-2,
            lr_sup: 1e-2,
            unsup_activation: Activation::Relu,
            train_embedding: true,
            exact_time_limit_s: 60.0,
            seed: 0,
        }
    }
}

impl SolveConfig {
    pub fn penalty_threshold(&self) -> f64 {
        self.penalty_threshold.unwrap_or(0.5 * self.penalty)
    }

    pub fn exact_time_limit(&self) -> Duration {
        Duration::from_secs_f64(self.exact_time_limit_s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        if self.epochs_unsup == 0 || self.epochs_sup_predictor_refine == 0 || self.epochs_supervised == 0 {
            return bad("epoch counts must be positive");
        }
        if self.hidden == 0 {
            return bad("hidden size must be positive");
        }
        if !(self.penalty > 0.0) {
            return bad("penalty must be positive");
        }
        if !(self.k_exponent > 0.0) {
            return bad("k exponent must be positive");
        }
        if self.penalty_threshold.is_some_and(|t| !(t >= 0.0)) {
            return bad("penalty threshold must be nonnegative");
        }
        if !(self.lr_unsup > 0.0 && self.lr_sup > 0.0) {
            return bad("learning rates must be positive");
        }
        if !(self.exact_time_limit_s >= 0.0 && self.exact_time_limit_s.is_finite()) {
            return bad("exact time limit must be a nonnegative number of seconds");
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        SolveConfig { seed, ..self.clone() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "exact-bnb")]
    Exact,
    #[serde(rename = "dga")]
    Dga,
    #[serde(rename = "dga-dynamic")]
    DgaDynamic,
    #[serde(rename = "ga")]
    Ga,
    #[serde(rename = "qubo-g")]
    QuboG,
    #[serde(rename = "sup-g")]
    SupG,
    #[serde(rename = "sup-qubo-g")]
    SupQuboG,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Exact,
        Method::Dga,
        Method::DgaDynamic,
        Method::Ga,
        Method::QuboG,
        Method::SupG,
        Method::SupQuboG,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact-bnb",
            Method::Dga => "dga",
            Method::DgaDynamic => "dga-dynamic",
            Method::Ga => "ga",
            Method::QuboG => "qubo-g",
            Method::SupG => "sup-g",
            Method::SupQuboG => "sup-qubo-g",
        }
    }

    pub fn needs_model(self) -> bool {
        matches!(self, Method::SupG | Method::SupQuboG)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exact" | "exact-bnb" => Ok(Method::Exact),
            other => Method::ALL
                .into_iter()
                .find(|m| m.as_str() == other)
                .ok_or_else(|| Error::UnknownMethod(other.to_string())),
        }
    }
}

/// Parses a comma-separated method list.
pub fn parse_methods(list: &str) -> Result<Vec<Method>> {
    list.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(Method::from_str)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub method: Method,
    pub set: IndependentSet,
    /// Per-epoch energies of every finished training run, concatenated.
    pub loss_trace: Vec<f64>,
    pub reinit_count: usize,
    pub rerun_count: usize,
    pub elapsed_s: f64,
    /// Node probabilities behind the decoded set (empty for non-neural methods).
    pub probabilities: Vec<f64>,
    /// Relaxed energy of the returned run.
    pub final_loss: Option<f64>,
    pub final_penalty: Option<f64>,
}

impl SolveResult {
    fn plain(method: Method, set: IndependentSet, elapsed: Duration) -> Self {
        SolveResult {
            method,
            set,
            loss_trace: Vec::new(),
            reinit_count: 0,
            rerun_count: 0,
            elapsed_s: elapsed.as_secs_f64(),
            probabilities: Vec::new(),
            final_loss: None,
            final_penalty: None,
        }
    }

    pub fn size(&self) -> usize {
        self.set.size()
    }

    pub fn record(&self, graph_id: &str, g: &Graph) -> SolveRecord {
        SolveRecord {
            graph_id: graph_id.to_string(),
            method: self.method,
            size: self.set.size(),
            members: self.set.members(),
            valid: self.set.is_valid(g),
            elapsed_s: self.elapsed_s,
            reinits: self.reinit_count,
            reruns: self.rerun_count,
            final_loss: self.final_loss,
        }
    }
}

/// Serialized form of a [`SolveResult`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub graph_id: String,
    pub method: Method,
    pub size: usize,
    pub members: Vec<usize>,
    pub valid: bool,
    pub elapsed_s: f64,
    pub reinits: usize,
    pub reruns: usize,
    pub final_loss: Option<f64>,
}

/// A finished training run.
#[derive(Clone, Debug)]
struct Run {
    probabilities: Vec<f64>,
    loss: f64,
    penalty: f64,
    trace: Vec<f64>,
}

enum Outcome {
    Finished(Run),
    PositiveLoss,
    Diverged,
}

struct QuboTrainer<'a> {
    qubo: QuboInstance,
    adj: NormalizedAdjacency,
    input: ndarray::Array2<f64>,
    config: &'a SolveConfig,
    epochs: usize,
}

impl QuboTrainer<'_> {
    /// Trains one freshly initialized model. The returned run holds the
    /// lowest-energy iterate seen, which is never above the warmup energy.
    /// Without `may_reinit` the positive-loss checkpoints are skipped.
    fn train(&self, seed: u64, may_reinit: bool) -> Result<Outcome> {
        let mut model = GcnModel::init(1, self.config.hidden, self.config.unsup_activation, seed)?;
        let mut embedding = self.input.clone();
        let mut opt = Adam::for_shapes(&[model.w1.dim(), model.w2.dim(), embedding.dim()], self.config.lr_unsup);
        let mut trace = Vec::with_capacity(self.epochs);
        let mut best: Option<(f64, Vec<f64>)> = None;
        for epoch in 1..=self.epochs + 1 {
            let (p, cache) = match model.forward(&self.adj, &embedding) {
                Ok(out) => out,
                Err(Error::NonFinite { .. }) => return Ok(Outcome::Diverged),
                Err(e) => return Err(e),
            };
            let loss = self.qubo.loss(&p)?;
            if !loss.is_finite() {
                return Ok(Outcome::Diverged);
            }
            if best.as_ref().is_none_or(|(b, _)| loss < *b) {
                best = Some((loss, p.clone()));
            }
            if epoch > self.epochs {
                // Energy after the last update.
                break;
            }
            trace.push(loss);
            if may_reinit && epoch == self.config.warmup_epochs && epoch < self.epochs && loss > 0.0 {
                return Ok(Outcome::PositiveLoss);
            }
            let dl_dp = self.qubo.grad(&p)?;
            let (grads, mut d_embedding) = model.backward_with_input(&self.adj, &cache, &dl_dp)?;
            if !self.config.train_embedding {
                d_embedding.fill(0.0);
            }
            match opt.step_params(
                &mut [&mut model.w1, &mut model.w2, &mut embedding],
                &[&grads.w1, &grads.w2, &d_embedding],
            ) {
                Ok(()) => {}
                Err(Error::NonFinite { .. }) => return Ok(Outcome::Diverged),
                Err(e) => return Err(e),
            }
        }
        let (loss, probabilities) = best.expect("at least one forward pass");
        if may_reinit && loss > 0.0 {
            return Ok(Outcome::PositiveLoss);
        }
        let penalty = self.qubo.penalty_term(&probabilities)?;
        Ok(Outcome::Finished(Run {
            probabilities,
            loss,
            penalty,
            trace,
        }))
    }
}

struct QuboOutcome {
    run: Run,
    loss_trace: Vec<f64>,
    reinits: usize,
    reruns: usize,
}

/// The shared unsupervised procedure over arbitrary node features.
fn qubo_procedure(g: &Graph, features: &[f64], epochs: usize, config: &SolveConfig) -> Result<QuboOutcome> {
    config.validate()?;
    if g.num_vertices() == 0 {
        return Err(Error::InvalidParameter("cannot solve an empty graph".into()));
    }
    let trainer = QuboTrainer {
        qubo: QuboInstance::modified(g, features, config.penalty, config.reward_exponent)?,
        adj: NormalizedAdjacency::new(g),
        input: feature_matrix(features),
        config,
        epochs,
    };
    let threshold = config.penalty_threshold();
    let mut attempt = 0u64;
    let mut next_seed = || {
        attempt += 1;
        rng::derive(config.seed, attempt)
    };
    let mut reinits = 0;
    let mut reruns = 0;
    let mut loss_trace = Vec::new();
    let mut best: Option<Run> = None;

    loop {
        let run = loop {
            let may_reinit = reinits < config.max_reinits;
            match trainer.train(next_seed(), may_reinit)? {
                Outcome::Finished(run) => break Some(run),
                Outcome::PositiveLoss | Outcome::Diverged if may_reinit => reinits += 1,
                Outcome::PositiveLoss | Outcome::Diverged => break None,
            }
        };
        let Some(run) = run else {
            break;
        };
        loss_trace.extend_from_slice(&run.trace);
        let needs_rerun = run.penalty > threshold;
        if best.as_ref().is_none_or(|b| run.loss < b.loss) {
            best = Some(run);
        }
        if needs_rerun && reruns < config.max_reruns {
            reruns += 1;
        } else {
            break;
        }
    }
    // Only divergence on every attempt leaves nothing; the all-zero
    // assignment (energy 0) then hands decoding to the feature term.
    let run = best.unwrap_or_else(|| Run {
        probabilities: vec![0.0; g.num_vertices()],
        loss: 0.0,
        penalty: 0.0,
        trace: Vec::new(),
    });
    Ok(QuboOutcome {
        run,
        loss_trace,
        reinits,
        reruns,
    })
}

fn decode_outcome(
    g: &Graph,
    method: Method,
    features: &[f64],
    outcome: QuboOutcome,
    config: &SolveConfig,
    start: Instant,
) -> Result<SolveResult> {
    let scores = combined_score(&outcome.run.probabilities, features, config.c1, config.c2)?;
    let set = greedy_decode(g, &scores)?;
    Ok(SolveResult {
        method,
        set,
        loss_trace: outcome.loss_trace,
        reinit_count: outcome.reinits,
        rerun_count: outcome.reruns,
        elapsed_s: start.elapsed().as_secs_f64(),
        probabilities: outcome.run.probabilities,
        final_loss: Some(outcome.run.loss),
        final_penalty: Some(outcome.run.penalty),
    })
}

/// QUBO+G: degree features, unsupervised QUBO training, greedy decoding.
pub fn solve_qubo_unsup(g: &Graph, config: &SolveConfig) -> Result<SolveResult> {
    let start = Instant::now();
    let x = degree_init(g, config.k_exponent)?;
    let outcome = qubo_procedure(g, x.as_slice(), config.epochs_unsup, config)?;
    decode_outcome(g, Method::QuboG, x.as_slice(), outcome, config, start)
}

/// A supervised tanh GCN with its training record.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainedModel {
    pub model: GcnModel,
    pub metadata: TrainingMetadata,
}

impl TrainedModel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.model.to_file(self.metadata.clone()))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        Ok(TrainedModel {
            model: GcnModel::from_file(&file)?,
            metadata: file.metadata,
        })
    }
}

/// A graph with per-node 0/1 targets.
#[derive(Clone, Debug)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub targets: Vec<f64>,
}

struct Prepared {
    adj: NormalizedAdjacency,
    input: ndarray::Array2<f64>,
    targets: Vec<f64>,
}

fn prepare(data: &[LabeledGraph], k_exponent: f64) -> Result<Vec<Prepared>> {
    data.iter()
        .map(|d| {
            if d.targets.len() != d.graph.num_vertices() {
                return Err(Error::Dimension {
                    expected: d.graph.num_vertices(),
                    got: d.targets.len(),
                });
            }
            Ok(Prepared {
                adj: NormalizedAdjacency::new(&d.graph),
                input: feature_matrix(degree_init(&d.graph, k_exponent)?.as_slice()),
                targets: d.targets.clone(),
            })
        })
        .collect()
}

/// Node-weighted mean BCE of `model` over `data`.
pub fn mean_bce(model: &GcnModel, data: &[LabeledGraph], k_exponent: f64) -> Result<f64> {
    let prepared = prepare(data, k_exponent)?;
    mean_bce_prepared(model, &prepared)
}

fn mean_bce_prepared(model: &GcnModel, data: &[Prepared]) -> Result<f64> {
    let mut total = 0.0;
    let mut nodes = 0usize;
    for d in data {
        let (p, _) = model.forward(&d.adj, &d.input)?;
        let (loss, _) = bce_loss(&p, &d.targets)?;
        total += loss * p.len() as f64;
        nodes += p.len();
    }
    if nodes == 0 {
        return Err(Error::EmptyDataset);
    }
    Ok(total / nodes as f64)
}

/// Trains the tanh GCN with BCE for `epochs` passes over the data, one Adam
/// step per graph, graph order reshuffled from the seed each epoch.
pub fn train_supervised(data: &[LabeledGraph], epochs: usize, config: &SolveConfig) -> Result<TrainedModel> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let prepared = prepare(data, config.k_exponent)?;
    if prepared.iter().all(|d| d.targets.is_empty()) {
        return Err(Error::EmptyDataset);
    }
    let mut model = GcnModel::init(1, config.hidden, Activation::Tanh, rng::derive(config.seed, 0))?;
    let mut opt = Adam::new(&model, config.lr_sup);
    let mut order: Vec<usize> = (0..prepared.len()).collect();
    for epoch in 0..epochs {
        order.shuffle(&mut rng::from_seed(rng::derive(config.seed, 1 + epoch as u64)));
        for &i in &order {
            let d = &prepared[i];
            if d.targets.is_empty() {
                continue;
            }
            let (p, cache) = model.forward(&d.adj, &d.input).map_err(|e| with_epoch(e, epoch))?;
            let (_, dl_dp) = bce_loss(&p, &d.targets)?;
            let grads = model.backward(&d.adj, &cache, &dl_dp)?;
            opt.step(&mut model, &grads).map_err(|e| with_epoch(e, epoch))?;
        }
    }
    let final_bce = mean_bce_prepared(&model, &prepared)?;
    Ok(TrainedModel {
        model,
        metadata: TrainingMetadata {
            dataset: None,
            epochs,
            final_bce: Some(final_bce),
            learning_rate: config.lr_sup,
            train_graphs: data.len(),
        },
    })
}

fn with_epoch(e: Error, epoch: usize) -> Error {
    match e {
        Error::NonFinite { context } => Error::NonFinite {
            context: format!("{context} (epoch {epoch})"),
        },
        other => other,
    }
}

/// Forward pass on degree features.
pub fn predict_supervised(model: &GcnModel, g: &Graph, k_exponent: f64) -> Result<Vec<f64>> {
    let x = degree_init(g, k_exponent)?;
    let (p, _) = model.forward(&NormalizedAdjacency::new(g), &feature_matrix(x.as_slice()))?;
    Ok(p)
}

/// Supervised+G: predicted probabilities mixed with degree features.
pub fn solve_supervised_g(g: &Graph, model: &GcnModel, config: &SolveConfig) -> Result<SolveResult> {
    let start = Instant::now();
    let x = degree_init(g, config.k_exponent)?;
    let p = predict_supervised(model, g, config.k_exponent)?;
    let set = greedy_decode(g, &combined_score(&p, x.as_slice(), config.c1, config.c2)?)?;
    let mut result = SolveResult::plain(Method::SupG, set, start.elapsed());
    result.probabilities = p;
    Ok(result)
}

/// Supervised+QUBO+G: the QUBO+G procedure with supervised probabilities in
/// place of degree features (network input, rewards and decode mixing term),
/// trained for the refinement epoch count.
pub fn solve_supervised_qubo_g(g: &Graph, model: &GcnModel, config: &SolveConfig) -> Result<SolveResult> {
    let start = Instant::now();
    let x_sup = predict_supervised(model, g, config.k_exponent)?;
    let outcome = qubo_procedure(g, &x_sup, config.epochs_sup_predictor_refine, config)?;
    decode_outcome(g, Method::SupQuboG, &x_sup, outcome, config, start)
}

/// Runs one method on one graph.
pub fn solve(g: &Graph, method: Method, model: Option<&GcnModel>, config: &SolveConfig) -> Result<SolveResult> {
    let start = Instant::now();
    let need_model = || {
        model.ok_or_else(|| Error::InvalidParameter(format!("method {method} needs a trained model")))
    };
    if g.num_vertices() == 0 {
        return Ok(SolveResult::plain(method, IndependentSet::from_mask(Vec::new()), start.elapsed()));
    }
    match method {
        Method::Exact => {
            let r = exact_mis(g, config.exact_time_limit());
            Ok(SolveResult::plain(method, r.set, start.elapsed()))
        }
        Method::Dga => Ok(SolveResult::plain(method, dga(g, config.k_exponent)?, start.elapsed())),
        Method::DgaDynamic => Ok(SolveResult::plain(method, dga_dynamic(g), start.elapsed())),
        Method::Ga => Ok(SolveResult::plain(method, greedy_random(g, config.seed), start.elapsed())),
        Method::QuboG => solve_qubo_unsup(g, config),
        Method::SupG => solve_supervised_g(g, need_model()?, config),
        Method::SupQuboG => solve_supervised_qubo_g(g, need_model()?, config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SolveConfig {
        SolveConfig {
            epochs_unsup: 300,
            epochs_sup_predictor_refine: 150,
            hidden: 16,
            ..SolveConfig::default()
        }
    }

    #[test]
    fn config_json_defaults_and_overrides() {
        let c: SolveConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, SolveConfig::default());
        assert_eq!(c.penalty_threshold(), 1.0);
        let c: SolveConfig = serde_json::from_str(r#"{"c1": 0.0, "penalty_threshold": 0.25}"#).unwrap();
        assert_eq!((c.c1, c.penalty_threshold()), (0.0, 0.25));
        assert!(serde_json::from_str::<SolveConfig>(r#"{"bogus": 1}"#).is_err());
        let bad = SolveConfig {
            hidden: 0,
            ..SolveConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn method_names() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{}\"", m.as_str()));
        }
        assert_eq!("exact".parse::<Method>().unwrap(), Method::Exact);
        assert_eq!(parse_methods("dga,qubo-g").unwrap(), vec![Method::Dga, Method::QuboG]);
        match parse_methods("dga,gurobi") {
            Err(Error::UnknownMethod(tok)) => assert_eq!(tok, "gurobi"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn edgeless_graph_takes_everything() {
        let g = Graph::empty(6);
        let r = solve_qubo_unsup(&g, &quick()).unwrap();
        assert_eq!(r.size(), 6);
        assert!(r.loss_trace.iter().skip(quick().warmup_epochs).all(|&l| l <= 0.0));
        assert_eq!((r.reinit_count, r.rerun_count), (0, 0));
    }

    #[test]
    fn single_edge_picks_one_endpoint() {
        let g = Graph::path(2);
        let r = solve_qubo_unsup(&g, &SolveConfig::default()).unwrap();
        assert_eq!(r.size(), 1);
        assert!(r.set.is_valid(&g) && r.set.is_maximal(&g));
        // Both endpoints are automorphic, so the relaxed optimum reachable by
        // the network is p = (½, ½) with energy -½; the decoded set reaches
        // the binary optimum -min(r) = -1.
        let qubo = QuboInstance::modified(&g, &[1.0, 1.0], 2.0, 1.0).unwrap();
        assert_eq!(qubo.energy_of_set(r.set.mask()).unwrap(), -1.0);
        let loss = r.final_loss.unwrap();
        assert!((-0.5 - 1e-9..=-0.5 + 1e-6).contains(&loss), "loss {loss}");
    }

    #[test]
    fn qubo_is_deterministic() {
        let g = crate::graph::erdos_renyi(12, 0.4, 3).unwrap();
        let a = solve_qubo_unsup(&g, &quick()).unwrap();
        let b = solve_qubo_unsup(&g, &quick()).unwrap();
        assert_eq!(a.set, b.set);
        assert_eq!(a.loss_trace, b.loss_trace);
        assert_eq!(a.probabilities, b.probabilities);
        assert_eq!((a.reinit_count, a.rerun_count), (b.reinit_count, b.rerun_count));
    }

    #[test]
    fn zero_threshold_forces_reruns() {
        let g = crate::graph::erdos_renyi(10, 0.5, 1).unwrap();
        let config = SolveConfig {
            penalty_threshold: Some(0.0),
            max_reruns: 2,
            ..quick()
        };
        let r = solve_qubo_unsup(&g, &config).unwrap();
        // Sigmoid outputs are never exactly 0, so the penalty stays positive.
        assert_eq!(r.rerun_count, 2);
        assert!(r.loss_trace.len() <= config.epochs_unsup * 3);
        assert!(r.set.is_valid(&g) && r.set.is_maximal(&g));
    }

    #[test]
    fn positive_loss_exhausts_reinits() {
        // A huge reward exponent makes every reward vanish, so the energy is
        // the (positive) penalty term alone.
        let g = crate::graph::erdos_renyi(10, 0.5, 2).unwrap();
        let config = SolveConfig {
            reward_exponent: 40.0,
            max_reinits: 3,
            max_reruns: 1,
            penalty_threshold: Some(1e9),
            ..quick()
        };
        let r = solve_qubo_unsup(&g, &config).unwrap();
        assert_eq!(r.reinit_count, 3);
        assert_eq!(r.rerun_count, 0);
        assert!(r.final_loss.unwrap() > 0.0);
        assert_eq!(r.loss_trace.len(), config.epochs_unsup);
        assert!(r.set.is_valid(&g) && r.set.is_maximal(&g));
    }

    #[test]
    fn accepted_runs_have_nonpositive_checkpoints() {
        let config = quick();
        for seed in 0..5 {
            let g = crate::graph::erdos_renyi(12, 0.3, seed).unwrap();
            let r = solve_qubo_unsup(&g, &config.with_seed(seed)).unwrap();
            assert!(r.reinit_count < config.max_reinits);
            for run in r.loss_trace.chunks(config.epochs_unsup) {
                assert!(run[config.warmup_epochs - 1] <= 0.0);
            }
            assert!(r.final_loss.unwrap() <= 0.0);
        }
    }

    #[test]
    fn final_loss_not_above_warmup_loss() {
        for seed in 0..10 {
            let g = crate::graph::erdos_renyi(15, 0.3, seed).unwrap();
            let config = SolveConfig {
                max_reruns: 0,
                ..quick().with_seed(seed)
            };
            let r = solve_qubo_unsup(&g, &config).unwrap();
            if r.loss_trace.len() >= config.warmup_epochs {
                assert!(r.final_loss.unwrap() <= r.loss_trace[config.warmup_epochs - 1]);
            }
        }
    }

    #[test]
    fn supervised_needs_data() {
        assert!(matches!(train_supervised(&[], 5, &quick()), Err(Error::EmptyDataset)));
        let bad = LabeledGraph {
            graph: Graph::path(3),
            targets: vec![1.0, 0.0],
        };
        assert!(train_supervised(&[bad], 5, &quick()).is_err());
    }

    #[test]
    fn supervised_on_edgeless_graph() {
        let data = [LabeledGraph {
            graph: Graph::empty(8),
            targets: vec![1.0; 8],
        }];
        let config = SolveConfig::default();
        let trained = train_supervised(&data, 60, &config).unwrap();
        let bce = trained.metadata.final_bce.unwrap();
        assert!(bce < 0.1, "final BCE {bce}");
        let again = train_supervised(&data, 60, &config).unwrap();
        assert_eq!(trained, again);
    }

    #[test]
    fn oracle_probabilities_decode_to_the_optimum() {
        // Star plus a pendant path: optimum is unique.
        let g = Graph::new(6, [(0, 1), (0, 2), (0, 3), (3, 4), (4, 5)]).unwrap();
        let opt = crate::exact::brute_force_mis(&g).unwrap();
        let p: Vec<f64> = opt
            .set
            .mask()
            .iter()
            .map(|&b| if b { 1.0 - 1e-7 } else { 1e-7 })
            .collect();
        let x = degree_init(&g, 1.0).unwrap();
        let c = SolveConfig::default();
        // Large c1 lets the probabilities dominate the degree term.
        let scores = combined_score(&p, x.as_slice(), 10.0 * c.c2, c.c2).unwrap();
        assert_eq!(greedy_decode(&g, &scores).unwrap(), opt.set);
    }

    #[test]
    fn model_json_round_trip() {
        let data = [LabeledGraph {
            graph: Graph::path(4),
            targets: vec![1.0, 0.0, 1.0, 0.0],
        }];
        let trained = train_supervised(&data, 3, &quick()).unwrap();
        let back = TrainedModel::from_json(&trained.to_json().unwrap()).unwrap();
        assert_eq!(back, trained);
    }

    #[test]
    fn dispatch_requires_model_for_supervised() {
        let g = Graph::path(3);
        assert!(solve(&g, Method::SupG, None, &quick()).is_err());
        for m in [Method::Exact, Method::Dga, Method::DgaDynamic] {
            let r = solve(&g, m, None, &quick()).unwrap();
            assert_eq!(r.set.members(), vec![0, 2], "{m}");
        }
        let r = solve(&g, Method::Ga, None, &quick()).unwrap();
        assert!(r.set.is_valid(&g) && r.set.is_maximal(&g));
    }
}
