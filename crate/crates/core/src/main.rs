use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use misgnn::bench::{bench_run, er_dataset, pretrain_on_er, rows_to_csv, rows_to_markdown, BenchOptions, Dataset};
use misgnn::capacity::confusion_experiment_on;
use misgnn::dimacs::{cnf_to_mis_graph, parse_graph, write_dimacs, write_edge_list};
use misgnn::exact::{read_labels, write_labels};
use misgnn::graph::{graph_power, random_confusion_graph};
use misgnn::pipeline::{mean_bce, parse_methods, solve, train_supervised, Method, SolveConfig, TrainedModel};
use misgnn::{Error, Graph, Result};

#[derive(Parser)]
#[command(name = "misgnn", version, about = "Maximum independent set solvers and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph or a dataset directory.
    Gen(GenArgs),
    /// Convert between DIMACS, edge-list and CNF clause graphs.
    Convert(ConvertArgs),
    /// Label graphs with exact maximum independent sets (JSON lines).
    Label(LabelArgs),
    /// Solve one graph and print the result as JSON.
    Solve(SolveArgs),
    /// Train the supervised GCN on labeled graphs.
    Train(TrainArgs),
    /// Run methods over a dataset and write a comparison report.
    Bench(BenchArgs),
    /// Lower-bound the Shannon capacity of a confusion graph.
    Capacity(CapacityArgs),
}

#[derive(Args)]
struct Common {
    /// JSON solver configuration; missing fields take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configuration seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Zero out wall-clock fields so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

impl Common {
    fn config(&self) -> Result<SolveConfig> {
        let mut config = match &self.config {
            Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
            None => SolveConfig::default(),
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphKind {
    Er,
    Confusion,
    Cycle,
    Path,
    Complete,
    Star,
    Empty,
}

#[derive(Args)]
struct GenArgs {
    kind: GraphKind,
    /// Vertex count (leaf count for `star`).
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Number of graphs; more than one writes a dataset directory.
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Take the k-th strong power of the generated graph.
    #[arg(long, default_value_t = 1)]
    power: usize,
    #[arg(long, value_enum, default_value_t = Format::Dimacs)]
    format: Format,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dimacs,
    Edges,
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Dimacs)]
    to: Format,
}

#[derive(Args)]
struct LabelArgs {
    /// Dataset directory or single graph file.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value = "qubo-g")]
    method: String,
    /// Trained model, required by sup-g and sup-qubo-g.
    #[arg(long)]
    model: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Defaults to the configuration's supervised epoch count.
    #[arg(long)]
    epochs: Option<usize>,
    /// Held-out dataset for reporting BCE.
    #[arg(long, requires = "validation_labels")]
    validation_data: Option<PathBuf>,
    #[arg(long)]
    validation_labels: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    data: PathBuf,
    /// Exact labels; graphs without one are solved exactly on the fly.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, default_value = "exact,dga,qubo-g")]
    methods: String,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// CSV report path.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    markdown: Option<PathBuf>,
    /// Per-graph witness sets as JSON lines.
    #[arg(long)]
    witnesses: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CapacityArgs {
    /// Confusion graph file; otherwise a random one is drawn.
    #[arg(long, conflicts_with = "letters")]
    graph: Option<PathBuf>,
    /// Alphabet size of a random confusion graph.
    #[arg(long)]
    letters: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 3)]
    kmax: usize,
    /// Methods compared on every power (exact always runs as reference).
    #[arg(long, default_value = "exact,dga,sup-qubo-g")]
    methods: String,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    markdown: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "cnf") || text.lines().any(|l| l.trim_start().starts_with("p cnf")) {
        Ok(cnf_to_mis_graph(&text)?.0)
    } else {
        parse_graph(&text)
    }
}

fn render(g: &Graph, format: Format) -> String {
    match format {
        Format::Dimacs => write_dimacs(g),
        Format::Edges => write_edge_list(g),
    }
}

fn load_model(path: &Path) -> Result<TrainedModel> {
    TrainedModel::from_json(&fs::read_to_string(path)?)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn generate(kind: GraphKind, n: usize, p: f64, seed: u64) -> Result<Graph> {
    match kind {
        GraphKind::Er => misgnn::graph::erdos_renyi(n, p, seed),
        GraphKind::Confusion => random_confusion_graph(n, p, seed),
        GraphKind::Cycle => Graph::cycle(n),
        GraphKind::Path => Ok(Graph::path(n)),
        GraphKind::Complete => Ok(Graph::complete(n)),
        GraphKind::Star => Ok(Graph::star(n)),
        GraphKind::Empty => Ok(Graph::empty(n)),
    }
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    if a.count > 1 {
        if !matches!(a.kind, GraphKind::Er | GraphKind::Confusion) || a.power != 1 {
            return Err(Error::InvalidParameter("--count > 1 needs a random kind and --power 1".into()));
        }
        let name = stem(&a.out);
        return er_dataset(&name, a.count, a.n, a.p, a.seed)?.write_dir(&a.out);
    }
    let mut g = generate(a.kind, a.n, a.p, a.seed)?;
    if a.power > 1 {
        g = graph_power(&g, a.power)?;
    }
    fs::write(&a.out, render(&g, a.format))?;
    Ok(())
}

fn cmd_convert(a: ConvertArgs) -> Result<()> {
    let g = read_graph(&a.input)?;
    fs::write(&a.out, render(&g, a.to))?;
    Ok(())
}

fn cmd_label(a: LabelArgs) -> Result<()> {
    let config = a.common.config()?;
    let labels = Dataset::load(&a.data)?.label(&config);
    fs::write(&a.out, write_labels(&labels)?)?;
    let suboptimal = labels.iter().filter(|l| !l.optimal).count();
    println!("{}", json!({ "graphs": labels.len(), "timed_out": suboptimal }));
    Ok(())
}

fn cmd_solve(a: SolveArgs) -> Result<()> {
    let config = a.common.config()?;
    let method: Method = a.method.parse()?;
    let g = read_graph(&a.graph)?;
    let model = a.model.as_deref().map(load_model).transpose()?;
    if method.needs_model() && model.is_none() {
        return Err(Error::InvalidParameter(format!("method {method} needs --model")));
    }
    let result = solve(&g, method, model.as_ref().map(|m| &m.model), &config)?;
    let mut record = result.record(&stem(&a.graph), &g);
    if a.common.no_timing {
        record.elapsed_s = 0.0;
    }
    println!("{}", serde_json::to_string(&record)?);
    Ok(())
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let config = a.common.config()?;
    let ds = Dataset::load(&a.data)?;
    let labels = read_labels(&fs::read_to_string(&a.labels)?)?;
    let data = ds.supervised(&labels)?;
    let mut trained = train_supervised(&data, a.epochs.unwrap_or(config.epochs_supervised), &config)?;
    trained.metadata.dataset = Some(ds.descriptor.name.clone());
    fs::write(&a.out, trained.to_json()?)?;
    let validation_bce = match (&a.validation_data, &a.validation_labels) {
        (Some(d), Some(l)) => {
            let vds = Dataset::load(d)?;
            let vlabels = read_labels(&fs::read_to_string(l)?)?;
            Some(mean_bce(&trained.model, &vds.supervised(&vlabels)?, config.k_exponent)?)
        }
        _ => None,
    };
    println!(
        "{}",
        json!({
            "train_graphs": trained.metadata.train_graphs,
            "epochs": trained.metadata.epochs,
            "final_bce": trained.metadata.final_bce,
            "validation_bce": validation_bce,
        })
    );
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let config = a.common.config()?;
    let methods = parse_methods(&a.methods)?;
    let ds = Dataset::load(&a.data)?;
    let labels = a
        .labels
        .as_deref()
        .map(|p| fs::read_to_string(p).map_err(Error::from).and_then(|t| read_labels(&t)))
        .transpose()?;
    let model = a.model.as_deref().map(load_model).transpose()?;
    if let Some(m) = methods.iter().find(|m| m.needs_model()) {
        if model.is_none() {
            return Err(Error::InvalidParameter(format!("method {m} needs --model")));
        }
    }
    let options = BenchOptions {
        methods,
        model: model.as_ref().map(|m| &m.model),
        config,
        jobs: a.jobs,
    };
    let report = bench_run(&ds, labels.as_deref(), &options)?;
    let with_timing = !a.common.no_timing;
    fs::write(&a.out, report.to_csv(with_timing))?;
    if let Some(md) = &a.markdown {
        fs::write(md, report.to_markdown(with_timing))?;
    }
    if let Some(w) = &a.witnesses {
        fs::write(w, report.witnesses_jsonl(with_timing)?)?;
    }
    print!("{}", report.to_markdown(with_timing));
    Ok(())
}

fn cmd_capacity(a: CapacityArgs) -> Result<()> {
    let config = a.common.config()?;
    let g = match (&a.graph, a.letters) {
        (Some(path), _) => read_graph(path)?,
        (None, Some(letters)) => random_confusion_graph(letters, a.p, config.seed)?,
        (None, None) => return Err(Error::InvalidParameter("give --graph or --letters".into())),
    };
    let methods = parse_methods(&a.methods)?;
    let model = match &a.model {
        Some(p) => Some(load_model(p)?),
        None if methods.iter().any(|m| m.needs_model()) => {
            eprintln!("no --model given; training one on 200 labeled ER(10, 0.5) graphs");
            Some(pretrain_on_er(200, 10, 0.5, &config)?)
        }
        None => None,
    };
    let model = model.as_ref().map(|m| &m.model);
    let report = confusion_experiment_on(&g, a.kmax, &methods, model, &config)?;
    let estimate = &report.estimate;
    let rows = report.rows();
    if let Some(out) = &a.out {
        fs::write(out, rows_to_csv(&rows, !a.common.no_timing))?;
    }
    if let Some(md) = &a.markdown {
        fs::write(md, rows_to_markdown(&rows, !a.common.no_timing))?;
    }
    let words: Vec<_> = estimate.records.iter().map(|r| r.witness_words(g.num_vertices())).collect();
    println!(
        "{}",
        json!({
            "letters": g.num_vertices(),
            "capacity_lb": estimate.capacity_lb,
            "alpha": estimate.records.iter().map(|r| r.alpha_lower).collect::<Vec<_>>(),
            "optimal": estimate.records.iter().map(|r| r.optimal).collect::<Vec<_>>(),
            "truncated_at": estimate.truncated_at,
            "words": words,
        })
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Convert(a) => cmd_convert(a),
        Command::Label(a) => cmd_label(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Train(a) => cmd_train(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Capacity(a) => cmd_capacity(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            ExitCode::FAILURE
        }
    }
}
