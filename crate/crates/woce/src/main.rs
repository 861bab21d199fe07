use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use woce::consensus::{run_woce, WoceConfig};
use woce::diversity::{UniformityMode, WeightMode};
use woce::generators::build_schedule;
use woce::harness::io::{
    read_constraints, read_labels, write_coassociation, write_constraints, write_labels,
    write_uniformity_table, LabelColumn,
};
use woce::harness::metrics::{accuracy_hungarian, nmi};
use woce::harness::synth::gen_halfring;
use woce::harness::{
    run_benchmark, sample_constraints, zscore_normalize, ExperimentConfig,
};
use woce::types::{validate_partition, ConstraintSet};

#[derive(Parser)]
#[command(name = "woce", about = "Weighted cluster-ensemble toolkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a dataset with the weighted-ensemble pipeline.
    Cluster(ClusterArgs),
    /// Sample pairwise constraints from a labeled dataset.
    GenConstraints(GenConstraintsArgs),
    /// Score a predicted labeling against ground truth.
    Eval(EvalArgs),
    /// Run a multi-run benchmark from a key=value config file.
    Benchmark(BenchmarkArgs),
    /// Generate synthetic datasets.
    #[command(subcommand)]
    Synth(SynthCommand),
}

#[derive(Args)]
struct ClusterArgs {
    /// Input data CSV.
    #[arg(long)]
    data: PathBuf,
    /// Final cluster count.
    #[arg(long)]
    k: usize,
    /// Constraint CSV with rows `i,j,must|cannot`.
    #[arg(long)]
    constraints: Option<PathBuf>,
    /// Retained feature count for the decorrelating map (0 keeps all).
    #[arg(long, default_value_t = 0)]
    d: usize,
    /// Committee size.
    #[arg(long, default_value_t = 20)]
    ensemble_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "minmax")]
    weight_mode: WeightMode,
    #[arg(long, default_value = "batch")]
    uniformity_mode: UniformityMode,
    /// Label column to strip from the data: none, last, or an index.
    #[arg(long, default_value = "none")]
    label_col: LabelColumn,
    /// Output file: one predicted label per line.
    #[arg(long)]
    out: PathBuf,
    /// Directory for the co-association matrix and uniformity table.
    #[arg(long)]
    diagnostics: Option<PathBuf>,
}

#[derive(Args)]
struct GenConstraintsArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "last")]
    label_col: LabelColumn,
    /// Percentage of instances drawn for constraint generation.
    #[arg(long)]
    percent: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Predicted labels, one per line.
    #[arg(long)]
    pred: PathBuf,
    /// Ground-truth labels, one per line.
    #[arg(long)]
    truth: PathBuf,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Plain-text key=value config file.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Subcommand)]
enum SynthCommand {
    /// Two interleaved half-circles with Gaussian radial noise.
    Halfring(HalfringArgs),
}

#[derive(Args)]
struct HalfringArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    noise: f64,
    #[arg(long)]
    seed: u64,
    /// Output CSV: x, y, label.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> woce::Result<()> {
    match cli.command {
        Command::Cluster(args) => cluster(args),
        Command::GenConstraints(args) => gen_constraints(args),
        Command::Eval(args) => eval(args),
        Command::Benchmark(args) => benchmark(args),
        Command::Synth(SynthCommand::Halfring(args)) => synth_halfring(args),
    }
}

fn cluster(args: ClusterArgs) -> woce::Result<()> {
    let ds = woce::harness::io::load_csv(&args.data, args.label_col)?;
    let normalized = zscore_normalize(&ds);
    let constraints = match &args.constraints {
        Some(path) => read_constraints(path, normalized.n_instances())?,
        None => ConstraintSet::empty(),
    };
    let cfg = WoceConfig {
        k: args.k,
        d: args.d,
        ensemble_size: args.ensemble_size,
        seed: args.seed,
        weight_mode: args.weight_mode,
        uniformity_mode: args.uniformity_mode,
    };
    let outcome = run_woce(normalized.data(), &constraints, &cfg)?;
    write_labels(&args.out, outcome.partition.labels())?;
    if let Some(dir) = &args.diagnostics {
        fs::create_dir_all(dir)?;
        write_coassociation(&dir.join("coassociation.csv"), &outcome.coassoc)?;
        let schedule = build_schedule(args.k, args.ensemble_size, args.seed)?;
        let kinds: Vec<String> = schedule.specs().iter().map(|s| s.kind.to_string()).collect();
        let k_targets: Vec<usize> = schedule.specs().iter().map(|s| s.k_t).collect();
        write_uniformity_table(
            &dir.join("uniformity.csv"),
            &kinds,
            &k_targets,
            outcome.reference.uniformities(),
            outcome.weights.weights(),
        )?;
    }
    println!(
        "clustered {} instances into {} clusters -> {}",
        normalized.n_instances(),
        outcome.partition.n_clusters(),
        args.out.display()
    );
    Ok(())
}

fn gen_constraints(args: GenConstraintsArgs) -> woce::Result<()> {
    let ds = woce::harness::io::load_csv(&args.data, args.label_col)?;
    let cs = sample_constraints(&ds, args.percent, args.seed)?;
    write_constraints(&args.out, &cs)?;
    println!(
        "wrote {} must-link and {} cannot-link pairs -> {}",
        cs.n_must(),
        cs.n_cannot(),
        args.out.display()
    );
    Ok(())
}

fn eval(args: EvalArgs) -> woce::Result<()> {
    let pred_labels = read_labels(&args.pred)?;
    let truth_labels = read_labels(&args.truth)?;
    let pred = validate_partition(&pred_labels, pred_labels.len())?;
    let truth = validate_partition(&truth_labels, truth_labels.len())?;
    let acc = accuracy_hungarian(&pred, truth.labels())?;
    let score = nmi(&pred, &truth)?;
    println!("accuracy={acc:.6} nmi={score:.6}");
    Ok(())
}

fn benchmark(args: BenchmarkArgs) -> woce::Result<()> {
    let text = fs::read_to_string(&args.config)?;
    let cfg = ExperimentConfig::from_key_values(&text)?;
    let report = run_benchmark(&cfg)?;
    print!("{}", report.render_table());
    let out = cfg
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("benchmark_report.csv"));
    fs::write(&out, report.to_csv())?;
    println!("report csv -> {}", out.display());
    Ok(())
}

fn synth_halfring(args: HalfringArgs) -> woce::Result<()> {
    let ds = gen_halfring(args.n, args.noise, args.seed)?;
    let labels = ds.labels().expect("half-ring is labeled");
    let mut out = String::new();
    for (row, &label) in ds.data().values().rows().into_iter().zip(labels) {
        use std::fmt::Write as _;
        writeln!(out, "{:.16e},{:.16e},{label}", row[0], row[1]).expect("string write");
    }
    fs::write(&args.out, out)?;
    println!("wrote {} points -> {}", args.n, args.out.display());
    Ok(())
}
