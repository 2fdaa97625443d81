use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gwnet::core::cluster::single_linkage;
use gwnet::core::generators::{experiment_preset, normalize_max_abs, sample_collection};
use gwnet::core::invariants::{
    eccentricity, interleaving_distance, size_p, Direction, LevelKind, SizeCurve,
};
use gwnet::core::Order;
use gwnet::emit::emit_outputs;
use gwnet::io::{collect_inputs, load_network, read_dissimilarity_csv, read_sbm_spec, write_network_json};
use gwnet::pipeline::{check_sizes, compare_all, CompareOptions, Method};

/// Compare directed weighted measure networks.
#[derive(Parser)]
#[command(name = "gwnet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample networks from a preset experiment or an SBM spec file into
    /// `OUT/networks/`, with a label/class index in `OUT/labels.csv`.
    Generate(GenerateArgs),
    /// Pairwise dissimilarities of a set of networks.
    Compare(CompareArgs),
    /// Single-linkage clustering of a dissimilarity CSV.
    Cluster(ClusterArgs),
    /// Size, eccentricity or size-function invariants of one network.
    Invariant(InvariantArgs),
    /// Interleaving distance between the size functions of two spheres.
    SphereBound(SphereArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Preset name (table1 or table3).
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    preset: Option<String>,
    /// JSON file with means, variances, block_sizes and seed.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    per_class: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Divide each network by its largest absolute weight.
    #[arg(long)]
    normalize: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    /// Network files (.json or .csv) or directories containing them.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Method::RtlbMax)]
    method: Method,
    #[arg(long, default_value = "2", value_parser = parse_order)]
    p: Order,
    #[arg(long, default_value_t = 20.0)]
    lambda: f64,
    #[arg(long, env = "GWNET_WORKERS")]
    workers: Option<usize>,
    /// Also cluster the result and write the dendrogram.
    #[arg(long)]
    cluster: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum InvariantKind {
    Size,
    Ecc,
    Subsize,
    Supsize,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Out,
    In,
}

#[derive(Args)]
struct InvariantArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = InvariantKind::Size)]
    kind: InvariantKind,
    #[arg(long, default_value = "2", value_parser = parse_order)]
    p: Order,
    #[arg(long, value_enum, default_value_t = DirectionArg::Out)]
    direction: DirectionArg,
    /// Directory for curve CSVs; curves go to stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SphereArgs {
    #[arg(long)]
    n1: usize,
    #[arg(long)]
    n2: usize,
    #[arg(long, default_value = "1", value_parser = parse_order)]
    p: Order,
}

fn parse_order(s: &str) -> Result<Order, String> {
    let v = match s.to_ascii_lowercase().as_str() {
        "inf" | "infinity" => f64::INFINITY,
        t => t.parse::<f64>().map_err(|e| e.to_string())?,
    };
    Order::new(v).map_err(|e| e.to_string())
}

fn load_all(inputs: &[PathBuf]) -> anyhow::Result<Vec<(String, gwnet::core::MeasureNetwork)>> {
    let files = collect_inputs(inputs)?;
    if files.is_empty() {
        bail!("no network files found");
    }
    let nets = files
        .into_iter()
        .map(|(name, path)| Ok((name, load_network(&path)?)))
        .collect::<gwnet::Result<Vec<_>>>()?;
    check_sizes(&nets)?;
    Ok(nets)
}

fn generate(args: GenerateArgs) -> anyhow::Result<ExitCode> {
    let specs = match (&args.preset, &args.spec) {
        (Some(name), _) => experiment_preset(name)?,
        (None, Some(path)) => vec![read_sbm_spec(path)?],
        (None, None) => bail!("one of --preset or --spec is required"),
    };
    let nets = args.out.join("networks");
    fs::create_dir_all(&nets).with_context(|| format!("creating {}", nets.display()))?;
    let mut index = csv::Writer::from_path(args.out.join("labels.csv"))?;
    index.write_record(["label", "class"])?;
    for item in sample_collection(&specs, args.per_class, args.seed)? {
        let net = if args.normalize { normalize_max_abs(&item.network)? } else { item.network };
        write_network_json(&nets.join(format!("{}.json", item.label)), &net)?;
        index.write_record([item.label, (item.class + 1).to_string()])?;
    }
    index.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn compare(args: CompareArgs) -> anyhow::Result<ExitCode> {
    let nets = load_all(&args.inputs)?;
    let opts = CompareOptions { method: args.method, p: args.p, lambda: args.lambda, workers: args.workers };
    let result = compare_all(&nets, &opts)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let path = args.out.join("dissimilarity.csv");
    gwnet::io::write_labelled_matrix(fs::File::create(&path)?, &result.labels, &result.values)?;
    fs::write(args.out.join("report.json"), serde_json::to_string_pretty(&result)? + "\n")?;
    for f in &result.failures {
        eprintln!("failed: {} vs {}: {}", f.left, f.right, f.error);
    }
    if !result.is_complete() {
        return Ok(ExitCode::from(1));
    }
    if args.cluster {
        let d = result.dissimilarity()?;
        emit_outputs(&args.out, None, Some(&single_linkage(&d)), &[])?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cluster(args: ClusterArgs) -> anyhow::Result<ExitCode> {
    let d = read_dissimilarity_csv(&args.input)?;
    let g = single_linkage(&d);
    emit_outputs(&args.out, None, Some(&g), &[])?;
    println!("{}", g.to_newick());
    Ok(ExitCode::SUCCESS)
}

fn print_curve(curve: &SizeCurve) -> anyhow::Result<()> {
    gwnet::io::write_curve_csv(std::io::stdout().lock(), curve)?;
    Ok(())
}

fn invariant(args: InvariantArgs) -> anyhow::Result<ExitCode> {
    let x = load_network(&args.input)?;
    let direction = match args.direction {
        DirectionArg::Out => Direction::Out,
        DirectionArg::In => Direction::In,
    };
    let kind = match args.kind {
        InvariantKind::Size => {
            println!("{}", size_p(&x, args.p));
            return Ok(ExitCode::SUCCESS);
        }
        InvariantKind::Ecc => {
            let labels: Vec<String> =
                x.labels().map_or_else(|| (0..x.len()).map(|i| i.to_string()).collect(), <[String]>::to_vec);
            for (l, v) in labels.iter().zip(eccentricity(&x, args.p, direction).values) {
                println!("{l},{v}");
            }
            return Ok(ExitCode::SUCCESS);
        }
        InvariantKind::Subsize => LevelKind::Sublevel,
        InvariantKind::Supsize => LevelKind::Superlevel,
    };
    let curve = SizeCurve::of_network(&x, args.p, kind)?;
    match &args.out {
        Some(dir) => {
            let name = args.input.file_stem().map_or("network".into(), |s| s.to_string_lossy().into_owned());
            emit_outputs(dir, None, None, &[(name, curve)])?;
        }
        None => print_curve(&curve)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn sphere_bound(args: SphereArgs) -> anyhow::Result<ExitCode> {
    let f = SizeCurve::sphere(args.n1, args.p)?;
    let g = SizeCurve::sphere(args.n2, args.p)?;
    let d = interleaving_distance(&f, &g)?;
    println!("{d}");
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Compare(a) => compare(a),
        Command::Cluster(a) => cluster(a),
        Command::Invariant(a) => invariant(a),
        Command::SphereBound(a) => sphere_bound(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

