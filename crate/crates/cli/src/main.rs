use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use optsearch::domset::{InstanceDoc, MetricInstance};
use optsearch::experiment::{
    run_experiment, write_raw_tsv, write_results_tsv, ExperimentSpec, Method, QueryConfig,
    Workload, WorkloadConfig,
};
use optsearch::{
    build_distance_matrix, build_elimination_graph, exact_domset, export_ilp, graph_stats,
    graph_to_metric, knn_hardness_instance, DirectedGraph, DistanceMatrix, GraphDoc,
    QueryDistances, QuerySpec, SolverLimits,
};

#[derive(Parser)]
#[command(
    name = "optsearch",
    version,
    about = "Optimal distance-computation counts for metric search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep k over a workload and tabulate distance computations per method.
    Run(RunArgs),
    /// Solve the minimum dominating set of an elimination graph.
    Optimum(OptimumArgs),
    /// Convert between search instances and dominating-set instances.
    Reduce(ReduceArgs),
    /// Write the 0/1 integer program of a graph in LP format.
    ExportLp(ExportLpArgs),
    /// Render a results or gap-trace TSV as SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
struct LimitArgs {
    /// Wall-clock budget for each solver run, in seconds.
    #[arg(long, value_name = "SECS")]
    time_budget: Option<f64>,
    /// Branch-and-bound node budget for each solver run.
    #[arg(long, value_name = "COUNT")]
    node_budget: Option<u64>,
}

impl LimitArgs {
    fn limits(&self) -> Result<SolverLimits> {
        let time_budget = match self.time_budget {
            Some(s) if !(s >= 0.0 && s.is_finite()) => bail!("invalid time budget {s}"),
            Some(s) => Some(Duration::from_secs_f64(s)),
            None => None,
        };
        Ok(SolverLimits {
            time_budget,
            node_budget: self.node_budget,
            ..SolverLimits::default()
        })
    }
}

#[derive(Args)]
struct RunArgs {
    /// Workload JSON.
    #[arg(long)]
    workload: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "1,3,5,7,9,11")]
    k: Vec<usize>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "optimum,oracle,aesa,iaesa2,gaesa,random"
    )]
    methods: Vec<String>,
    /// Number of withheld queries; overrides the workload's sample count.
    #[arg(long)]
    queries: Option<usize>,
    /// Master seed for every derived random stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use lower bounds only.
    #[arg(long)]
    no_upper_bounds: bool,
    #[command(flatten)]
    limits: LimitArgs,
    /// Output directory for results.tsv.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also write per-query rows to raw.tsv.
    #[arg(long)]
    raw: bool,
}

#[derive(Args)]
struct QueryArgs {
    /// Workload JSON; the query is one of its withheld queries.
    #[arg(long, conflicts_with = "instance")]
    workload: Option<PathBuf>,
    /// Explicit-metric instance JSON as written by `reduce from-domset`.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Position of the query among the workload's queries.
    #[arg(long, default_value_t = 0)]
    query: usize,
    /// Range radius.
    #[arg(long, conflicts_with = "k")]
    radius: Option<f64>,
    /// Use the k-th neighbour distance as radius, lower bounds only.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Use lower bounds only for range queries.
    #[arg(long)]
    no_upper_bounds: bool,
}

#[derive(Args)]
struct OptimumArgs {
    /// Graph JSON (`{n, edges}`), e.g. from `reduce to-domset`.
    #[arg(long, conflicts_with_all = ["workload", "instance"])]
    graph: Option<PathBuf>,
    #[command(flatten)]
    query: QueryArgs,
    #[command(flatten)]
    limits: LimitArgs,
    /// Output directory for result.json and gap.tsv.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    ToDomset,
    FromDomset,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(value_enum)]
    direction: Direction,
    /// Undirected graph JSON (from-domset).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Build the 1-NN instance instead of the range instance (from-domset).
    #[arg(long)]
    knn: bool,
    #[command(flatten)]
    query: QueryArgs,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportLpArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// results.tsv or gap.tsv.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Optimum(a) => cmd_optimum(a),
        Command::Reduce(a) => cmd_reduce(a),
        Command::ExportLp(a) => cmd_export_lp(a),
        Command::Plot(a) => cmd_plot(a),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_graph(path: &Path) -> Result<GraphDoc> {
    serde_json::from_str(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn read_instance(path: &Path) -> Result<InstanceDoc> {
    serde_json::from_str(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn read_workload(path: &Path) -> Result<WorkloadConfig> {
    WorkloadConfig::from_json(&read_text(path)?)
        .with_context(|| format!("parsing {}", path.display()))
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            Ok(out.flush()?)
        }
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn cmd_run(a: RunArgs) -> Result<()> {
    let mut workload = read_workload(&a.workload)?;
    if let Some(count) = a.queries {
        workload.queries = match workload.queries {
            QueryConfig::Sample { seed, .. } => QueryConfig::Sample { count, seed },
            QueryConfig::Indices { .. } => bail!("--queries conflicts with explicit query indices"),
        };
    }
    let methods = a
        .methods
        .iter()
        .map(|m| m.parse::<Method>())
        .collect::<optsearch::Result<Vec<_>>>()?;
    let spec = ExperimentSpec {
        workload,
        k_values: a.k,
        methods,
        use_upper: !a.no_upper_bounds,
        limits: a.limits.limits()?,
        seed: a.seed,
    };
    log::info!(
        "running {} methods over k = {:?}",
        spec.methods.len(),
        spec.k_values
    );
    let report = run_experiment(&spec)?;
    create_dir(&a.out)?;
    let path = a.out.join("results.tsv");
    write_results_tsv(&report.cells, fs::File::create(&path)?)?;
    log::info!("wrote {}", path.display());
    if a.raw {
        let path = a.out.join("raw.tsv");
        write_raw_tsv(&report.raw, fs::File::create(&path)?)?;
        log::info!("wrote {}", path.display());
    }
    Ok(())
}

/// Matrix, query distances and query mode named by the arguments.
fn resolve_query(a: &QueryArgs) -> Result<(DistanceMatrix, QueryDistances, QuerySpec)> {
    let (matrix, qd, default_spec) = if let Some(path) = &a.instance {
        let inst = MetricInstance::from_doc(read_instance(path)?)?;
        let qd = QueryDistances::from_query(&inst.dataset, &inst.query_object())?;
        let spec = match inst.k {
            Some(k) => QuerySpec::knn_optimum(k),
            None => QuerySpec::range(inst.r),
        };
        (build_distance_matrix(&inst.dataset)?, qd, Some(spec))
    } else if let Some(path) = &a.workload {
        let w = Workload::load(&read_workload(path)?, a.seed)?;
        let qd = w.query_distances(a.query)?;
        let spec = w.fixed_radius.map(QuerySpec::range);
        ((*w.matrix).clone(), qd, spec)
    } else {
        bail!("one of --graph, --workload or --instance is required");
    };
    let spec = match (a.radius, a.k) {
        (Some(r), _) => QuerySpec::range(r).with_upper(!a.no_upper_bounds),
        (None, Some(k)) => QuerySpec::knn_optimum(k),
        (None, None) => match default_spec {
            Some(s) if s.use_upper => s.with_upper(!a.no_upper_bounds),
            Some(s) => s,
            None => bail!("--radius or --k is required"),
        },
    };
    Ok((matrix, qd, spec))
}

fn cmd_optimum(a: OptimumArgs) -> Result<()> {
    let graph: DirectedGraph = match &a.graph {
        Some(path) => read_graph(path)?.to_directed()?,
        None => {
            let (dm, qd, spec) = resolve_query(&a.query)?;
            build_elimination_graph(&dm, &qd, spec)?.graph
        }
    };
    let stats = graph_stats(&graph);
    log::info!("graph: {} vertices, {} edges", stats.n, stats.edges);
    let res = exact_domset(&graph, a.limits.limits()?);
    create_dir(&a.out)?;
    let json = serde_json::to_string_pretty(&res)?;
    fs::write(a.out.join("result.json"), json + "\n")?;
    res.write_gap_tsv(fs::File::create(a.out.join("gap.tsv"))?)?;
    println!(
        "gamma in [{}, {}]{}; {} nodes",
        res.lower_bound,
        res.upper_bound,
        if res.proven_optimal { " (proven)" } else { "" },
        res.nodes_explored
    );
    Ok(())
}

fn cmd_reduce(a: ReduceArgs) -> Result<()> {
    let json = match a.direction {
        Direction::ToDomset => {
            let (dm, qd, spec) = resolve_query(&a.query)?;
            let g = build_elimination_graph(&dm, &qd, spec)?;
            serde_json::to_string_pretty(&g.to_doc())?
        }
        Direction::FromDomset => {
            let Some(path) = &a.graph else {
                bail!("--graph is required for from-domset");
            };
            let g = read_graph(path)?.to_undirected()?;
            let inst = if a.knn {
                knn_hardness_instance(&g)?
            } else {
                graph_to_metric(&g)?
            };
            serde_json::to_string_pretty(&inst.to_doc())?
        }
    };
    write_output(a.out.as_deref(), (json + "\n").as_bytes())
}

fn cmd_export_lp(a: ExportLpArgs) -> Result<()> {
    let g = read_graph(&a.graph)?.to_directed()?;
    let mut buf = Vec::new();
    export_ilp(&g, &mut buf)?;
    write_output(a.out.as_deref(), &buf)
}

fn cmd_plot(a: PlotArgs) -> Result<()> {
    let svg = optsearch::plot::render_tsv(&read_text(&a.input)?)?;
    fs::write(&a.out, svg).with_context(|| format!("writing {}", a.out.display()))
}
