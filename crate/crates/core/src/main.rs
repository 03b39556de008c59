use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qscore::bench::{find_qscore, SearchMode};
use qscore::circuit::Connectivity;
use qscore::config::{BackendKind, BackendSpec, RunConfig};
use qscore::graphs::{expected_max_cut, fit_lambda, GraphFamily, ScalingFit, DEFAULT_ENUMERATION_LIMIT};
use qscore::optim::Method;
use qscore::plot::{load_series, render_svg};
use qscore::{plugin, Error};

/// Q-score benchmark of a quantum backend on QAOA-MaxCut.
#[derive(Parser)]
#[command(name = "qscore", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Search for the largest size at which the backend passes.
    Run(RunArgs),
    /// Fit the optimal-cut scaling coefficient by exact enumeration.
    FitLambda(FitArgs),
    /// Draw beta(n) from one or more report CSV files as SVG.
    Plot(PlotArgs),
    /// Answer one plugin request on stdin/stdout with a built-in backend.
    ServePlugin(ServeArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// perfect | noisy:eps1=A,eps2=B | random-stub | exact-stub | external:<command>
    #[arg(long)]
    backend: Option<BackendSpec>,
    #[arg(long)]
    family: Option<GraphFamily>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    graphs: Option<usize>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    opt_shots: Option<u64>,
    #[arg(long)]
    beta_star: Option<f64>,
    /// Normalization coefficient; the family's closed form by default.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    size_min: Option<usize>,
    #[arg(long)]
    size_limit: Option<usize>,
    /// iterative | dichotomic
    #[arg(long, value_parser = parse_search)]
    search: Option<SearchMode>,
    /// all_to_all | grid | grid(RxC) | line(N) | coupling(a-b;c-d)
    #[arg(long)]
    connectivity: Option<Connectivity>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Per-size wall-clock budget in seconds.
    #[arg(long)]
    time_budget: Option<f64>,
    #[arg(long)]
    max_failure_fraction: Option<f64>,
    /// cobyla | nelder_mead
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
    #[arg(long)]
    max_evaluations: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    initial_step: Option<f64>,
    #[arg(long)]
    init_low: Option<f64>,
    #[arg(long)]
    init_high: Option<f64>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Plugin timeout per request in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long)]
    max_qubits: Option<usize>,
    #[arg(long)]
    samples_per_trajectory: Option<usize>,
    /// Report CSV path.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Per-graph raw data path.
    #[arg(long)]
    raw: Option<PathBuf>,
    /// Per-evaluation optimizer trace path.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Print the resolved configuration and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long, default_value = "erdos_renyi(0.5)")]
    family: GraphFamily,
    #[arg(long, default_value_t = 5)]
    n_min: usize,
    #[arg(long, default_value_t = 20)]
    n_max: usize,
    #[arg(long, default_value_t = 200)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
    enumeration_limit: usize,
    #[arg(long)]
    workers: Option<usize>,
    /// Fit CSV path.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(required = true)]
    reports: Vec<PathBuf>,
    #[arg(long, short)]
    output: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    beta_star: f64,
}

#[derive(Args)]
struct ServeArgs {
    /// Any built-in backend.
    #[arg(long, default_value = "perfect")]
    backend: BackendSpec,
}

fn parse_search(s: &str) -> Result<SearchMode, String> {
    match s {
        "iterative" => Ok(SearchMode::Iterative),
        "dichotomic" => Ok(SearchMode::Dichotomic),
        _ => Err(format!("unknown search mode '{s}'")),
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    match s {
        "cobyla" => Ok(Method::Cobyla),
        "nelder_mead" | "nelder-mead" => Ok(Method::NelderMead),
        _ => Err(format!("unknown optimizer '{s}'")),
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn resolve(args: RunArgs) -> qscore::Result<(RunConfig, bool)> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(b) = args.backend {
        // the short form carries the kind and its own arguments only
        cfg.backend.kind = b.kind;
        if b.kind == BackendKind::Noisy {
            cfg.backend.eps1 = b.eps1;
            cfg.backend.eps2 = b.eps2;
        }
        if b.kind == BackendKind::External {
            cfg.backend.command = b.command;
        }
    }
    let b = &mut cfg.bench;
    set(&mut b.family, args.family);
    set(&mut b.depth, args.depth);
    set(&mut b.graphs_per_size, args.graphs);
    set(&mut b.shots, args.shots);
    if args.opt_shots.is_some() {
        b.opt_shots = args.opt_shots;
    }
    set(&mut b.beta_star, args.beta_star);
    if args.lambda.is_some() {
        b.lambda = args.lambda;
    }
    set(&mut b.size_min, args.size_min);
    set(&mut b.size_limit, args.size_limit);
    set(&mut b.search, args.search);
    set(&mut b.connectivity, args.connectivity);
    set(&mut b.master_seed, args.seed);
    if args.workers.is_some() {
        b.workers = args.workers;
    }
    if args.time_budget.is_some() {
        b.time_budget_s = args.time_budget;
    }
    set(&mut b.max_failure_fraction, args.max_failure_fraction);
    let o = &mut b.optimizer;
    set(&mut o.method, args.method);
    set(&mut o.max_evaluations, args.max_evaluations);
    set(&mut o.tolerance, args.tolerance);
    set(&mut o.initial_step, args.initial_step);
    set(&mut o.init_low, args.init_low);
    set(&mut o.init_high, args.init_high);
    set(&mut o.restarts, args.restarts);
    let k = &mut cfg.backend;
    set(&mut k.timeout_s, args.timeout);
    set(&mut k.max_qubits, args.max_qubits);
    set(&mut k.samples_per_trajectory, args.samples_per_trajectory);
    if args.report.is_some() {
        cfg.output.report = args.report;
    }
    if args.raw.is_some() {
        cfg.output.raw = args.raw;
    }
    if args.trace.is_some() {
        cfg.output.trace = args.trace;
    }
    cfg.validate()?;
    Ok((cfg, args.print_config))
}

fn write_file(path: &Path, text: &str) -> qscore::Result<()> {
    std::fs::write(path, text)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let (cfg, print_only) = resolve(args).map_err(Failure::Usage)?;
    if print_only {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    let backend = cfg.backend.build().map_err(Failure::Usage)?;
    let report = find_qscore(&cfg.bench, &backend).map_err(Failure::Run)?;

    if let Some(p) = &cfg.output.report {
        write_file(p, &report.to_csv()).map_err(Failure::Run)?;
        // the resolved configuration travels with the report
        write_file(&p.with_extension("toml"), &cfg.to_toml()).map_err(Failure::Run)?;
    }
    if let Some(p) = &cfg.output.raw {
        write_file(p, &report.to_raw()).map_err(Failure::Run)?;
    }
    if let Some(p) = &cfg.output.trace {
        let mut text = report.trace_lines().join("\n");
        text.push('\n');
        write_file(p, &text).map_err(Failure::Run)?;
    }
    println!("backend: {}", cfg.backend);
    print!("{}", report.summary());
    Ok(())
}

fn cmd_fit_lambda(args: FitArgs) -> Result<(), Failure> {
    if args.n_min > args.n_max {
        return Err(Failure::Usage(Error::Parameter("n_min exceeds n_max".into())));
    }
    if args.n_max > args.enumeration_limit {
        return Err(Failure::Usage(Error::Capability(format!(
            "n_max = {} exceeds the enumeration limit {}",
            args.n_max, args.enumeration_limit
        ))));
    }
    args.family.validate().map_err(Failure::Usage)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(
            args.workers
                .or_else(|| std::env::var(qscore::bench::WORKERS_ENV).ok()?.parse().ok())
                .unwrap_or(0),
        )
        .build()
        .map_err(|e| Failure::Usage(Error::Parameter(e.to_string())))?;
    let sizes: Vec<usize> = (args.n_min..=args.n_max).filter(|&n| args.family.admits(n)).collect();
    let mut means = Vec::new();
    println!("n,mean_max_cut,stderr");
    for &n in &sizes {
        let est = pool
            .install(|| expected_max_cut(n, args.family, args.instances, args.seed, args.enumeration_limit))
            .map_err(Failure::Usage)?;
        println!("{n},{:.6},{:.6}", est.mean, est.stderr);
        means.push((n, est.mean));
    }
    let fit: ScalingFit = fit_lambda(&means, args.family, args.instances).map_err(Failure::Run)?;
    let csv = format!("{}\n{}\n", ScalingFit::CSV_HEADER, fit.csv_row());
    print!("{csv}");
    println!("coefficient {:.6}, r-value {:.6}", fit.coefficient, fit.r_value);
    if let Some(p) = &args.output {
        write_file(p, &csv).map_err(Failure::Run)?;
    }
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> Result<(), Failure> {
    let series = args
        .reports
        .iter()
        .map(|p| load_series(p))
        .collect::<qscore::Result<Vec<_>>>()
        .map_err(Failure::Usage)?;
    let svg = render_svg(&series, args.beta_star).map_err(Failure::Usage)?;
    write_file(&args.output, &svg).map_err(Failure::Run)
}

fn cmd_serve(args: ServeArgs) -> Result<(), Failure> {
    if args.backend.kind == BackendKind::External {
        return Err(Failure::Usage(Error::Parameter("serve-plugin needs a built-in backend".into())));
    }
    let backend = args.backend.build().map_err(Failure::Usage)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    plugin::serve(&backend, &mut io::stdin().lock(), &mut out).map_err(Failure::Run)?;
    out.flush().map_err(|e| Failure::Run(e.into()))
}

enum Failure {
    Usage(Error),
    Run(Error),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Cmd::Run(a) => cmd_run(a),
        Cmd::FitLambda(a) => cmd_fit_lambda(a),
        Cmd::Plot(a) => cmd_plot(a),
        Cmd::ServePlugin(a) => cmd_serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
