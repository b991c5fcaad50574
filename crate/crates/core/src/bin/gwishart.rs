//! Command-line front end. Exit codes: 0 success, 1 validation failure,
//! 2 bad arguments, 3 bad input file, 4 numerical failure.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgAction, Parser, Subcommand, ValueEnum};

use gwishart::io::{
    compute_scatter, load_dataset, matrix_to_rows, read_graph, read_matrix, ChainReport,
    GraphWeight, RunReport,
};
use gwishart::validate::{run_all, Scale};
use gwishart::{
    exact_graph_posterior, gwishart_mode, run_drj_chains, AlphaVariant, BlockGibbs,
    CompletionSettings, DrjConfig, EdgePrior, Engine, Error, GWishartParams, GWishartSampler,
    Graph, Matrix, RngStream, SpdMatrix,
};

#[derive(Parser)]
#[command(name = "gwishart", version, about = "G-Wishart sampling and graph structure search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Direct,
    BlockGibbs,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    NodeWise,
    CliqueIps,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    AsPrinted,
    Derived,
}

#[derive(Subcommand)]
enum Command {
    /// Draw from W_G(delta, D) and report the sample mean and variance.
    Sample {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
        #[arg(long)]
        dmat: PathBuf,
        #[arg(long)]
        iters: usize,
        #[arg(long, value_enum, default_value = "direct")]
        method: Method,
        /// Discarded sweeps; block Gibbs only.
        #[arg(long, default_value_t = 1000)]
        burnin: usize,
        #[arg(long, value_enum, default_value = "node-wise")]
        engine: EngineArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write every draw as an upper-triangle CSV row.
        #[arg(long)]
        samples: Option<PathBuf>,
    },
    /// Mode of W_G(delta, D), delta > 2.
    Mode {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
        #[arg(long)]
        dmat: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Posterior structure search by double reversible jump.
    Drj {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
        #[arg(long, conflicts_with = "dmat_identity")]
        dmat: Option<PathBuf>,
        /// Use D = I (the default when --dmat is absent).
        #[arg(long)]
        dmat_identity: bool,
        #[arg(long, default_value_t = 1.0)]
        sigma_g: f64,
        /// Iterations per chain, burn-in included.
        #[arg(long, default_value_t = 10_000)]
        iters: usize,
        #[arg(long, default_value_t = 1_000)]
        burnin: usize,
        #[arg(long, value_enum, default_value = "derived")]
        alpha_variant: VariantArg,
        #[arg(long, default_value_t = true, action = ArgAction::Set)]
        center: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        chains: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact graph posterior by enumeration (p <= 3).
    Exact {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
        #[arg(long, conflicts_with = "dmat_identity")]
        dmat: Option<PathBuf>,
        #[arg(long)]
        dmat_identity: bool,
        #[arg(long, default_value_t = true, action = ArgAction::Set)]
        center: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the validation suite.
    Validate {
        /// Tenfold fewer iterations, threefold wider tolerances.
        #[arg(long)]
        quick: bool,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(path: &Path, e: Error) -> Self {
        Failure {
            code: 3,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            e if e.is_numerical() => 4,
            Error::Io(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn load_graph(path: &Path) -> CliResult<Graph> {
    read_graph(path).map_err(|e| Failure::input(path, e))
}

/// A scale matrix file; it must be positive definite, not merely symmetric.
fn load_matrix(path: &Path) -> CliResult<SpdMatrix> {
    read_matrix(path)
        .and_then(|m| SpdMatrix::new(m.into_inner()))
        .map_err(|e| Failure::input(path, e))
}

fn scale_matrix(dmat: Option<&Path>, p: usize) -> CliResult<SpdMatrix> {
    match dmat {
        Some(path) => {
            let d = load_matrix(path)?;
            if d.dim() != p {
                return Err(Failure::input(path, Error::DimensionMismatch { expected: p, got: d.dim() }));
            }
            Ok(d)
        }
        None => Ok(SpdMatrix::identity(p)),
    }
}

fn emit(report: &RunReport, out: Option<&Path>) -> CliResult<()> {
    let json = report.to_json()?;
    match out {
        Some(path) => std::fs::write(path, json + "\n").map_err(|e| Failure::from(Error::Io(e))),
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{json}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::from(Error::Io(e))),
                _ => Ok(()),
            }
        }
    }
}

fn path_string(p: &Path) -> Option<String> {
    Some(p.display().to_string())
}

fn upper_row(k: &Matrix) -> String {
    let p = k.nrows();
    let vals: Vec<String> = (0..p)
        .flat_map(|i| (i..p).map(move |j| (i, j)))
        .map(|(i, j)| format!("{:?}", k[(i, j)]))
        .collect();
    vals.join(",")
}

#[allow(clippy::too_many_arguments)]
fn sample(
    graph: &Path,
    delta: f64,
    dmat: &Path,
    iters: usize,
    method: Method,
    burnin: usize,
    engine: EngineArg,
    seed: u64,
    out: Option<&Path>,
    samples: Option<&Path>,
) -> CliResult<()> {
    let start = Instant::now();
    let g = load_graph(graph)?;
    let d = scale_matrix(Some(dmat), g.p())?;
    let params = GWishartParams::new(delta, d)?;
    let engine = match engine {
        EngineArg::NodeWise => Engine::NodeWise,
        EngineArg::CliqueIps => Engine::CliqueIps,
    };
    let settings = CompletionSettings::with_engine(engine);
    let direct = GWishartSampler::new(&g, &params, settings)?;
    let mut rng = RngStream::new(seed);
    let mut writer = match samples {
        Some(path) => Some(BufWriter::new(File::create(path).map_err(|e| Failure::from(Error::Io(e)))?)),
        None => None,
    };

    let p = g.p();
    let mut sum = Matrix::zeros(p, p);
    let mut sum_sq = Matrix::zeros(p, p);
    let mut record = |k: &Matrix| -> CliResult<()> {
        sum += k;
        sum_sq += k.component_mul(k);
        if let Some(w) = writer.as_mut() {
            writeln!(w, "{}", upper_row(k)).map_err(|e| Failure::from(Error::Io(e)))?;
        }
        Ok(())
    };
    match method {
        Method::Direct => {
            for _ in 0..iters {
                record(direct.sample(&mut rng)?.as_matrix())?;
            }
        }
        Method::BlockGibbs => {
            let gibbs = BlockGibbs::new(&g, &params)?;
            let mut k = direct.sample(&mut rng)?.into_inner();
            for _ in 0..burnin {
                k = gibbs.step(&k, &mut rng)?.into_inner();
            }
            for _ in 0..iters {
                k = gibbs.step(&k, &mut rng)?.into_inner();
                record(&k)?;
            }
        }
    }
    if let Some(mut w) = writer {
        w.flush().map_err(|e| Failure::from(Error::Io(e)))?;
    }
    let n = iters.max(1) as f64;
    let mean = &sum / n;
    let var = &sum_sq / n - mean.component_mul(&mean);

    let mut report = RunReport::new("sample");
    report.graph_path = path_string(graph);
    report.dmat_path = path_string(dmat);
    report.delta = Some(delta);
    report.seed = Some(seed);
    report.iters = Some(iters);
    report.method = Some(
        match method {
            Method::Direct => "direct",
            Method::BlockGibbs => "block-gibbs",
        }
        .into(),
    );
    if matches!(method, Method::BlockGibbs) {
        report.burnin = Some(burnin);
    }
    report.engine = Some(
        match engine {
            Engine::NodeWise => "node-wise",
            Engine::CliqueIps => "clique-ips",
        }
        .into(),
    );
    report.p = Some(p);
    report.mean_k = Some(matrix_to_rows(&mean));
    report.var_k = Some(matrix_to_rows(&var));
    report.elapsed_seconds = start.elapsed().as_secs_f64();
    emit(&report, out)
}

fn mode(graph: &Path, delta: f64, dmat: &Path, tol: f64, out: Option<&Path>) -> CliResult<()> {
    let start = Instant::now();
    let g = load_graph(graph)?;
    let d = scale_matrix(Some(dmat), g.p())?;
    let params = GWishartParams::new(delta, d)?;
    let settings = CompletionSettings {
        tol,
        ..Default::default()
    };
    let m = gwishart_mode(&g, &params, &settings)?;
    let mut report = RunReport::new("mode");
    report.graph_path = path_string(graph);
    report.dmat_path = path_string(dmat);
    report.delta = Some(delta);
    report.tol = Some(tol);
    report.p = Some(g.p());
    report.mode = Some(matrix_to_rows(&m));
    report.elapsed_seconds = start.elapsed().as_secs_f64();
    emit(&report, out)
}

#[allow(clippy::too_many_arguments)]
fn drj(
    data: &Path,
    delta: f64,
    dmat: Option<&Path>,
    sigma_g: f64,
    iters: usize,
    burnin: usize,
    variant: VariantArg,
    center: bool,
    seed: u64,
    chains: usize,
    out: Option<&Path>,
) -> CliResult<()> {
    let start = Instant::now();
    let dataset = load_dataset(data).map_err(|e| Failure::input(data, e))?;
    let p = dataset.p();
    let prior = GWishartParams::new(delta, scale_matrix(dmat, p)?)?;
    let sc = compute_scatter(&dataset, center);
    let alpha_variant = match variant {
        VariantArg::AsPrinted => AlphaVariant::AsPrinted,
        VariantArg::Derived => AlphaVariant::Derived,
    };
    let cfg = DrjConfig {
        sigma_g,
        iters,
        burnin,
        seed,
        alpha_variant,
        ..Default::default()
    };
    let (per_chain, merged) = run_drj_chains(&sc.u, sc.n, &prior, &Graph::empty(p), &cfg, chains)?;

    let mut report = RunReport::new("drj");
    report.data_path = path_string(data);
    report.dmat_path = dmat.and_then(path_string);
    report.delta = Some(delta);
    report.sigma_g = Some(sigma_g);
    report.seed = Some(seed);
    report.iters = Some(iters);
    report.burnin = Some(burnin);
    report.chains = Some(chains.max(1));
    report.alpha_variant = Some(
        match alpha_variant {
            AlphaVariant::AsPrinted => "as-printed",
            AlphaVariant::Derived => "derived",
        }
        .into(),
    );
    report.centered = Some(center);
    report.n = Some(sc.n);
    report.p = Some(p);
    report.edge_prob = Some(matrix_to_rows(&merged.edge_prob()));
    report.accept_rate = Some(merged.accept_rate());
    report.mean_k = Some(matrix_to_rows(&merged.mean_k()));
    report.graph_freq = merged.graph_freq().map(|f| GraphWeight::from_pairs(&f));
    if per_chain.len() > 1 {
        report.per_chain = Some(
            per_chain
                .iter()
                .enumerate()
                .map(|(c, s)| ChainReport {
                    stream: c as u64,
                    edge_prob: matrix_to_rows(&s.edge_prob()),
                    accept_rate: s.accept_rate(),
                    n_recorded: s.n_recorded(),
                })
                .collect(),
        );
    }
    report.elapsed_seconds = start.elapsed().as_secs_f64();
    emit(&report, out)
}

fn exact(data: &Path, delta: f64, dmat: Option<&Path>, center: bool, out: Option<&Path>) -> CliResult<()> {
    let start = Instant::now();
    let dataset = load_dataset(data).map_err(|e| Failure::input(data, e))?;
    let p = dataset.p();
    let prior = GWishartParams::new(delta, scale_matrix(dmat, p)?)?;
    let sc = compute_scatter(&dataset, center);
    let posterior = exact_graph_posterior(&sc.u, sc.n, &prior, &EdgePrior::Uniform)?;
    let mut edge_prob = Matrix::identity(p, p);
    for (g, w) in &posterior {
        for (i, j) in g.edges() {
            edge_prob[(i, j)] += w;
            edge_prob[(j, i)] += w;
        }
    }

    let mut report = RunReport::new("exact");
    report.data_path = path_string(data);
    report.dmat_path = dmat.and_then(path_string);
    report.delta = Some(delta);
    report.centered = Some(center);
    report.n = Some(sc.n);
    report.p = Some(p);
    report.edge_prob = Some(matrix_to_rows(&edge_prob));
    report.graph_posterior = Some(GraphWeight::from_pairs(&posterior));
    report.elapsed_seconds = start.elapsed().as_secs_f64();
    emit(&report, out)
}

fn validate(quick: bool) -> CliResult<bool> {
    let scale = if quick { Scale::Quick } else { Scale::Full };
    let results = run_all(scale);
    for r in &results {
        println!("{r}");
    }
    Ok(results.iter().all(|r| r.passed))
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Sample {
            graph,
            delta,
            dmat,
            iters,
            method,
            burnin,
            engine,
            seed,
            out,
            samples,
        } => sample(
            &graph,
            delta,
            &dmat,
            iters,
            method,
            burnin,
            engine,
            seed,
            out.as_deref(),
            samples.as_deref(),
        )
        .map(|_| true),
        Command::Mode {
            graph,
            delta,
            dmat,
            tol,
            out,
        } => mode(&graph, delta, &dmat, tol, out.as_deref()).map(|_| true),
        Command::Drj {
            data,
            delta,
            dmat,
            dmat_identity: _,
            sigma_g,
            iters,
            burnin,
            alpha_variant,
            center,
            seed,
            chains,
            out,
        } => drj(
            &data,
            delta,
            dmat.as_deref(),
            sigma_g,
            iters,
            burnin,
            alpha_variant,
            center,
            seed,
            chains,
            out.as_deref(),
        )
        .map(|_| true),
        Command::Exact {
            data,
            delta,
            dmat,
            dmat_identity: _,
            center,
            out,
        } => exact(&data, delta, dmat.as_deref(), center, out.as_deref()).map(|_| true),
        Command::Validate { quick } => validate(quick),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("gwishart: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
