//! Command-line driver: experiment sweeps, circuit validation and single
//! problem solves. Every run prints a `key=value` manifest.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use scsk::analysis::empirical_max_error;
use scsk::analysis::monte_carlo_sng;
use scsk::bitstream::sng::mix64;
use scsk::circuits::{max_stream_traced, TraceWriter};
use scsk::estimators::io::{read_problem, write_estimate};
use scsk::estimators::{solve_with_lambda_prime, Backend, EstimatorOutput, FixedPointFormat, ScParams, SolverConfig};
use scsk::harness::config::{parse_list, ITERATIONS_PER_ROW};
use scsk::harness::{run_rmse_sweep, run_shrink_error_sweep, ExperimentConfig, ShrinkSweepConfig, Table};
use scsk::{Error, SngConfig, StreamFactory};

#[derive(Parser)]
#[command(name = "scsk", version, about = "Stochastic computing Sparse Kaczmarz simulator")]
struct Cli {
    /// `key=value` file applied before the command-line flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// RMSE of every backend over random compressive-sensing problems.
    RmseSweep(RmseArgs),
    /// Closed-form and empirical error tables of the SC shrink block.
    ShrinkError(ShrinkArgs),
    /// Maximum circuit error rate against the closed form.
    MaxValidate(MaxArgs),
    /// Solve one problem file with a chosen backend.
    Solve(SolveArgs),
}

/// Circuit and solver flags shared by `rmse-sweep` and `solve`.
#[derive(Args)]
struct CircuitFlags {
    /// Bitstream length.
    #[arg(long = "L")]
    len: Option<String>,
    /// Register length of the maximum blocks.
    #[arg(long = "M")]
    max_capacity: Option<String>,
    /// Carry store depth.
    #[arg(long = "D")]
    carry_depth: Option<String>,
    /// Decorrelation delay in cycles.
    #[arg(long)]
    delay: Option<String>,
    /// LFSR width of the stream generators.
    #[arg(long)]
    sng_width: Option<String>,
    /// Iteration count, or `auto` for 10 per row.
    #[arg(long = "N")]
    iterations: Option<String>,
    #[arg(long)]
    lambda_prime: Option<String>,
    #[arg(long)]
    output: Option<String>,
}

impl CircuitFlags {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("L", &self.len),
            ("M", &self.max_capacity),
            ("D", &self.carry_depth),
            ("delay", &self.delay),
            ("sng-width", &self.sng_width),
            ("N", &self.iterations),
            ("lambda-prime", &self.lambda_prime),
            ("output", &self.output),
        ]
    }
}

#[derive(Args)]
struct RmseArgs {
    #[arg(long)]
    seed: String,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    m: Option<String>,
    /// Comma-separated sparsity levels.
    #[arg(long)]
    z: Option<String>,
    /// Measurement SNR in dB, or `inf`.
    #[arg(long)]
    snr_db: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    /// Comma-separated fixed-point word widths.
    #[arg(long)]
    widths: Option<String>,
    /// Run the stochastic backend (`true`/`false`).
    #[arg(long)]
    stochastic: Option<String>,
    #[command(flatten)]
    circuit: CircuitFlags,
}

#[derive(Args)]
struct ShrinkArgs {
    /// Register lengths of the table over P_A.
    #[arg(long = "M", default_value = "5,10,15,20,30")]
    capacities: String,
    /// Register lengths of the expected/maximum table.
    #[arg(long = "summary-M", default_value = "2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20,21,22,23,24,25,26,27,28,29,30")]
    summary_capacities: String,
    #[arg(long, default_value_t = 0.2)]
    pa_min: f64,
    #[arg(long, default_value_t = 0.5)]
    pa_max: f64,
    #[arg(long, default_value_t = 61)]
    pa_points: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long = "L", default_value_t = 100_000)]
    len: usize,
    /// Enables the empirical columns.
    #[arg(long)]
    seed: Option<u64>,
    /// Quadrature intervals of the expected error.
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct MaxArgs {
    #[arg(long)]
    seed: u64,
    /// Comma-separated values of the first input.
    #[arg(long, default_value = "0.2,0.3,0.4,0.45")]
    pa: String,
    #[arg(long, default_value_t = 0.5)]
    pb: f64,
    #[arg(long = "M", default_value = "5,10,20")]
    capacities: String,
    #[arg(long = "L", default_value_t = 1_000_000)]
    len: usize,
    #[arg(long, default_value = "max_validate.dat")]
    output: PathBuf,
    /// Per-cycle trace of the first configuration.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    trace_len: usize,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    problem: PathBuf,
    /// `float`, `fixed<W>` or `sc`.
    #[arg(long)]
    backend: String,
    #[arg(long)]
    seed: Option<String>,
    #[command(flatten)]
    circuit: CircuitFlags,
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

fn base_config(path: Option<&Path>, start: ExperimentConfig) -> std::result::Result<ExperimentConfig, Failure> {
    let mut cfg = start;
    if let Some(path) = path {
        let text = std::fs::read_to_string(path)?;
        cfg.apply_kv(&text).map_err(usage)?;
    }
    Ok(cfg)
}

fn apply(cfg: &mut ExperimentConfig, pairs: &[(&str, &Option<String>)]) -> Outcome {
    for (key, value) in pairs {
        if let Some(v) = value {
            cfg.set(key, v).map_err(usage)?;
        }
    }
    Ok(())
}

fn emit(manifest: &str) {
    print!("{manifest}");
}

fn rmse_sweep(args: RmseArgs, config: Option<&Path>) -> Outcome {
    let mut cfg = base_config(config, ExperimentConfig::default())?;
    let seed = Some(args.seed.clone());
    let mut pairs = vec![
        ("seed", &seed),
        ("n", &args.n),
        ("m", &args.m),
        ("z", &args.z),
        ("snr-db", &args.snr_db),
        ("trials", &args.trials),
        ("widths", &args.widths),
        ("stochastic", &args.stochastic),
    ];
    pairs.extend(args.circuit.pairs());
    apply(&mut cfg, &pairs)?;
    cfg.validate().map_err(usage)?;

    let report = run_rmse_sweep(&cfg)?;
    report.table(&cfg).write_file(&cfg.output)?;
    for e in &report.exclusions {
        eprintln!("excluded: {e}");
    }
    let mut m = String::from("command=rmse-sweep\n");
    m.push_str(&cfg.to_kv());
    for r in &report.rows {
        writeln!(m, "z{}.used={}", r.z, r.used).unwrap();
        writeln!(m, "z{}.excluded={}", r.z, r.excluded).unwrap();
    }
    let manifest_path = format!("{}.manifest", cfg.output.display());
    std::fs::write(&manifest_path, &m)?;
    writeln!(m, "manifest={manifest_path}").unwrap();
    emit(&m);
    Ok(())
}

fn shrink_error(args: ShrinkArgs) -> Outcome {
    let mut cfg = ShrinkSweepConfig {
        capacities: parse_list("M", &args.capacities).map_err(usage)?,
        summary_capacities: parse_list("summary-M", &args.summary_capacities).map_err(usage)?,
        pa_min: args.pa_min,
        pa_max: args.pa_max,
        pa_points: args.pa_points,
        trials: args.trials,
        len: args.len,
        seed: args.seed,
        ..Default::default()
    };
    if let Some(r) = args.resolution {
        cfg.resolution = r;
    }
    let tables = run_shrink_error_sweep(&cfg)?;
    std::fs::create_dir_all(&args.out_dir)?;
    let over_pa = args.out_dir.join("PeForL.dat");
    let summary = args.out_dir.join("MaxAndExpectedPe.dat");
    tables.over_pa.write_file(&over_pa)?;
    tables.summary.write_file(&summary)?;

    let mut m = String::from("command=shrink-error\n");
    writeln!(m, "M={}", args.capacities).unwrap();
    writeln!(m, "summary-M={}", args.summary_capacities).unwrap();
    writeln!(m, "pa-min={}\npa-max={}\npa-points={}", cfg.pa_min, cfg.pa_max, cfg.pa_points).unwrap();
    writeln!(m, "trials={}\nL={}\nresolution={}", cfg.trials, cfg.len, cfg.resolution).unwrap();
    writeln!(m, "seed={}", cfg.seed.map_or("none".into(), |s| s.to_string())).unwrap();
    writeln!(m, "output-over-pa={}\noutput-summary={}", over_pa.display(), summary.display()).unwrap();
    emit(&m);
    Ok(())
}

fn max_validate(args: MaxArgs) -> Outcome {
    let pas: Vec<f64> = parse_list("pa", &args.pa).map_err(usage)?;
    let caps: Vec<u32> = parse_list("M", &args.capacities).map_err(usage)?;
    if pas.is_empty() || caps.is_empty() {
        return Err(Failure::Usage("--pa and --M need at least one value".into()));
    }
    let cols = ["P_A", "P_B", "M", "rate", "theory", "binomial_se", "z", "batch_se", "batch_z"];
    let mut table = Table::new(cols.iter().map(|c| c.to_string()).collect())
        .comment("excess-one rate of the maximum circuit against the closed form")
        .comment(format!("L={} seed={}", args.len, args.seed));
    let mut index = 0u64;
    for &m in &caps {
        for &pa in &pas {
            let e = empirical_max_error(pa, args.pb, m, args.len, mix64(args.seed ^ index))?;
            index += 1;
            table.push(vec![
                pa,
                args.pb,
                m as f64,
                e.rate,
                e.theory,
                e.binomial_se,
                e.z_score(),
                e.batch_se,
                e.batch_z_score(),
            ])?;
        }
    }
    table.write_file(&args.output)?;

    if let Some(path) = &args.trace {
        let mut streams = StreamFactory::new(&monte_carlo_sng(), mix64(args.seed))?;
        let a = streams.unipolar(pas[0], args.trace_len)?;
        let b = streams.unipolar(args.pb, args.trace_len)?;
        let mut w = TraceWriter::new(BufWriter::new(File::create(path)?));
        max_stream_traced(&a, &b, caps[0], &mut w)?;
        w.into_inner().flush()?;
    }

    let mut m = String::from("command=max-validate\n");
    writeln!(m, "seed={}\npa={}\npb={}\nM={}\nL={}", args.seed, args.pa, args.pb, args.capacities, args.len).unwrap();
    writeln!(m, "output={}", args.output.display()).unwrap();
    if let Some(p) = &args.trace {
        writeln!(m, "trace={}\ntrace-len={}", p.display(), args.trace_len).unwrap();
    }
    emit(&m);
    Ok(())
}

fn parse_backend(s: &str) -> std::result::Result<Backend, Failure> {
    match s {
        "float" => Ok(Backend::Float),
        "sc" | "stochastic" => Ok(Backend::Stochastic),
        other => {
            let w = other
                .strip_prefix("fixed")
                .and_then(|w| w.parse::<u32>().ok())
                .ok_or_else(|| Failure::Usage(format!("unknown backend {other:?}; use float, fixed<W> or sc")))?;
            Ok(Backend::Fixed(FixedPointFormat::new(w).map_err(usage)?))
        }
    }
}

fn solve(args: SolveArgs, config: Option<&Path>) -> Outcome {
    let start = ExperimentConfig {
        output: PathBuf::from("x_hat.dat"),
        ..Default::default()
    };
    let mut cfg = base_config(config, start)?;
    let mut pairs = vec![("seed", &args.seed)];
    pairs.extend(args.circuit.pairs());
    apply(&mut cfg, &pairs)?;
    let backend = parse_backend(&args.backend)?;

    let problem = read_problem(BufReader::new(File::open(&args.problem)?))?;
    let iterations = cfg.iterations.unwrap_or(ITERATIONS_PER_ROW * problem.rows());
    let solver = SolverConfig {
        lambda: 0.5,
        iterations,
        backend,
        sc: ScParams {
            len: cfg.len,
            max_capacity: cfg.max_capacity,
            carry_depth: cfg.carry_depth,
            delay: cfg.delay,
            sng: SngConfig::with_width(cfg.sng_width).map_err(usage)?,
        },
        seed: cfg.seed,
    };
    let out: EstimatorOutput = solve_with_lambda_prime(&problem, cfg.lambda_prime, &solver)?;
    let mut w = BufWriter::new(File::create(&cfg.output)?);
    write_estimate(&mut w, &out.x_hat)?;
    w.flush()?;

    let mut m = String::from("command=solve\n");
    writeln!(m, "problem={}", args.problem.display()).unwrap();
    writeln!(m, "m={}\nn={}", problem.rows(), problem.cols()).unwrap();
    writeln!(m, "backend={}", backend.label()).unwrap();
    writeln!(m, "lambda-prime={}\nN={iterations}", cfg.lambda_prime).unwrap();
    writeln!(m, "L={}\nM={}\nD={}", cfg.len, cfg.max_capacity, cfg.carry_depth).unwrap();
    writeln!(m, "delay={}\nsng-width={}\nseed={}", cfg.delay, cfg.sng_width, cfg.seed).unwrap();
    let d = out.diagnostics;
    writeln!(m, "saturations={}\nrange-exits={}\ncarry-overflow={}", d.saturations, d.range_exits, d.carry_overflow)
        .unwrap();
    writeln!(m, "residual-norm={:e}", problem.residual_norm(&out.x_hat)).unwrap();
    writeln!(m, "output={}", cfg.output.display()).unwrap();
    let manifest_path = format!("{}.manifest", cfg.output.display());
    std::fs::write(&manifest_path, &m)?;
    writeln!(m, "manifest={manifest_path}").unwrap();
    emit(&m);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let config = cli.config.as_deref();
    let outcome = match cli.command {
        Command::RmseSweep(a) => rmse_sweep(a, config),
        Command::ShrinkError(a) => shrink_error(a),
        Command::MaxValidate(a) => max_validate(a),
        Command::Solve(a) => solve(a, config),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
