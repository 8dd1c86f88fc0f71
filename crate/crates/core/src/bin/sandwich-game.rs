use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sandwich_game::market::MarketConfig;
use sandwich_game::sweep::{
    epsilon_summary, figure_specs, run_point, run_sweep, write_csv, GridAxis, OmegaSpec, SweepSpec, TwoPointSpec,
};
use sandwich_game::traders::TraderParams;
use sandwich_game::verify::run_verify;
use sandwich_game::Error;

const EXIT_CONFIG: u8 = 1;
const EXIT_FAILURE: u8 = 2;

#[derive(Parser)]
#[command(version, about = "Sandwich-attack game on constant-product pools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one parameter point
    Point(PointArgs),
    /// Sweep an (alpha, s) grid and write CSV
    Sweep(SweepArgs),
    /// Check closed forms against the replay oracle on random draws
    Verify(VerifyArgs),
    /// Write the canonical figure sweeps
    Figures(FiguresArgs),
}

#[derive(Args)]
struct MarketArgs {
    #[arg(long, default_value_t = 5_000_000.0)]
    x: f64,
    #[arg(long, default_value_t = 5_000_000.0)]
    y: f64,
    #[arg(long, default_value_t = 0.003)]
    fee: f64,
}

#[derive(Args)]
struct PointArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    s: f64,
    #[arg(long)]
    omega: f64,
    /// Fraction of liquidity in the protected pool
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[command(flatten)]
    market: MarketArgs,
    #[arg(long, value_delimiter = ',')]
    epsilon: Vec<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML sweep spec; flags below override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    omega: Option<Vec<f64>>,
    #[arg(long)]
    alpha_min: Option<f64>,
    #[arg(long)]
    alpha_max: Option<f64>,
    #[arg(long)]
    alpha_steps: Option<usize>,
    #[arg(long)]
    s_min: Option<f64>,
    #[arg(long)]
    s_max: Option<f64>,
    #[arg(long)]
    s_steps: Option<usize>,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    y: Option<f64>,
    #[arg(long)]
    fee: Option<f64>,
    /// Two-point benefit distribution with spread k
    #[arg(long)]
    k: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    epsilon: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1000)]
    configs: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FiguresArgs {
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 200)]
    alpha_steps: usize,
    #[arg(long, default_value_t = 100)]
    s_steps: usize,
}

enum Failure {
    Config(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Numeric(_) => Failure::Numeric(e.to_string()),
            Error::Domain(_) | Error::Config { .. } => Failure::Config(e.to_string()),
        }
    }
}

fn io_failure(path: &std::path::Path, e: io::Error) -> Failure {
    Failure::Config(format!("{}: {e}", path.display()))
}

fn axis_override(axis: &mut GridAxis, min: Option<f64>, max: Option<f64>, steps: Option<usize>) {
    if let Some(v) = min {
        axis.min = v;
    }
    if let Some(v) = max {
        axis.max = v;
    }
    if let Some(v) = steps {
        axis.steps = v;
    }
}

fn sweep_spec(args: &SweepArgs) -> Result<SweepSpec, Failure> {
    let mut spec = match &args.config {
        Some(path) => SweepSpec::from_path(path)?,
        None => SweepSpec::canonical(0.01, 200, 100),
    };
    axis_override(&mut spec.alpha, args.alpha_min, args.alpha_max, args.alpha_steps);
    axis_override(&mut spec.s, args.s_min, args.s_max, args.s_steps);
    if let Some(w) = &args.omega {
        spec.omega = OmegaSpec::Many(w.clone());
    }
    spec.x = args.x.unwrap_or(spec.x);
    spec.y = args.y.unwrap_or(spec.y);
    spec.fee = args.fee.unwrap_or(spec.fee);
    if let Some(k) = args.k {
        spec.distribution = Some(TwoPointSpec { k });
    }
    if let Some(e) = &args.epsilon {
        spec.epsilon = e.clone();
    }
    spec.validate()?;
    Ok(spec)
}

fn point(args: PointArgs) -> Result<(), Failure> {
    let market = MarketConfig::new(args.market.x, args.market.y, args.market.fee, args.p, args.omega)?;
    let trader = TraderParams::new(args.alpha, args.s)?;
    let report = run_point(&market, &trader, &args.epsilon)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print!("{report}");
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<(), Failure> {
    let spec = sweep_spec(&args)?;
    let records = run_sweep(&spec)?;
    match &args.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| io_failure(path, e))?;
            write_csv(&records, BufWriter::new(file))?;
        }
        None => write_csv(&records, io::stdout().lock())?,
    }
    for e in epsilon_summary(&records, &spec.epsilon) {
        eprintln!(
            "epsilon {}: every split is an equilibrium at {}/{} points",
            e.epsilon, e.indifferent, e.points
        );
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let report = run_verify(args.configs, args.seed)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        println!("seed {} configs {}", report.seed, report.configs);
        for c in &report.checks {
            println!(
                "{:<26} {}  failures {}/{}  worst {:.3e}  tol {:.0e}  skipped {}",
                c.name,
                if c.passed() { "PASS" } else { "FAIL" },
                c.failures,
                c.trials,
                c.worst,
                c.tolerance,
                c.skipped
            );
        }
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Numeric("verification failed".into()))
    }
}

fn figures(args: FiguresArgs) -> Result<(), Failure> {
    std::fs::create_dir_all(&args.out_dir).map_err(|e| io_failure(&args.out_dir, e))?;
    for (name, spec) in figure_specs(args.alpha_steps, args.s_steps) {
        let path = args.out_dir.join(format!("{name}.csv"));
        let records = run_sweep(&spec)?;
        let file = File::create(&path).map_err(|e| io_failure(&path, e))?;
        write_csv(&records, BufWriter::new(file))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Point(a) => point(a),
        Command::Sweep(a) => sweep(a),
        Command::Verify(a) => verify(a),
        Command::Figures(a) => figures(a),
    };
    let _ = io::stdout().flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
