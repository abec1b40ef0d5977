use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hullmert::cli_io::{
    self, cmd_linesearch, cmd_optimize, cmd_sweep, cmd_validate, cmd_verify, parse_range, parse_sparse, CliError,
    Output, RunConfig, VerifyOptions,
};
use hullmert::{Metric, Scalarizer};

#[derive(Parser)]
#[command(name = "hullmert", version, about = "Exact MERT line search over packed forests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Forest files, one JSON sentence per line.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// JSON run configuration; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Starting weights as name=value,name=value.
    #[arg(long, allow_hyphen_values = true)]
    weights: Option<String>,
    /// Search direction as name=value,name=value.
    #[arg(long, allow_hyphen_values = true)]
    direction: Option<String>,
    /// Error metric: exact or bleu.
    #[arg(long)]
    metric: Option<Metric>,
    /// Loss over error counts: sum or bleu.
    #[arg(long)]
    scalarizer: Option<Scalarizer>,
    /// Distance beyond the last boundary when the best interval is unbounded.
    #[arg(long)]
    offset: Option<f64>,
    /// Boundaries closer than this are merged.
    #[arg(long)]
    merge_eps: Option<f64>,
    /// Sweep cap for optimize.
    #[arg(long)]
    iterations: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Check forest files and count derivations.
    Validate(Common),
    /// Exact line search along one direction; prints a JSON report.
    Linesearch(Common),
    /// Tabulate corpus loss along the search line.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// η range as lo:hi.
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        /// Number of rows.
        #[arg(long, default_value_t = 101)]
        steps: usize,
    },
    /// Coordinate-wise MERT; prints final weights and the loss trace.
    Optimize(Common),
    /// Run oracle cross-checks on files and/or random instances.
    Verify {
        /// Forest files to check (optional).
        files: Vec<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        weights: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        direction: Option<String>,
        /// Random instances per check (0 to skip).
        #[arg(long, default_value_t = 100)]
        random: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn load_config(
    path: Option<&PathBuf>,
    weights: Option<&str>,
    direction: Option<&str>,
) -> Result<RunConfig, CliError> {
    let mut config = match path {
        Some(p) => RunConfig::read(p)?,
        None => RunConfig::default(),
    };
    if let Some(w) = weights {
        config.weights = parse_sparse(w)?;
    }
    if let Some(d) = direction {
        config.direction = Some(parse_sparse(d)?);
    }
    Ok(config)
}

fn build_config(c: &Common) -> Result<RunConfig, CliError> {
    let mut config = load_config(c.config.as_ref(), c.weights.as_deref(), c.direction.as_deref())?;
    if let Some(m) = c.metric {
        config.metric = m;
        if c.scalarizer.is_none() {
            config.scalarizer = None;
        }
    }
    if let Some(s) = c.scalarizer {
        config.scalarizer = Some(s);
    }
    if let Some(o) = c.offset {
        config.offset = o;
    }
    if let Some(e) = c.merge_eps {
        config.merge_eps = e;
    }
    if let Some(i) = c.iterations {
        config.iterations = i;
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<Output, CliError> {
    match cli.command {
        Command::Validate(c) => {
            let config = build_config(&c)?;
            cli_io::with_threads(c.threads, || cmd_validate(&c.files, &config))?
        }
        Command::Linesearch(c) => {
            let config = build_config(&c)?;
            cli_io::with_threads(c.threads, || cmd_linesearch(&c.files, &config))?
        }
        Command::Sweep { common, range, steps } => {
            let config = build_config(&common)?;
            let range = parse_range(&range)?;
            cli_io::with_threads(common.threads, || cmd_sweep(&common.files, &config, range, steps))?
        }
        Command::Optimize(c) => {
            let config = build_config(&c)?;
            cli_io::with_threads(c.threads, || cmd_optimize(&c.files, &config))?
        }
        Command::Verify {
            files,
            config,
            weights,
            direction,
            random,
            seed,
            threads,
        } => {
            let config = load_config(config.as_ref(), weights.as_deref(), direction.as_deref())?;
            let options = VerifyOptions {
                random,
                seed,
                ..VerifyOptions::default()
            };
            cli_io::with_threads(threads, || cmd_verify(&files, &config, &options))?
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", out.stdout);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
