use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qss_core::attack::OracleGuess;
use qss_core::report::{
    self, parse_message, parse_omega, parse_oracle, parse_reduction, Command, OutputFormat,
    RunConfig,
};
use qss_core::{Error, MessageMode, OmegaChoice, Reduction, Strategy};

/// Grover-search quantum secret sharing: protocol runs, attack sweeps and
/// reproduced tables.
#[derive(Debug, Parser)]
#[command(name = "qss", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Optimal phase and success probability per register size.
    GroverTable {
        /// Register dimensions (powers of two).
        #[arg(long, value_delimiter = ',', default_values_t = [4usize, 8, 16, 32, 64])]
        dims: Vec<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Success probability as a function of the reflection phase.
    OmegaScan {
        #[arg(short = 'd', long, default_value_t = 8)]
        dim: usize,
        #[arg(long, default_value_t = 361)]
        steps: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exhaustive interception-attack sweep over all (S, S′) pairs.
    Sweep(SweepArgs),
    /// Reproduce an attack table and check it against the printed values.
    Tables {
        #[arg(value_parser = ["2", "4", "5"])]
        which: String,
        /// Participants for the general table.
        #[arg(short = 'q', long, default_value_t = 3)]
        participants: usize,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Narrated honest run: chunking, encoding, decoding.
    Demo {
        value: u64,
        #[arg(short = 'q', long, default_value_t = 2)]
        participants: usize,
        #[arg(long, default_value = "opt", value_parser = omega_arg)]
        omega: OmegaChoice,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv", value_parser = format_arg)]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(short = 'q', long, default_value_t = 3)]
    participants: usize,
    /// `opt`, `pi` or radians in (0, 2π).
    #[arg(long, default_value = "opt", value_parser = omega_arg)]
    omega: OmegaChoice,
    #[arg(long, default_value = "complete", value_parser = strategy_arg)]
    strategy: Strategy,
    /// `avg` or a chunk value.
    #[arg(long, default_value = "avg", value_parser = message_arg)]
    message: MessageMode,
    /// Wrong-oracle strategy only: `avg` or the guessed chunk.
    #[arg(long, default_value = "avg", value_parser = oracle_arg)]
    oracle: OracleGuess,
    /// `full` or `diff`; defaults to `diff` from five participants.
    #[arg(long, value_parser = reduction_arg)]
    reduction: Option<Reduction>,
    /// Dealer iteration count overriding the secure split.
    #[arg(long, requires = "allow_insecure")]
    k1: Option<usize>,
    #[arg(long)]
    allow_insecure: bool,
    /// Permit a full seven-participant grid.
    #[arg(long)]
    allow_large_full: bool,
    /// Write the full matrix even for large registers.
    #[arg(long)]
    expand: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Sampled pairs checked against the difference-class reduction.
    #[arg(long, default_value_t = 100_000)]
    spot_checks: usize,
    #[command(flatten)]
    out: OutputArgs,
}

fn omega_arg(s: &str) -> Result<OmegaChoice, String> {
    parse_omega(s).map_err(|e| e.to_string())
}

fn strategy_arg(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn message_arg(s: &str) -> Result<MessageMode, String> {
    parse_message(s).map_err(|e| e.to_string())
}

fn oracle_arg(s: &str) -> Result<OracleGuess, String> {
    parse_oracle(s).map_err(|e| e.to_string())
}

fn reduction_arg(s: &str) -> Result<Reduction, String> {
    parse_reduction(s).map_err(|e| e.to_string())
}

fn format_arg(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn with_output(mut cfg: RunConfig, out: OutputArgs) -> RunConfig {
    cfg.output = out.out;
    cfg.format = out.format;
    cfg
}

fn config(cli: Cli) -> RunConfig {
    match cli.command {
        Cmd::GroverTable { dims, out } => {
            with_output(RunConfig::new(Command::GroverTable { dims }), out)
        }
        Cmd::OmegaScan { dim, steps, out } => {
            with_output(RunConfig::new(Command::OmegaScan { dim, steps }), out)
        }
        Cmd::Tables {
            which,
            participants,
            workers,
            out,
        } => {
            let mut cfg = RunConfig::new(Command::Tables {
                which: which.parse().expect("validated by clap"),
            });
            cfg.participants = participants;
            cfg.workers = workers;
            with_output(cfg, out)
        }
        Cmd::Demo {
            value,
            participants,
            omega,
            seed,
            out,
        } => {
            let mut cfg = RunConfig::new(Command::Demo { value });
            cfg.participants = participants;
            cfg.omega = omega;
            cfg.seed = seed;
            cfg.output = out;
            cfg
        }
        Cmd::Sweep(a) => {
            let mut cfg = RunConfig::new(Command::Sweep);
            cfg.participants = a.participants;
            cfg.omega = a.omega;
            cfg.strategy = a.strategy;
            cfg.message = a.message;
            cfg.oracle_guess = a.oracle;
            cfg.reduction = a.reduction;
            cfg.k1 = a.k1;
            cfg.allow_insecure = a.allow_insecure;
            cfg.allow_large_full = a.allow_large_full;
            cfg.expand = a.expand;
            cfg.seed = a.seed;
            cfg.workers = a.workers;
            cfg.spot_checks = a.spot_checks;
            with_output(cfg, a.out)
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
    let cfg = config(cli);
    let mut stdout = std::io::stdout().lock();
    let result = report::run(&cfg, &mut stdout);
    let _ = stdout.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qss: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
