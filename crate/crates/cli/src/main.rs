use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use weighted_bures::par::with_workers;
use weighted_bures_cli::{cmd_audit, cmd_compare, cmd_gen_circuit, cmd_table1, CliError, Format};

/// Weighted Bures length between many-qubit states, and circuit cost audits.
#[derive(Parser, Debug)]
#[command(name = "wbures", version)]
struct Cli {
    /// Output encoding.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for the subset cache (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Seed for commands that draw random numbers.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reproduce the benchmark table at `n` qubits.
    Table1 {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
    },
    /// Bures and weighted Bures length between two state files.
    Compare {
        #[arg(long)]
        state_a: PathBuf,
        #[arg(long)]
        state_b: PathBuf,
    },
    /// Check a circuit's resource cost against the weighted Bures length it covers.
    Audit {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        input: PathBuf,
    },
    /// Write a random circuit file (always JSON) drawn from `--seed`.
    GenCircuit {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        gates: usize,
    },
}

fn run(cli: Cli) -> Result<(String, i32), CliError> {
    let format = cli.format;
    let seed = cli.seed;
    with_workers(cli.workers, move || match cli.command {
        Command::Table1 { n, a, b } => cmd_table1(n, a, b).map(|d| (d.render(format), d.exit_code)),
        Command::Compare { state_a, state_b } => {
            cmd_compare(&state_a, &state_b).map(|d| (d.render(format), d.exit_code))
        }
        Command::Audit { circuit, input } => cmd_audit(&circuit, &input).map(|d| (d.render(format), d.exit_code)),
        Command::GenCircuit { n, gates } => cmd_gen_circuit(n, gates, seed).map(|s| (s, 0)),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("wbures: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
