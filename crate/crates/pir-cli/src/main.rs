//! pirlab: generate, audit and simulate linear PIR schemes from the shell.
//!
//! Exit codes follow sysexits for usage problems (64) and small positive
//! integers for domain failures:
//!   0  success / every requested property passed
//!   1  a requested property failed verification
//!   2  server count is not prime
//!   3  enumeration budget exceeded
//!   4  scheme file does not parse (message carries the line number)
//!   5  retrieval impossible: the scheme fails the correctness check
//!   64 usage error
//!   66 input file unreadable
//!   74 output file unwritable

mod rng;
mod sim;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use pir_core::{
    build_reference_table, capacity_formula, full_report, parse_scheme, serialize_scheme,
    EntropyError, FieldError, ReportOptions, SchemeError, DEFAULT_ENUMERATION_BUDGET,
};

#[derive(Parser)]
#[command(
    name = "pirlab",
    version,
    about = "A laboratory for linear private information retrieval"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the capacity-achieving reference scheme as a scheme file.
    GenReference {
        /// Number of servers (must be prime; it is also the field size).
        #[arg(long)]
        servers: u64,
        /// Number of stored messages.
        #[arg(long)]
        messages: usize,
        /// Output path for the scheme file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check correctness, privacy and capacity conditions of a scheme file.
    Verify {
        path: PathBuf,
        /// Collusion sizes to audit (repeatable or comma-separated).
        #[arg(long = "collusion", value_delimiter = ',')]
        collusion: Vec<usize>,
        /// Also validate the rank conditions against the entropy oracle.
        #[arg(long)]
        crosscheck: bool,
    },
    /// Replay one seeded retrieval and print the exchange trace.
    Retrieve {
        path: PathBuf,
        /// Message index to retrieve (1-based).
        #[arg(long)]
        index: usize,
        /// Seed for the key and message draw.
        #[arg(long)]
        seed: u64,
    },
    /// Show what a coalition of servers observes and what it can infer.
    Adversary {
        path: PathBuf,
        /// Colluding server indices, comma-separated (1-based).
        #[arg(long = "collude", value_delimiter = ',', required = true)]
        collude: Vec<usize>,
        /// Seed for the target and key draw.
        #[arg(long)]
        seed: u64,
    },
    /// Print the capacity benchmark for a configuration.
    Capacity {
        #[arg(long)]
        servers: usize,
        #[arg(long)]
        messages: usize,
        /// Number of colluding servers.
        #[arg(long, default_value_t = 1)]
        collusion: usize,
    },
}

struct CliError {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: 64,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            eprint!("{err}");
            return ExitCode::from(64);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::GenReference {
            servers,
            messages,
            out,
        } => {
            let table = build_reference_table(servers, messages).map_err(|e| match &e {
                SchemeError::Field(FieldError::NotPrime(_))
                | SchemeError::Field(FieldError::ModulusTooLarge(_)) => CliError {
                    code: 2,
                    message: e.to_string(),
                },
                SchemeError::BudgetExceeded { .. } => CliError {
                    code: 3,
                    message: e.to_string(),
                },
                _ => usage(e.to_string()),
            })?;
            std::fs::write(&out, serialize_scheme(&table)).map_err(|e| CliError {
                code: 74,
                message: format!("cannot write {}: {e}", out.display()),
            })?;
            println!(
                "wrote {} (p={} servers={} messages={} keys={} realizations={})",
                out.display(),
                table.params().field().modulus(),
                table.params().servers(),
                table.params().messages(),
                table.key_count(),
                table.params().messages() * table.key_count()
            );
            Ok(0)
        }
        Command::Verify {
            path,
            collusion,
            crosscheck,
        } => {
            let table = load_table(&path)?;
            let servers = table.params().servers();
            for &t in &collusion {
                if t == 0 || t > servers {
                    return Err(usage(format!(
                        "collusion size {t} is outside [1, {servers}]"
                    )));
                }
            }
            let options = ReportOptions {
                budget: enumeration_budget()?,
                crosscheck,
            };
            let report = full_report(&table, &collusion, &options);
            print!("{}", report.render());
            Ok(if report.all_pass() { 0 } else { 1 })
        }
        Command::Retrieve { path, index, seed } => {
            let table = load_table(&path)?;
            let messages = table.params().messages();
            if index == 0 || index > messages {
                return Err(usage(format!(
                    "message index {index} is outside [1, {messages}]"
                )));
            }
            match sim::run_retrieve(&table, index, seed) {
                Ok(trace) => {
                    print!("{}", trace.render());
                    if trace.decoded_matches {
                        Ok(0)
                    } else {
                        Err(CliError {
                            code: 70,
                            message: "decoder disagreed with the message block".into(),
                        })
                    }
                }
                Err(sim::RetrieveError::CorrectnessUnavailable(message)) => {
                    Err(CliError { code: 5, message })
                }
            }
        }
        Command::Adversary {
            path,
            collude,
            seed,
        } => {
            let table = load_table(&path)?;
            let servers = table.params().servers();
            let coalition: BTreeSet<usize> = collude.iter().copied().collect();
            if coalition.is_empty() || coalition.iter().any(|&j| j == 0 || j > servers) {
                return Err(usage(format!(
                    "colluding set must name servers in [1, {servers}]"
                )));
            }
            let view = sim::run_adversary(&table, &coalition, seed);
            print!("{}", view.render(table.params().messages()));
            Ok(0)
        }
        Command::Capacity {
            servers,
            messages,
            collusion,
        } => {
            if messages < 2 {
                return Err(usage(format!("need at least 2 messages, got {messages}")));
            }
            let capacity = capacity_formula(servers, messages, collusion).map_err(|e| match e {
                EntropyError::InvalidCollusion { .. } => usage(e.to_string()),
                other => usage(other.to_string()),
            })?;
            let approx = *capacity.numer() as f64 / *capacity.denom() as f64;
            println!("{capacity} ≈ {approx:.6}");
            Ok(0)
        }
    }
}

fn load_table(path: &std::path::Path) -> Result<pir_core::SchemeTable, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError {
        code: 66,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_scheme(&text).map_err(|e| CliError {
        code: 4,
        message: format!("{}: {e}", path.display()),
    })
}

fn enumeration_budget() -> Result<u64, CliError> {
    match std::env::var("PIR_BUDGET") {
        Ok(text) => text.trim().parse::<u64>().map_err(|_| {
            usage(format!(
                "PIR_BUDGET must be a positive integer, got `{text}`"
            ))
        }),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_ENUMERATION_BUDGET),
        Err(err) => Err(usage(format!("PIR_BUDGET is unreadable: {err}"))),
    }
}
