use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use disco_cli::{cmd_discover, cmd_genbk, cmd_learn, cmd_rulespace, CliError, Format};

#[derive(Parser)]
#[command(name = "disco", version, about = "Property discovery and constraint-driven rule learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine relational properties of a background-knowledge file.
    Discover {
        /// Background knowledge (.dl)
        bk: PathBuf,
        /// Restrict mining to the body predicates of this bias file
        #[arg(long)]
        bias: Option<PathBuf>,
        /// Write assertions here instead of stdout
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Output format
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Learn an optimal rule set from examples.
    Learn {
        /// Background knowledge (.dl)
        bk: PathBuf,
        /// Examples file with pos(...)/neg(...) lines
        examples: PathBuf,
        /// Bias file with head_pred/body_pred/bound directives
        bias: PathBuf,
        /// Skip property discovery (search unconstrained)
        #[arg(long)]
        no_discovery: bool,
        /// Print the full run report as one JSON object
        #[arg(long)]
        json_report: bool,
    },
    /// Generate synthetic string background knowledge.
    Genbk {
        /// Alphabet size
        #[arg(short = 'n', long)]
        alphabet: usize,
        /// Maximum string length
        #[arg(short = 'l', long)]
        max_len: usize,
        /// Output file
        #[arg(short, long)]
        output: PathBuf,
        /// Override the output-size guard
        #[arg(long)]
        force: bool,
    },
    /// Count the candidate rule space with and without mined constraints.
    Rulespace {
        /// Bias file
        bias: PathBuf,
        /// Background knowledge (.dl)
        bk: PathBuf,
    },
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Discover { bk, bias, output, format } => {
            let report = match output {
                Some(path) => {
                    let mut file = std::fs::File::create(path)?;
                    cmd_discover(&bk, bias.as_deref(), &mut file, format)?
                }
                None => {
                    let stdout = io::stdout();
                    let mut lock = stdout.lock();
                    let report = cmd_discover(&bk, bias.as_deref(), &mut lock, format)?;
                    lock.flush()?;
                    report
                }
            };
            eprintln!(
                "% {} properties from {} facts in {:.3}s",
                report.counters.properties_found,
                report.counters.facts_loaded,
                report.phases.discovery
            );
            Ok(report.exit_status)
        }
        Command::Learn { bk, examples, bias, no_discovery, json_report } => {
            let report = cmd_learn(&bk, &examples, &bias, no_discovery)?;
            if json_report {
                println!("{}", report.to_json());
            } else {
                match &report.solution {
                    Some(rules) => {
                        for rule in rules {
                            println!("{rule}");
                        }
                    }
                    None => println!("no solution"),
                }
                println!(
                    "% discovery {:.3}s, generate {:.3}s, test {:.3}s, constrain {:.3}s",
                    report.phases.discovery,
                    report.phases.generate,
                    report.phases.test,
                    report.phases.constrain
                );
                println!(
                    "% facts {}, properties {}, constraints {}, rules enumerated {}, programs tested {}",
                    report.counters.facts_loaded,
                    report.counters.properties_found,
                    report.counters.constraints_compiled,
                    report.counters.rules_enumerated,
                    report.counters.programs_tested
                );
            }
            Ok(report.exit_status)
        }
        Command::Genbk { alphabet, max_len, output, force } => {
            let written = cmd_genbk(alphabet, max_len, &output, force)?;
            println!("wrote {written} facts to {}", output.display());
            Ok(0)
        }
        Command::Rulespace { bias, bk } => {
            let counts = cmd_rulespace(&bias, &bk)?;
            println!("rules without constraints: {}", counts.without);
            println!("rules with constraints: {}", counts.with);
            println!("reduction: {:.1}%", counts.reduction_pct());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("DISCO_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n >= 1 => {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .expect("global thread pool is built once, before any use");
            }
            _ => {
                eprintln!("DISCO_THREADS must be a positive integer, got {threads:?}");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
