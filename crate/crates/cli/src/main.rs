use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use maslov_core::scenario::{list_builtins, run, Report, Request, Scenario};
use maslov_core::Error;

/// Certified higher Maslov and homogeneous indices from scenario files.
#[derive(Parser)]
#[command(name = "maslov", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Override the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the work budget (maximum number of simplices visited).
    #[arg(long, global = true)]
    budget: Option<usize>,

    /// Number of worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (`-` reads standard input).
    Run { scenario: PathBuf },
    /// List builtin families.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Homotopy groups of the space of linear complex structures.
    Tables {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        dim: usize,
    },
}

fn load(path: &PathBuf) -> Result<Scenario, Error> {
    if path.as_os_str() == "-" {
        let text = std::io::read_to_string(std::io::stdin()).map_err(Error::from)?;
        Scenario::parse(&text)
    } else {
        Scenario::from_path(path)
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n")).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: &Cli, mut scenario: Scenario) -> Result<Report, Error> {
    if let Some(seed) = cli.seed {
        scenario.seed = seed;
    }
    if let Some(budget) = cli.budget {
        scenario.budget.max_simplices = budget;
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::InvalidArgument("--jobs must be positive".into()));
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(pool.install(|| run(&scenario)))
}

fn main_inner(cli: &Cli) -> Result<i32, Error> {
    match &cli.command {
        Command::Run { scenario } => {
            let report = execute(cli, load(scenario)?)?;
            if let Some(e) = &report.error {
                eprintln!("error: {e}");
            }
            emit(&report.to_text(), &cli.out)?;
            Ok(report.exit_code())
        }
        Command::Tables { k, dim } => {
            let scenario = Scenario {
                name: None,
                model: None,
                family: None,
                request: Request::Tables { k: *k, dim: *dim },
                budget: Default::default(),
                seed: 0,
            };
            let report = execute(cli, scenario)?;
            if let Some(e) = &report.error {
                eprintln!("error: {e}");
            }
            emit(&report.to_text(), &cli.out)?;
            Ok(report.exit_code())
        }
        Command::List { json } => {
            let text = if *json {
                serde_json::to_string_pretty(list_builtins()).expect("catalog serializes")
            } else {
                list_builtins()
                    .iter()
                    .map(|e| format!("{:<24} {:<15} {}\n{:<24} {}", e.name, format!("{:?}", e.kind), e.models, "", e.statement))
                    .collect::<Vec<_>>()
                    .join("\n")
            };
            emit(&text, &cli.out)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
