use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use unimeas::scenario::{
    check_tolerance, cross_check, parse_scenario, run, Format, Scenario, ScenarioError,
};

#[derive(Parser)]
#[command(name = "unimeas", version, about = "Run unitary measurement scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Detection tolerance; overrides the scenario's options
    #[arg(long, global = true, allow_hyphen_values = true)]
    tol: Option<f64>,

    /// Count anticorrelated clusters in the ledger
    #[arg(long, global = true, value_enum)]
    relabel: Option<Switch>,

    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario and print its report
    Run { file: PathBuf },
    /// Parse and validate a scenario without running it
    Validate { file: PathBuf },
    /// Run on the dense matrix oracle and compare with the kernels
    Oracle { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

fn load(cli: &Cli, file: &PathBuf) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| ScenarioError::Schema(format!("cannot read {}: {e}", file.display())))?;
    let mut scenario = parse_scenario(&text)?;
    if let Some(tol) = cli.tol {
        check_tolerance(tol)?;
        scenario.options.tolerance = tol;
    }
    if let Some(r) = cli.relabel {
        scenario.options.relabel = matches!(r, Switch::On);
    }
    if let Some(f) = cli.format {
        scenario.options.format = match f {
            OutputFormat::Text => Format::Text,
            OutputFormat::Json => Format::Json,
        };
    }
    Ok(scenario)
}

fn execute(cli: &Cli) -> Result<String, ScenarioError> {
    let (file, command) = match &cli.command {
        Command::Run { file } => (file, "run"),
        Command::Validate { file } => (file, "validate"),
        Command::Oracle { file } => (file, "oracle"),
    };
    let scenario = load(cli, file)?;
    if command == "validate" {
        return Ok(format!(
            "ok: {} qubits, {} steps\n",
            scenario.register().len(),
            scenario.script.len()
        ));
    }
    let report = if command == "run" {
        run(&scenario)?
    } else {
        cross_check(&scenario)?
    };
    Ok(match scenario.options.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(&cli) {
        Ok(text) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
