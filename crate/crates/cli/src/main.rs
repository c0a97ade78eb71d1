//! Scenario runner for the multihop Weibull-fading analysis toolkit.
//!
//! Exit codes: 0 success, 2 configuration parse error, 3 validation
//! error, 4 numerical non-convergence (the offending sweep point is
//! named on stderr).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hoplab_cli::config::{MethodName, ScenarioFile};
use hoplab_cli::{report, runner, selftest};

#[derive(Parser)]
#[command(name = "hoplab", version, about = "Multihop relay performance scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write one CSV per metric.
    Run {
        /// Scenario TOML file.
        scenario: PathBuf,
        /// Output directory for the CSVs (default: current directory).
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Override the Monte-Carlo seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the method list (comma separated: exact,asymptotic,mc).
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        /// Override the Monte-Carlo trial count.
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Check exact-vs-Monte-Carlo agreement across a run directory.
    Report {
        /// Directory containing run CSVs.
        dir: PathBuf,
    },
    /// Run the special-function identity suite.
    Selftest,
}

const EXIT_PARSE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run { scenario, out, seed, methods, trials } => {
            run_command(&scenario, &out, seed, methods, trials)
        }
        Command::Report { dir } => report_command(&dir),
        Command::Selftest => selftest::run(),
    }
}

fn parse_methods(names: &[String]) -> Result<Vec<MethodName>, String> {
    names
        .iter()
        .map(|n| match n.trim() {
            "exact" => Ok(MethodName::Exact),
            "asymptotic" => Ok(MethodName::Asymptotic),
            "mc" => Ok(MethodName::Mc),
            other => Err(format!("unknown method {other:?}")),
        })
        .collect()
}

fn run_command(
    scenario_path: &Path,
    out: &Path,
    seed: Option<u64>,
    methods: Option<Vec<String>>,
    trials: Option<u64>,
) -> ExitCode {
    let text = match std::fs::read_to_string(scenario_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", scenario_path.display());
            return ExitCode::from(EXIT_PARSE);
        }
    };
    let mut scenario = match ScenarioFile::parse(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot parse {}: {e}", scenario_path.display());
            return ExitCode::from(EXIT_PARSE);
        }
    };
    if let Some(seed) = seed {
        scenario.mc.seed = seed;
    }
    if let Some(trials) = trials {
        scenario.mc.trials = trials;
    }
    if let Some(names) = methods {
        match parse_methods(&names) {
            Ok(m) => scenario.methods = m,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_VALIDATION);
            }
        }
    }
    if let Err(e) = scenario.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_VALIDATION);
    }
    let tables = match runner::run(&scenario) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_NUMERIC);
        }
    };
    match runner::write_csvs(&scenario.scenario.name, &tables, out) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: cannot write CSVs: {e}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}

fn report_command(dir: &Path) -> ExitCode {
    match report::check_dir(dir) {
        Ok(reports) => {
            let (text, rate) = report::summarize(&reports);
            print!("{text}");
            if rate >= 0.99 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}
