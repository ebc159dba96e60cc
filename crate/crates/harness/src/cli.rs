//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::params::{parameter_report, render_table, ParamsBlock};
use crate::report::RunReport;
use crate::run::{run_scenario, RunOptions};
use crate::scenario::{LossinessModeSpec, Pipeline, Scenario};
use crate::{exit, HarnessError};

#[derive(Debug, Parser)]
#[command(name = "lossylab", version, about = "Exact experiments on lossy reductions of finite promise problems")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Base seed; overrides the scenario and LOSSYLAB_SEED.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Where to write the JSON report.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Force exhaustive lossiness enumeration.
    #[arg(long, global = true, conflicts_with = "sampled")]
    pub exhaustive: bool,
    /// Force sampled lossiness estimation.
    #[arg(long, global = true)]
    pub sampled: bool,
    /// Worker threads; affects wall time only.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every pipeline the scenario requests.
    Run { scenario: PathBuf },
    /// Evaluate a JSON parameter block.
    Params { block: PathBuf },
    /// Build the disguising collection only.
    Disguise { scenario: PathBuf },
    /// SZK gap report (builds the collection if needed).
    Szk { scenario: PathBuf },
    /// OWF dichotomy runs.
    Owf { scenario: PathBuf },
    /// EFI pair and decision runs.
    Efi { scenario: PathBuf },
    /// Mild-lossiness estimate.
    Lossiness { scenario: PathBuf },
    /// Pretty-print a saved run report.
    Report { report: PathBuf },
}

/// Parse `argv`, run, and return the process exit code.
pub fn main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::PASS };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit::USAGE
        }
    }
}

fn options(g: &Global, only: Option<Vec<Pipeline>>) -> RunOptions {
    let lossiness_mode = if g.exhaustive {
        Some(LossinessModeSpec::Exhaustive)
    } else if g.sampled {
        Some(LossinessModeSpec::Sampled)
    } else {
        None
    };
    RunOptions { seed: g.seed, lossiness_mode, only, jobs: g.jobs }
}

pub fn execute(cli: &Cli) -> Result<i32, HarnessError> {
    let pool = match cli.global.jobs {
        Some(0) => return Err(HarnessError::Usage("--jobs must be positive".into())),
        Some(n) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| HarnessError::Usage(e.to_string()))?,
        ),
        None => None,
    };
    let body = || -> Result<i32, HarnessError> {
        let single = |p: Pipeline| Some(vec![p]);
        match &cli.command {
            Command::Run { scenario } => scenario_command(cli, scenario, None),
            Command::Disguise { scenario } => scenario_command(cli, scenario, single(Pipeline::Disguise)),
            Command::Szk { scenario } => scenario_command(cli, scenario, single(Pipeline::Szk)),
            Command::Owf { scenario } => scenario_command(cli, scenario, single(Pipeline::Owf)),
            Command::Efi { scenario } => scenario_command(cli, scenario, single(Pipeline::Efi)),
            Command::Lossiness { scenario } => scenario_command(cli, scenario, single(Pipeline::Lossiness)),
            Command::Params { block } => {
                let rep = parameter_report(&ParamsBlock::load(block)?)?;
                print!("{}", render_table(&rep));
                if let Some(out) = &cli.global.out {
                    write(out, &serde_json::to_string_pretty(&rep).expect("plain data"))?;
                }
                Ok(exit::PASS)
            }
            Command::Report { report } => {
                let text = std::fs::read_to_string(report).map_err(|e| HarnessError::Io { path: report.clone(), msg: e.to_string() })?;
                let rep: RunReport = serde_json::from_str(&text).map_err(|e| HarnessError::Parse {
                    path: report.clone(),
                    line: e.line(),
                    column: e.column(),
                    msg: e.to_string(),
                })?;
                print!("{}", rep.render());
                Ok(if rep.all_passed { exit::PASS } else { exit::VERDICT_FAILURE })
            }
        }
    };
    match pool {
        Some(p) => p.install(body),
        None => body(),
    }
}

fn scenario_command(cli: &Cli, path: &Path, only: Option<Vec<Pipeline>>) -> Result<i32, HarnessError> {
    let scenario = Scenario::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let rep = run_scenario(&scenario, base, &options(&cli.global, only))?;
    print!("{}", rep.render());
    if let Some(out) = cli.global.out.as_ref().or(scenario.output.as_ref()) {
        write(out, &rep.to_json())?;
    }
    Ok(if rep.all_passed { exit::PASS } else { exit::VERDICT_FAILURE })
}

fn write(path: &Path, text: &str) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::Io { path: dir.to_path_buf(), msg: e.to_string() })?;
    }
    std::fs::write(path, text).map_err(|e| HarnessError::Io { path: path.to_path_buf(), msg: e.to_string() })
}
