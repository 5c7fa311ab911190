use std::path::PathBuf;
use std::process::ExitCode;

use bddcso_core::experiment::{load_config_file, preset, preset_names, run_all, write_report, ExperimentConfig, ReportFormat};
use bddcso_core::{count_coarse_dofs, Error, Recipe};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bddcso", version, about = "BDDC and BDDC-SO experiments on structured Q1 Poisson problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// relative residual tolerance, overrides the config
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// PCG iteration cap, overrides the config
    #[arg(long, global = true)]
    max_iters: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// report file; stdout when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment in a TOML config file
    Run { config: PathBuf },
    /// Run one of the bundled presets
    Preset {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(preset_names().collect::<Vec<_>>()))]
        name: String,
    },
    /// Coarse problem size for a subdomain grid like 10x10x10, split factor s and recipe
    Count { grid: String, split: String, recipe: Recipe },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => ReportFormat::Csv,
            Format::Json => ReportFormat::Json,
        }
    }
}

fn parse_grid(text: &str) -> Result<Vec<usize>, Error> {
    text.split(['x', 'X', ','])
        .map(|p| p.trim().parse::<usize>().map_err(|_| Error::Config(format!("bad grid \"{text}\""))))
        .collect()
}

fn parse_split(text: &str) -> Result<usize, Error> {
    let t = text.strip_prefix("s=").unwrap_or(text);
    t.parse().map_err(|_| Error::Config(format!("bad split \"{text}\"")))
}

fn execute(cli: &Cli) -> Result<bool, Error> {
    let mut configs: Vec<ExperimentConfig> = match &cli.command {
        Command::Run { config } => load_config_file(config)?,
        Command::Preset { name } => preset(name)?,
        Command::Count { grid, split, recipe } => {
            let count = count_coarse_dofs(&parse_grid(grid)?, parse_split(split)?, *recipe)?;
            match &cli.out {
                Some(path) => std::fs::write(path, format!("{count}\n"))?,
                None => println!("{count}"),
            }
            return Ok(true);
        }
    };
    for c in &mut configs {
        if let Some(tol) = cli.tol {
            c.tol = tol;
        }
        if let Some(m) = cli.max_iters {
            c.max_iters = m;
        }
    }
    let rows = run_all(&configs)?;
    let format = cli.format.into();
    match &cli.out {
        Some(path) => bddcso_core::experiment::emit_report(&rows, format, path)?,
        None => write_report(&rows, format, std::io::stdout().lock())?,
    }
    Ok(rows.iter().all(|r| r.converged))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
