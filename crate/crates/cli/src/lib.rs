//! Command-line front end: config loading, sweeps, figure presets and
//! deterministic CSV/JSON output.

pub mod citations;
pub mod config;
pub mod error;
pub mod presets;
pub mod run;
pub mod table;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use config::{Device, ExperimentConfig, Format};
use error::{CliError, CliResult};
use presets::FigureId;

pub const BANNER: &str = "all rates are ν = ω/2π in MHz";

#[derive(Debug, Parser)]
#[command(
    name = "optomech",
    version,
    about = "Steady-state solvers for multimode optomechanical devices"
)]
pub struct Cli {
    /// TOML experiment file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a config value; bare keys address [params]. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub set: Vec<String>,
    /// Output file; stdout if absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two-mode squeezing witness I versus a swept parameter.
    Pairgen {
        /// gaussian or fock
        #[arg(long)]
        engine: Option<String>,
    },
    /// Optical-phonon-optical conversion and isolation.
    Convert,
    /// PT-symmetric phonon pair: threshold scan or probe spectrum.
    Ptsym,
    /// Enumerate scattering terms allowed by angular momentum.
    Modes,
    /// Run a figure preset.
    Replicate {
        #[arg(value_enum)]
        figure: FigureId,
    },
}

impl Command {
    fn device(&self) -> Device {
        match self {
            Command::Pairgen { .. } => Device::Pairgen,
            Command::Convert => Device::Convert,
            Command::Ptsym => Device::Ptsym,
            Command::Modes => Device::Modes,
            Command::Replicate { figure } => figure.device(),
        }
    }
}

/// Runs one invocation. The banner goes to stderr, data to the output file
/// or stdout. Returns the process exit code.
pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let _ = writeln!(stderr, "{BANNER}");
    match execute_inner(cli, stdout) {
        Ok(None) => 0,
        Ok(Some(e)) | Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute_inner(cli: &Cli, stdout: &mut dyn Write) -> CliResult<Option<CliError>> {
    let mut cfg = config::load(cli.config.as_deref(), &cli.set)?;
    let device = cli.command.device();
    if let Some(d) = cfg.device {
        if d != device {
            return Err(CliError::Validation(format!(
                "config is for device `{}` but the command runs `{}`",
                d.name(),
                device.name()
            )));
        }
    }
    if let Command::Pairgen { engine: Some(e) } = &cli.command {
        cfg.engine = Some(e.clone());
    }
    let command = command_line(cli);
    let out = match &cli.command {
        Command::Replicate { figure } => presets::replicate_figure(*figure, &cfg)?,
        _ => run::run(device, &cfg, &command)?,
    };
    let path = cli.output.clone().or_else(|| cfg.output.path.clone());
    let format = resolve_format(cli.format, &cfg, path.as_deref());
    let text = match format {
        Format::Csv => out.table.to_csv(),
        Format::Json => out.table.to_json(),
    };
    match path {
        Some(p) => std::fs::write(&p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}")))?,
    }
    Ok(out.failure)
}

/// Flag, then config, then file extension, then CSV.
fn resolve_format(flag: Option<Format>, cfg: &ExperimentConfig, path: Option<&Path>) -> Format {
    flag.or(cfg.output.format)
        .or_else(|| match path?.extension()?.to_str()? {
            "json" => Some(Format::Json),
            "csv" => Some(Format::Csv),
            _ => None,
        })
        .unwrap_or(Format::Csv)
}

fn command_line(cli: &Cli) -> String {
    match &cli.command {
        Command::Pairgen { .. } => "pairgen".into(),
        Command::Convert => "convert".into(),
        Command::Ptsym => "ptsym".into(),
        Command::Modes => "modes".into(),
        Command::Replicate { figure } => format!("replicate {}", figure.name()),
    }
}
