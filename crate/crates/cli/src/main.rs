use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use kmkdv_cli::config::{Keyword, TauSetting};
use kmkdv_cli::{parse_config_with, run, CliError, Command, Overrides};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Sub {
    Simulate,
    Analytic,
    Residual,
    Converge,
    Stability,
    Singularities,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Simulate => Command::Simulate,
            Sub::Analytic => Command::Analytic,
            Sub::Residual => Command::Residual,
            Sub::Converge => Command::Converge,
            Sub::Stability => Command::Stability,
            Sub::Singularities => Command::Singularities,
        }
    }
}

/// Numerical laboratory for coupled KdV-MKdV systems.
#[derive(Debug, Parser)]
#[command(name = "kmkdv", version)]
struct Args {
    /// Command to run; defaults to `command` in the config file.
    command: Option<Sub>,
    /// TOML run configuration.
    #[arg(long, short)]
    config: PathBuf,
    /// Grid spacing.
    #[arg(long)]
    h: Option<f64>,
    /// Time step, or `auto`.
    #[arg(long, value_parser = parse_tau)]
    tau: Option<TauSetting>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Write all snapshots into one `t,x,component,value` file.
    #[arg(long)]
    long_format: bool,
    /// Output directory.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn parse_tau(s: &str) -> Result<TauSetting, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(TauSetting::Keyword(Keyword::Auto));
    }
    s.parse::<f64>().map(TauSetting::Fixed).map_err(|_| format!("expected a number or `auto`, got `{s}`"))
}

fn execute(args: Args) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Validation(format!("config: cannot read {}: {e}", args.config.display())))?;
    let overrides = Overrides {
        command: args.command.map(Command::from),
        h: args.h,
        tau: args.tau,
        t_end: args.t_end,
        long_format: args.long_format,
        output: args.output,
    };
    let cfg = parse_config_with(&text, &overrides)?;
    let summary = run(&cfg)?;
    for m in &summary.messages {
        println!("{m}");
    }
    for f in &summary.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kmkdv: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
