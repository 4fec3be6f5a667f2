use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use elasto_cli::config::Format;
use elasto_cli::{cmd_compare, cmd_export, cmd_solve, cmd_validate, cmd_verify, load_config, CliError, OutputOptions, EXIT_ERROR};

/// Exact solutions of the elastodynamic Cauchy problem for admissible data.
#[derive(Parser)]
#[command(name = "elasto", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the admissibility conditions of the configured data.
    Validate(ConfigArg),
    /// Evaluate the solution at the configured points or slice.
    Solve(OutputArgs),
    /// Residual of the elastic system and the identity suite.
    Verify(ConfigArg),
    /// Convergence of the leapfrog oracle towards the exact solution.
    Compare(ConfigArg),
    /// Volume snapshot of the solution over the grid box.
    Export(OutputArgs),
}

#[derive(Args)]
struct ConfigArg {
    #[arg(long)]
    config: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Vtk,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long)]
    config: PathBuf,
    /// Skip the admissibility check.
    #[arg(long)]
    force: bool,
    /// Add the stress tensor to the output.
    #[arg(long)]
    stress: bool,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutputArgs {
    fn options(&self) -> OutputOptions {
        OutputOptions {
            force: self.force,
            stress: self.stress,
            format: self.format.map(|f| match f {
                FormatArg::Csv => Format::Csv,
                FormatArg::Vtk => Format::Vtk,
            }),
            out: self.out.clone(),
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("ELASTO_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("ELASTO_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot set up {n} worker threads: {e}")))
}

fn run(cli: Cli) -> Result<elasto_cli::Outcome, CliError> {
    configure_threads()?;
    match cli.command {
        Command::Validate(a) => cmd_validate(&load_config(&a.config)?),
        Command::Solve(a) => cmd_solve(&load_config(&a.config)?, &a.options()),
        Command::Verify(a) => cmd_verify(&load_config(&a.config)?),
        Command::Compare(a) => cmd_compare(&load_config(&a.config)?),
        Command::Export(a) => cmd_export(&load_config(&a.config)?, &a.options()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.report);
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
