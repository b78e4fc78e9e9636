use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use diagent::commands;
use diagent::CliError;

#[derive(Parser, Debug)]
#[command(name = "diagent", version, about = "Diagonal-entropy quench sweeps and expansion coefficients")]
struct Cli {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// `key=value` override, applied after the config file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Numeric ΔS and O1..O3 across the configured sweep.
    Sweep,
    /// Exact expansion coefficients.
    Coefficients {
        /// Keep partitions of weight up to this value.
        #[arg(long)]
        s_max: Option<u32>,
        /// Keep partitions with |μ| − lg(μ) up to this value.
        #[arg(long, conflicts_with = "s_max")]
        order: Option<u32>,
    },
    /// Exact versus first-order ΔS over the eps ladder.
    Perturbation,
    /// Internal consistency checks.
    Selftest,
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Coefficients { s_max, order } => {
            commands::write_output(out, &commands::coefficients(*s_max, *order)?)?;
        }
        Command::Sweep => {
            let cfg = commands::load_config(cli.config.as_deref(), cli.seed, &cli.set)?;
            let (text, exports) = commands::sweep(&cfg, cli.threads)?;
            commands::write_output(out, &text)?;
            for (path, contents) in exports {
                commands::write_output(Some(path.as_ref()), &contents)?;
            }
        }
        Command::Perturbation => {
            let cfg = commands::load_config(cli.config.as_deref(), cli.seed, &cli.set)?;
            commands::write_output(out, &commands::perturbation(&cfg, cli.threads)?)?;
        }
        Command::Selftest => {
            let (report, ok) = commands::selftest()?;
            commands::write_output(out, &report)?;
            return Ok(ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("diagent: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
