use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rabi_cli::compare::{self, Metric};
use rabi_cli::error::{CliError, EXIT_OK};
use rabi_cli::{output, ConfigArgs};

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (output schema 1)");

#[derive(Parser)]
#[command(name = "rabi", version = VERSION, about = "Dissipative quantum Rabi model: closed form, master equation and quantum trajectories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write a CSV plus metadata sidecar.
    Run(ConfigArgs),
    /// Regenerate the data behind one figure preset.
    Figure {
        /// Figure number, 1 to 8.
        id: u8,
        #[arg(long, default_value = "figures")]
        out_dir: PathBuf,
    },
    /// Compare one column of two CSV runs.
    Compare {
        /// Reference file.
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value = "mean_photon")]
        column: String,
        #[arg(long, value_enum, default_value = "max-abs")]
        metric: Metric,
        /// Evaluation time for rel-at-tau.
        #[arg(long)]
        tau: Option<f64>,
        /// Interpolate the second file onto the first file's grid.
        #[arg(long)]
        interpolate: bool,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run a configuration once per value of one parameter.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// Config key to vary.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        values: Vec<f64>,
        #[arg(long, default_value = "sweep")]
        out_dir: PathBuf,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.resolve()?;
            rabi_cli::run(&cfg)?;
            if let Some(path) = &cfg.output {
                println!("{}", path.display());
            }
        }
        Command::Figure { id, out_dir } => {
            for path in rabi_cli::figure(id, &out_dir)? {
                println!("{}", path.display());
            }
        }
        Command::Compare {
            a,
            b,
            column,
            metric,
            tau,
            interpolate,
            json,
        } => {
            let ta = output::read_csv(&a)?;
            let tb = output::read_csv(&b)?;
            let report = compare::compare(&ta, &tb, &column, metric, tau, interpolate)?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string(&report).expect("report serializes")
                );
            } else {
                let at = report
                    .tau
                    .map(|t| format!(" at tau = {t}"))
                    .unwrap_or_default();
                println!(
                    "{} {}{at}: {}",
                    report.metric.name(),
                    report.column,
                    output::format_float(report.value)
                );
            }
        }
        Command::Sweep {
            config,
            param,
            values,
            out_dir,
        } => {
            let base = config.resolve()?;
            for path in rabi_cli::sweep(&base, &param, &values, &out_dir)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::from(EXIT_OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
