use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use varqd_cli::commands::{self, CompareRow};
use varqd_cli::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "varqd",
    version,
    about = "Variational quantum dynamics with a posteriori error certificates"
)]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario and write its artifacts.
    Run {
        config: PathBuf,
        /// Output directory (overrides `output.directory`).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Join a variational run with a reference run and write the certificate.
    Certify {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        /// Where to write the certificate (defaults to the run directory).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Align the time series of several runs that share potential and horizon.
    Compare {
        #[arg(required = true)]
        runs: Vec<PathBuf>,
        /// Write the aligned table here instead of stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario once per value of a config parameter.
    Sweep {
        config: PathBuf,
        /// Dotted config path, e.g. `initial.delta` or `initial.q[0]`.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        #[arg(short, long, default_value = "varqd-sweep")]
        out: PathBuf,
    },
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("VARQD_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::invalid(
            "VARQD_THREADS",
            format!("must be a positive integer, got `{raw}`"),
        )
    })?;
    // fails only if a pool already exists, which cannot happen this early
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6e}"))
        .unwrap_or_else(|| "-".to_string())
}

fn print_summary(rows: &[CompareRow]) {
    eprintln!(
        "{:<4} {:<10} {:<5} {:>13} {:>13} {:>13} {:>13}  dir",
        "run", "kind", "rule", "B(T)", "e(T)", "max|dq|", "max|dp|"
    );
    for (i, r) in rows.iter().enumerate() {
        eprintln!(
            "{:<4} {:<10} {:<5} {:>13} {:>13} {:>13} {:>13}  {}",
            i + 1,
            r.kind.to_string(),
            r.principle,
            format!("{:.6e}", r.bound),
            opt(r.true_error),
            opt(r.max_dq),
            opt(r.max_dp),
            r.dir.display()
        );
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Run { config, out } => {
            let outcome = commands::run(&config, out.as_deref())?;
            match &outcome.certificate {
                Some(c) => println!(
                    "{}: T = {}, B(T) = {:.6e}, e(T) = {}, max eps = {:.6e}",
                    outcome.dir.display(),
                    outcome.final_time,
                    c.bound,
                    opt(c.true_error),
                    c.epsilon_max
                ),
                None => println!(
                    "{}: reference to T = {}",
                    outcome.dir.display(),
                    outcome.final_time
                ),
            }
        }
        Command::Certify {
            run,
            reference,
            out,
        } => {
            let c = commands::certify(&run, &reference, out.as_deref())?;
            println!(
                "B(T) = {:.6e}, e(T) = {}, margin = {}, violated = {}",
                c.bound,
                opt(c.true_error),
                opt(c.margin),
                c.violated
            );
        }
        Command::Compare { runs, out } => {
            let cmp = commands::compare(&runs)?;
            print_summary(&cmp.summary);
            match out {
                Some(path) => {
                    let file = std::fs::File::create(&path).map_err(|source| CliError::Io {
                        path: path.clone(),
                        source,
                    })?;
                    cmp.write(std::io::BufWriter::new(file))
                        .map_err(|source| CliError::Io { path, source })?;
                }
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    cmp.write(&mut lock)
                        .and_then(|_| lock.flush())
                        .map_err(|source| CliError::Io {
                            path: "<stdout>".into(),
                            source,
                        })?;
                }
            }
        }
        Command::Sweep {
            config,
            param,
            values,
            out,
        } => {
            let (entries, cmp) = commands::sweep(&config, &param, &values, &out)?;
            print_summary(&cmp.summary);
            for e in entries {
                println!(
                    "{param} = {}: B(T) = {:.6e}, e(T) = {}",
                    e.value,
                    e.bound,
                    opt(e.true_error)
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
