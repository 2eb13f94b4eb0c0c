//! Command-line front end: `run` a scenario file, reproduce a bundled
//! `preset`, or `compare` two finished runs.
//!
//! Exit codes: 0 on success, 2 for configuration or usage problems, 3 for
//! numerical failures. `compare` additionally exits 1 when `--max-dev` is
//! given and the runs differ by more than that.

use crate::error::Error;
use crate::scenario::{compare_runs, run_preset, run_scenario_file};
use clap::{Parser, Subcommand};
use std::path::PathBuf;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "POLARAD_OUT";

#[derive(Parser, Debug)]
#[command(
    name = "polarad",
    version,
    about = "collective spontaneous emission of atom chains near a dielectric surface"
)]
pub struct Cli {
    /// worker threads for sweeps and multi-case presets (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a scenario config (TOML) and write its artifacts.
    Run {
        config: PathBuf,
        /// output directory [default: $POLARAD_OUT or the working directory]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce a bundled dataset into OUT/<name>/.
    Preset {
        /// one of: table1, fig4a, fig4b, fig4c, fig5, fig7
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two finished runs by their manifest.json files.
    Compare {
        manifest_a: PathBuf,
        manifest_b: PathBuf,
        /// fail (exit 1) if the normalized traces deviate by more than this
        #[arg(long)]
        max_dev: Option<f64>,
    },
}

fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn install_thread_pool(threads: Option<usize>) -> Result<(), Error> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

/// Parse `args` (including argv[0]) and execute; returns the process exit code.
pub fn run<I, S>(args: I) -> u8
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version itself; real usage errors exit 2
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = install_thread_pool(cli.threads) {
        eprintln!("{e}");
        return e.exit_code();
    }
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command) -> Result<u8, Error> {
    match command {
        Command::Run { config, out } => {
            let out_dir = out.unwrap_or_else(default_out_dir);
            let manifest = run_scenario_file(&config, &out_dir)?;
            println!(
                "run {} finished in {} ms; {} output file(s) in {}",
                manifest.label,
                manifest.elapsed_ms,
                manifest.outputs.len(),
                out_dir.display()
            );
            if let Some(fit) = &manifest.fit {
                println!(
                    "fitted decay time: {:.6} free-space lifetimes (window 0..{:.3})",
                    fit.tau, fit.window_end
                );
            }
            Ok(0)
        }
        Command::Preset { name, out } => {
            let out_dir = out.unwrap_or_else(default_out_dir);
            let manifest = run_preset(&name, &out_dir)?;
            println!(
                "preset {} finished in {} ms; {} output file(s) in {}",
                manifest.label,
                manifest.elapsed_ms,
                manifest.outputs.len(),
                out_dir.join(&name).display()
            );
            Ok(0)
        }
        Command::Compare {
            manifest_a,
            manifest_b,
            max_dev,
        } => {
            let report = compare_runs(&manifest_a, &manifest_b)?;
            println!(
                "{} grid points; max |P/P0| deviation {:.3e}",
                report.points, report.max_abs_dev
            );
            match (report.tau_a, report.tau_b) {
                (Some(a), Some(b)) => println!(
                    "fitted decay times: {a:.9} vs {b:.9} (difference {:.3e})",
                    a - b
                ),
                _ => println!("fitted decay times unavailable for at least one run"),
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("serializable report")
            );
            match max_dev {
                Some(tol) if report.max_abs_dev > tol => {
                    eprintln!("deviation exceeds --max-dev {tol:e}");
                    Ok(1)
                }
                _ => Ok(0),
            }
        }
    }
}
