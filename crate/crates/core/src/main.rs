use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hallmhd::harness::verify::{run_suite, Suite};
use hallmhd::harness::{self, EXIT_CONFIG, EXIT_OK, EXIT_VERIFY_FAILED};
use hallmhd::solver::config::RunConfig;

#[derive(Parser)]
#[command(
    name = "hallmhd",
    version,
    about = "Pseudo-spectral Hall-MHD with Littlewood-Paley regularity diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configured run, writing diagnostics, checkpoints and a manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Continue from a checkpoint written by an earlier run.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Run a named property suite and print a JSON report.
    Verify {
        /// lp, lemmas, solver, fluxes or all
        #[arg(long)]
        suite: Suite,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Per-shell energies of a checkpoint as CSV.
    Spectra {
        #[arg(long)]
        ckpt: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return code(if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK });
        }
    };
    match cli.command {
        Command::Run { config, resume } => {
            let cfg = match RunConfig::load(&config) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("error: {e}");
                    return code(EXIT_CONFIG);
                }
            };
            match harness::run(&cfg, resume.as_deref()) {
                Ok(m) => {
                    eprintln!(
                        "{:?}; {} steps, {} records, {:.1} s; manifest in {}",
                        m.termination,
                        m.wall_clock.steps,
                        m.wall_clock.records,
                        m.wall_clock.seconds,
                        harness::manifest_path(&cfg.output_dir).display()
                    );
                    code(m.termination.exit_code())
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    code(harness::error_exit_code(&e))
                }
            }
        }
        Command::Verify {
            suite,
            n,
            seed,
            report,
        } => match run_suite(suite, n, seed) {
            Ok(r) => {
                let text = serde_json::to_string_pretty(&r).expect("report serializes");
                println!("{text}");
                if let Some(path) = report {
                    if let Err(e) = std::fs::write(&path, &text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return code(EXIT_VERIFY_FAILED);
                    }
                }
                for c in r.checks.iter().filter(|c| !c.passed) {
                    eprintln!(
                        "FAILED {}/{}: {:e} > {:e}",
                        c.suite, c.name, c.value, c.limit
                    );
                }
                code(if r.passed {
                    EXIT_OK
                } else {
                    EXIT_VERIFY_FAILED
                })
            }
            Err(e) => {
                eprintln!("error: {e}");
                code(EXIT_CONFIG)
            }
        },
        Command::Spectra { ckpt, out } => match harness::write_spectra(&ckpt, &out) {
            Ok(rows) => {
                eprintln!("{} shells written to {}", rows.len(), out.display());
                code(EXIT_OK)
            }
            Err(e) => {
                eprintln!("error: {e}");
                code(harness::error_exit_code(&e))
            }
        },
    }
}
