//! `eigenshape` — penalized Dirichlet eigenvalues on rasterized planar
//! domains. Thin argument layer; all behavior lives in the library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use eigenshape::config::{load_config, ExperimentConfig};
use eigenshape::experiment::{
    all_samples, eigencurve_svg, margins_to_csv, render_ball_values, render_crosscheck,
    render_rearrange, render_sweep_summary, render_verify, run_ball_values, run_crosscheck,
    run_rearrange, run_sweep, samples_to_csv, verify_margins,
};
use eigenshape::{Error, Result};

#[derive(Parser)]
#[command(
    name = "eigenshape",
    version,
    about = "Penalized Dirichlet eigenvalues on rasterized planar domains",
    long_about = "Computes the minimum of (Dirichlet energy + alpha |signed mass|) / L2 mass \
                  over functions vanishing outside a domain, sweeps it over penalty strengths, \
                  and verifies it against the closed-form two-ball lower bound.\n\n\
                  Exit status: 0 success, 2 usage or config error, 3 solver non-convergence, \
                  4 verification failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form ball quantities, optionally checked by a grid solve
    BallValues {
        /// Space dimension for the closed forms
        #[arg(long, default_value_t = 2)]
        n: u32,
        /// Ball measure (default 1; mutually exclusive with --radius)
        #[arg(long)]
        measure: Option<f64>,
        /// Ball radius (mutually exclusive with --measure)
        #[arg(long)]
        radius: Option<f64>,
        /// Penalty strength for the envelope evaluation
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        /// Also rasterize the disk at this grid spacing and solve (n = 2)
        #[arg(long)]
        grid_h: Option<f64>,
        /// Solver tolerance for the grid solve
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Print the report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Sweep the penalized eigenvalue over alpha; writes CSV and SVG
    Eigencurve {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Compare computed values against the two-ball lower bound
    VerifyTheorem {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Cross-validate the independent solver routes against each other
    Crosscheck {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Symmetrize a mask's ground state and compare with the bound
    Rearrange {
        /// Mask file: `mask <width> <height> <h>` header, then 0/1 rows
        #[arg(long)]
        mask: PathBuf,
        /// Penalty strength for the comparison chain
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        /// Directory for the symmetrized mask file
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Solver tolerance
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Print the report as JSON
        #[arg(long)]
        json: bool,
    },
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Experiment config file (`key = value` lines with [shape] blocks)
    #[arg(long)]
    config: PathBuf,
    /// Override the config's output_dir
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's seed
    #[arg(long)]
    seed: Option<u64>,
    /// Print results as JSON instead of the text summary
    #[arg(long)]
    json: bool,
}

impl CommonArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = load_config(&self.config)?;
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        Ok(cfg)
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports contain only serializable fields")
}

/// Writes to stdout, exiting quietly if the reader closed the pipe
/// (e.g. `eigenshape ... | head`). Files are always written before any
/// printing, so an early exit never loses an output file.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if out.write_all(text.as_bytes()).is_err() || out.flush().is_err() {
        std::process::exit(0);
    }
}

fn emitln(text: &str) {
    emit(text);
    emit("\n");
}

/// Error for sweeps in which some rows' solves failed (exit status 3).
fn rows_failed_error(failed: usize, total: usize) -> Error {
    Error::RowsFailed { failed, total }
}

fn cmd_eigencurve(common: &CommonArgs) -> Result<()> {
    let cfg = common.resolve()?;
    cfg.require_equal_measures()?;
    let shapes = run_sweep(&cfg)?;
    let samples = all_samples(&shapes);
    let csv = samples_to_csv(&samples);
    let svg = eigencurve_svg(&cfg, &shapes);
    std::fs::create_dir_all(&cfg.output_dir)?;
    let csv_path = cfg.output_dir.join("eigencurve.csv");
    let svg_path = cfg.output_dir.join("eigencurve.svg");
    std::fs::write(&csv_path, &csv)?;
    std::fs::write(&svg_path, &svg)?;
    if common.json {
        emitln(&to_json(&samples));
    } else {
        emit(&render_sweep_summary(&shapes));
        emitln(&format!("wrote {}", csv_path.display()));
        emitln(&format!("wrote {}", svg_path.display()));
    }
    let failed = samples.iter().filter(|s| s.status != "ok").count();
    if failed > 0 {
        return Err(rows_failed_error(failed, samples.len()));
    }
    Ok(())
}

fn cmd_verify_theorem(common: &CommonArgs) -> Result<()> {
    let cfg = common.resolve()?;
    cfg.require_equal_measures()?;
    let shapes = run_sweep(&cfg)?;
    let rows = verify_margins(&cfg, &shapes)?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    let csv_path = cfg.output_dir.join("verify_margins.csv");
    std::fs::write(&csv_path, margins_to_csv(&rows))?;
    if common.json {
        emitln(&to_json(&rows));
    } else {
        emit(&render_verify(&rows, cfg.slack));
        emitln(&format!("wrote {}", csv_path.display()));
    }
    let unconverged = rows.iter().filter(|r| r.status != "ok").count();
    if unconverged > 0 {
        return Err(rows_failed_error(unconverged, rows.len()));
    }
    let violations = rows.iter().filter(|r| !r.pass).count();
    if violations > 0 {
        return Err(Error::VerificationFailed(format!(
            "{violations} of {} rows fell below the bound by more than the slack ({})",
            rows.len(),
            cfg.slack
        )));
    }
    Ok(())
}

fn cmd_crosscheck(common: &CommonArgs) -> Result<()> {
    let cfg = common.resolve()?;
    let report = run_crosscheck(&cfg)?;
    if common.json {
        emitln(&to_json(&report));
    } else {
        emit(&render_crosscheck(&report));
    }
    if !report.pass {
        return Err(Error::VerificationFailed(
            "solver routes disagree beyond thresholds; see the report".to_string(),
        ));
    }
    Ok(())
}

fn cmd_rearrange(mask: &PathBuf, alpha: f64, out: &PathBuf, tol: f64, json: bool) -> Result<()> {
    let text = std::fs::read_to_string(mask)
        .map_err(|e| Error::Usage(format!("cannot read mask `{}`: {e}", mask.display())))?;
    let (report, candidate_text) = run_rearrange(&text, alpha, tol)?;
    std::fs::create_dir_all(out)?;
    let mask_path = out.join("rearranged.mask");
    std::fs::write(&mask_path, candidate_text)?;
    if json {
        emitln(&to_json(&report));
    } else {
        emit(&render_rearrange(&report));
        emitln(&format!("wrote {}", mask_path.display()));
    }
    if !report.pass {
        return Err(Error::VerificationFailed(
            "rearrangement chain violated a bound; see the report".to_string(),
        ));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::BallValues {
            n,
            measure,
            radius,
            alpha,
            grid_h,
            tol,
            json,
        } => {
            let report = run_ball_values(*n, *radius, *measure, *alpha, *grid_h, *tol)?;
            if *json {
                emitln(&to_json(&report));
            } else {
                emit(&render_ball_values(&report));
            }
            Ok(())
        }
        Command::Eigencurve { common } => cmd_eigencurve(common),
        Command::VerifyTheorem { common } => cmd_verify_theorem(common),
        Command::Crosscheck { common } => cmd_crosscheck(common),
        Command::Rearrange {
            mask,
            alpha,
            out,
            tol,
            json,
        } => cmd_rearrange(mask, *alpha, out, *tol, *json),
    }
}

fn main() -> ExitCode {
    // clap itself exits with status 2 on unknown flags or missing arguments.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
