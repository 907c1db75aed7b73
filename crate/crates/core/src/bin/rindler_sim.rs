//! Command-line front end: scenario runs and sweeps from JSON configs,
//! the operator-identity battery, the classical wavenumber scan and the
//! collective-coupling selectivity report.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rindler_sim::classical::amplitude_scan;
use rindler_sim::rindler::{coupling_selectivity_report, default_grids, ChainGeometry};
use rindler_sim::scenarios::{
    identities_json, refusal_run, run_scenario, sweep, ScenarioConfig, ScenarioRun,
};
use rindler_sim::Result;

const SERIES_COLUMNS: &str = "\
Series CSV columns:
  quantum scenarios : tau, n_sigma, n_b1, overlap, entropy_field, entropy_chains, leakage
                      (occupations of the collective chain mode and the resonant
                      Rindler mode, closed-form/oracle overlap, von Neumann
                      entropies of the single-mode marginals, truncation leakage)
  identities        : name, cutoff, residual_norm, bound, interior_levels_excluded, passed
  classical         : k, nu_plus, nu_minus, rabi, max_psi_sq
  coupling-report   : |S| matrix; first row the k axis, first column the Omega axis

Exit code 0 iff every assertion of every run passed.";

#[derive(Parser)]
#[command(
    name = "rindler-sim",
    about = "Truncated-Fock-space simulator for accelerated oscillator chains in the Minkowski vacuum",
    after_long_help = SERIES_COLUMNS,
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario from a JSON config and write <stem>.report.json
    /// and <stem>.series.csv.
    Run {
        config: PathBuf,
        /// Output directory for report and series files.
        #[arg(long, default_value = "runs")]
        out_dir: PathBuf,
    },
    /// Run every *.json config in a directory (alphabetical order,
    /// parallel; RINDLER_SIM_THREADS caps the worker count).
    Sweep {
        dir: PathBuf,
        #[arg(long, default_value = "runs")]
        out_dir: PathBuf,
    },
    /// Verify the operator-identity battery and print a pass/fail table.
    VerifyIdentities {
        /// Also write the reports as a JSON array.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Classical normal-mode scan over wavenumbers; CSV to stdout or file.
    ClassicalScan {
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.5)]
        kmin: f64,
        #[arg(long, default_value_t = 1.5)]
        kmax: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[arg(long, default_value_t = 1.0)]
        light_speed: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Collective-coupling |S(k, Omega)| matrix for a uniform chain; CSV
    /// to stdout or file.
    CouplingReport {
        #[arg(long, default_value_t = 64)]
        oscillators: usize,
        #[arg(long, default_value_t = 1.0)]
        spacing: f64,
        #[arg(long, default_value_t = 1.0)]
        accel: f64,
        #[arg(long, default_value_t = 1.0)]
        light_speed: f64,
        #[arg(long, default_value_t = 1.0)]
        omega_chain: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, out_dir } => {
            let run = run_config_file(&config)?;
            write_run(&config, &out_dir, &run)?;
            print_summary(&config, &run);
            Ok(run.report.passed)
        }
        Command::Sweep { dir, out_dir } => {
            let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|e| e == "json"))
                .collect();
            paths.sort();
            if paths.is_empty() {
                eprintln!("no *.json configs in {}", dir.display());
                return Ok(true);
            }
            let mut configs = Vec::new();
            for path in &paths {
                configs.push(ScenarioConfig::from_json(&std::fs::read_to_string(path)?)?);
            }
            let runs = sweep(&configs);
            let mut all_passed = true;
            for (path, run) in paths.iter().zip(&runs) {
                write_run(path, &out_dir, run)?;
                print_summary(path, run);
                all_passed &= run.report.passed;
            }
            println!(
                "sweep: {}/{} runs passed",
                runs.iter().filter(|r| r.report.passed).count(),
                runs.len()
            );
            Ok(all_passed)
        }
        Command::VerifyIdentities { json } => {
            let (reports, payload) = identities_json()?;
            if let Some(path) = json {
                std::fs::write(&path, &payload)?;
            }
            println!(
                "{:<46} {:>8} {:>12} {:>12}  result",
                "identity", "cutoff", "residual", "bound"
            );
            let mut all = true;
            for r in &reports {
                println!(
                    "{:<46} {:>8} {:>12.3e} {:>12.3e}  {}",
                    r.name,
                    r.cutoff,
                    r.residual_norm,
                    r.bound,
                    if r.passed { "pass" } else { "FAIL" }
                );
                all &= r.passed;
            }
            println!(
                "{} checks, {} failed",
                reports.len(),
                reports.iter().filter(|r| !r.passed).count()
            );
            Ok(all)
        }
        Command::ClassicalScan {
            omega,
            epsilon,
            kmin,
            kmax,
            points,
            light_speed,
            out,
        } => {
            let n = points.max(2);
            let ks: Vec<f64> = (0..n)
                .map(|i| kmin + (kmax - kmin) * i as f64 / (n - 1) as f64)
                .collect();
            let rows = amplitude_scan(omega, epsilon, light_speed, &ks)?;
            let mut csv = String::from("k,nu_plus,nu_minus,rabi,max_psi_sq\n");
            for r in &rows {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.k, r.nu_plus, r.nu_minus, r.rabi, r.max_psi_sq
                ));
            }
            emit(csv, out)?;
            Ok(true)
        }
        Command::CouplingReport {
            oscillators,
            spacing,
            accel,
            light_speed,
            omega_chain,
            out,
        } => {
            let geometry =
                ChainGeometry::uniform(oscillators, spacing, accel, light_speed, omega_chain)?;
            let (omegas, ks) = default_grids(&geometry);
            let report = coupling_selectivity_report(&geometry, &omegas, &ks)?;
            let mut csv = String::from("omega\\k");
            for k in &report.ks {
                csv.push_str(&format!(",{k}"));
            }
            csv.push('\n');
            for (omega, row) in report.omegas.iter().zip(&report.magnitudes) {
                csv.push_str(&format!("{omega}"));
                for v in row {
                    csv.push_str(&format!(",{v}"));
                }
                csv.push('\n');
            }
            emit(csv, out)?;
            eprintln!(
                "dominance statistic: {:.3} (exclusion window {:.4})",
                report.dominance, report.exclusion
            );
            Ok(true)
        }
    }
}

fn run_config_file(path: &Path) -> Result<ScenarioRun> {
    let config = ScenarioConfig::from_json(&std::fs::read_to_string(path)?)?;
    Ok(match run_scenario(&config) {
        Ok(run) => run,
        Err(err) => refusal_run(&config, &err),
    })
}

fn write_run(config_path: &Path, out_dir: &Path, run: &ScenarioRun) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let stem = config_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("run");
    let report_json = serde_json::to_string_pretty(&run.report)?;
    std::fs::write(out_dir.join(format!("{stem}.report.json")), report_json)?;
    std::fs::write(out_dir.join(format!("{stem}.series.csv")), &run.series_csv)?;
    Ok(())
}

fn print_summary(path: &Path, run: &ScenarioRun) {
    let report = &run.report;
    let tag = if report.passed { "pass" } else { "FAIL" };
    let gamma = report
        .gamma
        .map(|g| format!(" gamma={g}"))
        .unwrap_or_default();
    println!(
        "[{tag}] {} ({}{gamma}) {:.2}s",
        path.display(),
        report.scenario,
        report.wall_clock_seconds
    );
    if let Some(refusal) = &report.refusal {
        println!("       refused: {refusal}");
    }
    for a in &report.assertions {
        println!(
            "       {:<34} measured {:>12.3e}  tolerance {:>12.3e}  {}",
            a.name,
            a.measured,
            a.tolerance,
            if a.passed { "pass" } else { "FAIL" }
        );
    }
}

fn emit(text: String, out: Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
