use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use gmch_lab::certify::{certify, CertifyOptions};
use gmch_lab::config::FrameFormat;
use gmch_lab::weakres::{residual_table, worst_scaled, WeakresOptions, HEADER, RESIDUAL_SCALE};
use gmch_lab::{io, simulate, stability, ExperimentConfig, LabError, Overrides};

/// Peakon laboratory for the generalized modified Camassa–Holm equation.
///
/// Exit codes: 0 ok, 1 internal error, 2 certificate failure,
/// 3 hypothesis violation, 4 blow-up.
#[derive(Parser)]
#[command(name = "gmch", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact coefficient certificates for n = 1..=n_max, as JSON
    Certify {
        #[arg(long = "n-max", default_value_t = 20)]
        n_max: u32,
        #[arg(long = "phi-denominator", default_value_t = 4096)]
        phi_denominator: u64,
        /// Corrupt one coefficient of the table for this n
        #[arg(long = "inject-fault")]
        inject_fault: Option<u32>,
        /// Also write certificates.json here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolve one initial profile, writing observer records and profiles
    Simulate {
        #[command(flatten)]
        overrides: Overrides,
        /// Trajectory frames: none, csv or binary
        #[arg(long)]
        frames: Option<String>,
    },
    /// Perturbed-peakon sweep over the ε list
    Stability {
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Pointwise weak-form residuals of the peakon
    Weakres {
        #[arg(long = "n", value_delimiter = ',', num_args = 0.., default_values_t = [1u32, 2, 3])]
        ns: Vec<u32>,
        #[arg(long = "a", value_delimiter = ',', num_args = 0.., default_values_t = [0.5, 1.0, 2.0])]
        amplitudes: Vec<f64>,
        #[arg(long = "t", value_delimiter = ',', num_args = 0.., default_values_t = [0.0, 1.0])]
        times: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), LabError> {
    match cli.command {
        Command::Certify { n_max, phi_denominator, inject_fault, out } => {
            let start = Instant::now();
            let bundle = certify(&CertifyOptions { n_max, phi_denominator, inject_fault })?;
            println!("{}", serde_json::to_string_pretty(&bundle)?);
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                io::write_json(&dir.join("certificates.json"), &bundle)?;
            }
            eprintln!("certified n = 1..={n_max} in {:.2?}", start.elapsed());
            if let Some(bad) = bundle.failures().next() {
                let w = bad.witness().map(|w| format!(" (n = {}, residual {})", w.n, w.residual)).unwrap_or_default();
                return Err(LabError::Certificate(format!("{}{w}", bad.identity_id().label())));
            }
            Ok(())
        }
        Command::Simulate { overrides, frames } => {
            let mut cfg = ExperimentConfig::resolve(&overrides)?;
            if let Some(f) = frames {
                cfg.frames.format = match f.as_str() {
                    "none" => FrameFormat::None,
                    "csv" => FrameFormat::Csv,
                    "binary" => FrameFormat::Binary,
                    other => return Err(anyhow::anyhow!("unknown frame format {other:?}").into()),
                };
            }
            let s = simulate::simulate(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&s)?);
            Ok(())
        }
        Command::Stability { overrides } => {
            let cfg = ExperimentConfig::resolve(&overrides)?;
            let report = stability::stability(&cfg)?;
            for r in &report.rows {
                println!(
                    "eps {:.3e}  sup dist {:.3e}  sup |M-a| {:.3e}  max lhs {:.2e}",
                    r.epsilon, r.sup_distance, r.sup_deviation, r.max_lhs_3_5
                );
            }
            for r in &report.aborted {
                println!("eps {:.3e}  aborted ({:?}): {}", r.target_epsilon, r.kind, r.message);
            }
            if let Some(f) = report.deviation_fit {
                println!("|M-a| ~ eps^{:.3} (residual {:.2e})", f.exponent, f.residual);
            }
            if let (Some(k), Some(ratio)) = (report.fitted_constant, report.envelope_ratio) {
                println!("fitted A = {k:.4e}, envelope ratio {ratio:.3}");
            }
            report.error().map_or(Ok(()), Err)
        }
        Command::Weakres { ns, amplitudes, times, points, out } => {
            let opts = WeakresOptions { ns, amplitudes, times, points, ..Default::default() };
            let rows = residual_table(&opts)?;
            std::fs::create_dir_all(&out)?;
            io::write_csv(&out.join("residuals.csv"), &rows, &HEADER)?;
            let worst = worst_scaled(&rows);
            println!("{} residuals, worst |r|/a^(2n+1) = {worst:.3e}", rows.len());
            if worst > RESIDUAL_SCALE {
                return Err(LabError::Certificate(format!("residual {worst:e} above {RESIDUAL_SCALE:e}·a^(2n+1)")));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
