//! `gmch stability`: perturbed-peakon sweeps over target distances ε.
//!
//! Each row builds `y₀ = mollifier + β·bump` with β bisected so that
//! `‖u₀ − φ_c‖_{H¹} = ε`, evolves it, and tracks the distance to the
//! translated peakon `√(E − 2a² − 4a(M − a))` and `|M − a|` at every
//! observation. Rows run concurrently; the report is assembled afterwards
//! in ε order.

use std::fs;

use gmch_core::evolution::{relative_drifts, Solver};
use gmch_core::functionals::h1_radicand;
use gmch_core::profiles::{admissible_perturbation, bisect_bump_amplitude, PeakonParams};
use gmch_core::Error as CoreError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::LabError;
use crate::io;

pub const CONSTANT_NOTE: &str = "the source states the constant both as A(n, c, |u0|) and as A(c, |u0|); \
both are read as the single fitted constant A_hat = sup (M - a)^2 / eps";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub epsilon: f64,
    pub t: f64,
    pub distance: f64,
    pub deviation: f64,
    pub lhs_3_5: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityRow {
    pub target_epsilon: f64,
    pub epsilon: f64,
    pub beta: f64,
    pub bump_center: f64,
    pub sup_distance: f64,
    pub sup_deviation: f64,
    pub max_lhs_3_5: f64,
    pub drift_e: f64,
    pub drift_f: f64,
    pub min_y: f64,
    pub t_reached: f64,
    #[serde(skip)]
    pub trace: Vec<TracePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AbortKind {
    Hypothesis,
    BlowUp,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbortedRow {
    pub target_epsilon: f64,
    pub kind: AbortKind,
    pub message: String,
    /// Last valid time for blow-ups.
    pub t: Option<f64>,
}

/// `y ≈ prefactor·ε^exponent`, fitted in log–log; `residual` is the RMS of
/// the log residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub n: u32,
    pub c: f64,
    pub a: f64,
    pub delta: f64,
    pub gate: f64,
    pub rows: Vec<StabilityRow>,
    pub aborted: Vec<AbortedRow>,
    pub distance_fit: Option<PowerFit>,
    pub deviation_fit: Option<PowerFit>,
    pub fitted_constant: Option<f64>,
    /// Largest `distance / (3√(3aε + 4a√(Âε)))` over all rows and times.
    pub envelope_ratio: Option<f64>,
    pub envelope_holds: Option<bool>,
    pub constant_note: &'static str,
}

impl ExperimentReport {
    pub fn error(&self) -> Option<LabError> {
        if let Some(r) = self.aborted.iter().find(|r| r.kind == AbortKind::Hypothesis) {
            return Some(LabError::Hypothesis(format!("ε = {}: {}", r.target_epsilon, r.message)));
        }
        self.aborted.iter().find(|r| r.kind == AbortKind::BlowUp).map(|r| LabError::BlowUp {
            reason: format!("ε = {}: {}", r.target_epsilon, r.message),
            t: r.t.unwrap_or(0.0),
        })
    }
}

pub fn power_fit(points: &[(f64, f64)]) -> Option<PowerFit> {
    let logs: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if logs.len() < 2 {
        return None;
    }
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    let icpt = my - slope * mx;
    let residual = (logs.iter().map(|p| (p.1 - icpt - slope * p.0).powi(2)).sum::<f64>() / k).sqrt();
    Some(PowerFit { exponent: slope, prefactor: icpt.exp(), residual })
}

/// `3√(3aε + 4a√(Âε))`.
pub fn envelope(a: f64, epsilon: f64, fitted: f64) -> f64 {
    3.0 * (3.0 * a * epsilon + 4.0 * a * (fitted * epsilon).sqrt()).sqrt()
}

fn bump_center(cfg: &ExperimentConfig) -> f64 {
    cfg.stability.bump_offset.unwrap_or_else(|| ChaCha8Rng::seed_from_u64(cfg.seed).gen_range(3.0..5.0))
}

fn run_row(cfg: &ExperimentConfig, params: &PeakonParams, target: f64) -> Result<StabilityRow, AbortedRow> {
    let abort = |kind, message: String, t| AbortedRow { target_epsilon: target, kind, message, t };
    let internal = |e: anyhow::Error| abort(AbortKind::Hypothesis, format!("setup failed: {e}"), None);
    let a = params.a();
    match admissible_perturbation(target, a) {
        Ok(true) => {}
        Ok(false) => {
            return Err(abort(
                AbortKind::Hypothesis,
                format!("ε outside (0, (3 − 2√2)a) = (0, {})", (3.0 - 2.0 * 2f64.sqrt()) * a),
                None,
            ))
        }
        Err(e) => return Err(internal(e.into())),
    }
    let grid = cfg.grid().map_err(internal)?;
    let moll = cfg.mollifier(params).map_err(internal)?;
    let center = bump_center(cfg);
    let (beta, data) =
        match bisect_bump_amplitude(params, &moll, center, &grid, target, cfg.stability.bisection_tolerance) {
            Ok(v) => v,
            Err(CoreError::TargetBelowFloor { floor, .. }) => {
                return Err(abort(
                    AbortKind::Hypothesis,
                    format!("unreachable: the mollified peakon alone is at distance {floor}"),
                    None,
                ))
            }
            Err(e) => return Err(internal(e.into())),
        };
    if data.min_y0() < 0.0 {
        return Err(abort(AbortKind::Hypothesis, format!("min y0 = {} < 0", data.min_y0()), None));
    }
    let solver = Solver::new(cfg.solver_config().map_err(internal)?).map_err(|e| internal(e.into()))?;
    let (records, t_reached) = match solver.run(data.u, &mut []) {
        Ok(r) => (r.records, r.final_state.t),
        Err(b) => return Err(abort(AbortKind::BlowUp, format!("{:?}", b.reason), Some(b.t))),
    };
    let trace: Vec<TracePoint> = records
        .iter()
        .map(|r| TracePoint {
            epsilon: data.epsilon,
            t: r.t,
            distance: h1_radicand(r.e, a, r.m).max(0.0).sqrt(),
            deviation: (r.m - a).abs(),
            lhs_3_5: r.lhs_3_5,
        })
        .collect();
    let (drift_e, drift_f) = relative_drifts(&records);
    Ok(StabilityRow {
        target_epsilon: target,
        epsilon: data.epsilon,
        beta,
        bump_center: center,
        sup_distance: trace.iter().map(|p| p.distance).fold(0.0, f64::max),
        sup_deviation: trace.iter().map(|p| p.deviation).fold(0.0, f64::max),
        max_lhs_3_5: trace.iter().map(|p| p.lhs_3_5).fold(f64::NEG_INFINITY, f64::max),
        drift_e,
        drift_f,
        min_y: records.iter().map(|r| r.min_y).fold(f64::INFINITY, f64::min),
        t_reached,
        trace,
    })
}

/// Runs every row and assembles the report, without touching the disk.
pub fn sweep(cfg: &ExperimentConfig) -> Result<ExperimentReport, LabError> {
    let params = cfg.params()?;
    let a = params.a();
    let outcomes: Vec<Result<StabilityRow, AbortedRow>> =
        cfg.sorted_epsilons().par_iter().map(|&eps| run_row(cfg, &params, eps)).collect();
    let mut rows = Vec::new();
    let mut aborted = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => rows.push(r),
            Err(r) => aborted.push(r),
        }
    }
    rows.sort_by(|x, y| x.epsilon.total_cmp(&y.epsilon));
    let distance_fit = power_fit(&rows.iter().map(|r| (r.epsilon, r.sup_distance)).collect::<Vec<_>>());
    let deviation_fit = power_fit(&rows.iter().map(|r| (r.epsilon, r.sup_deviation)).collect::<Vec<_>>());
    let fitted_constant = rows
        .iter()
        .flat_map(|r| r.trace.iter())
        .map(|p| p.deviation * p.deviation / p.epsilon)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |m| m.max(v))));
    let envelope_ratio = fitted_constant.map(|k| {
        rows.iter()
            .flat_map(|r| r.trace.iter())
            .map(|p| p.distance / envelope(a, p.epsilon, k))
            .fold(0.0, f64::max)
    });
    Ok(ExperimentReport {
        n: cfg.n,
        c: params.c(),
        a,
        delta: cfg.mollifier.width,
        gate: (3.0 - 2.0 * 2f64.sqrt()) * a,
        rows,
        aborted,
        distance_fit,
        deviation_fit,
        fitted_constant,
        envelope_holds: envelope_ratio.map(|r| r <= 1.0),
        envelope_ratio,
        constant_note: CONSTANT_NOTE,
    })
}

/// Sweep plus `stability_report.json`, `stability_rows.csv`,
/// `stability_trace.csv` and `stability_trace.dat`.
pub fn stability(cfg: &ExperimentConfig) -> Result<ExperimentReport, LabError> {
    let report = sweep(cfg)?;
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir)?;
    io::write_json(&dir.join("stability_report.json"), &report)?;
    io::write_csv(
        &dir.join("stability_rows.csv"),
        &report.rows,
        &[
            "target_epsilon", "epsilon", "beta", "bump_center", "sup_distance", "sup_deviation",
            "max_lhs_3_5", "drift_e", "drift_f", "min_y", "t_reached",
        ],
    )?;
    let trace: Vec<TracePoint> = report.rows.iter().flat_map(|r| r.trace.iter().copied()).collect();
    let header = ["epsilon", "t", "distance", "deviation", "lhs_3_5"];
    io::write_csv(&dir.join("stability_trace.csv"), &trace, &header)?;
    io::write_columns(
        &dir.join("stability_trace.dat"),
        &header,
        trace.iter().map(|p| vec![p.epsilon, p.t, p.distance, p.deviation, p.lhs_3_5]),
    )?;
    Ok(report)
}
