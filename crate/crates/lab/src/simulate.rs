//! `gmch simulate`: one run with observer records, profiles and optional
//! trajectory frames.

use std::fs;

use gmch_core::evolution::{relative_drifts, Observer, ObserverRecord, Solver, SolverState};
use gmch_core::profiles::mollified_peakon;
use gmch_core::spectral::{helmholtz_solve, GridFunction, GridSpec};
use serde::Serialize;

use crate::config::{ExperimentConfig, FrameFormat, InitialData};
use crate::error::LabError;
use crate::io::{self, FrameSink};

#[derive(Debug, Clone, Serialize)]
pub struct SimulationSummary {
    pub n: u32,
    pub c: f64,
    pub a: f64,
    pub completed: bool,
    pub blow_up: Option<String>,
    pub t_reached: f64,
    pub steps: u64,
    pub observations: usize,
    pub drift_e: f64,
    pub drift_f: f64,
    pub min_y: f64,
    pub min_u_pm_ux: f64,
    pub max_lhs_3_5: f64,
    /// Least-squares slope of `ξ(t)`.
    pub crest_speed: Option<f64>,
}

pub fn initial_profile(cfg: &ExperimentConfig, grid: &GridSpec) -> anyhow::Result<GridFunction> {
    Ok(match &cfg.initial {
        InitialData::Zero => GridFunction::zeros(grid.clone()),
        InitialData::MollifiedPeakon => {
            let params = cfg.params()?;
            mollified_peakon(&params, &cfg.mollifier(&params)?, grid)?.u
        }
        InitialData::GaussianMomentum { amplitude, width } => {
            if !(*width > 0.0) {
                anyhow::bail!("gaussian_momentum width must be positive");
            }
            let (amp, w) = (*amplitude, *width);
            let y0 = GridFunction::from_fn(grid.clone(), |x| amp * (-(x / w) * (x / w)).exp())?;
            helmholtz_solve(&y0)
        }
    })
}

/// Slope of the least-squares line through `(t, ξ)`.
pub fn crest_speed(records: &[ObserverRecord]) -> Option<f64> {
    let k = records.len() as f64;
    if records.len() < 2 {
        return None;
    }
    let (mt, mx) = records.iter().fold((0.0, 0.0), |(a, b), r| (a + r.t / k, b + r.xi / k));
    let (sxy, sxx) = records
        .iter()
        .fold((0.0, 0.0), |(a, b), r| (a + (r.t - mt) * (r.xi - mx), b + (r.t - mt) * (r.t - mt)));
    (sxx > 0.0).then(|| sxy / sxx)
}

struct Frames<'a> {
    sink: Option<FrameSink>,
    grid: &'a GridSpec,
    every: usize,
    seen: usize,
    error: Option<anyhow::Error>,
}

impl Observer for Frames<'_> {
    fn observe(&mut self, state: &SolverState, _record: &ObserverRecord) {
        let due = self.seen % self.every == 0;
        self.seen += 1;
        if !due || self.error.is_some() {
            return;
        }
        if let Some(sink) = self.sink.as_mut() {
            if let Err(e) = sink.push(self.grid, state.t, state.u.samples()) {
                self.error = Some(e);
            }
        }
    }
}

/// Runs the configured simulation and writes `observer.csv`,
/// `observer.dat`, `initial_profile.csv`, `final_profile.csv`,
/// `summary.json` and, if requested, `frames.csv` or `frames.bin` into the
/// output directory. A blow-up still writes everything up to the last
/// valid state before returning the error.
pub fn simulate(cfg: &ExperimentConfig) -> Result<SimulationSummary, LabError> {
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir)?;
    let grid = cfg.grid()?;
    let params = cfg.params()?;
    let u0 = initial_profile(cfg, &grid)?;
    io::write_profile_csv(&dir.join("initial_profile.csv"), &u0)?;
    let sink = match cfg.frames.format {
        FrameFormat::None => None,
        FrameFormat::Csv => Some(FrameSink::csv(&dir.join("frames.csv"), &grid)?),
        FrameFormat::Binary => Some(FrameSink::binary(&dir.join("frames.bin"))?),
    };
    let mut frames = Frames { sink, grid: &grid, every: cfg.frames.every, seen: 0, error: None };
    let solver = Solver::new(cfg.solver_config()?)?;
    let outcome = solver.run(u0, &mut [&mut frames]);
    if let Some(e) = frames.error.take() {
        return Err(e.into());
    }
    if let Some(sink) = frames.sink.take() {
        sink.finish()?;
    }
    let (state, records, blow_up) = match outcome {
        Ok(r) => (r.final_state, r.records, None),
        Err(b) => {
            let b = *b;
            (b.last, b.records, Some(b.reason))
        }
    };
    io::write_observer_csv(&dir.join("observer.csv"), &records)?;
    io::observer_columns(&dir.join("observer.dat"), &records)?;
    io::write_profile_csv(&dir.join("final_profile.csv"), &state.u)?;
    let (drift_e, drift_f) = relative_drifts(&records);
    let fold = |f: fn(&ObserverRecord) -> f64, init: f64, op: fn(f64, f64) -> f64| records.iter().map(f).fold(init, op);
    let summary = SimulationSummary {
        n: cfg.n,
        c: params.c(),
        a: params.a(),
        completed: blow_up.is_none(),
        blow_up: blow_up.map(|r| format!("{r:?}")),
        t_reached: state.t,
        steps: state.step_count,
        observations: records.len(),
        drift_e,
        drift_f,
        min_y: fold(|r| r.min_y, f64::INFINITY, f64::min),
        min_u_pm_ux: fold(|r| r.min_u_pm_ux, f64::INFINITY, f64::min),
        max_lhs_3_5: fold(|r| r.lhs_3_5, f64::NEG_INFINITY, f64::max),
        crest_speed: crest_speed(&records),
    };
    io::write_json(&dir.join("summary.json"), &summary)?;
    match blow_up {
        Some(reason) => Err(LabError::BlowUp { reason: format!("{reason:?}"), t: state.t }),
        None => Ok(summary),
    }
}
