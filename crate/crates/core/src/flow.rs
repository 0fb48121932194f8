//! Characteristics `q_t = (u² − u_x²)ⁿ(t, q)` and momentum transport along
//! them.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::{Observer, ObserverRecord, Solver, SolverState};
use crate::float::powi;
use crate::spectral::GridSpec;

#[derive(Debug, Clone)]
struct Frame {
    t: f64,
    uhat: Vec<Complex64>,
    that: Vec<Complex64>,
}

/// Stored spectra and tendencies, interpolated in time by cubic Hermite.
#[derive(Debug, Clone)]
pub struct Trajectory {
    grid: GridSpec,
    n: u32,
    frames: Vec<Frame>,
}

impl Trajectory {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn times(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.t).collect()
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Samples of `u` at frame `i`.
    pub fn frame_samples(&self, i: usize) -> Vec<f64> {
        self.grid.inverse_real(self.frames[i].uhat.clone())
    }

    fn spectrum_at(&self, t: f64) -> Vec<Complex64> {
        let i = match self.frames.iter().position(|f| f.t >= t) {
            Some(0) => return self.frames[0].uhat.clone(),
            Some(i) => i - 1,
            None => return self.frames[self.frames.len() - 1].uhat.clone(),
        };
        let (f0, f1) = (&self.frames[i], &self.frames[i + 1]);
        let h = f1.t - f0.t;
        let s = (t - f0.t) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = (s3 - 2.0 * s2 + s) * h;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = (s3 - s2) * h;
        (0..f0.uhat.len())
            .map(|m| f0.uhat[m] * h00 + f0.that[m] * h10 + f1.uhat[m] * h01 + f1.that[m] * h11)
            .collect()
    }

    /// `(u, u_x, u_xx)` at `(t, x)`.
    pub fn field(&self, t: f64, x: f64) -> (f64, f64, f64) {
        self.grid.interpolate(&self.spectrum_at(t), x)
    }

    /// `y(t, x)`.
    pub fn momentum(&self, t: f64, x: f64) -> f64 {
        let (u, _, uxx) = self.field(t, x);
        u - uxx
    }
}

/// Observer storing every observed state with its tendency.
pub struct TrajectoryRecorder<'a> {
    solver: &'a Solver,
    frames: Vec<Frame>,
}

impl<'a> TrajectoryRecorder<'a> {
    pub fn new(solver: &'a Solver) -> Self {
        Self { solver, frames: Vec::new() }
    }

    pub fn finish(self) -> Trajectory {
        Trajectory { grid: self.solver.config().grid.clone(), n: self.solver.config().n, frames: self.frames }
    }
}

impl Observer for TrajectoryRecorder<'_> {
    fn observe(&mut self, state: &SolverState, _record: &ObserverRecord) {
        let uhat = state.u.spectrum().to_vec();
        let that = self.solver.rhs_spectrum(&uhat);
        if let Some(last) = self.frames.last() {
            if last.t == state.t {
                return;
            }
        }
        self.frames.push(Frame { t: state.t, uhat, that });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FlowSample {
    pub t: f64,
    pub q: f64,
    pub q_x: f64,
    pub y_at_q: f64,
}

/// Keeps characteristics at least this far from the periodic seam.
const MARGIN: f64 = 2.0;

/// Integrates `q` and `ln q_x` from `x0` across the stored trajectory with
/// RK4 (two substeps per frame interval). `q_x` follows from
/// `(ln q_x)_t = 2n(u² − u_x²)^{n−1}u_x y` along the characteristic.
pub fn flow_map(traj: &Trajectory, x0: f64) -> Result<Vec<FlowSample>> {
    let n = traj.n;
    let limit = traj.grid.half_length() - MARGIN;
    let rates = |t: f64, q: f64| -> Result<(f64, f64)> {
        if q.abs() > limit || !q.is_finite() {
            return Err(Error::OutsideDomain { x: q });
        }
        let (u, ux, uxx) = traj.field(t, q);
        let w = u * u - ux * ux;
        let y = u - uxx;
        Ok((powi(w, n), 2.0 * n as f64 * powi(w, n - 1) * ux * y))
    };
    let mut out = Vec::with_capacity(traj.frames.len());
    let Some(first) = traj.frames.first() else { return Ok(out) };
    let mut q = x0;
    let mut lq = 0.0;
    let mut t = first.t;
    let sample = |t: f64, q: f64, lq: f64| -> Result<FlowSample> {
        if q.abs() > limit {
            return Err(Error::OutsideDomain { x: q });
        }
        Ok(FlowSample { t, q, q_x: libm::exp(lq), y_at_q: traj.momentum(t, q) })
    };
    out.push(sample(t, q, lq)?);
    for f in traj.frames.iter().skip(1) {
        let h = (f.t - t) / 2.0;
        for _ in 0..2 {
            let (a1, b1) = rates(t, q)?;
            let (a2, b2) = rates(t + 0.5 * h, q + 0.5 * h * a1)?;
            let (a3, b3) = rates(t + 0.5 * h, q + 0.5 * h * a2)?;
            let (a4, b4) = rates(t + h, q + h * a3)?;
            q += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
            lq += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
            t += h;
        }
        t = f.t;
        out.push(sample(t, q, lq)?);
    }
    Ok(out)
}

/// Worst `|y(t,q)q_x − y₀(x₀)| / (|y₀(x₀)| + floor)` over all samples of all
/// characteristics. Each entry pairs `y₀(x₀)` with its samples.
pub fn check_momentum_transport(paths: &[(f64, Vec<FlowSample>)], floor: f64) -> f64 {
    paths
        .iter()
        .flat_map(|(y0, samples)| {
            samples.iter().map(move |s| (s.y_at_q * s.q_x - y0).abs() / (y0.abs() + floor))
        })
        .fold(0.0, f64::max)
}

/// Whether `q(t, ·)` is strictly increasing across the given fan at every
/// common sample time. Paths must be listed in increasing `x₀`.
pub fn fan_is_monotone(paths: &[Vec<FlowSample>]) -> bool {
    let len = paths.iter().map(|p| p.len()).min().unwrap_or(0);
    (0..len).all(|i| paths.windows(2).all(|w| w[0][i].q < w[1][i].q))
}
