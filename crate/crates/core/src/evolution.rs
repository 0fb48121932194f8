//! Pseudospectral time stepping of the nonlocal form
//!
//! ```text
//! u_t + (u^{2n} − Σ A_k u^{2n−2k}u_x^{2k}) u_x
//!     + ∂_x p∗(2n u^{2n+1}/(2n+1) + Σ B_k u^{2n−2k+1}u_x^{2k})
//!     + p∗(Σ A_k u^{2n−2k}u_x^{2k+1}) = 0
//! ```
//!
//! with `A_k = (−1)^{k+1}C^k_n/(2k+1)`, `B_k = (−1)^{k−1}C^k_n/(2k−1)` and
//! classical RK4 in Fourier space.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::coefficients::Model;
use crate::error::{Error, Result};
use crate::float::powi;
use crate::functionals::{energy_e, functional_f, max_and_location, stability_lhs};
use crate::spectral::{GridFunction, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dealias {
    /// Zero the top third of the tendency spectrum.
    TwoThirds,
    /// Form the nonlinear products on a grid `(n+1)` times finer (rounded
    /// up to a power of two), which is alias-free for degree `2n+1`.
    Padded,
    None,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub n: u32,
    pub grid: GridSpec,
    pub cfl: f64,
    pub t_end: f64,
    pub dealias: Dealias,
    pub filter_strength: f64,
    pub observe_every: usize,
    /// Abort once the upper band of the spectrum of `u` exceeds this
    /// fraction of its peak. `None` only aborts on non-finite values.
    pub resolution_tolerance: Option<f64>,
}

impl SolverConfig {
    pub fn new(n: u32, grid: GridSpec) -> Self {
        Self {
            n,
            grid,
            cfl: 0.5,
            t_end: 1.0,
            dealias: Dealias::TwoThirds,
            filter_strength: 0.0,
            observe_every: 1,
            resolution_tolerance: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::ZeroDegree);
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::NonPositive { what: "cfl in (0, 1]", value: self.cfl });
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::NonPositive { what: "t_end", value: self.t_end });
        }
        if !(self.filter_strength >= 0.0) {
            return Err(Error::NonPositive { what: "filter strength", value: self.filter_strength });
        }
        if self.observe_every == 0 {
            return Err(Error::NonPositive { what: "observe_every", value: 0.0 });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SolverState {
    pub t: f64,
    pub u: GridFunction,
    pub step_count: u64,
}

impl SolverState {
    pub fn initial(u: GridFunction) -> Self {
        Self { t: 0.0, u, step_count: 0 }
    }
}

/// Invariants and diagnostics at one observation time.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ObserverRecord {
    pub t: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub xi: f64,
    pub lhs_3_5: f64,
    pub min_y: f64,
    /// `min_x min(u + u_x, u − u_x)`.
    pub min_u_pm_ux: f64,
}

impl ObserverRecord {
    pub fn of(t: f64, u: &GridFunction, model: &Model) -> Self {
        let e = energy_e(u);
        let f = functional_f(u, model);
        let (m, xi) = max_and_location(u);
        let min_y = u.y().iter().copied().fold(f64::INFINITY, f64::min);
        let min_u_pm_ux = u
            .samples()
            .iter()
            .zip(u.ux())
            .map(|(a, b)| (a + b).min(a - b))
            .fold(f64::INFINITY, f64::min);
        Self { t, e, f, m, xi, lhs_3_5: stability_lhs(m, e, f, model), min_y, min_u_pm_ux }
    }
}

pub trait Observer {
    fn observe(&mut self, state: &SolverState, record: &ObserverRecord);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlowUpReason {
    NonFinite,
    Underresolved,
}

/// A run stopped before `t_end`; carries the last finite state.
#[derive(Debug, Clone)]
pub struct BlowUp {
    pub reason: BlowUpReason,
    pub t: f64,
    pub last: SolverState,
    pub records: Vec<ObserverRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunOutcome {
    Completed,
    BlowUp(BlowUpReason),
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub final_state: SolverState,
    pub records: Vec<ObserverRecord>,
}

#[derive(Debug, Clone)]
pub struct Solver {
    config: SolverConfig,
    model: Model,
    fine: Option<GridSpec>,
}

impl Solver {
    pub fn new(config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let model = Model::new(config.n)?;
        let fine = match config.dealias {
            Dealias::Padded => {
                let m = (config.grid.len() * (config.n as usize + 1)).next_power_of_two();
                Some(GridSpec::unchecked(config.grid.half_length(), m)?)
            }
            _ => None,
        };
        Ok(Self { config, model, fine })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    /// Local transport speed `u^{2n} − Σ A_k u^{2n−2k}u_x^{2k}` and the two
    /// nonlocal densities.
    fn densities(&self, u: f64, ux: f64) -> (f64, f64, f64) {
        let n = self.model.n();
        let mut speed = powi(u, 2 * n);
        let mut even = self.model.odd_nonlocal() * powi(u, 2 * n + 1);
        let mut odd = 0.0;
        for (i, (a, b)) in self.model.transport().iter().zip(self.model.nonlocal()).enumerate() {
            let k = i as u32 + 1;
            let ux2k = powi(ux, 2 * k);
            speed -= a * powi(u, 2 * n - 2 * k) * ux2k;
            even += b * powi(u, 2 * n - 2 * k + 1) * ux2k;
            odd += a * powi(u, 2 * n - 2 * k) * ux2k * ux;
        }
        (speed, even, odd)
    }

    /// Tendency `û_t` for the spectrum `û`.
    pub fn rhs_spectrum(&self, uhat: &[Complex64]) -> Vec<Complex64> {
        let grid = &self.config.grid;
        let mut dhat = uhat.to_vec();
        grid.apply_derivative(&mut dhat);
        let work = self.fine.as_ref().unwrap_or(grid);
        let (u, ux) = match &self.fine {
            Some(fine) => fine.inverse_pair(&grid.pad_spectrum(uhat, fine), &grid.pad_spectrum(&dhat, fine)),
            None => grid.inverse_pair(uhat, &dhat),
        };
        let len = u.len();
        let mut transport = vec![0.0; len];
        let mut even = vec![0.0; len];
        let mut odd = vec![0.0; len];
        for j in 0..len {
            let (s, e, o) = self.densities(u[j], ux[j]);
            transport[j] = s * ux[j];
            even[j] = e;
            odd[j] = o;
        }
        let (mut th, mut eh) = work.forward_pair(&transport, &even);
        let (mut oh, _) = work.forward_pair(&odd, &vec![0.0; len]);
        if let Some(fine) = &self.fine {
            th = grid.truncate_spectrum(&th, fine);
            eh = grid.truncate_spectrum(&eh, fine);
            oh = grid.truncate_spectrum(&oh, fine);
        }
        let nyq = grid.nyquist();
        let mut out: Vec<Complex64> = (0..grid.len())
            .map(|m| {
                let k = grid.wavenumber(m);
                let inv = 1.0 / (1.0 + k * k);
                let dk = if m == nyq { 0.0 } else { k };
                -(th[m] + Complex64::new(0.0, dk * inv) * eh[m] + oh[m] * inv)
            })
            .collect();
        if self.config.dealias == Dealias::TwoThirds {
            grid.apply_two_thirds(&mut out);
        }
        out
    }

    /// Tendency `u_t` on the grid.
    pub fn rhs(&self, u: &GridFunction) -> Result<GridFunction> {
        if u.spec() != &self.config.grid {
            return Err(Error::GridMismatch);
        }
        let s = self.rhs_spectrum(u.spectrum());
        GridFunction::new(u.spec().clone(), self.config.grid.inverse_real(s))
    }

    /// `cfl·dx / max(|u² − u_x²|ⁿ, |local transport speed|, 1e−12)`.
    pub fn stable_dt(&self, u: &GridFunction) -> f64 {
        let n = self.model.n();
        let mut top: f64 = 1e-12;
        for (&a, &b) in u.samples().iter().zip(u.ux()) {
            let (s, _, _) = self.densities(a, b);
            top = top.max(powi(a * a - b * b, n).abs()).max(s.abs());
        }
        self.config.cfl * self.config.grid.dx() / top
    }

    fn rk4(&self, uhat: &[Complex64], dt: f64) -> Vec<Complex64> {
        let axpy = |base: &[Complex64], k: &[Complex64], h: f64| -> Vec<Complex64> {
            base.iter().zip(k).map(|(b, k)| b + k * h).collect()
        };
        let k1 = self.rhs_spectrum(uhat);
        let k2 = self.rhs_spectrum(&axpy(uhat, &k1, 0.5 * dt));
        let k3 = self.rhs_spectrum(&axpy(uhat, &k2, 0.5 * dt));
        let k4 = self.rhs_spectrum(&axpy(uhat, &k3, dt));
        let mut out: Vec<Complex64> = (0..uhat.len())
            .map(|m| uhat[m] + (k1[m] + (k2[m] + k3[m]) * 2.0 + k4[m]) * (dt / 6.0))
            .collect();
        self.config.grid.apply_filter(&mut out, self.config.filter_strength);
        out
    }

    /// One RK4 step of size `dt` (negative steps integrate backwards).
    pub fn step_with_dt(&self, state: &SolverState, dt: f64) -> core::result::Result<SolverState, BlowUpReason> {
        let next = self.rk4(state.u.spectrum(), dt);
        if next.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(BlowUpReason::NonFinite);
        }
        let u = GridFunction::new(self.config.grid.clone(), self.config.grid.inverse_real(next))
            .map_err(|_| BlowUpReason::NonFinite)?;
        if let Some(tol) = self.config.resolution_tolerance {
            if u.spectral_tail() > tol {
                return Err(BlowUpReason::Underresolved);
            }
        }
        Ok(SolverState { t: state.t + dt, u, step_count: state.step_count + 1 })
    }

    /// One step with the speed-adaptive `dt`, capped to land on `t_end`.
    pub fn step(&self, state: &SolverState) -> core::result::Result<SolverState, BlowUpReason> {
        let dt = self.stable_dt(&state.u).min(self.config.t_end - state.t);
        self.step_with_dt(state, dt)
    }

    /// Integrates to `t_end`, recording at `t = 0`, every `observe_every`
    /// steps and at the final time.
    pub fn run(
        &self,
        u0: GridFunction,
        observers: &mut [&mut dyn Observer],
    ) -> core::result::Result<RunResult, Box<BlowUp>> {
        let mut state = SolverState::initial(u0);
        let mut records = Vec::new();
        let emit = |state: &SolverState, records: &mut Vec<ObserverRecord>, obs: &mut [&mut dyn Observer]| {
            let rec = ObserverRecord::of(state.t, &state.u, &self.model);
            for o in obs.iter_mut() {
                o.observe(state, &rec);
            }
            records.push(rec);
        };
        emit(&state, &mut records, observers);
        let t_end = self.config.t_end;
        while state.t < t_end {
            match self.step(&state) {
                Ok(mut next) => {
                    if t_end - next.t <= 1e-12 * t_end.max(1.0) {
                        next.t = t_end;
                    }
                    state = next;
                    if state.step_count % self.config.observe_every as u64 == 0 || state.t >= t_end {
                        emit(&state, &mut records, observers);
                    }
                }
                Err(reason) => {
                    return Err(Box::new(BlowUp { reason, t: state.t, last: state, records }));
                }
            }
        }
        Ok(RunResult { final_state: state, records })
    }
}

/// Largest relative drift `max_t |Q(t) − Q(0)| / |Q(0)|` of `E` and `F`.
pub fn relative_drifts(records: &[ObserverRecord]) -> (f64, f64) {
    let Some(first) = records.first() else { return (0.0, 0.0) };
    let rel = |v: f64, v0: f64| if v0 == 0.0 { v.abs() } else { ((v - v0) / v0).abs() };
    records.iter().fold((0.0f64, 0.0f64), |(de, df), r| {
        (de.max(rel(r.e, first.e)), df.max(rel(r.f, first.f)))
    })
}
