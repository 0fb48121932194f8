//! The peakon family and smooth initial data with nonnegative momentum.

use alloc::vec::Vec;

use crate::coefficients::{kappa, Model};
use crate::error::{Error, Result};
use crate::exact::{from_f64, int, to_f64, Rational};
use crate::functionals::{energy_e, h1_radicand};
use crate::spectral::{GridFunction, GridSpec};

/// `κ_n` converted once from its exact value.
pub fn kappa_f64(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroDegree);
    }
    Ok(to_f64(&kappa(n)))
}

fn positive(what: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonPositive { what, value })
    }
}

pub fn speed_from_amplitude(n: u32, a: f64) -> Result<f64> {
    let a = positive("amplitude", a)?;
    Ok(kappa_f64(n)? * crate::float::powi(a, 2 * n))
}

pub fn amplitude_from_speed(n: u32, c: f64) -> Result<f64> {
    let c = positive("speed", c)?;
    Ok(libm::pow(c / kappa_f64(n)?, 1.0 / (2 * n) as f64))
}

/// `(n, a, c)` tied together by `c = κ_n a^{2n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakonParams {
    n: u32,
    a: f64,
    c: f64,
}

impl PeakonParams {
    pub fn from_amplitude(n: u32, a: f64) -> Result<Self> {
        Ok(Self { n, a, c: speed_from_amplitude(n, a)? })
    }

    pub fn from_speed(n: u32, c: f64) -> Result<Self> {
        Ok(Self { n, a: amplitude_from_speed(n, c)?, c })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Crest position at time `t`.
    pub fn crest(&self, t: f64) -> f64 {
        self.c * t
    }
}

pub fn peakon_value(params: &PeakonParams, t: f64, x: f64) -> f64 {
    params.a * libm::exp(-(x - params.c * t).abs())
}

/// `F(φ_c)/a^{2n+2} = (2 − c₁)/(n+1)` as an exact rational.
pub fn peakon_f_ratio(n: u32) -> Result<Rational> {
    let t = crate::coefficients::coefficient_table(n)?;
    Ok(t.two_minus_c1() / int(n as i64 + 1))
}

/// `(E, F)` of the peakon: `E = 2a²`, `F = a^{2n+2}(2 − c₁)/(n+1)`.
pub fn peakon_closed_invariants(params: &PeakonParams) -> Result<(f64, f64)> {
    let a = params.a;
    let ratio = to_f64(&peakon_f_ratio(params.n)?);
    Ok((2.0 * a * a, ratio * crate::float::powi(a, 2 * params.n + 2)))
}

/// Samples `a e^{−|x−ξ|}` with its one-sided derivative (the right
/// derivative at the crest sample).
pub fn sample_peakon(params: &PeakonParams, grid: &GridSpec, xi: f64) -> Result<GridFunction> {
    let pts = grid.points();
    let u: Vec<f64> = pts.iter().map(|&x| params.a * libm::exp(-(x - xi).abs())).collect();
    let ux = pts
        .iter()
        .zip(&u)
        .map(|(&x, &v)| if x < xi { v } else { -v })
        .collect();
    GridFunction::with_derivative(grid.clone(), u, ux)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MollifierShape {
    Gaussian,
    /// `exp(−1/(1 − (x/δ)²))` on `|x| < δ`.
    Bump,
}

/// Smooth nonnegative stand-in for `mass·δ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifierSpec {
    width: f64,
    shape: MollifierShape,
    mass: f64,
}

impl MollifierSpec {
    pub fn new(width: f64, shape: MollifierShape, mass: f64) -> Result<Self> {
        Ok(Self { width: positive("mollifier width", width)?, shape, mass: positive("mass", mass)? })
    }

    /// Mass `2a`, matching `φ − φ_xx = 2aδ`.
    pub fn for_peakon(params: &PeakonParams, width: f64, shape: MollifierShape) -> Result<Self> {
        Self::new(width, shape, 2.0 * params.a)
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn shape(&self) -> MollifierShape {
        self.shape
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    fn profile(&self, x: f64) -> f64 {
        let s = x / self.width;
        match self.shape {
            MollifierShape::Gaussian => libm::exp(-0.5 * s * s),
            MollifierShape::Bump => {
                if s.abs() < 1.0 {
                    libm::exp(-1.0 / (1.0 - s * s))
                } else {
                    0.0
                }
            }
        }
    }

    /// Samples centred at `center`, normalized so the trapezoid sum equals
    /// the mass exactly.
    pub fn sample(&self, grid: &GridSpec, center: f64) -> Result<Vec<f64>> {
        let min = 4.0 * grid.dx();
        if self.width < min {
            return Err(Error::UnresolvedMollifier { width: self.width, min });
        }
        let raw: Vec<f64> = grid.points().iter().map(|&x| self.profile(x - center)).collect();
        let total: f64 = raw.iter().sum::<f64>() * grid.dx();
        Ok(raw.into_iter().map(|v| v * self.mass / total).collect())
    }
}

/// Initial profile `u₀ = (1−∂²)⁻¹y₀` with its momentum samples and the
/// distance `ε = ‖u₀ − φ_c‖_{H¹}`.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub u: GridFunction,
    pub y0: Vec<f64>,
    pub epsilon: f64,
}

impl InitialData {
    pub fn min_y0(&self) -> f64 {
        self.y0.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn from_momentum(params: &PeakonParams, grid: &GridSpec, y0: Vec<f64>) -> Result<InitialData> {
    let u = GridFunction::new(grid.clone(), grid.helmholtz(&y0))?;
    let r = h1_radicand(energy_e(&u), params.a, u.value_at(0.0));
    let epsilon = if r < 0.0 { 0.0 } else { libm::sqrt(r) };
    Ok(InitialData { u, y0, epsilon })
}

pub fn mollified_peakon(
    params: &PeakonParams,
    moll: &MollifierSpec,
    grid: &GridSpec,
) -> Result<InitialData> {
    from_momentum(params, grid, moll.sample(grid, 0.0)?)
}

/// Mollified peakon plus `β·exp(−(x − center)²)` in the momentum.
pub fn perturbed_initial_data(
    params: &PeakonParams,
    moll: &MollifierSpec,
    beta: f64,
    center: f64,
    grid: &GridSpec,
) -> Result<InitialData> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::NonPositive { what: "bump amplitude", value: beta });
    }
    let mut y0 = moll.sample(grid, 0.0)?;
    if beta > 0.0 {
        for (v, x) in y0.iter_mut().zip(grid.points()) {
            let s = x - center;
            *v += beta * libm::exp(-s * s);
        }
    }
    from_momentum(params, grid, y0)
}

/// Finds the bump amplitude whose data sit at distance `target` from the
/// peakon, to within `tol`.
pub fn bisect_bump_amplitude(
    params: &PeakonParams,
    moll: &MollifierSpec,
    center: f64,
    grid: &GridSpec,
    target: f64,
    tol: f64,
) -> Result<(f64, InitialData)> {
    positive("target distance", target)?;
    positive("bisection tolerance", tol)?;
    let base = perturbed_initial_data(params, moll, 0.0, center, grid)?;
    if (base.epsilon - target).abs() <= tol {
        return Ok((0.0, base));
    }
    if base.epsilon > target {
        return Err(Error::TargetBelowFloor { target, floor: base.epsilon });
    }
    let mut lo = 0.0;
    let mut hi = target.max(1e-6);
    let mut probe = perturbed_initial_data(params, moll, hi, center, grid)?;
    let mut guard = 0;
    while probe.epsilon < target {
        lo = hi;
        hi *= 2.0;
        probe = perturbed_initial_data(params, moll, hi, center, grid)?;
        guard += 1;
        if guard > 200 {
            return Err(Error::NonFinite { what: "bisection bracket" });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let data = perturbed_initial_data(params, moll, mid, center, grid)?;
        if (data.epsilon - target).abs() <= tol {
            return Ok((mid, data));
        }
        if data.epsilon < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NonFinite { what: "bisection did not converge" })
}

/// Speed–amplitude data bundled with the `f64` coefficient view.
pub fn model_for(params: &PeakonParams) -> Result<Model> {
    Model::new(params.n)
}

/// Whether `0 < ε < (3 − 2√2)a`, decided exactly on the float values: with
/// `r = ε/a` the condition reads `3 − r > 0` and `(3 − r)² > 8`.
pub fn admissible_perturbation(epsilon: f64, a: f64) -> Result<bool> {
    let (Some(e), Some(a)) = (from_f64(epsilon), from_f64(a)) else {
        return Err(Error::NonFinite { what: "perturbation size or amplitude" });
    };
    if a <= Rational::from_integer(0.into()) {
        return Err(Error::NonPositive { what: "amplitude", value: to_f64(&a) });
    }
    if e <= Rational::from_integer(0.into()) {
        return Ok(false);
    }
    let gap = int(3) - e / a;
    Ok(gap > int(0) && &gap * &gap > int(8))
}
