//! Conserved functionals and the auxiliary quantities of the stability
//! argument, evaluated on grid functions.

use alloc::vec::Vec;

use crate::coefficients::Model;
use crate::error::{Error, Result};
use crate::exact::{int, Rational};
use crate::float::{ordered_sum, powi};
use crate::profiles::PeakonParams;
use crate::spectral::GridFunction;

/// `E(u) = ∫ u² + u_x²`.
pub fn energy_e(u: &GridFunction) -> f64 {
    let ux = u.ux();
    let dens: Vec<f64> = u.samples().iter().zip(ux).map(|(a, b)| a * a + b * b).collect();
    u.spec().integrate(&dens)
}

/// Pointwise density `Σ_j f_j u^{2n+2−2j}u_x^{2j}` of `F`.
pub fn f_density(u: f64, ux: f64, model: &Model) -> f64 {
    let n = model.n();
    let mut terms: Vec<f64> = model
        .f_density()
        .iter()
        .enumerate()
        .map(|(j, f)| f * powi(u, 2 * n + 2 - 2 * j as u32) * powi(ux, 2 * j as u32))
        .collect();
    ordered_sum(&mut terms)
}

pub fn functional_f(u: &GridFunction, model: &Model) -> f64 {
    let dens: Vec<f64> = u
        .samples()
        .iter()
        .zip(u.ux())
        .map(|(&a, &b)| f_density(a, b, model))
        .collect();
    u.spec().integrate(&dens)
}

/// `H = (1/(2(n+1)))∫ u(u² − u_x²)ⁿ y`.
pub fn hamiltonian_h(u: &GridFunction, model: &Model) -> f64 {
    let n = model.n();
    let dens: Vec<f64> = u
        .samples()
        .iter()
        .zip(u.ux())
        .zip(u.y())
        .map(|((&a, &b), &y)| a * powi(a * a - b * b, n) * y)
        .collect();
    u.spec().integrate(&dens) / (2.0 * (n as f64 + 1.0))
}

/// `E + 2a² − 4a·u(ξ)`, the squared distance to `φ_c(·−ξ)` by Lemma 3.1.
pub fn h1_radicand(energy: f64, a: f64, u_at_xi: f64) -> f64 {
    energy + 2.0 * a * a - 4.0 * a * u_at_xi
}

/// `‖u − φ_c(·−ξ)‖_{H¹}` through the energy identity, with `u(ξ)` from
/// trigonometric interpolation. Radicands down to `−1e−12` are clamped.
pub fn h1_distance_to_peakon(u: &GridFunction, params: &PeakonParams, xi: f64) -> Result<f64> {
    let r = h1_radicand(energy_e(u), params.a(), u.value_at(xi));
    if r < -1e-12 {
        return Err(Error::Precondition { what: "negative H1 radicand (domain truncation)", worst: r });
    }
    Ok(libm::sqrt(r.max(0.0)))
}

/// Global maximum and its location. The grid argmax (leftmost on ties) is
/// refined by the parabola through it and its two neighbours.
pub fn max_and_location(u: &GridFunction) -> (f64, f64) {
    let s = u.samples();
    let n = s.len();
    let mut j = 0;
    for i in 1..n {
        if s[i] > s[j] {
            j = i;
        }
    }
    let spec = u.spec();
    let (l, r) = (s[(j + n - 1) % n], s[(j + 1) % n]);
    let denom = l - 2.0 * s[j] + r;
    if denom >= 0.0 {
        return (s[j], spec.x(j));
    }
    let off = 0.5 * (l - r) / denom;
    let m = s[j] - 0.25 * (l - r) * off;
    (m, spec.x(j) + off * spec.dx())
}

/// `g = u − u_x` left of `ξ`, `u + u_x` from `ξ` on.
pub fn g_function(u: &GridFunction, xi: f64) -> Result<GridFunction> {
    let spec = u.spec();
    let g = u
        .samples()
        .iter()
        .zip(u.ux())
        .enumerate()
        .map(|(j, (&a, &b))| if spec.x(j) < xi { a - b } else { a + b })
        .collect();
    GridFunction::new(spec.clone(), g)
}

fn h_value(u: f64, ux: f64, coeffs: &[f64], model: &Model) -> f64 {
    let n2 = 2 * model.n();
    let mut terms: Vec<f64> = Vec::with_capacity(n2 as usize + 1);
    terms.push(powi(u, n2));
    for (i, c) in coeffs.iter().enumerate() {
        let k = i as u32 + 1;
        terms.push(c * powi(u, n2 - k) * powi(ux, k));
    }
    terms.push(model.leading() * powi(ux, n2));
    ordered_sum(&mut terms)
}

/// `h` with the `c_k` left of `ξ` and the `d_k` from `ξ` on.
pub fn h_function(u: &GridFunction, xi: f64, model: &Model) -> Result<GridFunction> {
    let spec = u.spec();
    let h = u
        .samples()
        .iter()
        .zip(u.ux())
        .enumerate()
        .map(|(j, (&a, &b))| {
            let coeffs = if spec.x(j) < xi { model.c() } else { model.d() };
            h_value(a, b, coeffs, model)
        })
        .collect();
    GridFunction::new(spec.clone(), h)
}

/// `∫_{−L}^{ξ} left + ∫_{ξ}^{L} right` using spectral partial integrals of
/// the two smooth branches, so the jump at `ξ` costs no accuracy.
fn split_integral(u: &GridFunction, xi: f64, left: &[f64], right: &[f64]) -> f64 {
    let spec = u.spec();
    let total_right = spec.integrate(right);
    let (sl, sr) = spec.forward_pair(left, right);
    spec.partial_integral_from_spectrum(&sl, xi) + total_right
        - spec.partial_integral_from_spectrum(&sr, xi)
}

/// `∫ g²`; equals `E(u) − 2u(ξ)²` for decaying `u`.
pub fn g_squared_integral(u: &GridFunction, xi: f64) -> f64 {
    let (left, right): (Vec<f64>, Vec<f64>) = u
        .samples()
        .iter()
        .zip(u.ux())
        .map(|(&a, &b)| ((a - b) * (a - b), (a + b) * (a + b)))
        .unzip();
    split_integral(u, xi, &left, &right)
}

/// `∫ h g²`; equals `F(u) − (2−c₁)u(ξ)^{2n+2}/(n+1)` for decaying `u`.
pub fn hg_squared_integral(u: &GridFunction, xi: f64, model: &Model) -> f64 {
    let (left, right): (Vec<f64>, Vec<f64>) = u
        .samples()
        .iter()
        .zip(u.ux())
        .map(|(&a, &b)| {
            let gl = a - b;
            let gr = a + b;
            (h_value(a, b, model.c(), model) * gl * gl, h_value(a, b, model.d(), model) * gr * gr)
        })
        .unzip();
    split_integral(u, xi, &left, &right)
}

/// Smallest value of `(2−c₁)u^{2n}/2 − h` on the grid. The hypotheses
/// `u ≥ 0`, `u ± u_x ≥ 0` are checked first (to `−1e−10`) and reported as a
/// precondition error when violated.
pub fn check_pointwise_h_bound(u: &GridFunction, xi: f64, model: &Model) -> Result<f64> {
    let mut worst_pre = f64::INFINITY;
    for (&a, &b) in u.samples().iter().zip(u.ux()) {
        worst_pre = worst_pre.min(a).min(a + b).min(a - b);
    }
    if worst_pre < -1e-10 {
        return Err(Error::Precondition { what: "u >= 0 and u +- u_x >= 0", worst: worst_pre });
    }
    let h = h_function(u, xi, model)?;
    let half = 0.5 * model.two_minus_c1();
    let n2 = 2 * model.n();
    Ok(u
        .samples()
        .iter()
        .zip(h.samples())
        .map(|(&a, &hv)| half * powi(a, n2) - hv)
        .fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct StabilityCheck {
    pub lhs: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub xi: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "F")]
    pub f: f64,
}

/// `n(2−c₁)M^{2n+2}/(n+1) − (2−c₁)M^{2n}E/2 + F`.
pub fn stability_lhs(m: f64, e: f64, f: f64, model: &Model) -> f64 {
    let n = model.n();
    let w = model.two_minus_c1();
    let m2n = powi(m, 2 * n);
    let mut terms = [n as f64 * w / (n as f64 + 1.0) * m2n * m * m, -0.5 * w * m2n * e, f];
    ordered_sum(&mut terms)
}

/// The same expression in exact arithmetic for rational inputs.
pub fn stability_lhs_exact(n: u32, m: &Rational, e: &Rational, f: &Rational) -> Result<Rational> {
    let t = crate::coefficients::coefficient_table(n)?;
    let w = t.two_minus_c1();
    let m2n = num_traits::pow(m.clone(), 2 * n as usize);
    Ok(int(n as i64) * w / int(n as i64 + 1) * &m2n * m * m - w * &m2n * e / int(2) + f)
}

pub fn stability_inequality(u: &GridFunction, model: &Model) -> StabilityCheck {
    let (m, xi) = max_and_location(u);
    let e = energy_e(u);
    let f = functional_f(u, model);
    StabilityCheck { lhs: stability_lhs(m, e, f, model), m, xi, e, f }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakDeviation {
    /// `(n+1)M^{2n}(E−2a²)/2 − (n+1)(F−F(φ_c))/(2−c₁) − a^{2n}(M−a)²`.
    pub gap: f64,
    /// `0 < M² ≤ E/2`.
    pub sup_bound_ok: bool,
}

pub fn peak_deviation_bound(
    e: f64,
    f: f64,
    m: f64,
    params: &PeakonParams,
    model: &Model,
) -> Result<PeakDeviation> {
    if !(m > 0.0) {
        return Err(Error::NonPositive { what: "peak value M", value: m });
    }
    let n = model.n();
    let a = params.a();
    let (ep, fp) = crate::profiles::peakon_closed_invariants(params)?;
    let np1 = n as f64 + 1.0;
    let mut terms = [
        0.5 * np1 * powi(m, 2 * n) * (e - ep),
        -np1 / model.two_minus_c1() * (f - fp),
        -powi(a, 2 * n) * (m - a) * (m - a),
    ];
    Ok(PeakDeviation { gap: ordered_sum(&mut terms), sup_bound_ok: m * m <= 0.5 * e })
}

/// `max|u| ≤ √(E/2)` with relative slack `rel`.
pub fn sup_bound_holds(u: &GridFunction, rel: f64) -> bool {
    u.max_abs() <= libm::sqrt(0.5 * energy_e(u)) * (1.0 + rel)
}
