//! Line-quadrature checks that the peakon is a weak solution.
//!
//! Nothing here touches the periodic grid: all integrals are over ℝ,
//! truncated where the exponential tails fall below `e^{−60}`.

use alloc::vec::Vec;

use crate::coefficients::{
    identity_2_14_residual, kappa, nonlocal_coefficient, transport_coefficient, Certificate,
    IdentityId, Witness,
};
use crate::error::{Error, Result};
use crate::exact::{int, to_f64, Rational};
use crate::float::{powi, sign};
use crate::profiles::PeakonParams;
use crate::quadrature::{try_integrate, Estimate, QuadratureSpec};

const TAIL: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    /// `p(z) = e^{−|z|}/2`.
    P,
    /// `∂p(z) = −sign(z)e^{−|z|}/2`.
    Dp,
}

impl Kernel {
    fn eval(self, z: f64) -> f64 {
        let e = 0.5 * libm::exp(-z.abs());
        match self {
            Kernel::P => e,
            Kernel::Dp => -sign(z) * e,
        }
    }
}

/// Peakon-dependent densities that appear under the convolutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrand {
    Zero,
    /// `Σ B_k φ^{2n−2k+1}φ_x^{2k} + (2n + Σ A_k)φ^{2n+1}/(2n+1)`, the argument
    /// of `∂p∗` in the pointwise identity.
    Bracket,
    /// `2nφ^{2n+1}/(2n+1) + Σ B_k φ^{2n−2k+1}φ_x^{2k}`.
    EvenNonlocal,
    /// `Σ A_k φ^{2n−2k}φ_x^{2k+1}`.
    OddNonlocal,
}

/// Peakon with its coefficient lists (`A_k`, `B_k`) in floating point.
#[derive(Debug, Clone)]
pub struct PeakonWeak {
    params: PeakonParams,
    transport: Vec<f64>,
    nonlocal: Vec<f64>,
    kappa: f64,
    closed_constant: f64,
}

impl PeakonWeak {
    pub fn new(params: PeakonParams) -> Result<Self> {
        let n = params.n();
        if n == 0 {
            return Err(Error::ZeroDegree);
        }
        let a_sum: Rational = (1..=n).map(|k| transport_coefficient(n, k)).sum();
        let b_sum: Rational = (1..=n).map(|k| nonlocal_coefficient(n, k)).sum();
        let k = ((int(2 * n as i64) + a_sum) + int(2 * n as i64 + 1) * b_sum)
            / int(4 * n as i64 * (n as i64 + 1));
        Ok(Self {
            params,
            transport: (1..=n).map(|k| to_f64(&transport_coefficient(n, k))).collect(),
            nonlocal: (1..=n).map(|k| to_f64(&nonlocal_coefficient(n, k))).collect(),
            kappa: to_f64(&kappa(n)),
            closed_constant: to_f64(&k),
        })
    }

    pub fn params(&self) -> &PeakonParams {
        &self.params
    }

    /// `(φ, φ_x)` with `φ_x = −sign(x−ct)φ` and `sign(0) = 0`.
    pub fn profile(&self, t: f64, x: f64) -> (f64, f64) {
        let s = x - self.params.crest(t);
        let v = self.params.a() * libm::exp(-s.abs());
        (v, -sign(s) * v)
    }

    pub fn integrand(&self, which: Integrand, t: f64, y: f64) -> f64 {
        let n = self.params.n();
        let (v, vx) = self.profile(t, y);
        let even = || -> f64 {
            self.nonlocal
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    let k = i as u32 + 1;
                    b * powi(v, 2 * n - 2 * k + 1) * powi(vx, 2 * k)
                })
                .sum()
        };
        let odd = || -> f64 {
            self.transport
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let k = i as u32 + 1;
                    a * powi(v, 2 * n - 2 * k) * powi(vx, 2 * k + 1)
                })
                .sum()
        };
        let top = powi(v, 2 * n + 1);
        let two_n = 2.0 * n as f64;
        match which {
            Integrand::Zero => 0.0,
            Integrand::Bracket => {
                let a_sum: f64 = self.transport.iter().sum();
                even() + (two_n + a_sum) / (two_n + 1.0) * top
            }
            Integrand::EvenNonlocal => two_n / (two_n + 1.0) * top + even(),
            Integrand::OddNonlocal => odd(),
        }
    }

    /// `(K∗f)(x)` at time `t` by adaptive quadrature over
    /// `[min(x,ct) − 60, max(x,ct) + 60]`, optionally split at `ct` and `x`.
    /// The split route is the one the closed forms are derived from; the
    /// unsplit route exists to check it.
    pub fn line_convolution(
        &self,
        kernel: Kernel,
        which: Integrand,
        t: f64,
        x: f64,
        quad: &QuadratureSpec,
        split: bool,
    ) -> Result<Estimate> {
        if which == Integrand::Zero {
            return Ok(Estimate { value: 0.0, error: 0.0, subdivisions: 0 });
        }
        let ct = self.params.crest(t);
        let lo = x.min(ct) - TAIL;
        let hi = x.max(ct) + TAIL;
        // Without the split the panels are a uniform unit grid anchored at
        // `lo`, so neither kink lands on a panel edge unless by accident.
        let breaks: Vec<f64> = if split {
            alloc::vec![ct, x]
        } else {
            (1..(hi - lo) as usize).map(|i| lo + i as f64).collect()
        };
        try_integrate(
            |y| Ok(kernel.eval(x - y) * self.integrand(which, t, y)),
            lo,
            hi,
            &breaks,
            quad,
        )
    }

    /// `(∂p∗bracket)(t, x)` from the closed forms on either side of the crest.
    pub fn closed_form_convolution(&self, t: f64, x: f64) -> f64 {
        let s = x - self.params.crest(t);
        let n = self.params.n();
        let a_pow = powi(self.params.a(), 2 * n + 1);
        let m = (2 * n + 1) as f64;
        if s > 0.0 {
            -self.closed_constant * a_pow * (libm::exp(-s) - libm::exp(-m * s))
        } else {
            self.closed_constant * a_pow * (libm::exp(s) - libm::exp(m * s))
        }
    }

    /// `sign(x−ct)φ[c − κ_n φ^{2n}]`.
    pub fn local_term(&self, t: f64, x: f64) -> f64 {
        let (v, _) = self.profile(t, x);
        sign(x - self.params.crest(t)) * v * (self.params.c() - self.kappa * powi(v, 2 * self.params.n()))
    }

    pub fn pointwise_residual(&self, t: f64, x: f64, quad: &QuadratureSpec) -> Result<Estimate> {
        let conv = self.line_convolution(Kernel::Dp, Integrand::Bracket, t, x, quad, true)?;
        Ok(Estimate { value: self.local_term(t, x) + conv.value, ..conv })
    }

    /// `sup_x |φ_c(t,x) − φ_c(0,x)|` over the given sample points.
    pub fn initial_trace_distance(&self, t: f64, xs: &[f64]) -> f64 {
        xs.iter()
            .map(|&x| (self.profile(t, x).0 - self.profile(0.0, x).0).abs())
            .fold(0.0, f64::max)
    }
}

pub fn peakon_pointwise_residual(params: &PeakonParams, t: f64, x: f64, quad: &QuadratureSpec) -> Result<f64> {
    Ok(PeakonWeak::new(*params)?.pointwise_residual(t, x, quad)?.value)
}

pub fn verify_identity_2_14(n: u32) -> Result<Certificate> {
    if n == 0 {
        return Err(Error::ZeroDegree);
    }
    let r = identity_2_14_residual(n);
    if num_traits::Zero::is_zero(&r) {
        Ok(Certificate::pass(IdentityId::E2_14, (n, n)))
    } else {
        Ok(Certificate::fail(
            IdentityId::E2_14,
            (n, n),
            Witness { n, residual: r, at: None, relation: "lhs - kappa_n".into() },
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpKind {
    /// `exp(−s²)`, treated as vanishing for `|s| > 8`.
    GaussianBump,
    /// `(1 − s²)⁸` on `|s| < 1`.
    CompactPolynomialBump,
}

impl BumpKind {
    /// Value and derivative at `s`.
    fn eval(self, s: f64) -> (f64, f64) {
        match self {
            BumpKind::GaussianBump => {
                let e = libm::exp(-s * s);
                (e, -2.0 * s * e)
            }
            BumpKind::CompactPolynomialBump => {
                if s.abs() >= 1.0 {
                    (0.0, 0.0)
                } else {
                    let w = 1.0 - s * s;
                    (powi(w, 8), -16.0 * s * powi(w, 7))
                }
            }
        }
    }

    fn reach(self) -> f64 {
        match self {
            BumpKind::GaussianBump => 8.0,
            BumpKind::CompactPolynomialBump => 1.0,
        }
    }
}

/// `ϕ(t, x) = τ(t/T)·χ((x − center)/width)` where `τ` is the same family
/// folded onto `[0, 1)`: it equals 1 at `t = 0` and vanishes at `t = T`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TestFunction {
    pub center: f64,
    pub width: f64,
    pub kind: BumpKind,
    pub time_kind: BumpKind,
}

impl TestFunction {
    pub fn new(center: f64, width: f64, kind: BumpKind, time_kind: BumpKind) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() || !center.is_finite() {
            return Err(Error::NonPositive { what: "test function width", value: width });
        }
        Ok(Self { center, width, kind, time_kind })
    }

    fn time_profile(&self, t: f64, horizon: f64) -> (f64, f64) {
        let s = t / horizon;
        if s >= 1.0 {
            return (0.0, 0.0);
        }
        match self.time_kind {
            BumpKind::CompactPolynomialBump => {
                let (v, d) = BumpKind::CompactPolynomialBump.eval(s);
                (v, d / horizon)
            }
            BumpKind::GaussianBump => {
                // exp(−4s²/(1−s²)): smooth, 1 at s = 0, flat to all orders at s = 1.
                let q = 1.0 - s * s;
                let v = libm::exp(-4.0 * s * s / q);
                (v, v * (-8.0 * s / (q * q)) / horizon)
            }
        }
    }

    /// `(ϕ, ϕ_t, ϕ_x)`.
    pub fn eval(&self, t: f64, x: f64, horizon: f64) -> (f64, f64, f64) {
        let (chi, dchi) = self.kind.eval((x - self.center) / self.width);
        let (tau, dtau) = self.time_profile(t, horizon);
        (tau * chi, dtau * chi, tau * dchi / self.width)
    }

    pub fn support(&self) -> (f64, f64) {
        let r = self.kind.reach() * self.width;
        (self.center - r, self.center + r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pairing {
    pub total: f64,
    /// Largest magnitude among the individual terms.
    pub scale: f64,
    /// `∫∫φϕ_t`, `∫∫φ^{2n+1}ϕ_x/(2n+1)`, `∫∫S₃ϕ`, `∫∫(p∗S_even)ϕ_x`,
    /// `−∫∫(p∗S₃)ϕ`, `∫φ(0)ϕ(0)`.
    pub terms: [f64; 6],
}

/// Space-time pairing of the weak formulation with `u = φ_c`, by nested
/// adaptive quadrature (inner `x`, outer `t`; convolutions innermost).
pub fn weak_form_pairing(
    params: &PeakonParams,
    phi: &TestFunction,
    horizon: f64,
    quad: &QuadratureSpec,
) -> Result<Pairing> {
    if !(horizon > 0.0) {
        return Err(Error::NonPositive { what: "time horizon", value: horizon });
    }
    let w = PeakonWeak::new(*params)?;
    let n = params.n();
    let (xl, xr) = phi.support();
    let m = (2 * n + 1) as f64;

    let space = |t: f64, f: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
        let ct = params.crest(t);
        Ok(try_integrate(f, xl, xr, &[ct, phi.center], quad)?.value)
    };
    let time = |g: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
        Ok(try_integrate(g, 0.0, horizon, &[], quad)?.value)
    };

    let t1 = time(&|t| space(t, &|x| Ok(w.profile(t, x).0 * phi.eval(t, x, horizon).1)))?;
    let t2 = time(&|t| {
        space(t, &|x| Ok(powi(w.profile(t, x).0, 2 * n + 1) / m * phi.eval(t, x, horizon).2))
    })?;
    let t3 = time(&|t| {
        space(t, &|x| Ok(w.integrand(Integrand::OddNonlocal, t, x) * phi.eval(t, x, horizon).0))
    })?;
    let t4 = time(&|t| {
        space(t, &|x| {
            let dphi = phi.eval(t, x, horizon).2;
            if dphi == 0.0 {
                return Ok(0.0);
            }
            Ok(w.line_convolution(Kernel::P, Integrand::EvenNonlocal, t, x, quad, true)?.value * dphi)
        })
    })?;
    let t5 = time(&|t| {
        space(t, &|x| {
            let v = phi.eval(t, x, horizon).0;
            if v == 0.0 {
                return Ok(0.0);
            }
            Ok(-w.line_convolution(Kernel::P, Integrand::OddNonlocal, t, x, quad, true)?.value * v)
        })
    })?;
    let t0 = space(0.0, &|x| Ok(w.profile(0.0, x).0 * phi.eval(0.0, x, horizon).0))?;
    let terms = [t1, t2, t3, t4, t5, t0];
    let mut sorted = terms;
    let total = crate::float::ordered_sum(&mut sorted);
    let scale = terms.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    Ok(Pairing { total, scale, terms })
}
