//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadratureSpec {
    pub absolute_tol: f64,
    pub relative_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(absolute_tol: f64, relative_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(absolute_tol >= 1e-14) || !(relative_tol >= 1e-14) {
            return Err(Error::NonPositive { what: "quadrature tolerance (>= 1e-14)", value: absolute_tol.min(relative_tol) });
        }
        if max_subdivisions == 0 {
            return Err(Error::NonPositive { what: "max subdivisions", value: 0.0 });
        }
        Ok(Self { absolute_tol, relative_tol, max_subdivisions })
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { absolute_tol: 1e-14, relative_tol: 1e-13, max_subdivisions: 2000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: f64, b: f64) -> Result<Piece> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx)? + f(c + dx)?;
        kron += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    Ok(Piece { a, b, value: kron * h, error: ((kron - gauss) * h).abs() })
}

/// Integrates `f` over `[a, b]` with the listed interior breakpoints as
/// initial interval boundaries. Integrand errors propagate unchanged.
pub fn try_integrate<F>(mut f: F, a: f64, b: f64, breakpoints: &[f64], spec: &QuadratureSpec) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0, subdivisions: 0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|&p| p > lo && p < hi).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut pieces = Vec::with_capacity(cuts.len() + 16);
    let mut left = lo;
    for p in cuts.into_iter().chain(core::iter::once(hi)) {
        pieces.push(gk15(&mut f, left, p)?);
        left = p;
    }
    let mut subdivisions = 0;
    loop {
        let value: f64 = pieces.iter().map(|p| p.value).sum();
        let error: f64 = pieces.iter().map(|p| p.error).sum();
        if error <= spec.absolute_tol.max(spec.relative_tol * value.abs()) {
            return Ok(Estimate { value: sign * value, error, subdivisions });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::Quadrature { estimate: error, subdivisions });
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, p)| if p.error > best.1 { (i, p.error) } else { best });
        let worst = pieces.swap_remove(idx);
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::Quadrature { estimate: error, subdivisions });
        }
        pieces.push(gk15(&mut f, worst.a, mid)?);
        pieces.push(gk15(&mut f, mid, worst.b)?);
        subdivisions += 1;
    }
}

pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, breakpoints: &[f64], spec: &QuadratureSpec) -> Result<Estimate> {
    try_integrate(|x| Ok(f(x)), a, b, breakpoints, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let e = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, &[], &QuadratureSpec::default()).unwrap();
        assert!((e.value - 0.0).abs() < 1e-14);
        let e = integrate(|x| x.powi(6), -1.0, 1.0, &[], &QuadratureSpec::default()).unwrap();
        assert!((e.value - 2.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn kink_with_and_without_breakpoint() {
        let spec = QuadratureSpec::default();
        let f = |x: f64| libm::exp(-(x - 0.3).abs());
        let exact = 2.0 - libm::exp(-2.7) - libm::exp(-3.3);
        let split = integrate(f, -3.0, 3.0, &[0.3], &spec).unwrap();
        assert!((split.value - exact).abs() < 1e-14);
        let plain = integrate(f, -3.0, 3.0, &[], &spec).unwrap();
        assert!(plain.subdivisions > split.subdivisions);
        assert!((plain.value - exact).abs() < 1e-13);
    }

    #[test]
    fn budget_exhaustion_reports_bound() {
        let spec = QuadratureSpec { absolute_tol: 1e-14, relative_tol: 1e-14, max_subdivisions: 3 };
        let err = integrate(|x| libm::sin(1.0 / x), 1e-3, 1.0, &[], &spec).unwrap_err();
        assert!(matches!(err, Error::Quadrature { subdivisions: 3, .. }));
    }

    #[test]
    fn reversed_limits() {
        let e = integrate(|x| x, 1.0, 0.0, &[], &QuadratureSpec::default()).unwrap();
        assert!((e.value + 0.5).abs() < 1e-15);
    }
}
