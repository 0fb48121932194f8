//! `gmch weakres`: pointwise peakon residuals over a parameter fan.

use gmch_core::profiles::PeakonParams;
use gmch_core::quadrature::QuadratureSpec;
use gmch_core::weakform::PeakonWeak;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualRow {
    pub n: u32,
    pub a: f64,
    pub t: f64,
    pub x: f64,
    pub residual: f64,
    /// Quadrature error estimate of the convolution term.
    pub tolerance_achieved: f64,
}

pub const HEADER: [&str; 6] = ["n", "a", "t", "x", "residual", "tolerance_achieved"];

#[derive(Debug, Clone)]
pub struct WeakresOptions {
    pub ns: Vec<u32>,
    pub amplitudes: Vec<f64>,
    pub times: Vec<f64>,
    /// Points per `(n, a, t)`, evenly spaced on `[ct − 5, ct + 5]`.
    pub points: usize,
    pub quad: QuadratureSpec,
}

impl Default for WeakresOptions {
    fn default() -> Self {
        Self {
            ns: vec![1, 2, 3],
            amplitudes: vec![0.5, 1.0, 2.0],
            times: vec![0.0, 1.0],
            points: 100,
            quad: QuadratureSpec::default(),
        }
    }
}

/// Relative bound the residuals are held to: `|r| ≤ 1e−8·a^{2n+1}`.
pub const RESIDUAL_SCALE: f64 = 1e-8;

pub fn residual_table(opts: &WeakresOptions) -> Result<Vec<ResidualRow>, LabError> {
    let mut jobs = Vec::new();
    for &n in &opts.ns {
        for &a in &opts.amplitudes {
            let weak = PeakonWeak::new(PeakonParams::from_amplitude(n, a)?)?;
            for &t in &opts.times {
                let crest = weak.params().crest(t);
                for i in 0..opts.points {
                    let s = if opts.points == 1 { 0.0 } else { i as f64 / (opts.points - 1) as f64 };
                    jobs.push((weak.clone(), n, a, t, crest - 5.0 + 10.0 * s));
                }
            }
        }
    }
    let rows = jobs
        .par_iter()
        .map(|(weak, n, a, t, x)| {
            let est = weak.pointwise_residual(*t, *x, &opts.quad)?;
            Ok(ResidualRow { n: *n, a: *a, t: *t, x: *x, residual: est.value, tolerance_achieved: est.error })
        })
        .collect::<Result<Vec<_>, gmch_core::Error>>()?;
    Ok(rows)
}

/// Largest `|residual| / a^{2n+1}` in the table.
pub fn worst_scaled(rows: &[ResidualRow]) -> f64 {
    rows.iter().map(|r| r.residual.abs() / r.a.powi(2 * r.n as i32 + 1)).fold(0.0, f64::max)
}
