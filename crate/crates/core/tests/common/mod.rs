#![allow(dead_code)]

use gmch_core::spectral::{GridFunction, GridSpec};
use rand::Rng;

/// Sum of Gaussians with its exact derivative.
#[derive(Debug, Clone)]
pub struct Gaussians {
    pub terms: Vec<(f64, f64, f64)>,
}

impl Gaussians {
    pub fn random(rng: &mut impl Rng, signed: bool) -> Self {
        let count = rng.gen_range(1..=4);
        let terms = (0..count)
            .map(|_| {
                let amp = if signed { rng.gen_range(-1.0..1.0) } else { rng.gen_range(0.1..1.0) };
                (amp, rng.gen_range(-4.0..4.0), rng.gen_range(0.7..2.0))
            })
            .collect();
        Self { terms }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.terms.iter().map(|&(a, c, w)| a * (-((x - c) / w).powi(2)).exp()).sum()
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(a, c, w)| {
                let s = (x - c) / w;
                -2.0 * s / w * a * (-s * s).exp()
            })
            .sum()
    }

    pub fn sample(&self, grid: &GridSpec) -> GridFunction {
        GridFunction::from_fn(grid.clone(), |x| self.value(x)).unwrap()
    }
}

/// `(1−∂²)⁻¹` of a random nonnegative Gaussian momentum.
pub fn positive_momentum_profile(rng: &mut impl Rng, grid: &GridSpec) -> GridFunction {
    let y = Gaussians::random(rng, false);
    let samples: Vec<f64> = grid.points().iter().map(|&x| y.value(x)).collect();
    GridFunction::new(grid.clone(), grid.helmholtz(&samples)).unwrap()
}
