//! Support for the acceptance target: a line-per-criterion reporter and
//! the random smooth profiles the integral checks sample.

use std::process::ExitCode;
use std::time::Instant;

use gmch_core::spectral::{GridFunction, GridSpec};
use rand::Rng;

#[derive(Debug, Clone)]
pub struct Line {
    pub id: String,
    pub pass: bool,
}

/// Prints `PASS`/`FAIL` lines as criteria complete and turns the tally into
/// an exit code.
pub struct Acceptance {
    lines: Vec<Line>,
    start: Instant,
}

impl Default for Acceptance {
    fn default() -> Self {
        Self { lines: Vec::new(), start: Instant::now() }
    }
}

impl Acceptance {
    pub fn record(&mut self, id: &str, title: &str, pass: bool, detail: &str) {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("{tag} {id:>3}  {title}: {detail}");
        self.lines.push(Line { id: id.to_string(), pass });
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn finish(self) -> ExitCode {
        let failed: Vec<&str> = self.lines.iter().filter(|l| !l.pass).map(|l| l.id.as_str()).collect();
        println!(
            "{} of {} criteria passed in {:.1?}{}",
            self.lines.len() - failed.len(),
            self.lines.len(),
            self.start.elapsed(),
            if failed.is_empty() { String::new() } else { format!("; failed: {}", failed.join(", ")) }
        );
        if failed.is_empty() {
            ExitCode::SUCCESS
        } else {
            ExitCode::FAILURE
        }
    }
}

/// Sum of one to four Gaussians with its exact derivative.
#[derive(Debug, Clone)]
pub struct Gaussians {
    pub terms: Vec<(f64, f64, f64)>,
}

impl Gaussians {
    pub fn random(rng: &mut impl Rng) -> Self {
        let count = rng.gen_range(1..=4);
        let terms = (0..count)
            .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-4.0..4.0), rng.gen_range(0.7..2.0)))
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
        GridFunction::from_fn(grid.clone(), |x| self.value(x)).expect("finite samples")
    }
}
