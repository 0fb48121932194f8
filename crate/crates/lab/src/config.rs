//! Experiment configuration: one TOML file, every key optional, plus CLI
//! overrides applied on top.
//!
//! ```toml
//! n = 1
//! c = 0.6666666666666666      # peakon speed; the amplitude follows from it
//! seed = 0
//! t_end = 1.0
//! output_dir = "out"
//!
//! [grid]
//! half_length = 25.0          # periodic box [-L, L)
//! points = 4096               # power of two
//!
//! [mollifier]
//! width = 0.5
//! shape = "gaussian"          # or "bump"
//!
//! [initial]
//! kind = "mollified_peakon"   # "zero", or "gaussian_momentum" with
//!                             # amplitude and width keys
//!
//! [solver]
//! cfl = 0.5
//! dealias = "two_thirds"      # "padded", "none"
//! filter_strength = 0.0
//! observe_every = 10
//! resolution_tolerance = 1e-8 # omit to abort only on non-finite values
//!
//! [stability]
//! epsilons = [1e-2, 1e-3, 1e-4]
//! bump_offset = 4.0           # omit to draw it from the seed in [3, 5]
//! bisection_tolerance = 1e-6
//!
//! [frames]
//! format = "none"             # "csv" or "binary"
//! every = 10                  # in observations
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use gmch_core::evolution::{Dealias, SolverConfig};
use gmch_core::profiles::{MollifierShape, MollifierSpec, PeakonParams};
use gmch_core::spectral::GridSpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: u32,
    pub c: f64,
    pub seed: u64,
    pub t_end: f64,
    pub output_dir: PathBuf,
    pub grid: GridSection,
    pub mollifier: MollifierSection,
    pub initial: InitialData,
    pub solver: SolverSection,
    pub stability: StabilitySection,
    pub frames: FrameSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub half_length: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MollifierSection {
    pub width: f64,
    pub shape: MollifierShape,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    MollifiedPeakon,
    Zero,
    /// `u₀ = (1 − ∂²)⁻¹[amplitude·exp(−(x/width)²)]`.
    GaussianMomentum { amplitude: f64, width: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub cfl: f64,
    pub dealias: Dealias,
    pub filter_strength: f64,
    pub observe_every: usize,
    pub resolution_tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilitySection {
    pub epsilons: Vec<f64>,
    pub bump_offset: Option<f64>,
    pub bisection_tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameFormat {
    None,
    Csv,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrameSection {
    pub format: FrameFormat,
    pub every: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 1,
            c: 2.0 / 3.0,
            seed: 0,
            t_end: 1.0,
            output_dir: PathBuf::from("out"),
            grid: GridSection::default(),
            mollifier: MollifierSection::default(),
            initial: InitialData::MollifiedPeakon,
            solver: SolverSection::default(),
            stability: StabilitySection::default(),
            frames: FrameSection::default(),
        }
    }
}

impl Default for GridSection {
    fn default() -> Self {
        Self { half_length: 25.0, points: 4096 }
    }
}

impl Default for MollifierSection {
    fn default() -> Self {
        Self { width: 0.5, shape: MollifierShape::Gaussian }
    }
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData::MollifiedPeakon
    }
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            cfl: 0.5,
            dealias: Dealias::TwoThirds,
            filter_strength: 0.0,
            observe_every: 10,
            resolution_tolerance: None,
        }
    }
}

impl Default for StabilitySection {
    fn default() -> Self {
        Self { epsilons: vec![1e-2, 1e-3, 1e-4], bump_offset: None, bisection_tolerance: 1e-6 }
    }
}

impl Default for FrameSection {
    fn default() -> Self {
        Self { format: FrameFormat::None, every: 10 }
    }
}

/// Command-line values that replace the file's.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Configuration file (TOML)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Nonlinearity degree
    #[arg(long)]
    pub n: Option<u32>,
    /// Peakon speed
    #[arg(long)]
    pub c: Option<f64>,
    /// Half length L of the periodic box
    #[arg(long = "half-length")]
    pub half_length: Option<f64>,
    /// Number of grid points N
    #[arg(long)]
    pub points: Option<usize>,
    /// Mollifier width
    #[arg(long)]
    pub delta: Option<f64>,
    /// Comma-separated target perturbation sizes
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// File (if any) then overrides, then validation.
    pub fn resolve(ov: &Overrides) -> anyhow::Result<Self> {
        let mut cfg = match &ov.config {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        if let Some(v) = ov.n {
            cfg.n = v;
        }
        if let Some(v) = ov.c {
            cfg.c = v;
        }
        if let Some(v) = ov.half_length {
            cfg.grid.half_length = v;
        }
        if let Some(v) = ov.points {
            cfg.grid.points = v;
        }
        if let Some(v) = ov.delta {
            cfg.mollifier.width = v;
        }
        if let Some(v) = &ov.eps {
            cfg.stability.epsilons = v.clone();
        }
        if let Some(v) = ov.t_end {
            cfg.t_end = v;
        }
        if let Some(v) = ov.seed {
            cfg.seed = v;
        }
        if let Some(v) = &ov.out {
            cfg.output_dir = v.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.n == 0 {
            bail!("n must be at least 1");
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            bail!("speed c must be positive, got {}", self.c);
        }
        if self.frames.every == 0 {
            bail!("frames.every must be at least 1");
        }
        if !(self.stability.bisection_tolerance > 0.0) {
            bail!("stability.bisection_tolerance must be positive");
        }
        self.grid()?;
        self.solver_config()?.validate()?;
        Ok(())
    }

    pub fn grid(&self) -> anyhow::Result<GridSpec> {
        Ok(GridSpec::new(self.grid.half_length, self.grid.points)?)
    }

    pub fn params(&self) -> anyhow::Result<PeakonParams> {
        Ok(PeakonParams::from_speed(self.n, self.c)?)
    }

    pub fn mollifier(&self, params: &PeakonParams) -> anyhow::Result<MollifierSpec> {
        Ok(MollifierSpec::for_peakon(params, self.mollifier.width, self.mollifier.shape)?)
    }

    pub fn solver_config(&self) -> anyhow::Result<SolverConfig> {
        let mut s = SolverConfig::new(self.n, self.grid()?);
        s.cfl = self.solver.cfl;
        s.t_end = self.t_end;
        s.dealias = self.solver.dealias;
        s.filter_strength = self.solver.filter_strength;
        s.observe_every = self.solver.observe_every;
        s.resolution_tolerance = self.solver.resolution_tolerance;
        Ok(s)
    }

    /// Target list sorted ascending, duplicates removed.
    pub fn sorted_epsilons(&self) -> Vec<f64> {
        let mut v = self.stability.epsilons.clone();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}
