//! Run configuration from a TOML file and/or command-line flags.
//!
//! Every key is optional; missing keys fall back to [`Baseline::default`]
//! and the κ/κ_s sweep over 1..=30. When both a file and flags are given,
//! flags win.
//!
//! ```toml
//! axis = "kappa_ratio"
//! grid = "1:30:1"          # or an array of points
//! c = 0.25
//! gamma = 0.1
//! outputs = ["eta_H", "eta_V", "eta_S", "mc_eta_S"]
//! trials = 10000
//! seed = 7
//! format = "csv"
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::cluster::{FactorySpec, Strategy};
use crate::error::{Error, Result};
use crate::sweep::{parse_grid, Axis, Baseline, Output, SweepSpec};
use crate::table::{quantize, Format};

/// Environment variable naming the directory for output files when no
/// explicit path is given.
pub const OUT_DIR_ENV: &str = "QDGATE_OUT_DIR";

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Range(String),
    Points(Vec<f64>),
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        match self {
            GridSpec::Range(text) => parse_grid(text),
            GridSpec::Points(points) => Ok(points.iter().copied().map(quantize).collect()),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub axis: Option<String>,
    pub grid: Option<GridSpec>,
    pub c: Option<f64>,
    pub kappa_ratio: Option<f64>,
    pub gamma: Option<f64>,
    pub detuning: Option<f64>,
    pub bandwidth: Option<f64>,
    pub eta_in: Option<f64>,
    pub detector_eff: Option<f64>,
    pub dephasing: Option<f64>,
    pub max_recycles: Option<u32>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub outputs: Option<Vec<String>>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    /// Run the cluster factory with this strategy (`sequential` or
    /// `doubling`) over target lengths given by `grid`.
    pub factory: Option<String>,
}

/// What a configuration asks for.
#[derive(Clone, Debug, PartialEq)]
pub enum Job {
    Sweep(SweepSpec),
    Factory { baseline: Baseline, strategy: Strategy, targets: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    pub job: Job,
    pub format: Format,
    /// Output file; `-` means standard output.
    pub out: PathBuf,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merge(self, over: RunConfig) -> Self {
        Self {
            axis: over.axis.or(self.axis),
            grid: over.grid.or(self.grid),
            c: over.c.or(self.c),
            kappa_ratio: over.kappa_ratio.or(self.kappa_ratio),
            gamma: over.gamma.or(self.gamma),
            detuning: over.detuning.or(self.detuning),
            bandwidth: over.bandwidth.or(self.bandwidth),
            eta_in: over.eta_in.or(self.eta_in),
            detector_eff: over.detector_eff.or(self.detector_eff),
            dephasing: over.dephasing.or(self.dephasing),
            max_recycles: over.max_recycles.or(self.max_recycles),
            trials: over.trials.or(self.trials),
            seed: over.seed.or(self.seed),
            outputs: over.outputs.or(self.outputs),
            format: over.format.or(self.format),
            out: over.out.or(self.out),
            factory: over.factory.or(self.factory),
        }
    }

    pub fn baseline(&self) -> Baseline {
        let d = Baseline::default();
        Baseline {
            c: self.c.unwrap_or(d.c),
            kappa_ratio: self.kappa_ratio.unwrap_or(d.kappa_ratio),
            gamma: self.gamma.unwrap_or(d.gamma),
            detuning: self.detuning.unwrap_or(d.detuning),
            bandwidth: self.bandwidth.or(d.bandwidth),
            eta_in: self.eta_in.unwrap_or(d.eta_in),
            detector_eff: self.detector_eff.unwrap_or(d.detector_eff),
            dephasing: self.dephasing.unwrap_or(d.dephasing),
            max_recycles: self.max_recycles.unwrap_or(d.max_recycles),
            trials: self.trials.unwrap_or(d.trials),
            seed: self.seed.unwrap_or(d.seed),
        }
    }

    /// Resolves defaults and checks everything except the physics of
    /// individual grid points. `out_dir` is used when no output path is set.
    pub fn plan(&self, out_dir: Option<&Path>) -> Result<Plan> {
        let format: Format = self.format.as_deref().unwrap_or("csv").parse()?;
        let baseline = self.baseline();
        let grid = self.grid.as_ref().map(GridSpec::points).transpose()?;
        let (job, stem) = match &self.factory {
            Some(name) => {
                let strategy = match name.to_ascii_lowercase().as_str() {
                    "sequential" | "sequential_growth" => Strategy::SequentialGrowth,
                    "doubling" | "pairwise" | "pairwise_doubling" => Strategy::PairwiseDoubling,
                    _ => return Err(Error::Config(format!("unknown factory strategy {name:?}"))),
                };
                let targets = grid
                    .unwrap_or_else(|| (2..=8).map(f64::from).collect())
                    .into_iter()
                    .map(|v| {
                        if v.fract() == 0.0 && v >= 1.0 && v <= FactorySpec::MAX_TARGET as f64 {
                            Ok(v as usize)
                        } else {
                            Err(Error::Config(format!("target length {v} is not an integer in 1..={}", FactorySpec::MAX_TARGET)))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                if targets.is_empty() || baseline.trials == 0 {
                    return Err(Error::Config("factory needs targets and at least one trial".into()));
                }
                baseline.gate_config().map_err(|e| Error::Config(e.to_string()))?;
                (Job::Factory { baseline, strategy, targets }, "factory".to_string())
            }
            None => {
                let axis: Axis = self.axis.as_deref().unwrap_or("kappa_ratio").parse()?;
                let mut spec = SweepSpec::new(baseline);
                if let Some(grid) = grid {
                    spec = spec.with_axis(axis, grid);
                } else if axis != Axis::KappaRatio {
                    return Err(Error::Config(format!("axis {axis} needs a grid")));
                }
                if let Some(names) = &self.outputs {
                    spec = spec.with_outputs(names.iter().map(|n| n.parse()).collect::<Result<Vec<Output>>>()?);
                }
                spec.validate()?;
                (Job::Sweep(spec), format!("sweep_{axis}"))
            }
        };
        let out = match &self.out {
            Some(path) => path.clone(),
            None => out_dir.unwrap_or(Path::new(".")).join(format!("{stem}.{}", format.extension())),
        };
        Ok(Plan { job, format, out })
    }
}
