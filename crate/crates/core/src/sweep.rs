//! Parameter sweeps of the gate efficiencies.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cavity::{reflection_pair, CavityParams};
use crate::cluster::{simulate_factory, FactorySpec, FactoryStats, Strategy};
use crate::error::{Error, Result};
use crate::gate::{estimate_gate, GateConfig, DEFAULT_MAX_RECYCLES};
use crate::pulse::{pulse_etas, PulseSpec};
use crate::qstate::StateVector;
use crate::table::{quantize, Table};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    KappaRatio,
    Cooperativity,
    Detuning,
    Bandwidth,
    EtaIn,
}

impl Axis {
    pub const ALL: [Axis; 5] = [Axis::KappaRatio, Axis::Cooperativity, Axis::Detuning, Axis::Bandwidth, Axis::EtaIn];

    pub fn name(self) -> &'static str {
        match self {
            Axis::KappaRatio => "kappa_ratio",
            Axis::Cooperativity => "cooperativity",
            Axis::Detuning => "detuning",
            Axis::Bandwidth => "bandwidth",
            Axis::EtaIn => "eta_in",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        let alias = match key.as_str() {
            "c" => "cooperativity",
            "kappa" => "kappa_ratio",
            other => other,
        };
        Axis::ALL
            .into_iter()
            .find(|a| a.name() == alias)
            .ok_or_else(|| Error::Config(format!("unknown axis {s:?}")))
    }
}

/// Sweep columns, in the order they appear in output tables.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Output {
    #[serde(rename = "eta_H")]
    EtaH,
    #[serde(rename = "eta_V")]
    EtaV,
    #[serde(rename = "eta_S")]
    EtaS,
    /// Monte Carlo success rate; also adds a `mc_stderr` column.
    #[serde(rename = "mc_eta_S")]
    McEtaS,
    /// η_S averaged over a Gaussian pulse of the baseline bandwidth.
    #[serde(rename = "pulse_eta_S")]
    PulseEtaS,
    /// Expected photons per gate call.
    #[serde(rename = "mean_attempts")]
    MeanAttempts,
}

impl Output {
    pub const ALL: [Output; 6] =
        [Output::EtaH, Output::EtaV, Output::EtaS, Output::McEtaS, Output::PulseEtaS, Output::MeanAttempts];

    pub fn name(self) -> &'static str {
        match self {
            Output::EtaH => "eta_H",
            Output::EtaV => "eta_V",
            Output::EtaS => "eta_S",
            Output::McEtaS => "mc_eta_S",
            Output::PulseEtaS => "pulse_eta_S",
            Output::MeanAttempts => "mean_attempts",
        }
    }
}

impl FromStr for Output {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Output::ALL
            .into_iter()
            .find(|o| o.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown output {s:?}")))
    }
}

/// Fixed parameters of a sweep. The swept field is overridden per row.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    /// Cooperativity C.
    pub c: f64,
    /// κ/κ_s; infinite means no side leakage.
    pub kappa_ratio: f64,
    /// γ/κ.
    pub gamma: f64,
    /// (ω_c − ω)/κ with ω_X = ω_c.
    pub detuning: f64,
    /// Pulse bandwidth Δ/κ for `pulse_eta_S`.
    pub bandwidth: Option<f64>,
    pub eta_in: f64,
    pub detector_eff: f64,
    /// Phase-flip probability per attempt.
    pub dephasing: f64,
    pub max_recycles: u32,
    /// Monte Carlo trials per row.
    pub trials: u64,
    pub seed: u64,
}

impl Default for Baseline {
    fn default() -> Self {
        Self {
            c: 1.0,
            kappa_ratio: 13.0,
            gamma: 0.1,
            detuning: 0.0,
            bandwidth: None,
            eta_in: 1.0,
            detector_eff: 1.0,
            dephasing: 0.0,
            max_recycles: DEFAULT_MAX_RECYCLES,
            trials: 10_000,
            seed: 0,
        }
    }
}

impl Baseline {
    pub fn with(self, axis: Axis, value: f64) -> Self {
        match axis {
            Axis::KappaRatio => Self { kappa_ratio: value, ..self },
            Axis::Cooperativity => Self { c: value, ..self },
            Axis::Detuning => Self { detuning: value, ..self },
            Axis::Bandwidth => Self { bandwidth: Some(value), ..self },
            Axis::EtaIn => Self { eta_in: value, ..self },
        }
    }

    pub fn cavity(&self) -> Result<CavityParams> {
        CavityParams::from_cooperativity(self.c, self.kappa_ratio, self.gamma, self.detuning)
    }

    pub fn gate_config(&self) -> Result<GateConfig> {
        let config = GateConfig::new(reflection_pair(&self.cavity()?)?)
            .with_eta_in(self.eta_in)
            .with_detector_efficiency(self.detector_eff)
            .with_dephasing(self.dephasing)
            .with_max_recycles(self.max_recycles);
        config.validate()?;
        Ok(config)
    }
}

/// Inclusive `start:stop:step` grid, rounded to table precision.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let number = |s: &str| s.parse::<f64>().map_err(|_| Error::Config(format!("bad grid number {s:?} in {text:?}")));
    match parts.as_slice() {
        [single] => Ok(vec![number(single)?]),
        [start, stop, step] => {
            let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
            if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
                return Err(Error::Config(format!("grid {text:?} needs start <= stop and step > 0")));
            }
            let n = ((stop - start) / step + 1e-9).floor();
            if n > 1e6 {
                return Err(Error::Config(format!("grid {text:?} has too many points")));
            }
            Ok((0..=n as usize).map(|i| quantize(start + i as f64 * step)).collect())
        }
        _ => Err(Error::Config(format!("grid {text:?} is not start:stop:step"))),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub baseline: Baseline,
    pub outputs: BTreeSet<Output>,
}

impl SweepSpec {
    /// κ/κ_s from 1 to 30 with η_H, η_V and η_S.
    pub fn new(baseline: Baseline) -> Self {
        Self {
            axis: Axis::KappaRatio,
            grid: (1..=30).map(f64::from).collect(),
            baseline,
            outputs: [Output::EtaH, Output::EtaV, Output::EtaS].into(),
        }
    }

    pub fn with_axis(self, axis: Axis, grid: Vec<f64>) -> Self {
        Self { axis, grid, ..self }
    }

    pub fn with_outputs(self, outputs: impl IntoIterator<Item = Output>) -> Self {
        Self { outputs: outputs.into_iter().collect(), ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Config("grid is empty".into()));
        }
        if self.grid.iter().any(|v| v.is_nan()) || self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("grid must be strictly increasing".into()));
        }
        if self.outputs.is_empty() {
            return Err(Error::Config("no outputs requested".into()));
        }
        if self.outputs.contains(&Output::PulseEtaS) && self.axis != Axis::Bandwidth && self.baseline.bandwidth.is_none() {
            return Err(Error::Config("pulse_eta_S needs a bandwidth".into()));
        }
        if self.outputs.contains(&Output::McEtaS) && self.baseline.trials == 0 {
            return Err(Error::Config("mc_eta_S needs at least one trial".into()));
        }
        for &v in &self.grid {
            let point = self.baseline.with(self.axis, v);
            point.gate_config().map_err(|e| Error::Config(format!("{} = {v}: {e}", self.axis)))?;
            if let Some(delta) = point.bandwidth {
                PulseSpec::new(delta).validate().map_err(|e| Error::Config(format!("{} = {v}: {e}", self.axis)))?;
            }
        }
        Ok(())
    }

    pub fn columns(&self) -> Vec<String> {
        self.outputs
            .iter()
            .flat_map(|o| match o {
                Output::McEtaS => vec!["mc_eta_S", "mc_stderr"],
                o => vec![o.name()],
            })
            .map(String::from)
            .collect()
    }
}

fn evaluate(spec: &SweepSpec, row: usize) -> Result<(Vec<Option<f64>>, String)> {
    let point = spec.baseline.with(spec.axis, spec.grid[row]);
    let config = point.gate_config()?;
    let mut flags = Vec::new();
    let etas = match config.effective_etas() {
        Ok(e) => Some(e),
        Err(Error::Degenerate) => {
            flags.push("degenerate: eta_V = 1");
            None
        }
        Err(e) => return Err(e),
    };
    let mut cells = Vec::new();
    for output in &spec.outputs {
        match output {
            Output::EtaH => {
                let eta2 = point.eta_in * point.eta_in;
                cells.push(Some(point.detector_eff * eta2 * config.pair.d.norm_sqr()));
            }
            Output::EtaV => {
                let eta2 = point.eta_in * point.eta_in;
                cells.push(Some(point.detector_eff * (eta2 * config.pair.s.norm_sqr() + 1.0 - eta2)));
            }
            Output::EtaS => cells.push(etas.map(|e| e.eta_s)),
            Output::McEtaS => {
                if etas.is_none() {
                    cells.extend([None, None]);
                    continue;
                }
                let state = StateVector::product(&[StateVector::plus(), StateVector::plus()])?;
                let stats = estimate_gate(&config, &state, 0, 1, point.trials, point.seed ^ row as u64)?;
                cells.extend([Some(stats.success_rate()), Some(stats.stderr())]);
            }
            Output::PulseEtaS => {
                let mut pulse = PulseSpec::new(point.bandwidth.expect("validated"));
                let result = match pulse_etas(&point.cavity()?, &pulse) {
                    Err(Error::CoarseGrid { suggested, .. }) => {
                        pulse = pulse.with_points(suggested);
                        pulse_etas(&point.cavity()?, &pulse)
                    }
                    other => other,
                };
                match result {
                    Ok(e) => cells.push(Some(e.eta_s)),
                    Err(Error::Degenerate) => {
                        flags.push("degenerate pulse average");
                        cells.push(None);
                    }
                    Err(e) => return Err(e),
                }
            }
            Output::MeanAttempts => cells.push(Some(config.expected_attempts()?)),
        }
    }
    Ok((cells, flags.join("; ")))
}

/// Evaluates every grid point. Rows run in parallel; row `i` seeds its
/// Monte Carlo with `seed ^ i`.
pub fn run_sweep(spec: &SweepSpec) -> Result<Table> {
    spec.validate()?;
    let rows: Vec<_> = (0..spec.grid.len()).into_par_iter().map(|i| evaluate(spec, i)).collect::<Result<_>>()?;
    let mut table = Table::new(spec.axis.name(), spec.columns());
    for (value, (cells, flag)) in spec.grid.iter().zip(rows) {
        table.push(*value, cells, flag)?;
    }
    Ok(table)
}

pub const FACTORY_COLUMNS: [&str; 7] = [
    "mean_photons",
    "photons_stderr",
    "mean_gate_ops",
    "gate_ops_stderr",
    "completed_fraction",
    "verified_fraction",
    "expected_attempts",
];

/// Factory statistics for each target length in `targets`, one table row per
/// length. Row `i` uses seed `seed ^ i`.
pub fn factory_table(baseline: &Baseline, strategy: Strategy, targets: &[usize]) -> Result<Table> {
    let config = baseline.gate_config()?;
    let attempts = config.expected_attempts()?;
    let stats: Vec<FactoryStats> = targets
        .iter()
        .enumerate()
        .map(|(i, &target)| {
            let spec = FactorySpec::new(target, strategy, baseline.trials, baseline.seed ^ i as u64);
            simulate_factory(&config, &spec)
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new("target_length", FACTORY_COLUMNS.iter().map(|s| s.to_string()).collect());
    for (&target, s) in targets.iter().zip(&stats) {
        let done = s.completed > 0;
        let some = |x: f64| if done { Some(x) } else { None };
        table.push(
            target as f64,
            vec![
                some(s.mean_photons),
                some(s.photons_stderr()),
                some(s.mean_gate_ops),
                some(s.gate_ops_stderr()),
                Some(s.completed_fraction()),
                some(s.verified as f64 / s.completed as f64),
                Some(attempts),
            ],
            if done { "" } else { "no build completed" },
        )?;
    }
    Ok(table)
}
