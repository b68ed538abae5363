use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qdgate::config::{GridSpec, Job, RunConfig, OUT_DIR_ENV};
use qdgate::sweep::{factory_table, run_sweep};
use qdgate::Error;

/// Sweep gate efficiencies or run the cluster factory and write a table.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    /// TOML file with any of the options below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// kappa_ratio, cooperativity, detuning, bandwidth or eta_in.
    #[arg(long)]
    axis: Option<String>,
    /// Grid as start:stop:step (inclusive) or a single value.
    #[arg(long)]
    grid: Option<String>,
    /// Cooperativity g²/(γ(κ+κ_s)).
    #[arg(long)]
    c: Option<f64>,
    /// κ/κ_s; `inf` for no side leakage.
    #[arg(long)]
    kappa_ratio: Option<f64>,
    /// γ/κ.
    #[arg(long)]
    gamma: Option<f64>,
    /// (ω_c − ω)/κ.
    #[arg(long, allow_hyphen_values = true)]
    detuning: Option<f64>,
    /// Pulse bandwidth Δ/κ for pulse_eta_S.
    #[arg(long)]
    bandwidth: Option<f64>,
    #[arg(long)]
    eta_in: Option<f64>,
    #[arg(long)]
    detector_eff: Option<f64>,
    /// Phase-flip probability per attempt.
    #[arg(long)]
    dephasing: Option<f64>,
    #[arg(long)]
    max_recycles: Option<u32>,
    /// Monte Carlo trials per row.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated: eta_H, eta_V, eta_S, mc_eta_S, pulse_eta_S, mean_attempts.
    #[arg(long, value_delimiter = ',')]
    outputs: Option<Vec<String>>,
    /// csv, jsonl or svg.
    #[arg(long)]
    format: Option<String>,
    /// Output file, `-` for stdout. Defaults to a file in $QDGATE_OUT_DIR or the current directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run the cluster factory (sequential or doubling) over target lengths from --grid.
    #[arg(long)]
    factory: Option<String>,
}

impl Cli {
    fn overrides(self) -> (Option<PathBuf>, RunConfig) {
        let cfg = RunConfig {
            axis: self.axis,
            grid: self.grid.map(GridSpec::Range),
            c: self.c,
            kappa_ratio: self.kappa_ratio,
            gamma: self.gamma,
            detuning: self.detuning,
            bandwidth: self.bandwidth,
            eta_in: self.eta_in,
            detector_eff: self.detector_eff,
            dephasing: self.dephasing,
            max_recycles: self.max_recycles,
            trials: self.trials,
            seed: self.seed,
            outputs: self.outputs,
            format: self.format,
            out: self.out,
            factory: self.factory,
        };
        (self.config, cfg)
    }
}

fn run(cli: Cli) -> qdgate::Result<()> {
    let (file, flags) = cli.overrides();
    let base = match file {
        Some(path) => RunConfig::load(&path)?,
        None => RunConfig::default(),
    };
    let out_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    let plan = base.merge(flags).plan(out_dir.as_deref())?;
    let table = match &plan.job {
        Job::Sweep(spec) => run_sweep(spec),
        Job::Factory { baseline, strategy, targets } => factory_table(baseline, *strategy, targets),
    }
    .map_err(|e| match e {
        Error::InvalidParameter(msg) => Error::Config(msg),
        other => other,
    })?;
    if plan.out.as_os_str() == "-" {
        table.write(plan.format, io::stdout().lock())?;
    } else {
        let mut out = BufWriter::new(File::create(&plan.out)?);
        table.write(plan.format, &mut out)?;
        out.flush()?;
        eprintln!("wrote {} rows to {}", table.rows.len(), plan.out.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qdgate: {e}");
            match e {
                Error::Io(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
