//! Photon and gate-call cost of building chains, growing one spin at a time
//! versus joining halves.
//!
//! Usage: cluster_factory [C] [trials]

use qdgate::cavity::{reflection_pair, CavityParams};
use qdgate::cluster::{simulate_factory, FactorySpec, Strategy};
use qdgate::gate::GateConfig;

fn main() -> qdgate::Result<()> {
    let mut args = std::env::args().skip(1);
    let c: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let trials: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(2_000);

    let config = GateConfig::new(reflection_pair(&CavityParams::from_cooperativity(c, 13.0, 0.1, 0.0)?)?);
    println!("success per call {:.4}, photons per call {:.4}", config.success_probability()?, config.expected_attempts()?);
    println!("{:>6} {:>18} {:>10} {:>10} {:>9}", "length", "strategy", "gate ops", "photons", "linear");
    for target in 2..=8 {
        for strategy in [Strategy::SequentialGrowth, Strategy::PairwiseDoubling] {
            let stats = simulate_factory(&config, &FactorySpec::new(target, strategy, trials, target as u64))?;
            println!(
                "{target:>6} {:>18} {:>10.2} {:>10.2} {:>8.0}%",
                format!("{strategy:?}"),
                stats.mean_gate_ops,
                stats.mean_photons,
                100.0 * stats.verified as f64 / stats.completed as f64
            );
        }
    }
    Ok(())
}
