//! Repeat-until-success Monte Carlo against the recycled efficiency.
//!
//! Usage: recycling_monte_carlo [trials] [seed]

use qdgate::cavity::{reflection_pair, CavityParams};
use qdgate::gate::{estimate_gate, GateConfig};
use qdgate::qstate::StateVector;
use qdgate::rng::RandomStream;

fn main() -> qdgate::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);

    let state = StateVector::random(2, &mut RandomStream::new(seed))?;
    for (c, detuning) in [(0.25, 0.0), (1.0, 0.0), (0.25, 0.1), (1.0, 0.1)] {
        let config = GateConfig::new(reflection_pair(&CavityParams::from_cooperativity(c, 13.0, 0.1, detuning)?)?);
        let etas = config.effective_etas()?;
        let stats = estimate_gate(&config, &state, 0, 1, trials, seed)?;
        println!(
            "C={c:<4} det={detuning:<3}  eta_S {:.4}  mc {:.4} ± {:.4}  photons/call {:.3} (expected {:.3})  min F {:.12}",
            etas.eta_s,
            stats.success_rate(),
            stats.stderr(),
            stats.mean_attempts(),
            config.expected_attempts()?,
            stats.fidelity_min
        );
    }
    Ok(())
}
