//! Heralded fidelity when the spins dephase during each photon attempt.

use qdgate::cavity::{reflection_pair, CavityParams};
use qdgate::gate::{estimate_gate, GateConfig};
use qdgate::qstate::StateVector;

fn main() -> qdgate::Result<()> {
    let pair = reflection_pair(&CavityParams::from_cooperativity(0.25, 13.0, 0.1, 0.1)?)?;
    let state = StateVector::product(&[StateVector::plus(), StateVector::plus()])?;
    println!("{:>10} {:>12} {:>14}", "T2/t_gate", "p/attempt", "mean F");
    for ratio in [10.0, 100.0, 1e3, 1e4] {
        let p = GateConfig::dephasing_from_ratio(ratio);
        let config = GateConfig::new(pair).with_dephasing(p);
        let stats = estimate_gate(&config, &state, 0, 1, 20_000, 3)?;
        println!("{ratio:>10} {p:>12.3e} {:>14.6}", stats.mean_fidelity());
    }
    Ok(())
}
