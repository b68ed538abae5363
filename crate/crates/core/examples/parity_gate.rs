//! One photon through the gate on |+⟩|+⟩: outcome probabilities and the
//! heralded two-spin states.

use qdgate::cavity::{reflection_pair, CavityParams};
use qdgate::gate::{run_gate_forced, single_shot_distribution, GateConfig, GateOutcome};
use qdgate::qstate::StateVector;

fn main() -> qdgate::Result<()> {
    let pair = reflection_pair(&CavityParams::from_cooperativity(1.0, 13.0, 0.1, 0.0)?)?;
    let config = GateConfig::new(pair);
    let input = StateVector::product(&[StateVector::plus(), StateVector::plus()])?;

    let dist = single_shot_distribution(&config, &input, 0, 1)?;
    println!("D3 (even) {:.4}", dist.p_even);
    println!("D4 (odd)  {:.4}", dist.p_odd);
    println!("D1/D2     {:.4}  (recycle)", dist.p_recycle);
    println!("no click  {:.4}", dist.p_loss);

    for outcome in [GateOutcome::Even, GateOutcome::Odd] {
        let result = run_gate_forced(input.clone(), 0, 1, outcome)?;
        let amps: Vec<String> = result.state.amplitudes().iter().map(|a| format!("{:+.3}", a.re)).collect();
        println!("{outcome:?}: [{}] over |↑↑⟩ |↑↓⟩ |↓↑⟩ |↓↓⟩", amps.join(", "));
    }
    Ok(())
}
