//! Grows a cluster chain spin by spin with sampled gate outcomes, printing
//! each step.

use qdgate::cavity::{reflection_pair, CavityParams};
use qdgate::cluster::{grow_chain, ChainState, Driver};
use qdgate::gate::GateConfig;
use qdgate::qstate::{Gate1, ZOutcome};
use qdgate::rng::RandomStream;

const TARGET: usize = 6;

fn main() -> qdgate::Result<()> {
    let config = GateConfig::new(reflection_pair(&CavityParams::from_cooperativity(1.0, 13.0, 0.1, 0.0)?)?);
    let mut rng = RandomStream::new(8);
    let mut chain = ChainState::with_spares(1, TARGET)?;
    let mut photons = 0;
    while chain.len() < TARGET {
        let fresh = chain.free_qubits()[0];
        // Spares that were measured off need re-preparing first.
        let (outcome, mut register) = chain.register.measure_z(fresh, &mut rng)?;
        if outcome == ZOutcome::Down {
            register = register.apply_1q(fresh, Gate1::X)?;
        }
        register = register.apply_1q(fresh, Gate1::H)?.apply_1q(fresh, Gate1::Z)?;
        if chain.labels.is_empty() {
            chain = ChainState { register: register.apply_1q(fresh, Gate1::Z)?, labels: vec![fresh] };
            continue;
        }
        chain.register = register;
        let step = grow_chain(chain, fresh, &mut Driver::Random { config: &config, rng: &mut rng })?;
        photons += step.attempts;
        chain = step.chain;
        println!(
            "{:<8} photons {:>2}  chain {:?}  fidelity {:.12}",
            format!("{:?}", step.outcome),
            step.attempts,
            chain.labels,
            chain.cluster_fidelity()?
        );
    }
    println!("{TARGET}-spin cluster after {photons} photons");
    Ok(())
}
