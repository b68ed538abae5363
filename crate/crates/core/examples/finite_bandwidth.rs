//! Efficiency of Gaussian probe pulses of increasing bandwidth, and the
//! fidelity of what they herald.

use qdgate::cavity::CavityParams;
use qdgate::pulse::{heralded_fidelity, pulse_etas, PulseSpec};
use qdgate::qstate::{Parity, StateVector};
use qdgate::rng::RandomStream;

fn main() -> qdgate::Result<()> {
    let params = CavityParams::from_cooperativity(1.0, 13.0, 0.1, 0.0)?;
    let state = StateVector::random(2, &mut RandomStream::new(5))?;
    println!("{:>8} {:>8} {:>8} {:>8} {:>16}", "delta", "eta_H", "eta_V", "eta_S", "1 - F(even)");
    for delta in [1e-3, 0.01, 0.05, 0.1, 0.2, 0.3, 0.5] {
        let pulse = PulseSpec::new(delta);
        let etas = pulse_etas(&params, &pulse)?;
        let f = heralded_fidelity(&params, &pulse, 1.0, &state, 0, 1, Parity::Even)?;
        println!("{delta:>8} {:>8.4} {:>8.4} {:>8.4} {:>16.2e}", etas.eta_h, etas.eta_v, etas.eta_s, 1.0 - f);
    }
    Ok(())
}
