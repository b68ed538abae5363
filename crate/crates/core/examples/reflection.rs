//! Reflection coefficients and single-photon efficiencies at the four
//! standard operating points (κ/κ_s = 13, γ/κ = 0.1).

use qdgate::cavity::{reflection_pair, CavityParams};
use qdgate::gate::analytic_etas;

fn main() -> qdgate::Result<()> {
    println!("{:>5} {:>9} {:>22} {:>22} {:>7} {:>7} {:>7}", "C", "detuning", "r1", "r0", "eta_H", "eta_V", "eta_S");
    for (c, detuning) in [(0.25, 0.0), (1.0, 0.0), (0.25, 0.1), (1.0, 0.1)] {
        let params = CavityParams::from_cooperativity(c, 13.0, 0.1, detuning)?;
        let pair = reflection_pair(&params)?;
        let etas = analytic_etas(&pair)?;
        println!(
            "{c:>5} {detuning:>9} {:>22} {:>22} {:>7.4} {:>7.4} {:>7.4}",
            format!("{:.4}{:+.4}i", pair.r1.re, pair.r1.im),
            format!("{:.4}{:+.4}i", pair.r0.re, pair.r0.im),
            etas.eta_h,
            etas.eta_v,
            etas.eta_s
        );
    }
    Ok(())
}
