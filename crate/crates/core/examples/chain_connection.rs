//! Joins two canonical chains in every heralded branch and checks the
//! result against a linear cluster.
//!
//! Joins onto a single spin give an (m+n)-spin chain. For m, n ≥ 2 the end
//! of the first chain is left hanging off the second chain's first spin, so
//! the overlap with a linear cluster drops to 1/4.

use qdgate::cluster::{connect_chains, ChainState, Driver, ForcedBranch, Joined};
use qdgate::gate::GateOutcome;

fn main() -> qdgate::Result<()> {
    println!("{:>2} {:>2} {:>8} {:>26}", "m", "n", "branch", "result");
    for (m, n) in [(1, 1), (1, 3), (3, 1), (2, 2), (3, 2)] {
        for gate in [GateOutcome::Even, GateOutcome::Odd, GateOutcome::Failure] {
            let step = connect_chains(ChainState::canonical(m)?, ChainState::canonical(n)?, &mut Driver::Forced(ForcedBranch::gate(gate)))?;
            let result = match step.joined {
                Joined::Chain(chain) => format!("length {} F = {:.4}", chain.len(), chain.cluster_fidelity()?),
                Joined::Degraded(l, r) => format!("lengths {}+{} F = {:.4}/{:.4}", l.len(), r.len(), l.cluster_fidelity()?, r.cluster_fidelity()?),
            };
            println!("{m:>2} {n:>2} {:>8} {result:>26}", format!("{gate:?}"));
        }
    }
    Ok(())
}
