//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::ExitCode;

use common::{log_uniform, standard_params, random_cavity, uniform, OPERATING_POINTS};
use qdgate::cavity::reflection_pair;
use qdgate::cluster::{connect_chains, grow_chain, ChainState, Driver, ForcedBranch, Joined};
use qdgate::gate::{analytic_etas, estimate_gate, single_shot_distribution, GateConfig, GateOutcome};
use qdgate::pulse::{heralded_fidelity, PulseSpec};
use qdgate::qstate::{Parity, StateVector, ZOutcome};
use qdgate::rng::RandomStream;
use qdgate::sweep::{run_sweep, Axis, Baseline, Output, SweepSpec};

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn quoted_numbers() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut values = Vec::new();
    for (_, c, det, expected) in OPERATING_POINTS {
        let etas = analytic_etas(&reflection_pair(&standard_params(c, det)).unwrap()).unwrap();
        worst = worst.max((etas.eta_s - expected).abs());
        values.push(format!("{:.4}", etas.eta_s));
    }
    (worst <= 1e-3, format!("eta_S = [{}], max |error| = {worst:.2e} (tol 1e-3)", values.join(", ")))
}

fn recycling_identity() -> Outcome {
    let mut rng = RandomStream::new(2);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let etas = analytic_etas(&reflection_pair(&random_cavity(&mut rng)).unwrap()).unwrap();
        worst = worst.max((etas.eta_s - etas.eta_h / (1.0 - etas.eta_v)).abs());
    }
    (worst <= 1e-12, format!("10^4 draws, max |eta_S - eta_H/(1-eta_V)| = {worst:.2e} (tol 1e-12)"))
}

fn monte_carlo_vs_analytic() -> Outcome {
    let mut rng = RandomStream::new(3);
    let state = StateVector::random(2, &mut rng).unwrap();
    let mut ok = true;
    let mut worst_z: f64 = 0.0;
    let mut worst_f: f64 = 0.0;
    for (k, (_, c, det, _)) in OPERATING_POINTS.into_iter().enumerate() {
        let config = GateConfig::new(reflection_pair(&standard_params(c, det)).unwrap());
        let expected = config.effective_etas().unwrap().eta_s;
        let stats = estimate_gate(&config, &state, 0, 1, 100_000, 30 + k as u64).unwrap();
        let z = (stats.success_rate() - expected).abs() / stats.stderr();
        worst_z = worst_z.max(z);
        worst_f = worst_f.max((1.0 - stats.fidelity_min).abs()).max((1.0 - stats.mean_fidelity()).abs());
        ok &= z <= 3.0;
    }
    ok &= worst_f <= 1e-10;
    (ok, format!("4 x 10^5 trials, max deviation {worst_z:.2} SE (tol 3), max |1 - F| = {worst_f:.1e} (tol 1e-10)"))
}

fn fidelity_invariance() -> Outcome {
    let mut rng = RandomStream::new(4);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let params = random_cavity(&mut rng);
        let eta_in = uniform(&mut rng, 0.3, 1.0);
        let delta = log_uniform(&mut rng, -3.0, (0.5f64).log10());
        let state = StateVector::random(3, &mut rng).unwrap();
        let (q1, q2) = [(0, 1), (0, 2), (1, 2), (2, 0)][i % 4];
        for parity in [Parity::Even, Parity::Odd] {
            let f = heralded_fidelity(&params, &PulseSpec::new(delta), eta_in, &state, q1, q2, parity).unwrap();
            worst = worst.max((1.0 - f).abs());
        }
        let config = GateConfig::new(reflection_pair(&params).unwrap())
            .with_eta_in(eta_in)
            .with_detector_efficiency(uniform(&mut rng, 0.5, 1.0));
        let stats = estimate_gate(&config, &state, q1, q2, 200, i as u64).unwrap();
        if stats.successes() > 0 {
            worst = worst.max((1.0 - stats.fidelity_min).abs());
        }
    }
    (worst <= 1e-10, format!("100 configs (eta_in < 1, bandwidth up to 0.5), max |1 - F| = {worst:.1e} (tol 1e-10)"))
}

const BRANCHES: [ForcedBranch; 4] = [
    ForcedBranch { gate: GateOutcome::Even, first: ZOutcome::Up, second: ZOutcome::Up },
    ForcedBranch { gate: GateOutcome::Odd, first: ZOutcome::Up, second: ZOutcome::Up },
    ForcedBranch { gate: GateOutcome::Failure, first: ZOutcome::Up, second: ZOutcome::Down },
    ForcedBranch { gate: GateOutcome::Failure, first: ZOutcome::Down, second: ZOutcome::Up },
];

fn cluster_oracles() -> Outcome {
    let tol = 1e-10;
    let (mut grow_ok, mut grow_total) = (0, 0);
    for j in 1..8 {
        for branch in BRANCHES {
            let chain = ChainState::with_spares(j, 1).unwrap();
            let step = grow_chain(chain, j, &mut Driver::Forced(branch)).unwrap();
            let expected_len = if branch.gate == GateOutcome::Failure { j - 1 } else { j + 1 };
            grow_total += 1;
            if step.chain.len() == expected_len && (step.chain.cluster_fidelity().unwrap() - 1.0).abs() <= tol {
                grow_ok += 1;
            }
        }
    }
    let (mut join_ok, mut join_total) = (0, 0);
    let mut bad = Vec::new();
    for m in 1..8 {
        for n in 1..=8 - m {
            for branch in BRANCHES {
                let left = ChainState::with_spares(m, 0).unwrap();
                let right = ChainState::with_spares(n, 0).unwrap();
                let step = connect_chains(left, right, &mut Driver::Forced(branch)).unwrap();
                let good = match step.joined {
                    Joined::Chain(chain) => {
                        let f = chain.cluster_fidelity().unwrap();
                        let good = chain.len() == m + n && (f - 1.0).abs() <= tol;
                        if !good && !bad.iter().any(|(a, b, _)| (*a, *b) == (m, n)) {
                            bad.push((m, n, f));
                        }
                        good
                    }
                    Joined::Degraded(l, r) => {
                        l.len() == m - 1
                            && r.len() == n - 1
                            && (l.cluster_fidelity().unwrap() - 1.0).abs() <= tol
                            && (r.cluster_fidelity().unwrap() - 1.0).abs() <= tol
                    }
                };
                join_total += 1;
                join_ok += usize::from(good);
            }
        }
    }
    let worst = bad.iter().map(|b| b.2).fold(1.0, f64::min);
    let mut detail = format!("grow {grow_ok}/{grow_total} branches canonical; join {join_ok}/{join_total}");
    if !bad.is_empty() {
        detail += &format!(
            "; {} (m, n) pairs with m, n >= 2 give a T-shaped graph, not a linear cluster (fidelity {worst:.3})",
            bad.len()
        );
    }
    (grow_ok == grow_total && join_ok == join_total, detail)
}

fn dephasing_bound() -> Outcome {
    let mut rng = RandomStream::new(6);
    let state = StateVector::random(2, &mut rng).unwrap();
    let mut worst = f64::INFINITY;
    for (k, (_, c, det, _)) in OPERATING_POINTS.into_iter().enumerate() {
        let config = GateConfig::new(reflection_pair(&standard_params(c, det)).unwrap()).with_dephasing(1e-3);
        let stats = estimate_gate(&config, &state, 0, 1, 10_000, 60 + k as u64).unwrap();
        worst = worst.min(stats.mean_fidelity());
    }
    (worst >= 0.99, format!("p = 1e-3 per attempt, lowest mean heralded fidelity {worst:.5} (min 0.99)"))
}

fn conservation() -> Outcome {
    let mut rng = RandomStream::new(7);
    let mut worst_total: f64 = 0.0;
    let mut worst_sum = f64::NEG_INFINITY;
    for _ in 0..10_000 {
        let config = GateConfig::new(reflection_pair(&random_cavity(&mut rng)).unwrap())
            .with_eta_in(rng.uniform())
            .with_detector_efficiency(rng.uniform());
        let state = StateVector::random(2, &mut rng).unwrap();
        let dist = single_shot_distribution(&config, &state, 0, 1).unwrap();
        worst_total = worst_total.max((dist.total() - 1.0).abs());
        if let Ok(etas) = config.effective_etas() {
            worst_sum = worst_sum.max(etas.eta_h + etas.eta_v);
        }
    }
    (
        worst_total <= 1e-12 && worst_sum <= 1.0,
        format!("10^4 draws, max |total - 1| = {worst_total:.1e} (tol 1e-12), max eta_H + eta_V = {worst_sum:.6}"),
    )
}

fn curve_shape() -> Outcome {
    let grid: Vec<f64> = (0..=116).map(|i| 1.0 + 0.25 * i as f64).collect();
    let sweep = |c: f64, detuning: f64| {
        let baseline = Baseline { c, detuning, ..Baseline::default() };
        let spec = SweepSpec::new(baseline).with_axis(Axis::KappaRatio, grid.clone()).with_outputs([Output::EtaV, Output::EtaS]);
        let table = run_sweep(&spec).unwrap();
        let col = |name| table.column(name).unwrap().into_iter().map(Option::unwrap).collect::<Vec<f64>>();
        (col("eta_V"), col("eta_S"))
    };
    let anchor = grid.iter().position(|&k| k == 13.0).unwrap();
    let mut monotone = 0;
    let mut recycle_higher = true;
    let mut holds_from = Vec::new();
    for c in [0.25, 1.0] {
        let (v_res, s_res) = sweep(c, 0.0);
        let (v_det, s_det) = sweep(c, 0.1);
        for s in [&s_res, &s_det] {
            monotone += usize::from(s.windows(2).all(|w| w[1] > w[0]));
        }
        // Compared at the quoted operating point; at small kappa/kappa_s the
        // order flips, so also report where it starts to hold for good.
        recycle_higher &= v_det[anchor] > v_res[anchor];
        let start = (0..grid.len()).rev().take_while(|&i| v_det[i] > v_res[i]).last().map_or(f64::NAN, |i| grid[i]);
        holds_from.push(format!("C={c}: kappa/kappa_s >= {start}"));
    }
    (
        monotone == 4 && recycle_higher,
        format!(
            "eta_S increasing on kappa/kappa_s in [1, 30] for {monotone}/4 panels; detuned eta_V above resonant at kappa/kappa_s = 13: {recycle_higher} (holds for {})",
            holds_from.join(", ")
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("quoted eta_S values", quoted_numbers),
        ("recycling identity", recycling_identity),
        ("Monte Carlo vs analytic", monte_carlo_vs_analytic),
        ("heralded fidelity invariance", fidelity_invariance),
        ("cluster oracle suite", cluster_oracles),
        ("dephasing bound", dephasing_bound),
        ("probability conservation", conservation),
        ("efficiency curve shape", curve_shape),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check();
        failed += usize::from(!ok);
        println!("{} {} {name}: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
