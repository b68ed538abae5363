//! Factory resource counts against absorbing Markov chain expectations.

mod common;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use qdgate::cavity::{reflection_pair, ReflectionPair};
use qdgate::cluster::{simulate_factory, FactorySpec, FactoryStats, Strategy};
use qdgate::gate::GateConfig;

/// Expected gate calls to grow a chain from length `from` to `to` when each
/// call succeeds with probability `q` and a failure at length 1 costs nothing
/// to reseed.
fn sequential_ops(q: f64, from: usize, to: usize) -> f64 {
    if from >= to || to == 1 {
        return 0.0;
    }
    // Transient states are lengths 1..to-1.
    let n = to - 1;
    let mut transient = DMatrix::<f64>::zeros(n, n);
    for j in 1..to {
        let i = j - 1;
        if j + 1 < to {
            transient[(i, i + 1)] += q;
        }
        let down = if j == 1 { 0 } else { i - 1 };
        transient[(i, down)] += 1.0 - q;
    }
    let fundamental = (DMatrix::identity(n, n) - transient).try_inverse().unwrap();
    let steps = fundamental * DVector::from_element(n, 1.0);
    steps[from.max(1) - 1]
}

fn doubling_ops(q: f64, length: usize) -> f64 {
    if length == 1 {
        return 0.0;
    }
    let (a, b) = (length.div_ceil(2), length / 2);
    let repair = |l: usize| sequential_ops(q, l - 1, l);
    doubling_ops(q, a) + doubling_ops(q, b) + (1.0 + (1.0 - q) * (repair(a) + repair(b))) / q
}

fn half_success() -> GateConfig {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    GateConfig::new(ReflectionPair::from_coefficients(C64::new(-h, 0.0), C64::new(h, 0.0)))
}

fn within(stats: &FactoryStats, expected_ops: f64, expected_photons: f64) {
    assert_eq!(stats.completed, stats.trials);
    let z_ops = (stats.mean_gate_ops - expected_ops).abs() / stats.gate_ops_stderr();
    let z_photons = (stats.mean_photons - expected_photons).abs() / stats.photons_stderr();
    assert!(z_ops <= 3.0, "ops {} vs {expected_ops} ({z_ops:.2} SE)", stats.mean_gate_ops);
    assert!(z_photons <= 3.0, "photons {} vs {expected_photons} ({z_photons:.2} SE)", stats.mean_photons);
}

#[test]
fn oracle_closed_forms_at_one_half() {
    assert!((sequential_ops(0.5, 1, 8) - 56.0).abs() < 1e-9);
    assert!((doubling_ops(0.5, 8) - 34.0).abs() < 1e-9);
    assert!((sequential_ops(1.0, 1, 8) - 7.0).abs() < 1e-12);
}

#[test]
fn sequential_growth_matches_markov_chain() {
    let config = GateConfig::new(reflection_pair(&common::standard_params(1.0, 0.0)).unwrap());
    let q = config.success_probability().unwrap();
    assert!((q - 0.559).abs() < 1e-3);
    let ops = sequential_ops(q, 1, 4);
    let stats = simulate_factory(&config, &FactorySpec::new(4, Strategy::SequentialGrowth, 20_000, 11)).unwrap();
    within(&stats, ops, ops * config.expected_attempts().unwrap());
    assert_eq!(stats.verified, stats.completed);
}

#[test]
fn doubling_beats_sequential_at_one_half() {
    let config = half_success();
    let seq = simulate_factory(&config, &FactorySpec::new(8, Strategy::SequentialGrowth, 4_000, 12)).unwrap();
    let dbl = simulate_factory(&config, &FactorySpec::new(8, Strategy::PairwiseDoubling, 4_000, 13)).unwrap();
    within(&seq, 56.0, 56.0);
    within(&dbl, 34.0, 34.0);
    assert!(dbl.mean_gate_ops < seq.mean_gate_ops);
    assert_eq!(seq.verified, seq.completed);
}

#[test]
fn doubling_with_recycling_matches_recursion() {
    let config = GateConfig::new(reflection_pair(&common::standard_params(0.25, 0.1)).unwrap());
    let q = config.success_probability().unwrap();
    let ops = doubling_ops(q, 5);
    let stats = simulate_factory(&config, &FactorySpec::new(5, Strategy::PairwiseDoubling, 4_000, 14)).unwrap();
    within(&stats, ops, ops * config.expected_attempts().unwrap());
}
