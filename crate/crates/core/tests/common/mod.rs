#![allow(dead_code)]

use qdgate::cavity::CavityParams;
use qdgate::rng::RandomStream;

pub fn log_uniform(rng: &mut RandomStream, lo: f64, hi: f64) -> f64 {
    10f64.powf(lo + (hi - lo) * rng.uniform())
}

pub fn uniform(rng: &mut RandomStream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.uniform()
}

/// Cavity parameters spread over several decades of each rate.
pub fn random_cavity(rng: &mut RandomStream) -> CavityParams {
    let x = uniform(rng, -3.0, 3.0);
    let c = uniform(rng, -3.0, 3.0);
    let kappa_s = log_uniform(rng, -3.0, 1.0);
    let gamma = log_uniform(rng, -3.0, 1.0);
    let g = log_uniform(rng, -3.0, 1.5);
    CavityParams::new(x, c, kappa_s, gamma, g).unwrap()
}

/// The four standard operating points at κ/κ_s = 13, γ/κ = 0.1:
/// (label, C, detuning, expected η_S).
pub const OPERATING_POINTS: [(&str, f64, f64, f64); 4] = [
    ("C=1/4 resonant", 0.25, 0.0, 0.255),
    ("C=1 resonant", 1.0, 0.0, 0.559),
    ("C=1/4 detuned", 0.25, 0.1, 0.194),
    ("C=1 detuned", 1.0, 0.1, 0.538),
];

pub fn standard_params(c: f64, detuning: f64) -> CavityParams {
    CavityParams::from_cooperativity(c, 13.0, 0.1, detuning).unwrap()
}
