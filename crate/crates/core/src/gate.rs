//! The heralded, error-rejecting entangling gate.
//!
//! A probe photon (R − L)/√2 is split on a beam splitter, reflected from
//! two cavities and recombined. A horizontally polarized click on D3 or D4
//! projects the two spins onto a signed even or odd parity state. A
//! vertically polarized click on D1 or D2 leaves the spins untouched, so
//! another photon can be sent (recycling). No click is photon loss and ends
//! the attempt.
//!
//! Mode mismatch (η_in < 1) is modeled as light that never enters the
//! cavity mode: a fraction 1 − η_in² reaches the vertical detectors
//! incoherently and never changes the spins. Both cavities see the same
//! mismatch.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::cavity::ReflectionPair;
use crate::error::{Error, Result};
use crate::qstate::{fidelity, Gate1, Parity, StateVector};
use crate::rng::RandomStream;

pub const DEFAULT_MAX_RECYCLES: u32 = 50;

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GateConfig {
    /// Effective reflection pair of the two (balanced) cavities.
    pub pair: ReflectionPair,
    /// Amplitude with which the probe couples into the cavity mode.
    pub eta_in: f64,
    /// Probability that a photon reaching any detector registers.
    pub detector_efficiency: f64,
    /// Recycle attempts allowed after the first photon.
    pub max_recycles: u32,
    /// Per-attempt phase-flip probability p; each spin takes a Z with
    /// probability p/2.
    pub dephasing_per_attempt: f64,
}

impl GateConfig {
    /// Perfect mode matching and detectors, no dephasing.
    pub fn new(pair: ReflectionPair) -> Self {
        Self {
            pair,
            eta_in: 1.0,
            detector_efficiency: 1.0,
            max_recycles: DEFAULT_MAX_RECYCLES,
            dephasing_per_attempt: 0.0,
        }
    }

    pub fn ideal() -> Self {
        Self::new(ReflectionPair::ideal())
    }

    pub fn with_eta_in(self, eta_in: f64) -> Self {
        Self { eta_in, ..self }
    }

    pub fn with_detector_efficiency(self, detector_efficiency: f64) -> Self {
        Self { detector_efficiency, ..self }
    }

    pub fn with_max_recycles(self, max_recycles: u32) -> Self {
        Self { max_recycles, ..self }
    }

    pub fn with_dephasing(self, dephasing_per_attempt: f64) -> Self {
        Self { dephasing_per_attempt, ..self }
    }

    /// Phase-flip probability 1 − exp(−t_gate/T₂) for a coherence time that
    /// is `ratio` times the duration of one attempt.
    pub fn dephasing_from_ratio(ratio: f64) -> f64 {
        -(-ratio.recip()).exp_m1()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eta_in", self.eta_in),
            ("detector_efficiency", self.detector_efficiency),
            ("dephasing_per_attempt", self.dephasing_per_attempt),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        let ReflectionPair { r0, r1, .. } = self.pair;
        if ![r0.re, r0.im, r1.re, r1.im].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("reflection coefficients must be finite".into()));
        }
        if r0.norm() > 1.0 + 1e-12 || r1.norm() > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter("reflection coefficients must satisfy |r| <= 1".into()));
        }
        Ok(())
    }

    fn mismatch(&self) -> f64 {
        (1.0 - self.eta_in * self.eta_in).max(0.0)
    }

    /// Single-photon success and recycle probabilities of this configuration,
    /// and the success probability with unlimited recycling.
    pub fn effective_etas(&self) -> Result<Etas> {
        self.validate()?;
        let eta2 = self.eta_in * self.eta_in;
        let eta_h = self.detector_efficiency * eta2 * self.pair.d.norm_sqr();
        let eta_v = self.detector_efficiency * (eta2 * self.pair.s.norm_sqr() + self.mismatch());
        if eta_v >= 1.0 {
            return Err(Error::Degenerate);
        }
        Ok(Etas { eta_h, eta_v, eta_s: eta_h / (1.0 - eta_v) })
    }

    /// Σ_{k ≤ K} η_V^k: expected photons consumed by one call to
    /// [`run_gate`].
    pub fn expected_attempts(&self) -> Result<f64> {
        let eta_v = match self.effective_etas() {
            Ok(e) => e.eta_v,
            Err(Error::Degenerate) => return Ok(f64::from(self.max_recycles) + 1.0),
            Err(e) => return Err(e),
        };
        Ok(geometric_sum(eta_v, self.max_recycles))
    }

    /// Probability that [`run_gate`] ends in a heralded success within the
    /// recycle budget.
    pub fn success_probability(&self) -> Result<f64> {
        match self.effective_etas() {
            Ok(e) => Ok(e.eta_h * geometric_sum(e.eta_v, self.max_recycles)),
            Err(Error::Degenerate) => Ok(0.0),
            Err(e) => Err(e),
        }
    }
}

fn geometric_sum(ratio: f64, max_recycles: u32) -> f64 {
    (0..=max_recycles).scan(1.0, |term, _| {
        let t = *term;
        *term *= ratio;
        Some(t)
    })
    .sum()
}

/// Single-shot success (η_H), single-shot recycle (η_V) and total
/// recycled success (η_S) probabilities.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Etas {
    pub eta_h: f64,
    pub eta_v: f64,
    pub eta_s: f64,
}

/// Closed-form efficiencies of an ideal-detector, mode-matched gate:
/// η_H = |r₁−r₀|²/4, η_V = |r₁+r₀|²/4, η_S = |r₁−r₀|²/(4 − |r₁+r₀|²).
pub fn analytic_etas(pair: &ReflectionPair) -> Result<Etas> {
    let minus = (pair.r1 - pair.r0).norm_sqr();
    let plus = (pair.r1 + pair.r0).norm_sqr();
    let denominator = 4.0 - plus;
    if !(denominator > 0.0) {
        return Err(Error::Degenerate);
    }
    Ok(Etas { eta_h: minus / 4.0, eta_v: plus / 4.0, eta_s: minus / denominator })
}

/// Probabilities of the four single-photon outcomes.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    /// D3 click.
    pub p_even: f64,
    /// D4 click.
    pub p_odd: f64,
    /// D1 or D2 click.
    pub p_recycle: f64,
    /// No click.
    pub p_loss: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Click {
    Even,
    Odd,
    Recycle,
    Loss,
}

impl OutcomeDistribution {
    pub fn total(&self) -> f64 {
        self.p_even + self.p_odd + self.p_recycle + self.p_loss
    }

    pub fn sample(&self, rng: &mut RandomStream) -> Click {
        let u = rng.uniform();
        if u < self.p_even {
            Click::Even
        } else if u < self.p_even + self.p_odd {
            Click::Odd
        } else if u < self.p_even + self.p_odd + self.p_recycle {
            Click::Recycle
        } else {
            Click::Loss
        }
    }
}

pub fn single_shot_distribution(
    config: &GateConfig,
    state: &StateVector,
    q1: usize,
    q2: usize,
) -> Result<OutcomeDistribution> {
    config.validate()?;
    state.require_normalized()?;
    let (w_even, w_odd) = state.parity_weights(q1, q2)?;
    let eta2 = config.eta_in * config.eta_in;
    let herald = config.detector_efficiency * eta2 * config.pair.d.norm_sqr();
    let p_even = herald * w_even;
    let p_odd = herald * w_odd;
    let p_recycle = config.detector_efficiency * (eta2 * config.pair.s.norm_sqr() + config.mismatch());
    let p_loss = (1.0 - p_even - p_odd - p_recycle).max(0.0);
    Ok(OutcomeDistribution { p_even, p_odd, p_recycle, p_loss })
}

/// Unnormalized spin states that accompany a click on each detector,
/// computed by following the photon through both interferometer arms.
///
/// Only the mode-matched part of the photon is tracked here (scaled by
/// η_in); `mismatch_weight` is the probability carried by the rest, which
/// reaches D1/D2 with the spins unchanged.
#[derive(Clone, Debug)]
pub struct DetectorAmplitudes {
    pub d1: Vec<C64>,
    pub d2: Vec<C64>,
    pub d3: Vec<C64>,
    pub d4: Vec<C64>,
    pub mismatch_weight: f64,
}

impl DetectorAmplitudes {
    pub fn weight(branch: &[C64]) -> f64 {
        branch.iter().map(|a| a.norm_sqr()).sum()
    }
}

pub fn photon_branches(pair: &ReflectionPair, eta_in: f64, state: &StateVector, q1: usize, q2: usize) -> Result<DetectorAmplitudes> {
    let n = state.n();
    for q in [q1, q2] {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, n });
        }
    }
    if q1 == q2 {
        return Err(Error::DuplicateQubit(q1));
    }
    let half = std::f64::consts::FRAC_1_SQRT_2;
    // Arm k: amplitude 1/√2 from the input splitter, polarization (R − L)/√2.
    // R drives the ↑ transition, L the ↓ transition.
    let arm = |q: usize| -> (Vec<C64>, Vec<C64>) {
        let mask = 1usize << (n - 1 - q);
        let mut h = Vec::with_capacity(state.amplitudes().len());
        let mut v = Vec::with_capacity(state.amplitudes().len());
        for (i, &a) in state.amplitudes().iter().enumerate() {
            let spin_up = i & mask == 0;
            let (r_right, r_left) = if spin_up { (pair.r1, pair.r0) } else { (pair.r0, pair.r1) };
            let right = a * r_right * half * half;
            let left = -a * r_left * half * half;
            // R = (H + V)/√2, L = (H − V)/√2
            h.push((right + left) * half * eta_in);
            v.push((right - left) * half * eta_in);
        }
        (h, v)
    };
    let (h1, v1) = arm(q1);
    let (h2, v2) = arm(q2);
    let d3 = h1.iter().zip(&h2).map(|(a, b)| (a + b) * half).collect();
    let d4 = h1.iter().zip(&h2).map(|(a, b)| (a - b) * half).collect();
    Ok(DetectorAmplitudes {
        d1: v1,
        d2: v2,
        d3,
        d4,
        mismatch_weight: (1.0 - eta_in * eta_in).max(0.0),
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum GateOutcome {
    Even,
    Odd,
    Failure,
}

impl From<Parity> for GateOutcome {
    fn from(p: Parity) -> Self {
        match p {
            Parity::Even => GateOutcome::Even,
            Parity::Odd => GateOutcome::Odd,
        }
    }
}

impl GateOutcome {
    pub fn parity(self) -> Option<Parity> {
        match self {
            GateOutcome::Even => Some(Parity::Even),
            GateOutcome::Odd => Some(Parity::Odd),
            GateOutcome::Failure => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GateResult {
    pub outcome: GateOutcome,
    /// Photons consumed, at least one.
    pub attempts: u32,
    /// Projected register on success; the untouched register (apart from
    /// dephasing) on failure, pending reinitialization.
    pub state: StateVector,
}

fn dephase(state: &mut StateVector, q1: usize, q2: usize, p: f64, rng: &mut RandomStream) -> Result<()> {
    for q in [q1, q2] {
        if rng.bernoulli(p / 2.0) {
            state.apply_in_place(q, Gate1::Z)?;
        }
    }
    Ok(())
}

/// Repeat-until-success gate on spins `q1`, `q2`.
///
/// Dephasing is applied once per photon, whatever the click.
pub fn run_gate(config: &GateConfig, state: StateVector, q1: usize, q2: usize, rng: &mut RandomStream) -> Result<GateResult> {
    // Phase flips leave the parity weights alone, so the distribution is
    // fixed for the whole loop.
    let dist = single_shot_distribution(config, &state, q1, q2)?;
    let mut state = state;
    for attempts in 1..=config.max_recycles.saturating_add(1) {
        let click = dist.sample(rng);
        dephase(&mut state, q1, q2, config.dephasing_per_attempt, rng)?;
        let parity = match click {
            Click::Recycle => continue,
            Click::Loss => return Ok(GateResult { outcome: GateOutcome::Failure, attempts, state }),
            Click::Even => Parity::Even,
            Click::Odd => Parity::Odd,
        };
        let (state, _) = state.project_parity(q1, q2, parity)?;
        return Ok(GateResult { outcome: parity.into(), attempts, state });
    }
    Ok(GateResult {
        outcome: GateOutcome::Failure,
        attempts: config.max_recycles.saturating_add(1),
        state,
    })
}

/// Deterministic gate used to walk every heralded branch: one photon, no
/// dephasing, outcome chosen by the caller.
pub fn run_gate_forced(state: StateVector, q1: usize, q2: usize, forced: GateOutcome) -> Result<GateResult> {
    let state = match forced.parity() {
        Some(parity) => state.project_parity(q1, q2, parity)?.0,
        None => {
            state.parity_weights(q1, q2)?;
            state
        }
    };
    Ok(GateResult { outcome: forced, attempts: 1, state })
}

/// Aggregated Monte Carlo statistics of repeated [`run_gate`] calls on the
/// same input.
#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct GateStats {
    pub trials: u64,
    pub evens: u64,
    pub odds: u64,
    pub photons: u64,
    /// Sum over successes of the fidelity to the noiseless projection.
    pub fidelity_sum: f64,
    pub fidelity_min: f64,
}

impl GateStats {
    fn merge(self, other: Self) -> Self {
        if self.trials == 0 {
            return other;
        }
        if other.trials == 0 {
            return self;
        }
        Self {
            trials: self.trials + other.trials,
            evens: self.evens + other.evens,
            odds: self.odds + other.odds,
            photons: self.photons + other.photons,
            fidelity_sum: self.fidelity_sum + other.fidelity_sum,
            fidelity_min: self.fidelity_min.min(other.fidelity_min),
        }
    }

    pub fn successes(&self) -> u64 {
        self.evens + self.odds
    }

    pub fn success_rate(&self) -> f64 {
        self.successes() as f64 / self.trials as f64
    }

    /// Binomial standard error of [`Self::success_rate`].
    pub fn stderr(&self) -> f64 {
        let p = self.success_rate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    pub fn mean_attempts(&self) -> f64 {
        self.photons as f64 / self.trials as f64
    }

    pub fn mean_fidelity(&self) -> f64 {
        self.fidelity_sum / self.successes() as f64
    }
}

const BATCH: u64 = 1024;

/// Runs `trials` independent gates on copies of `state` in parallel.
///
/// Trials are cut into fixed batches; batch `b` draws from
/// `RandomStream::for_worker(seed, b)`, so the result does not depend on the
/// thread count.
pub fn estimate_gate(config: &GateConfig, state: &StateVector, q1: usize, q2: usize, trials: u64, seed: u64) -> Result<GateStats> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    single_shot_distribution(config, state, q1, q2)?;
    let reference = |p| state.clone().project_parity(q1, q2, p).ok().map(|(s, _)| s);
    let (even_ref, odd_ref) = (reference(Parity::Even), reference(Parity::Odd));
    let batches = trials.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = RandomStream::for_worker(seed, b);
            let count = BATCH.min(trials - b * BATCH);
            let mut stats = GateStats { fidelity_min: 1.0, ..GateStats::default() };
            for _ in 0..count {
                let result = run_gate(config, state.clone(), q1, q2, &mut rng)?;
                stats.trials += 1;
                stats.photons += u64::from(result.attempts);
                let reference = match result.outcome {
                    GateOutcome::Even => {
                        stats.evens += 1;
                        even_ref.as_ref()
                    }
                    GateOutcome::Odd => {
                        stats.odds += 1;
                        odd_ref.as_ref()
                    }
                    GateOutcome::Failure => continue,
                };
                let f = fidelity(&result.state, reference.ok_or(Error::ZeroProbability)?)?;
                stats.fidelity_sum += f;
                stats.fidelity_min = stats.fidelity_min.min(f);
            }
            Ok(stats)
        })
        .try_reduce(GateStats::default, |a, b| Ok(a.merge(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::{reflection_pair, CavityParams};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn standard_pair(c: f64, detuning: f64) -> ReflectionPair {
        reflection_pair(&CavityParams::from_cooperativity(c, 13.0, 0.1, detuning).unwrap()).unwrap()
    }

    fn plus_plus() -> StateVector {
        StateVector::product(&[StateVector::plus(), StateVector::plus()]).unwrap()
    }

    #[test]
    fn ideal_distribution() {
        let d = single_shot_distribution(&GateConfig::ideal(), &plus_plus(), 0, 1).unwrap();
        assert_abs_diff_eq!(d.p_even, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d.p_odd, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d.p_recycle, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.p_loss, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn resonant_scattering_distribution() {
        let config = GateConfig::new(standard_pair(0.25, 0.0));
        let d = single_shot_distribution(&config, &plus_plus(), 0, 1).unwrap();
        assert_abs_diff_eq!(d.p_even + d.p_odd, 0.215_561_224_5, epsilon = 1e-5);
        assert_abs_diff_eq!(d.p_recycle, 0.154_336_734_7, epsilon = 1e-5);
        assert_abs_diff_eq!(d.total(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn no_coupling_means_always_recycle() {
        for c in [0.25, 1.0] {
            let config = GateConfig::new(standard_pair(c, 0.1)).with_eta_in(0.0);
            let d = single_shot_distribution(&config, &plus_plus(), 0, 1).unwrap();
            assert_abs_diff_eq!(d.p_recycle, 1.0, epsilon = 1e-15);
            assert_eq!(d.p_even + d.p_odd, 0.0);
        }
    }

    #[test]
    fn distribution_rejects_bad_input() {
        let config = GateConfig::ideal();
        assert!(single_shot_distribution(&config, &plus_plus(), 0, 2).is_err());
        assert!(single_shot_distribution(&config, &plus_plus(), 1, 1).is_err());
        let bad = GateConfig::ideal().with_eta_in(1.5);
        assert!(single_shot_distribution(&bad, &plus_plus(), 0, 1).is_err());
    }

    #[test]
    fn standard_point_efficiencies() {
        let cases = [(0.25, 0.0, 0.255), (1.0, 0.0, 0.559), (0.25, 0.1, 0.194), (1.0, 0.1, 0.538)];
        for (c, det, expected) in cases {
            let etas = analytic_etas(&standard_pair(c, det)).unwrap();
            assert!((etas.eta_s - expected).abs() <= 1e-3, "C={c} det={det}: {}", etas.eta_s);
            assert!((etas.eta_s - etas.eta_h / (1.0 - etas.eta_v)).abs() <= 1e-12);
        }
        assert_eq!(analytic_etas(&ReflectionPair::ideal()).unwrap().eta_s, 1.0);
    }

    #[test]
    fn degenerate_pair_is_flagged() {
        let one = C64::new(1.0, 0.0);
        let pair = ReflectionPair::from_coefficients(one, one);
        assert!(matches!(analytic_etas(&pair), Err(Error::Degenerate)));
        assert!(matches!(GateConfig::new(pair).effective_etas(), Err(Error::Degenerate)));
    }

    #[test]
    fn photon_path_matches_closed_form() {
        let mut rng = RandomStream::new(4);
        for _ in 0..50 {
            let params = CavityParams::new(
                rng.uniform() * 2.0 - 1.0,
                rng.uniform() * 2.0 - 1.0,
                rng.uniform(),
                0.05 + rng.uniform(),
                2.0 * rng.uniform(),
            )
            .unwrap();
            let pair = reflection_pair(&params).unwrap();
            let eta_in = rng.uniform();
            let state = StateVector::random(3, &mut rng).unwrap();
            let config = GateConfig::new(pair).with_eta_in(eta_in);
            let branches = photon_branches(&pair, eta_in, &state, 2, 0).unwrap();
            let dist = single_shot_distribution(&config, &state, 2, 0).unwrap();
            assert_abs_diff_eq!(DetectorAmplitudes::weight(&branches.d3), dist.p_even, epsilon = 1e-12);
            assert_abs_diff_eq!(DetectorAmplitudes::weight(&branches.d4), dist.p_odd, epsilon = 1e-12);
            let v = DetectorAmplitudes::weight(&branches.d1) + DetectorAmplitudes::weight(&branches.d2) + branches.mismatch_weight;
            assert_abs_diff_eq!(v, dist.p_recycle, epsilon = 1e-12);
            for (branch, parity) in [(&branches.d3, Parity::Even), (&branches.d4, Parity::Odd)] {
                let heralded = StateVector::from_unnormalized(branch.clone()).unwrap();
                let (ideal, _) = state.clone().project_parity(2, 0, parity).unwrap();
                assert_abs_diff_eq!(fidelity(&heralded, &ideal).unwrap(), 1.0, epsilon = 1e-10);
            }
            // A vertical click leaves the spins as they were.
            let recycled = StateVector::from_unnormalized(branches.d1.clone()).unwrap();
            assert_abs_diff_eq!(fidelity(&recycled, &state).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn ideal_gate_succeeds_first_time() {
        let mut rng = RandomStream::new(0);
        for _ in 0..1000 {
            let r = run_gate(&GateConfig::ideal(), plus_plus(), 0, 1, &mut rng).unwrap();
            assert_eq!(r.attempts, 1);
            assert_ne!(r.outcome, GateOutcome::Failure);
        }
    }

    #[test]
    fn recycle_budget_caps_attempts() {
        let one = C64::new(1.0, 0.0);
        let config = GateConfig::new(ReflectionPair::from_coefficients(one, one)).with_max_recycles(7);
        let r = run_gate(&config, plus_plus(), 0, 1, &mut RandomStream::new(1)).unwrap();
        assert_eq!(r.outcome, GateOutcome::Failure);
        assert_eq!(r.attempts, 8);
        assert_abs_diff_eq!(fidelity(&r.state, &plus_plus()).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(config.expected_attempts().unwrap(), 8.0);
    }

    #[test]
    fn finite_budget_success_probability_matches_monte_carlo() {
        let config = GateConfig::new(standard_pair(0.25, 0.1)).with_max_recycles(2).with_detector_efficiency(0.9);
        let e = config.effective_etas().unwrap();
        let expected = e.eta_h * (1.0 + e.eta_v + e.eta_v * e.eta_v);
        assert_abs_diff_eq!(config.success_probability().unwrap(), expected, epsilon = 1e-15);
        let stats = estimate_gate(&config, &plus_plus(), 0, 1, 100_000, 3).unwrap();
        assert!((stats.success_rate() - expected).abs() < 3.0 * stats.stderr());
        let attempts_err = 3.0 * (1.0 / stats.trials as f64).sqrt();
        assert!((stats.mean_attempts() - config.expected_attempts().unwrap()).abs() < attempts_err);
    }

    #[test]
    fn estimate_is_deterministic() {
        let config = GateConfig::new(standard_pair(1.0, 0.0)).with_dephasing(0.01);
        let a = estimate_gate(&config, &plus_plus(), 0, 1, 5000, 9).unwrap();
        let b = estimate_gate(&config, &plus_plus(), 0, 1, 5000, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn loss_returns_unprojected_register() {
        // η_det = 0: every photon is lost.
        let config = GateConfig::ideal().with_detector_efficiency(0.0);
        let input = StateVector::random(3, &mut RandomStream::new(2)).unwrap();
        let r = run_gate(&config, input.clone(), 0, 1, &mut RandomStream::new(3)).unwrap();
        assert_eq!(r.outcome, GateOutcome::Failure);
        assert_eq!(r.attempts, 1);
        assert_eq!(r.state, input);
    }

    #[test]
    fn forced_outcomes() {
        let r = run_gate_forced(plus_plus(), 0, 1, GateOutcome::Odd).unwrap();
        let (ideal, _) = plus_plus().project_parity(0, 1, Parity::Odd).unwrap();
        assert_eq!(r.state, ideal);
        let up_up = StateVector::basis(2, 0).unwrap();
        assert!(run_gate_forced(up_up.clone(), 0, 1, GateOutcome::Odd).is_err());
        assert_eq!(run_gate_forced(up_up.clone(), 0, 1, GateOutcome::Failure).unwrap().state, up_up);
    }

    #[test]
    fn pure_parity_input_picks_the_live_branch() {
        let config = GateConfig::new(standard_pair(1.0, 0.0));
        let mut rng = RandomStream::new(12);
        let up_up = StateVector::basis(2, 0).unwrap();
        for _ in 0..200 {
            let r = run_gate(&config, up_up.clone(), 0, 1, &mut rng).unwrap();
            assert_ne!(r.outcome, GateOutcome::Odd);
        }
    }

    #[test]
    fn dephasing_ratio() {
        assert_abs_diff_eq!(GateConfig::dephasing_from_ratio(1e3), 1e-3, epsilon = 1e-6);
    }

    fn arb_config() -> impl Strategy<Value = GateConfig> {
        (-2.0..1.0f64, -2.0..1.0f64, -2.0..0.5f64, -3.0..3.0f64, 0.0..1.0f64, 0.0..1.0f64).prop_map(|(lg, lks, lgam, det, eta, det_eff)| {
            let params = CavityParams::new(det, det, 10f64.powf(lks), 10f64.powf(lgam), 10f64.powf(lg)).unwrap();
            GateConfig::new(reflection_pair(&params).unwrap())
                .with_eta_in(eta)
                .with_detector_efficiency(det_eff)
        })
    }

    proptest! {
        #[test]
        fn herald_weight_is_state_independent(config in arb_config(), seed in any::<u64>()) {
            let mut rng = RandomStream::new(seed);
            let a = StateVector::product(&[StateVector::random(1, &mut rng).unwrap(), StateVector::random(1, &mut rng).unwrap()]).unwrap();
            let d = single_shot_distribution(&config, &a, 0, 1).unwrap();
            let expected = config.detector_efficiency * config.eta_in.powi(2) * config.pair.d.norm_sqr();
            prop_assert!((d.p_even + d.p_odd - expected).abs() <= 1e-12);
            prop_assert!((d.total() - 1.0).abs() <= 1e-12);
            prop_assert!(d.p_loss >= 0.0 && d.p_recycle <= 1.0);
        }

        #[test]
        fn recycle_leaves_state_unchanged(config in arb_config(), seed in any::<u64>()) {
            // max_recycles = 0 and no loss-free success: a failure after a
            // recycle click must hand back the input register.
            let mut rng = RandomStream::new(seed);
            let input = StateVector::random(3, &mut rng).unwrap();
            let r = run_gate(&config.with_max_recycles(0), input.clone(), 1, 2, &mut rng).unwrap();
            if r.outcome == GateOutcome::Failure {
                prop_assert!((fidelity(&r.state, &input).unwrap() - 1.0).abs() <= 1e-12);
            }
        }
    }
}
