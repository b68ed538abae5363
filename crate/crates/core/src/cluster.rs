//! One-dimensional cluster states grown and joined with the heralded gate.
//!
//! A chain is a list of register qubits, in chain order. Growth follows the
//! fresh-qubit protocol: the new spin starts in (|↑⟩ − |↓⟩)/√2, the gate acts
//! on it and the last chain spin, and the heralded parity fixes the local
//! feedback. On failure the last spin is measured and the chain shrinks.
//!
//! Joining two chains end to start follows the same pattern with a phase
//! flip on the end of the first chain beforehand. Only when one of the two
//! chains is a single spin does the result form a linear chain. Otherwise
//! the end spin of the first chain ends up as a leaf on the first spin of
//! the second chain, a T-shaped graph state; [`ChainState::cluster_fidelity`]
//! reports how far that is from a linear cluster.

use std::collections::BTreeSet;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gate::{run_gate, run_gate_forced, GateConfig, GateOutcome};
use crate::qstate::{Gate1, StateVector, ZOutcome};
use crate::rng::RandomStream;

const FIDELITY_TOL: f64 = 1e-10;

/// The 1D cluster (|↑⟩₁ + |↓⟩₁Z₂)(|↑⟩₂ + |↓⟩₂Z₃)⋯(|↑⟩ₙ + |↓⟩ₙ), normalized.
pub fn canonical_cluster(n: usize) -> Result<StateVector> {
    if n == 0 || n > StateVector::MAX_QUBITS {
        return Err(Error::RegisterSize(n));
    }
    // Expand the product from the right: prepend one factor at a time.
    let one = C64::new(1.0, 0.0);
    let mut tail = vec![one, one];
    for _ in 1..n {
        let half = tail.len() / 2;
        // Z on the old first qubit: negate its ↓ half.
        let flipped = tail.iter().enumerate().map(|(i, a)| if i >= half { -a } else { *a });
        tail = tail.iter().copied().chain(flipped).collect();
    }
    StateVector::from_unnormalized(tail)
}

/// Graph state on `n` qubits: |+⟩ⁿ followed by CZ on every edge.
pub fn graph_state(n: usize, edges: &[(usize, usize)]) -> Result<StateVector> {
    if n == 0 || n > StateVector::MAX_QUBITS {
        return Err(Error::RegisterSize(n));
    }
    if let Some(&(a, b)) = edges.iter().find(|(a, b)| *a >= n || *b >= n || a == b) {
        return Err(Error::InvalidParameter(format!("bad edge ({a}, {b}) for {n} qubits")));
    }
    let bit = |i: usize, q: usize| (i >> (n - 1 - q)) & 1;
    let amps = (0..1usize << n)
        .map(|i| {
            let ones = edges.iter().filter(|&&(a, b)| bit(i, a) & bit(i, b) == 1).count();
            C64::new(if ones % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        })
        .collect();
    StateVector::from_unnormalized(amps)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainState {
    pub register: StateVector,
    /// Register qubits in chain order.
    pub labels: Vec<usize>,
}

impl ChainState {
    /// A canonical chain of `length` qubits followed by `spares` fresh
    /// qubits in (|↑⟩ − |↓⟩)/√2.
    pub fn with_spares(length: usize, spares: usize) -> Result<Self> {
        let mut factors = Vec::with_capacity(1 + spares);
        if length > 0 {
            factors.push(canonical_cluster(length)?);
        }
        factors.extend(std::iter::repeat_n(StateVector::minus(), spares));
        Ok(Self { register: StateVector::product(&factors)?, labels: (0..length).collect() })
    }

    pub fn canonical(length: usize) -> Result<Self> {
        Self::with_spares(length, 0)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Register qubits not on the chain.
    pub fn free_qubits(&self) -> Vec<usize> {
        let used: BTreeSet<usize> = self.labels.iter().copied().collect();
        (0..self.register.n()).filter(|q| !used.contains(q)).collect()
    }

    /// Fidelity of the chain's reduced state to the canonical cluster of the
    /// same length. An empty chain counts as perfect.
    pub fn cluster_fidelity(&self) -> Result<f64> {
        if self.is_empty() {
            return Ok(1.0);
        }
        self.register.reduced_fidelity(&self.labels, &canonical_cluster(self.len())?)
    }

    pub fn is_canonical(&self) -> Result<bool> {
        Ok((self.cluster_fidelity()? - 1.0).abs() <= FIDELITY_TOL)
    }

    fn validate(&self) -> Result<()> {
        if self.labels.len() > self.register.n() {
            return Err(Error::InvalidParameter("chain longer than its register".into()));
        }
        let mut seen = BTreeSet::new();
        for &q in &self.labels {
            if q >= self.register.n() {
                return Err(Error::QubitOutOfRange { index: q, n: self.register.n() });
            }
            if !seen.insert(q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        Ok(())
    }
}

/// Outcomes to impose when walking branches deterministically.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct ForcedBranch {
    pub gate: GateOutcome,
    /// Measurement of the damaged end on failure (the first chain's end when
    /// joining).
    pub first: ZOutcome,
    /// Measurement of the second chain's first spin when a join fails.
    pub second: ZOutcome,
}

impl ForcedBranch {
    pub fn gate(gate: GateOutcome) -> Self {
        Self { gate, first: ZOutcome::Up, second: ZOutcome::Up }
    }
}

/// Source of gate and measurement outcomes.
pub enum Driver<'a> {
    Random { config: &'a GateConfig, rng: &'a mut RandomStream },
    Forced(ForcedBranch),
}

impl Driver<'_> {
    fn gate(&mut self, state: StateVector, q1: usize, q2: usize) -> Result<(GateOutcome, u32, StateVector)> {
        let result = match self {
            Driver::Random { config, rng } => run_gate(config, state, q1, q2, rng)?,
            Driver::Forced(forced) => run_gate_forced(state, q1, q2, forced.gate)?,
        };
        Ok((result.outcome, result.attempts, result.state))
    }

    fn measure(&mut self, state: StateVector, qubit: usize, second: bool) -> Result<(ZOutcome, StateVector)> {
        match self {
            Driver::Random { rng, .. } => state.measure_z(qubit, rng),
            Driver::Forced(forced) => {
                let outcome = if second { forced.second } else { forced.first };
                Ok((outcome, state.collapse_z(qubit, outcome)?.0))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct GrowStep {
    pub chain: ChainState,
    pub outcome: GateOutcome,
    pub attempts: u32,
}

impl GrowStep {
    pub fn grew(&self) -> bool {
        self.outcome != GateOutcome::Failure
    }
}

/// Measures chain end `end` in Z and removes it; a ↓ result is corrected
/// with Z on `neighbor`.
fn cut_end(driver: &mut Driver<'_>, register: StateVector, end: usize, neighbor: Option<usize>, second: bool) -> Result<StateVector> {
    let (outcome, mut register) = driver.measure(register, end, second)?;
    if let (ZOutcome::Down, Some(q)) = (outcome, neighbor) {
        register.apply_in_place(q, Gate1::Z)?;
    }
    Ok(register)
}

/// Attempts to extend `chain` by the fresh qubit `fresh`.
///
/// Even: H on the old end, which becomes the new end behind `fresh`.
/// Odd: X then H on `fresh`, appended. Failure: the old end is measured and
/// dropped.
pub fn grow_chain(chain: ChainState, fresh: usize, driver: &mut Driver<'_>) -> Result<GrowStep> {
    chain.validate()?;
    let &last = chain.labels.last().ok_or(Error::EmptyChain)?;
    if chain.labels.contains(&fresh) {
        return Err(Error::DuplicateQubit(fresh));
    }
    if (chain.register.reduced_fidelity(&[fresh], &StateVector::minus())? - 1.0).abs() > FIDELITY_TOL {
        return Err(Error::InvalidParameter(format!("qubit {fresh} is not in the fresh state")));
    }
    let ChainState { register, mut labels } = chain;
    let (outcome, attempts, mut register) = driver.gate(register, last, fresh)?;
    match outcome {
        GateOutcome::Even => {
            register.apply_in_place(last, Gate1::H)?;
            labels.pop();
            labels.extend([fresh, last]);
        }
        GateOutcome::Odd => {
            register.apply_in_place(fresh, Gate1::X)?;
            register.apply_in_place(fresh, Gate1::H)?;
            labels.push(fresh);
        }
        GateOutcome::Failure => {
            labels.pop();
            register = cut_end(driver, register, last, labels.last().copied(), false)?;
        }
    }
    Ok(GrowStep { chain: ChainState { register, labels }, outcome, attempts })
}

#[derive(Clone, Debug)]
pub enum Joined {
    /// One register holding all m + n chain spins.
    Chain(ChainState),
    /// The join failed; both damaged ends were measured off and each chain
    /// keeps its own register.
    Degraded(ChainState, ChainState),
}

#[derive(Clone, Debug)]
pub struct ConnectStep {
    pub joined: Joined,
    pub outcome: GateOutcome,
    pub attempts: u32,
}

/// Joins the end of `m_chain` to the start of `n_chain`.
///
/// The two registers are combined as `m ⊗ n`. Z is applied to the end of the
/// first chain, then the gate acts on it and the second chain's first spin.
/// Even: H on the first chain's end. Odd: X then H on it, plus Z on its
/// predecessor to clear the phase the flip moves there.
pub fn connect_chains(m_chain: ChainState, n_chain: ChainState, driver: &mut Driver<'_>) -> Result<ConnectStep> {
    m_chain.validate()?;
    n_chain.validate()?;
    if m_chain.is_empty() || n_chain.is_empty() {
        return Err(Error::EmptyChain);
    }
    let offset = m_chain.register.n();
    let mut register = m_chain.register.tensor(&n_chain.register)?;
    let m_labels = m_chain.labels;
    let n_labels: Vec<usize> = n_chain.labels.iter().map(|q| q + offset).collect();
    let m_end = *m_labels.last().expect("non-empty");
    let m_prev = m_labels.len().checked_sub(2).map(|i| m_labels[i]);
    let n_start = n_labels[0];
    let n_next = n_labels.get(1).copied();

    register.apply_in_place(m_end, Gate1::Z)?;
    let (outcome, attempts, mut register) = driver.gate(register, m_end, n_start)?;
    let joined = match outcome {
        GateOutcome::Even | GateOutcome::Odd => {
            if outcome == GateOutcome::Odd {
                register.apply_in_place(m_end, Gate1::X)?;
                if let Some(q) = m_prev {
                    register.apply_in_place(q, Gate1::Z)?;
                }
            }
            register.apply_in_place(m_end, Gate1::H)?;
            // The first chain's end is now a leaf on the second chain's start.
            let labels = if n_labels.len() == 1 && m_labels.len() > 1 {
                m_labels[..m_labels.len() - 1].iter().chain([&n_start, &m_end]).copied().collect()
            } else {
                m_labels.iter().chain(&n_labels).copied().collect()
            };
            Joined::Chain(ChainState { register, labels })
        }
        GateOutcome::Failure => {
            let register = cut_end(driver, register, m_end, m_prev, false)?;
            let register = cut_end(driver, register, n_start, n_next, true)?;
            let (left, right) = register.split_at(offset)?;
            Joined::Degraded(
                ChainState { register: left, labels: m_labels[..m_labels.len() - 1].to_vec() },
                ChainState { register: right, labels: n_labels[1..].iter().map(|q| q - offset).collect() },
            )
        }
    };
    Ok(ConnectStep { joined, outcome, attempts })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Strategy {
    /// Grow one chain a spin at a time.
    SequentialGrowth,
    /// Build halves recursively and join them; a failed join regrows the
    /// damaged halves spin by spin before retrying.
    PairwiseDoubling,
}

#[derive(Copy, Clone, Debug)]
pub struct FactorySpec {
    pub target: usize,
    pub strategy: Strategy,
    pub trials: u64,
    pub seed: u64,
    /// Gate calls after which a build is abandoned.
    pub max_gate_ops: u64,
}

impl FactorySpec {
    pub const MAX_TARGET: usize = 10;

    pub fn new(target: usize, strategy: Strategy, trials: u64, seed: u64) -> Self {
        Self { target, strategy, trials, seed, max_gate_ops: 1_000_000 }
    }
}

/// Resource statistics over completed builds.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FactoryStats {
    pub trials: u64,
    pub completed: u64,
    /// Completed builds whose chain passes the canonical-cluster check.
    pub verified: u64,
    pub mean_photons: f64,
    pub var_photons: f64,
    pub mean_gate_ops: f64,
    pub var_gate_ops: f64,
}

impl FactoryStats {
    pub fn completed_fraction(&self) -> f64 {
        self.completed as f64 / self.trials as f64
    }

    /// Standard error of [`Self::mean_photons`].
    pub fn photons_stderr(&self) -> f64 {
        (self.var_photons / self.completed as f64).sqrt()
    }

    pub fn gate_ops_stderr(&self) -> f64 {
        (self.var_gate_ops / self.completed as f64).sqrt()
    }
}

#[derive(Default)]
struct Tally {
    photons: u64,
    gate_ops: u64,
}

struct Factory<'a> {
    config: &'a GateConfig,
    rng: RandomStream,
    tally: Tally,
    max_gate_ops: u64,
}

#[derive(Copy, Clone, Default)]
struct Sums {
    trials: u64,
    completed: u64,
    verified: u64,
    photons: (f64, f64),
    ops: (f64, f64),
}

impl Sums {
    fn merge(self, o: Self) -> Self {
        Self {
            trials: self.trials + o.trials,
            completed: self.completed + o.completed,
            verified: self.verified + o.verified,
            photons: (self.photons.0 + o.photons.0, self.photons.1 + o.photons.1),
            ops: (self.ops.0 + o.ops.0, self.ops.1 + o.ops.1),
        }
    }
}

impl Factory<'_> {
    fn budget_left(&self) -> bool {
        self.tally.gate_ops < self.max_gate_ops
    }

    /// Measures a spare qubit and re-prepares it in (|↑⟩ − |↓⟩)/√2.
    fn refresh(&mut self, register: StateVector, q: usize) -> Result<StateVector> {
        let (outcome, mut register) = register.measure_z(q, &mut self.rng)?;
        if outcome == ZOutcome::Down {
            register.apply_in_place(q, Gate1::X)?;
        }
        register.apply_in_place(q, Gate1::H)?;
        register.apply_in_place(q, Gate1::Z)?;
        Ok(register)
    }

    /// Grows `chain` spin by spin inside its own register until it has
    /// `length` spins or the budget runs out.
    fn grow_to(&mut self, mut chain: ChainState, length: usize) -> Result<Option<ChainState>> {
        while chain.len() < length {
            if !self.budget_left() {
                return Ok(None);
            }
            let free = chain.free_qubits();
            let &fresh = free.first().ok_or_else(|| Error::InvalidParameter("register has no spare qubit".into()))?;
            let register = self.refresh(chain.register, fresh)?;
            if chain.labels.is_empty() {
                // A lone fresh spin flipped to (|↑⟩ + |↓⟩)/√2 is a one-spin chain.
                chain = ChainState { register: register.apply_1q(fresh, Gate1::Z)?, labels: vec![fresh] };
                continue;
            }
            chain.register = register;
            let mut driver = Driver::Random { config: self.config, rng: &mut self.rng };
            let step = grow_chain(chain, fresh, &mut driver)?;
            self.tally.gate_ops += 1;
            self.tally.photons += u64::from(step.attempts);
            chain = step.chain;
        }
        Ok(Some(chain))
    }

    fn sequential(&mut self, target: usize) -> Result<Option<ChainState>> {
        self.grow_to(ChainState::with_spares(1, target)?, target)
    }

    /// Builds a chain of `length` spins in a register with one spare.
    fn doubling(&mut self, length: usize) -> Result<Option<ChainState>> {
        if length == 1 {
            return Ok(Some(ChainState::with_spares(1, 1)?));
        }
        let (a, b) = (length.div_ceil(2), length / 2);
        let (Some(mut left), Some(mut right)) = (self.doubling(a)?, self.doubling(b)?) else {
            return Ok(None);
        };
        loop {
            if !self.budget_left() {
                return Ok(None);
            }
            let mut driver = Driver::Random { config: self.config, rng: &mut self.rng };
            let step = connect_chains(left, right, &mut driver)?;
            self.tally.gate_ops += 1;
            self.tally.photons += u64::from(step.attempts);
            match step.joined {
                Joined::Chain(chain) => {
                    // Keep a single spare: drop the second register's one.
                    let spare = *chain.free_qubits().last().expect("two spares after a join");
                    let register = chain.register.discard(spare)?;
                    let labels = chain.labels.iter().map(|&q| if q > spare { q - 1 } else { q }).collect();
                    return Ok(Some(ChainState { register, labels }));
                }
                Joined::Degraded(l, r) => {
                    let (Some(l), Some(r)) = (self.grow_to(l, a)?, self.grow_to(r, b)?) else {
                        return Ok(None);
                    };
                    left = l;
                    right = r;
                }
            }
        }
    }
}

/// Monte Carlo over complete builds of a `target`-spin chain.
///
/// Trials run in parallel; trial `t` draws from
/// `RandomStream::for_worker(seed, t)`.
pub fn simulate_factory(config: &GateConfig, spec: &FactorySpec) -> Result<FactoryStats> {
    config.validate()?;
    if spec.target == 0 || spec.target > FactorySpec::MAX_TARGET {
        return Err(Error::InvalidParameter(format!(
            "target length must be in 1..={}, got {}",
            FactorySpec::MAX_TARGET,
            spec.target
        )));
    }
    if spec.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let sums = (0..spec.trials)
        .into_par_iter()
        .map(|t| {
            let mut factory = Factory {
                config,
                rng: RandomStream::for_worker(spec.seed, t),
                tally: Tally::default(),
                max_gate_ops: spec.max_gate_ops,
            };
            let chain = match spec.strategy {
                Strategy::SequentialGrowth => factory.sequential(spec.target)?,
                Strategy::PairwiseDoubling => factory.doubling(spec.target)?,
            };
            let mut sums = Sums { trials: 1, ..Sums::default() };
            if let Some(chain) = chain {
                let (p, o) = (factory.tally.photons as f64, factory.tally.gate_ops as f64);
                sums.completed = 1;
                sums.verified = u64::from(chain.is_canonical()?);
                sums.photons = (p, p * p);
                sums.ops = (o, o * o);
            }
            Ok::<_, Error>(sums)
        })
        .try_reduce(Sums::default, |a, b| Ok(a.merge(b)))?;
    let moments = |(s, s2): (f64, f64)| {
        let n = sums.completed as f64;
        if sums.completed == 0 {
            return (f64::NAN, f64::NAN);
        }
        let mean = s / n;
        let var = if sums.completed > 1 { (s2 - n * mean * mean) / (n - 1.0) } else { 0.0 };
        (mean, var.max(0.0))
    };
    let (mean_photons, var_photons) = moments(sums.photons);
    let (mean_gate_ops, var_gate_ops) = moments(sums.ops);
    Ok(FactoryStats {
        trials: sums.trials,
        completed: sums.completed,
        verified: sums.verified,
        mean_photons,
        var_photons,
        mean_gate_ops,
        var_gate_ops,
    })
}
