//! Dense state vectors for small spin registers.
//!
//! Basis states are labeled with qubit 0 as the most significant bit and
//! ↑ ↦ 0, ↓ ↦ 1, so `|↑↓⟩` on two qubits is index 1.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::rng::RandomStream;

const NORM_TOL: f64 = 1e-10;

/// Single-qubit gates used by the gate feedback and cluster procedures.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Gate1 {
    /// ↑ → (↑ + ↓)/√2, ↓ → (↑ − ↓)/√2.
    H,
    /// Spin flip.
    X,
    /// Phase flip.
    Z,
}

/// Heralded parity of a successful entangling attempt.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    /// ↑↑ kept with +, ↓↓ with −.
    Even,
    /// ↑↓ kept with +, ↓↑ with −.
    Odd,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum ZOutcome {
    Up,
    Down,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub const MAX_QUBITS: usize = 16;

    fn check_size(n: usize) -> Result<()> {
        if n == 0 || n > Self::MAX_QUBITS {
            return Err(Error::RegisterSize(n));
        }
        Ok(())
    }

    /// Computational basis state `index` of an `n`-qubit register.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        Self::check_size(n)?;
        if index >= 1 << n {
            return Err(Error::InvalidParameter(format!("basis index {index} too large for {n} qubits")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Takes amplitudes that are already normalized.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let state = Self::from_raw(amps)?;
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn from_unnormalized(amps: Vec<C64>) -> Result<Self> {
        let mut state = Self::from_raw(amps)?;
        state.normalize()?;
        Ok(state)
    }

    fn from_raw(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("amplitude count {len} is not a power of two")));
        }
        let n = len.trailing_zeros() as usize;
        Self::check_size(n)?;
        Ok(Self { n, amps })
    }

    /// α|↑⟩ + β|↓⟩, normalized.
    pub fn qubit(alpha: C64, beta: C64) -> Result<Self> {
        Self::from_unnormalized(vec![alpha, beta])
    }

    pub fn up() -> Self {
        Self { n: 1, amps: vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)] }
    }

    pub fn down() -> Self {
        Self { n: 1, amps: vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)] }
    }

    /// (|↑⟩ + |↓⟩)/√2
    pub fn plus() -> Self {
        Self { n: 1, amps: vec![C64::new(FRAC_1_SQRT_2, 0.0); 2] }
    }

    /// (|↑⟩ − |↓⟩)/√2
    pub fn minus() -> Self {
        Self { n: 1, amps: vec![C64::new(FRAC_1_SQRT_2, 0.0), C64::new(-FRAC_1_SQRT_2, 0.0)] }
    }

    /// Random normalized state with Gaussian-distributed amplitudes.
    pub fn random(n: usize, rng: &mut RandomStream) -> Result<Self> {
        Self::check_size(n)?;
        let amps = (0..1usize << n)
            .map(|_| {
                // Box-Muller
                let u1 = 1.0 - rng.uniform();
                let u2 = rng.uniform();
                let r = (-2.0 * u1.ln()).sqrt();
                let t = std::f64::consts::TAU * u2;
                C64::new(r * t.cos(), r * t.sin())
            })
            .collect();
        Self::from_unnormalized(amps)
    }

    /// Tensor product of single- or multi-qubit factors, left to right.
    pub fn product(factors: &[StateVector]) -> Result<Self> {
        let (first, rest) = factors.split_first().ok_or(Error::RegisterSize(0))?;
        rest.iter().try_fold(first.clone(), |acc, f| acc.tensor(f))
    }

    /// `self ⊗ other`; the qubits of `other` come after those of `self`.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let n = self.n + other.n;
        Self::check_size(n)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(())
    }

    fn normalize(&mut self) -> Result<f64> {
        let norm = self.norm_sqr();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroProbability);
        }
        let scale = norm.sqrt().recip();
        self.amps.iter_mut().for_each(|a| *a *= scale);
        Ok(norm)
    }

    fn mask(&self, qubit: usize) -> Result<usize> {
        if qubit >= self.n {
            return Err(Error::QubitOutOfRange { index: qubit, n: self.n });
        }
        Ok(1 << (self.n - 1 - qubit))
    }

    fn pair_masks(&self, q1: usize, q2: usize) -> Result<(usize, usize)> {
        let (m1, m2) = (self.mask(q1)?, self.mask(q2)?);
        if q1 == q2 {
            return Err(Error::DuplicateQubit(q1));
        }
        Ok((m1, m2))
    }

    pub fn apply_1q(mut self, qubit: usize, gate: Gate1) -> Result<Self> {
        self.apply_in_place(qubit, gate)?;
        Ok(self)
    }

    pub(crate) fn apply_in_place(&mut self, qubit: usize, gate: Gate1) -> Result<()> {
        let mask = self.mask(qubit)?;
        match gate {
            Gate1::Z => self
                .amps
                .iter_mut()
                .enumerate()
                .filter(|(i, _)| i & mask != 0)
                .for_each(|(_, a)| *a = -*a),
            Gate1::X => {
                for i in (0..self.amps.len()).filter(|i| i & mask == 0) {
                    self.amps.swap(i, i | mask);
                }
            }
            Gate1::H => {
                for i in (0..self.amps.len()).filter(|i| i & mask == 0) {
                    let (a, b) = (self.amps[i], self.amps[i | mask]);
                    self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                    self.amps[i | mask] = (a - b) * FRAC_1_SQRT_2;
                }
            }
        }
        Ok(())
    }

    /// Squared norms of the even and odd parity components of qubits
    /// `q1`, `q2`.
    pub fn parity_weights(&self, q1: usize, q2: usize) -> Result<(f64, f64)> {
        let (m1, m2) = self.pair_masks(q1, q2)?;
        Ok(self.amps.iter().enumerate().fold((0.0, 0.0), |(even, odd), (i, a)| {
            if (i & m1 != 0) ^ (i & m2 != 0) {
                (even, odd + a.norm_sqr())
            } else {
                (even + a.norm_sqr(), odd)
            }
        }))
    }

    /// Unnormalized image of the signed parity projector.
    pub(crate) fn signed_projection(&self, q1: usize, q2: usize, outcome: Parity) -> Result<Vec<C64>> {
        let (m1, m2) = self.pair_masks(q1, q2)?;
        let zero = C64::new(0.0, 0.0);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .map(|(i, &a)| match (outcome, i & m1 != 0, i & m2 != 0) {
                (Parity::Even, false, false) | (Parity::Odd, false, true) => a,
                (Parity::Even, true, true) | (Parity::Odd, true, false) => -a,
                _ => zero,
            })
            .collect())
    }

    /// Applies the signed parity projector on `q1`, `q2` and renormalizes.
    ///
    /// Returns the new state and the squared norm of the projection. A
    /// branch with zero weight is an error.
    pub fn project_parity(self, q1: usize, q2: usize, outcome: Parity) -> Result<(Self, f64)> {
        let amps = self.signed_projection(q1, q2, outcome)?;
        let mut out = Self { n: self.n, amps };
        let prob = out.normalize()?;
        Ok((out, prob))
    }

    /// Probability of finding `qubit` in |↑⟩.
    pub fn prob_up(&self, qubit: usize) -> Result<f64> {
        let mask = self.mask(qubit)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>()
            / self.norm_sqr())
    }

    /// Collapses `qubit` onto a chosen Z outcome. Returns the state and the
    /// Born probability of that outcome.
    pub fn collapse_z(mut self, qubit: usize, outcome: ZOutcome) -> Result<(Self, f64)> {
        let mask = self.mask(qubit)?;
        let keep_down = outcome == ZOutcome::Down;
        self.amps
            .iter_mut()
            .enumerate()
            .filter(|(i, _)| (i & mask != 0) != keep_down)
            .for_each(|(_, a)| *a = C64::new(0.0, 0.0));
        let prob = self.normalize()?;
        Ok((self, prob))
    }

    pub fn measure_z(self, qubit: usize, rng: &mut RandomStream) -> Result<(ZOutcome, Self)> {
        let p_up = self.prob_up(qubit)?;
        let outcome = if rng.uniform() < p_up { ZOutcome::Up } else { ZOutcome::Down };
        let (state, _) = self.collapse_z(qubit, outcome)?;
        Ok((outcome, state))
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// ⟨target|ρ|target⟩ where ρ is the reduced state of the qubits in
    /// `labels`, taken in that order.
    pub fn reduced_fidelity(&self, labels: &[usize], target: &StateVector) -> Result<f64> {
        if labels.len() != target.n {
            return Err(Error::DimensionMismatch(labels.len(), target.n));
        }
        let mut seen = 0usize;
        let mut label_masks = Vec::with_capacity(labels.len());
        for &q in labels {
            let m = self.mask(q)?;
            if seen & m != 0 {
                return Err(Error::DuplicateQubit(q));
            }
            seen |= m;
            label_masks.push(m);
        }
        let env_masks: Vec<usize> = (0..self.n).map(|q| 1 << (self.n - 1 - q)).filter(|m| seen & m == 0).collect();
        let mut overlaps = vec![C64::new(0.0, 0.0); 1 << env_masks.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let sub = label_masks.iter().fold(0, |acc, m| (acc << 1) | usize::from(i & m != 0));
            let env = env_masks.iter().fold(0, |acc, m| (acc << 1) | usize::from(i & m != 0));
            overlaps[env] += target.amps[sub].conj() * a;
        }
        Ok(overlaps.iter().map(|o| o.norm_sqr()).sum::<f64>() / (self.norm_sqr() * target.norm_sqr()))
    }

    /// Factors the register into its first `k` qubits and the remainder.
    /// Fails if the two parts are entangled.
    pub fn split_at(&self, k: usize) -> Result<(Self, Self)> {
        if k == 0 || k >= self.n {
            return Err(Error::InvalidParameter(format!("cannot split a {}-qubit register at {k}", self.n)));
        }
        let cols = 1usize << (self.n - k);
        let (pivot, _) = self
            .amps
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
            .expect("non-empty register");
        let (pr, pc) = (pivot / cols, pivot % cols);
        let p = self.amps[pivot];
        let left: Vec<C64> = (0..1 << k).map(|r| self.amps[r * cols + pc]).collect();
        let right: Vec<C64> = (0..cols).map(|c| self.amps[pr * cols + c] / p).collect();
        let residual: f64 = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| (a - left[i / cols] * right[i % cols]).norm_sqr())
            .sum();
        if residual > NORM_TOL * self.norm_sqr() {
            return Err(Error::NotSeparable);
        }
        Ok((Self::from_unnormalized(left)?, Self::from_unnormalized(right)?))
    }

    /// Removes a qubit that is not entangled with the rest of the register.
    /// Higher-numbered qubits shift down by one.
    pub fn discard(&self, qubit: usize) -> Result<Self> {
        let mask = self.mask(qubit)?;
        if self.n == 1 {
            return Err(Error::RegisterSize(0));
        }
        let low = mask - 1;
        let squeeze = |i: usize| ((i >> 1) & !low) | (i & low);
        let (mut up, mut down) = (vec![C64::new(0.0, 0.0); 1 << (self.n - 1)], vec![C64::new(0.0, 0.0); 1 << (self.n - 1)]);
        for (i, a) in self.amps.iter().enumerate() {
            if i & mask == 0 {
                up[squeeze(i)] = *a;
            } else {
                down[squeeze(i & !mask)] = *a;
            }
        }
        let norm = |v: &[C64]| v.iter().map(|a| a.norm_sqr()).sum::<f64>();
        let (nu, nd) = (norm(&up), norm(&down));
        let overlap: C64 = up.iter().zip(&down).map(|(a, b)| a.conj() * b).sum();
        // Cauchy-Schwarz is saturated iff the two slices are parallel.
        if nu * nd - overlap.norm_sqr() > NORM_TOL * (nu + nd).powi(2) {
            return Err(Error::NotSeparable);
        }
        Self::from_unnormalized(if nu >= nd { up } else { down })
    }
}

/// |⟨a|b⟩|² for normalized states.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr() / (a.norm_sqr() * b.norm_sqr()))
}
