//! Finite-bandwidth probe photons.
//!
//! The photon's spectral intensity |f(ω)|² is a unit-normalized Gaussian
//! density ∝ exp(−(ω − center)²/Δ²), i.e. standard deviation Δ/√2. Averaged
//! efficiencies are midpoint-rule integrals over ±`span`·Δ with weights
//! renormalized to sum to one.

use crate::cavity::{reflection_pair, CavityParams};
use crate::error::{Error, Result};
use crate::gate::{photon_branches, Etas};
use crate::qstate::{Parity, StateVector};

pub const DEFAULT_POINTS: usize = 2048;
pub const DEFAULT_SPAN: f64 = 5.0;
/// Largest quadrature error [`pulse_etas`] accepts.
pub const QUADRATURE_TOL: f64 = 1e-6;

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PulseSpec {
    /// Bandwidth Δ in units of κ.
    pub delta: f64,
    /// Pulse center frequency minus cavity resonance, units of κ.
    pub center: f64,
    pub n_points: usize,
    /// Integration half-width in units of Δ.
    pub span: f64,
}

impl PulseSpec {
    pub fn new(delta: f64) -> Self {
        Self { delta, center: 0.0, n_points: DEFAULT_POINTS, span: DEFAULT_SPAN }
    }

    pub fn with_center(self, center: f64) -> Self {
        Self { center, ..self }
    }

    pub fn with_points(self, n_points: usize) -> Self {
        Self { n_points, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::InvalidParameter(format!("bandwidth must be positive, got {}", self.delta)));
        }
        if !(self.span > 0.0) || !self.span.is_finite() {
            return Err(Error::InvalidParameter(format!("span must be positive, got {}", self.span)));
        }
        if !self.center.is_finite() {
            return Err(Error::InvalidParameter("pulse center must be finite".into()));
        }
        if self.n_points < 16 {
            return Err(Error::InvalidParameter(format!("need at least 16 grid points, got {}", self.n_points)));
        }
        Ok(())
    }

    /// Quadrature nodes as (ω − ω_c, weight) pairs.
    pub fn grid(&self) -> Vec<(f64, f64)> {
        grid(self.delta, self.center, self.span, self.n_points)
    }
}

fn grid(delta: f64, center: f64, span: f64, n: usize) -> Vec<(f64, f64)> {
    let h = 2.0 * span * delta / n as f64;
    let raw: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let u = -span * delta + (i as f64 + 0.5) * h;
            (center + u, (-(u / delta).powi(2)).exp())
        })
        .collect();
    let total: f64 = raw.iter().map(|(_, w)| w).sum();
    raw.into_iter().map(|(x, w)| (x, w / total)).collect()
}

fn averaged(params: &CavityParams, pulse: &PulseSpec, n: usize) -> Result<(f64, f64)> {
    grid(pulse.delta, pulse.center, pulse.span, n)
        .into_iter()
        .try_fold((0.0, 0.0), |(h, v), (offset, w)| {
            let pair = reflection_pair(&params.probed_at(offset))?;
            Ok((h + w * pair.d.norm_sqr(), v + w * pair.s.norm_sqr()))
        })
}

/// Spectrally averaged η_H and η_V, and η_S = η_H/(1 − η_V).
///
/// The probe detunings stored in `params` are replaced by the pulse's
/// spectral components; only the trion-cavity offset is kept. The
/// quadrature error is estimated by comparing against a grid twice as fine.
pub fn pulse_etas(params: &CavityParams, pulse: &PulseSpec) -> Result<Etas> {
    params.validate()?;
    pulse.validate()?;
    let coarse = averaged(params, pulse, pulse.n_points)?;
    let fine = averaged(params, pulse, 2 * pulse.n_points)?;
    let error = (coarse.0 - fine.0).abs().max((coarse.1 - fine.1).abs());
    if error > QUADRATURE_TOL {
        return Err(Error::CoarseGrid { error, suggested: suggest_points(params, pulse, fine)? });
    }
    let (eta_h, eta_v) = coarse;
    if eta_v >= 1.0 {
        return Err(Error::Degenerate);
    }
    Ok(Etas { eta_h, eta_v, eta_s: eta_h / (1.0 - eta_v) })
}

fn suggest_points(params: &CavityParams, pulse: &PulseSpec, mut previous: (f64, f64)) -> Result<usize> {
    let mut n = 2 * pulse.n_points;
    while n < 1 << 22 {
        let next = averaged(params, pulse, 2 * n)?;
        if (previous.0 - next.0).abs().max((previous.1 - next.1).abs()) <= QUADRATURE_TOL {
            return Ok(n);
        }
        previous = next;
        n *= 2;
    }
    Ok(n)
}

/// Unnormalized spin state heralded by `parity` when the photon has
/// frequency ω = ω_c + `offset`.
pub fn spectral_heralded_state(
    params: &CavityParams,
    offset: f64,
    eta_in: f64,
    state: &StateVector,
    q1: usize,
    q2: usize,
    parity: Parity,
) -> Result<Vec<num_complex::Complex64>> {
    let pair = reflection_pair(&params.probed_at(offset))?;
    let branches = photon_branches(&pair, eta_in, state, q1, q2)?;
    Ok(match parity {
        Parity::Even => branches.d3,
        Parity::Odd => branches.d4,
    })
}

/// Fidelity of the heralded spin state, after tracing out the photon's
/// frequency, to the ideal signed parity projection of `state`.
pub fn heralded_fidelity(
    params: &CavityParams,
    pulse: &PulseSpec,
    eta_in: f64,
    state: &StateVector,
    q1: usize,
    q2: usize,
    parity: Parity,
) -> Result<f64> {
    pulse.validate()?;
    let (target, _) = state.clone().project_parity(q1, q2, parity)?;
    let mut overlap = 0.0;
    let mut weight = 0.0;
    for (offset, w) in pulse.grid() {
        let branch = spectral_heralded_state(params, offset, eta_in, state, q1, q2, parity)?;
        let amp: num_complex::Complex64 = target.amplitudes().iter().zip(&branch).map(|(t, b)| t.conj() * b).sum();
        overlap += w * amp.norm_sqr();
        weight += w * branch.iter().map(|a| a.norm_sqr()).sum::<f64>();
    }
    if !(weight > 0.0) {
        return Err(Error::ZeroProbability);
    }
    Ok(overlap / weight)
}
