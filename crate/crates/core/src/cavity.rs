//! Steady-state reflection of a single-sided cavity containing a charged
//! quantum dot.
//!
//! All rates and detunings are in units of the input-output coupling rate
//! κ, which is fixed to one. Only frequency differences relative to the
//! probe photon are stored.
//!
//! The expressions assume the weak-excitation limit (the dot stays mostly in
//! its ground state, ⟨σz⟩ ≈ −1). Nothing here checks that this holds for a
//! given probe intensity.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters of one cavity-QD system, in units of κ.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// ω_X − ω: trion transition minus probe frequency.
    pub x_detuning: f64,
    /// ω_c − ω: cavity resonance minus probe frequency.
    pub cavity_detuning: f64,
    /// Input-output coupling rate κ. Always 1 for parameters built with the
    /// constructors here.
    pub kappa: f64,
    /// Side-leakage rate κ_s.
    pub kappa_s: f64,
    /// Trion decay rate γ.
    pub gamma: f64,
    /// QD-cavity coupling strength g.
    pub g: f64,
}

impl CavityParams {
    /// Parameters from the raw rates. `kappa` is fixed to one.
    pub fn new(x_detuning: f64, cavity_detuning: f64, kappa_s: f64, gamma: f64, g: f64) -> Result<Self> {
        let params = Self {
            x_detuning,
            cavity_detuning,
            kappa: 1.0,
            kappa_s,
            gamma,
            g,
        };
        params.validate()?;
        Ok(params)
    }

    /// Parameters in the form used for efficiency curves: cooperativity `c`,
    /// the ratio κ/κ_s, γ/κ and a probe detuning (ω_c − ω)/κ with the trion
    /// tuned onto the cavity (ω_X = ω_c).
    ///
    /// An infinite `kappa_ratio` means no side leakage.
    pub fn from_cooperativity(c: f64, kappa_ratio: f64, gamma: f64, detuning: f64) -> Result<Self> {
        if !(kappa_ratio > 0.0) {
            return Err(Error::InvalidParameter(format!("kappa ratio must be positive, got {kappa_ratio}")));
        }
        if !c.is_finite() || c < 0.0 {
            return Err(Error::InvalidParameter(format!("cooperativity must be finite and non-negative, got {c}")));
        }
        let kappa_s = 1.0 / kappa_ratio;
        let kappa_total = 1.0 + kappa_s;
        let g = (c * gamma * kappa_total).sqrt();
        Self::new(detuning, detuning, kappa_s, gamma, g)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("x_detuning", self.x_detuning),
            ("cavity_detuning", self.cavity_detuning),
            ("kappa", self.kappa),
            ("kappa_s", self.kappa_s),
            ("gamma", self.gamma),
            ("g", self.g),
        ];
        if let Some((name, v)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
        }
        if self.kappa <= 0.0 {
            return Err(Error::InvalidParameter(format!("kappa must be positive, got {}", self.kappa)));
        }
        if self.gamma <= 0.0 {
            return Err(Error::InvalidParameter(format!("gamma must be positive, got {}", self.gamma)));
        }
        if self.kappa_s < 0.0 {
            return Err(Error::InvalidParameter(format!("kappa_s must be non-negative, got {}", self.kappa_s)));
        }
        if self.g < 0.0 {
            return Err(Error::InvalidParameter(format!("g must be non-negative, got {}", self.g)));
        }
        Ok(())
    }

    /// Total cavity decay rate κ + κ_s.
    pub fn kappa_total(&self) -> f64 {
        self.kappa + self.kappa_s
    }

    /// C = g²/(γ(κ + κ_s)).
    pub fn cooperativity(&self) -> f64 {
        self.g * self.g / (self.gamma * self.kappa_total())
    }

    /// Same system probed at a frequency `offset` away from the cavity
    /// resonance (ω − ω_c = offset). The trion-cavity detuning is kept.
    pub fn probed_at(&self, offset: f64) -> Self {
        let trion_offset = self.x_detuning - self.cavity_detuning;
        Self {
            cavity_detuning: -offset,
            x_detuning: trion_offset - offset,
            ..*self
        }
    }
}

/// Reflection coefficients of the empty (`r0`) and coupled (`r1`) system
/// together with the combinations the gate actually uses.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ReflectionPair {
    pub r0: C64,
    pub r1: C64,
    /// (r1 − r0)/2, amplitude factor of a heralded success.
    pub d: C64,
    /// (r1 + r0)/2, amplitude factor of a recycle click.
    pub s: C64,
}

impl ReflectionPair {
    pub fn from_coefficients(r0: C64, r1: C64) -> Self {
        Self {
            r0,
            r1,
            d: (r1 - r0) / 2.0,
            s: (r1 + r0) / 2.0,
        }
    }

    /// Perfect circular birefringence: r1 = 1, r0 = −1.
    pub fn ideal() -> Self {
        Self::from_coefficients(C64::new(-1.0, 0.0), C64::new(1.0, 0.0))
    }
}

/// Spin-dependent reflection coefficient r_j(ω).
///
/// `coupled` selects j = 1 (photon polarization drives the trion) or j = 0
/// (photon sees an empty cavity).
pub fn reflection(params: &CavityParams, coupled: bool) -> Result<C64> {
    params.validate()?;
    let dipole = C64::new(params.gamma / 2.0, params.x_detuning);
    let cavity = C64::new(params.kappa_total() / 2.0, params.cavity_detuning);
    let coupling = if coupled { params.g * params.g } else { 0.0 };
    Ok(1.0 - params.kappa * dipole / (dipole * cavity + coupling))
}

pub fn reflection_pair(params: &CavityParams) -> Result<ReflectionPair> {
    Ok(ReflectionPair::from_coefficients(
        reflection(params, false)?,
        reflection(params, true)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn standard_params(c: f64, detuning: f64) -> CavityParams {
        CavityParams::from_cooperativity(c, 13.0, 0.1, detuning).unwrap()
    }

    #[test]
    fn empty_cavity_without_leakage_flips_sign() {
        let p = CavityParams::new(0.0, 0.0, 0.0, 0.1, 0.0).unwrap();
        assert_abs_diff_eq!(reflection(&p, false).unwrap().re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(reflection(&p, false).unwrap().im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn strong_coupling_limit_reflects_unchanged() {
        let p = CavityParams::new(0.0, 0.0, 0.0, 0.1, 1e6).unwrap();
        let r1 = reflection(&p, true).unwrap();
        assert_abs_diff_eq!(r1.re, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r1.im, 0.0, epsilon = 1e-9);
    }

    // Frozen values from an independent 30-digit evaluation.
    #[test]
    fn resonant_scattering_regime_values() {
        let p = standard_params(0.25, 0.0);
        let r1 = reflection(&p, true).unwrap();
        let r0 = reflection(&p, false).unwrap();
        assert_abs_diff_eq!(r1.re, 0.071_428_571_43, epsilon = 1e-6);
        assert_abs_diff_eq!(r1.im, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r0.re, -0.857_142_857_1, epsilon = 1e-6);

        let pair = reflection_pair(&p).unwrap();
        assert_abs_diff_eq!(pair.d.norm_sqr(), 0.215_561_224_5, epsilon = 1e-5);
        assert_abs_diff_eq!(pair.s.norm_sqr(), 0.154_336_734_7, epsilon = 1e-5);
    }

    #[test]
    fn detuned_purcell_regime_value() {
        let p = standard_params(1.0, 0.1);
        let r1 = reflection(&p, true).unwrap();
        assert_abs_diff_eq!(r1.re, 0.362_075_008_8, epsilon = 1e-4);
        assert_abs_diff_eq!(r1.im, -0.501_226_778_8, epsilon = 1e-4);
        let pair = reflection_pair(&standard_params(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(pair.d.norm_sqr(), 0.551_836_734_7, epsilon = 1e-5);
    }

    #[test]
    fn ideal_pair_combinations() {
        let pair = ReflectionPair::ideal();
        assert_eq!(pair.d, C64::new(1.0, 0.0));
        assert_eq!(pair.s, C64::new(0.0, 0.0));
    }

    #[test]
    fn cooperativity_round_trips() {
        let p = standard_params(0.25, 0.0);
        assert!((p.cooperativity() - 0.25).abs() < 1e-12 * 0.25);
        assert!((p.kappa_s - 1.0 / 13.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_unphysical_inputs() {
        assert!(CavityParams::new(0.0, 0.0, 0.1, 0.0, 1.0).is_err());
        assert!(CavityParams::new(0.0, 0.0, -0.1, 0.1, 1.0).is_err());
        assert!(CavityParams::new(f64::NAN, 0.0, 0.1, 0.1, 1.0).is_err());
        assert!(CavityParams::new(0.0, f64::INFINITY, 0.1, 0.1, 1.0).is_err());
        let mut p = standard_params(1.0, 0.0);
        p.kappa = 0.0;
        assert!(reflection(&p, true).is_err());
    }

    #[test]
    fn no_leakage_is_infinite_ratio() {
        let p = CavityParams::from_cooperativity(1.0, f64::INFINITY, 0.1, 0.0).unwrap();
        assert_eq!(p.kappa_s, 0.0);
    }

    fn arb_params() -> impl Strategy<Value = CavityParams> {
        (-3.0..1.0f64, -3.0..1.0f64, -3.0..1.0f64, -5.0..5.0f64, -5.0..5.0f64).prop_map(
            |(lg, lks, lgam, dx, dc)| CavityParams::new(dx, dc, 10f64.powf(lks), 10f64.powf(lgam), 10f64.powf(lg)).unwrap(),
        )
    }

    proptest! {
        #[test]
        fn reflection_is_passive(p in arb_params()) {
            let pair = reflection_pair(&p).unwrap();
            prop_assert!(pair.r0.norm() <= 1.0 + 1e-12);
            prop_assert!(pair.r1.norm() <= 1.0 + 1e-12);
            let lhs = pair.d.norm_sqr() + pair.s.norm_sqr();
            let rhs = (pair.r0.norm_sqr() + pair.r1.norm_sqr()) / 2.0;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
        }

        #[test]
        fn detuning_sign_conjugates(p in arb_params()) {
            let plus = CavityParams { x_detuning: p.cavity_detuning, ..p };
            let minus = CavityParams { x_detuning: -p.cavity_detuning, cavity_detuning: -p.cavity_detuning, ..p };
            for coupled in [false, true] {
                let a = reflection(&plus, coupled).unwrap();
                let b = reflection(&minus, coupled).unwrap();
                prop_assert!((a - b.conj()).norm() <= 1e-12);
            }
        }

        #[test]
        fn uncoupled_branch_ignores_g(p in arb_params()) {
            let no_g = CavityParams { g: 0.0, ..p };
            prop_assert_eq!(reflection(&no_g, true).unwrap(), reflection(&p, false).unwrap());
        }
    }
}
