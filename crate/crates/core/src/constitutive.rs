//! Capillary and relative-permeability closures for the air/water pair.
//!
//! The retention curve is van Genuchten's with `m = 1 - 1/n`; relative
//! permeabilities follow the Mualem capillary-bundle model. The closed forms
//! are what the solver uses. The quadrature forms integrate the Mualem
//! integrals directly and exist as an independent check of the closed forms.
//!
//! Units are cm, g and hours throughout. Heads are in cm of water.

use crate::quadrature::{self, QuadratureError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Standard gravity expressed in cm/h².
pub const GRAVITY_CM_PER_H2: f64 = 980.665 * 3600.0 * 3600.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstitutiveError {
    #[error("invalid van Genuchten parameters: {0}")]
    InvalidParams(String),
    #[error("invalid fluid properties: {0}")]
    InvalidFluids(String),
    #[error("air density would be non-positive ({density:e} g/cm³) at head {head} cm")]
    NonPositiveDensity { head: f64, density: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Per-cell retention and permeability parameters.
///
/// `m` is not stored; it is always `1 - 1/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VanGenuchtenParams {
    /// Inverse capillary head, 1/cm.
    pub alpha: f64,
    /// Pore-size distribution exponent.
    pub n: f64,
    /// Mualem tortuosity exponent.
    pub eta: f64,
    /// Residual volumetric water content.
    pub theta_r: f64,
    /// Saturated volumetric water content (the porosity).
    pub theta_s: f64,
}

impl VanGenuchtenParams {
    pub fn new(alpha: f64, n: f64, eta: f64, theta_r: f64, theta_s: f64) -> Result<Self, ConstitutiveError> {
        let p = Self { alpha, n, eta, theta_r, theta_s };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ConstitutiveError> {
        let bad = |msg: String| Err(ConstitutiveError::InvalidParams(msg));
        if !(self.n > 1.0) || !self.n.is_finite() {
            return bad(format!("n must exceed 1, got {}", self.n));
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.eta >= 0.0) {
            return bad(format!("eta must be non-negative, got {}", self.eta));
        }
        if !(0.0 <= self.theta_r && self.theta_r < self.theta_s && self.theta_s <= 1.0) {
            return bad(format!(
                "need 0 <= theta_r < theta_s <= 1, got theta_r={} theta_s={}",
                self.theta_r, self.theta_s
            ));
        }
        Ok(())
    }

    #[inline]
    pub fn m(&self) -> f64 {
        1.0 - 1.0 / self.n
    }

    /// Volumetric water content at capillary head `h_c`.
    #[inline]
    pub fn water_content(&self, h_c: f64) -> f64 {
        self.theta_r + (self.theta_s - self.theta_r) * effective_saturation(h_c, self)
    }

    /// Capillary head at which the effective saturation equals `s_e`.
    /// Inverse of [`effective_saturation`] on `(0, 1]`.
    pub fn capillary_head(&self, s_e: f64) -> f64 {
        if s_e >= 1.0 {
            return 0.0;
        }
        if s_e <= 0.0 {
            return f64::INFINITY;
        }
        // s^(-1/m) - 1 computed without cancellation near s = 1
        let inner = (-(s_e.ln()) / self.m()).exp_m1();
        inner.powf(1.0 / self.n) / self.alpha
    }
}

/// Fluid properties of the water/air pair.
///
/// Air density is linear in head with slope `compressibility`; the reference
/// head is derived as `rho_0_nw / compressibility`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidProps {
    /// Water dynamic viscosity, g/(cm·h).
    pub mu_w: f64,
    /// Air dynamic viscosity, g/(cm·h).
    pub mu_nw: f64,
    /// Water density, g/cm³.
    pub rho_w: f64,
    /// Air density at zero gauge head, g/cm³.
    pub rho_0_nw: f64,
    /// d(rho_nw)/d(h_nw), g/cm⁴.
    pub compressibility: f64,
}

impl Default for FluidProps {
    fn default() -> Self {
        Self {
            mu_w: 0.01 * 3600.0,
            mu_nw: 1.8e-4 * 3600.0,
            rho_w: 1.0,
            rho_0_nw: 1.2e-3,
            compressibility: 1.24e-6,
        }
    }
}

impl FluidProps {
    pub fn validate(&self) -> Result<(), ConstitutiveError> {
        let fields = [
            ("mu_w", self.mu_w),
            ("mu_nw", self.mu_nw),
            ("rho_w", self.rho_w),
            ("rho_0_nw", self.rho_0_nw),
            ("compressibility", self.compressibility),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConstitutiveError::InvalidFluids(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Reference head `h0_nw = rho_0_nw / compressibility`, cm.
    pub fn h0_nw(&self) -> f64 {
        self.rho_0_nw / self.compressibility
    }

    /// Saturated hydraulic conductivity of water for intrinsic permeability `k` (cm²), cm/h.
    pub fn water_conductivity(&self, k: f64) -> f64 {
        k * self.rho_w * GRAVITY_CM_PER_H2 / self.mu_w
    }

    /// Saturated conductivity of air in water-head units for permeability `k`, cm/h.
    pub fn air_conductivity(&self, k: f64) -> f64 {
        k * self.rho_w * GRAVITY_CM_PER_H2 / self.mu_nw
    }
}

/// Effective water saturation `[1 + (alpha h_c)^n]^(-m)`; heads at or below
/// zero are fully saturated.
#[inline]
pub fn effective_saturation(h_c: f64, p: &VanGenuchtenParams) -> f64 {
    if h_c <= 0.0 {
        return 1.0;
    }
    (1.0 + (p.alpha * h_c).powf(p.n)).powf(-p.m())
}

/// `d(theta_w)/d(h_c)`; never positive.
#[inline]
pub fn capillary_capacity(h_c: f64, p: &VanGenuchtenParams) -> f64 {
    if h_c <= 0.0 {
        return 0.0;
    }
    let m = p.m();
    let ah = p.alpha * h_c;
    let ahn = ah.powf(p.n);
    let ds_dh = -m * p.n * p.alpha * ahn / ah * (1.0 + ahn).powf(-m - 1.0);
    (p.theta_s - p.theta_r) * ds_dh
}

#[inline]
pub fn rel_perm_wetting(s_ew: f64, p: &VanGenuchtenParams) -> f64 {
    let s = s_ew.clamp(0.0, 1.0);
    let m = p.m();
    let inner = 1.0 - (1.0 - s.powf(1.0 / m)).powf(m);
    (s.powf(p.eta) * inner * inner).clamp(0.0, 1.0)
}

#[inline]
pub fn rel_perm_nonwetting(s_ew: f64, p: &VanGenuchtenParams) -> f64 {
    let s = s_ew.clamp(0.0, 1.0);
    let m = p.m();
    ((1.0 - s).powf(p.eta) * (1.0 - s.powf(1.0 / m)).powf(2.0 * m)).clamp(0.0, 1.0)
}

const QUAD_REL_TOL: f64 = 1e-7;
const SATURATION_CUTOFF: f64 = 1e-9;

/// Integrand of the Mualem integrals after the substitution `S = 1 - w^(1/m)`,
/// which removes the `(1 - S)^(-1/n)` endpoint singularity at full saturation.
fn mualem_integrand(w: f64, p: &VanGenuchtenParams) -> f64 {
    let m = p.m();
    if w <= 0.0 {
        return mualem_integrand_at_zero(p);
    }
    let wm = w.powf(1.0 / m);
    if 1.0 - wm < SATURATION_CUTOFF {
        return 0.0;
    }
    let inner = (-(-wm).ln_1p() / m).exp_m1();
    let h_c = inner.powf(1.0 / p.n) / p.alpha;
    (1.0 / m) * wm / w / h_c
}

// Limit of the integrand as w -> 0 (S -> 1): alpha * m^(1/n) / m.
fn mualem_integrand_at_zero(p: &VanGenuchtenParams) -> f64 {
    let m = p.m();
    p.alpha * m.powf(1.0 / p.n) / m
}

/// Returns `(int_0^S dS/h_c, int_S^1 dS/h_c, int_0^1 dS/h_c)`.
fn mualem_integrals(s_ew: f64, p: &VanGenuchtenParams) -> Result<(f64, f64, f64), ConstitutiveError> {
    let w_s = (1.0 - s_ew).powf(p.m());
    let f = |w: f64| mualem_integrand(w, p);
    let lower = quadrature::integrate(f, w_s, 1.0, QUAD_REL_TOL)?;
    let upper = quadrature::integrate(f, 0.0, w_s, QUAD_REL_TOL)?;
    Ok((lower, upper, lower + upper))
}

/// Wetting relative permeability by direct quadrature of the Mualem integral.
pub fn mualem_quadrature_wetting(s_ew: f64, p: &VanGenuchtenParams) -> Result<f64, ConstitutiveError> {
    if s_ew <= 0.0 {
        return Ok(0.0);
    }
    if s_ew >= 1.0 {
        return Ok(1.0);
    }
    let (lower, _, total) = mualem_integrals(s_ew, p)?;
    let ratio = lower / total;
    Ok(s_ew.powf(p.eta) * ratio * ratio)
}

/// Non-wetting relative permeability by direct quadrature of the Mualem integral.
pub fn mualem_quadrature_nonwetting(s_ew: f64, p: &VanGenuchtenParams) -> Result<f64, ConstitutiveError> {
    if s_ew <= 0.0 {
        return Ok(1.0);
    }
    if s_ew >= 1.0 {
        return Ok(0.0);
    }
    let (_, upper, total) = mualem_integrals(s_ew, p)?;
    let ratio = upper / total;
    Ok((1.0 - s_ew).powf(p.eta) * ratio * ratio)
}

/// Air density at gauge head `h_nw`.
pub fn air_density(h_nw: f64, f: &FluidProps) -> Result<f64, ConstitutiveError> {
    let rho = f.rho_0_nw + f.compressibility * h_nw;
    if rho > 0.0 {
        Ok(rho)
    } else {
        Err(ConstitutiveError::NonPositiveDensity { head: h_nw, density: rho })
    }
}
