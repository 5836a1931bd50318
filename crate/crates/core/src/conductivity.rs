//! Finite-conductivity corrections.
//!
//! The zero-point field penetrates a real metal to a depth δ = λp/2π. For the
//! layered Au/Pd-on-Al stack an effective depth δe applies at large
//! separations; the correction factors are a second-order plate form, an
//! interpolation valid to δ/a = 0.2 and a fourth-order sphere–plate
//! polynomial obtained from the interpolation via the proximity force
//! theorem.

use crate::error::{CasimirError, Result};

/// Metal coating description: penetration depths and layer thickness in nm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialStack {
    delta0_nm: f64,
    delta0_tilde_nm: f64,
    overlayer_nm: f64,
    lambda_p_al_nm: f64,
    lambda_p_au_nm: f64,
}

impl MaterialStack {
    /// `delta0` is the Al penetration depth, `delta0_tilde` the Au/Pd one,
    /// `overlayer` the Au/Pd thickness Δ. Requires Δ < δ̃₀ (an overlayer
    /// opaque at the e-folding depth invalidates the effective-depth model).
    pub fn new(
        delta0_nm: f64,
        delta0_tilde_nm: f64,
        overlayer_nm: f64,
        lambda_p_al_nm: f64,
        lambda_p_au_nm: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("delta0_tilde", delta0_tilde_nm),
            ("lambda_p_al", lambda_p_al_nm),
            ("lambda_p_au", lambda_p_au_nm),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CasimirError::InvalidInput(format!(
                    "{name} must be positive and finite, got {v} nm"
                )));
            }
        }
        // delta0 = 0 is allowed: it is the ideal-metal limit.
        for (name, v) in [("delta0", delta0_nm), ("overlayer", overlayer_nm)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(CasimirError::InvalidInput(format!(
                    "{name} must be nonnegative and finite, got {v} nm"
                )));
            }
        }
        if overlayer_nm >= delta0_tilde_nm {
            return Err(CasimirError::InvalidInput(format!(
                "overlayer thickness {overlayer_nm} nm must be below the overlayer \
                 penetration depth {delta0_tilde_nm} nm"
            )));
        }
        Ok(Self {
            delta0_nm,
            delta0_tilde_nm,
            overlayer_nm,
            lambda_p_al_nm,
            lambda_p_au_nm,
        })
    }

    pub fn delta0_nm(&self) -> f64 { self.delta0_nm }
    pub fn delta0_tilde_nm(&self) -> f64 { self.delta0_tilde_nm }
    pub fn overlayer_nm(&self) -> f64 { self.overlayer_nm }
    pub fn lambda_p_al_nm(&self) -> f64 { self.lambda_p_al_nm }
    pub fn lambda_p_au_nm(&self) -> f64 { self.lambda_p_au_nm }
}

impl Default for MaterialStack {
    /// 300 nm Al under a 20 nm 60%Au/40%Pd cap: δ₀ = 16 nm, δ̃₀ = 80 nm,
    /// λp = 100 nm (Al) and 500 nm (Au).
    fn default() -> Self {
        Self {
            delta0_nm: 16.0,
            delta0_tilde_nm: 80.0,
            overlayer_nm: 20.0,
            lambda_p_al_nm: 100.0,
            lambda_p_au_nm: 500.0,
        }
    }
}

/// Effective e-folding depth through the layered stack:
/// δe = (1 − Δ/δ̃₀)·δ₀ + Δ.
pub fn effective_depth(stack: &MaterialStack) -> f64 {
    (1.0 - stack.overlayer_nm / stack.delta0_tilde_nm) * stack.delta0_nm + stack.overlayer_nm
}

/// Second-order plate–plate factor 1 − (16/3)x + 24x², x = δ/a ∈ [0, 0.2].
pub fn plate_factor_order2(x: f64) -> Result<f64> {
    check_range(x, 0.2, "plate_factor_order2")?;
    Ok(1.0 - 16.0 / 3.0 * x + 24.0 * x * x)
}

/// Interpolation factor (1 + (11/3)x)^(−16/11) on x = δe/a ∈ [0, 0.2];
/// strictly positive, strictly decreasing, zero limit as x → ∞.
pub fn plate_factor_interp(x: f64) -> Result<f64> {
    check_range(x, 0.2, "plate_factor_interp")?;
    Ok((1.0 + 11.0 / 3.0 * x).powf(-16.0 / 11.0))
}

/// Where an x = δ/a value sits relative to the sphere factor's range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorValidity {
    /// x ≤ 0.2, the range the interpolation formula is good for.
    Nominal,
    /// 0.2 < x ≤ 0.3: accepted, needed for the deepest roughness-shifted
    /// distances, but the fourth-order polynomial is extrapolating.
    Extended,
    Invalid,
}

pub fn sphere_factor_validity(x: f64) -> FactorValidity {
    if !(x.is_finite() && (0.0..=0.3).contains(&x)) {
        FactorValidity::Invalid
    } else if x <= 0.2 {
        FactorValidity::Nominal
    } else {
        FactorValidity::Extended
    }
}

/// Fourth-order sphere–plate conductivity factor
/// 1 − 4x + (72/5)x² − (152/3)x³ + (532/3)x⁴ on x = δ/a ∈ [0, 0.3].
pub fn sphere_factor_order4(x: f64) -> Result<f64> {
    if sphere_factor_validity(x) == FactorValidity::Invalid {
        return Err(CasimirError::OutOfValidity(format!(
            "sphere conductivity factor requires delta/a in [0, 0.3], got {x}"
        )));
    }
    Ok(sphere_factor_raw(x))
}

/// The fixed printed polynomial, no range check; callers validate first.
pub(crate) fn sphere_factor_raw(x: f64) -> f64 {
    1.0 - 4.0 * x + 72.0 / 5.0 * x * x - 152.0 / 3.0 * x.powi(3) + 532.0 / 3.0 * x.powi(4)
}

fn check_range(x: f64, hi: f64, what: &str) -> Result<()> {
    if !(x.is_finite() && (0.0..=hi).contains(&x)) {
        return Err(CasimirError::OutOfValidity(format!(
            "{what} requires delta/a in [0, {hi}], got {x}"
        )));
    }
    Ok(())
}
