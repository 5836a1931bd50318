//! Three-level surface roughness model.
//!
//! The measured surfaces are modeled as tall crystals (height h₁, area
//! fraction v₁), intermediate crystals (h₂, v₂) and a stochastic background
//! of height h₀ contributing h₀/2 on average (fraction v₀). From these the
//! zero-distortion level H, amplitude A = h₁ − H and the relative levels
//! β₁ = (h₂−H)/A, β₂ = (H−h₀/2)/A follow, and the corrected force is either
//! a fourth-order series in A/a or an exact probability-weighted sum of the
//! base force over the six distinct surface-to-surface distances.

use crate::error::{CasimirError, Result};

/// Raw three-level description: crystal heights and area fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoughnessLevels {
    h1_nm: f64,
    h2_nm: f64,
    h0_nm: f64,
    v1: f64,
    v2: f64,
    v0: f64,
}

impl RoughnessLevels {
    /// Validates: fractions in [0,1] summing to 1 (within 1e-12) and
    /// h₁ ≥ h₂ ≥ h₀/2 ≥ 0. Equal heights describe a flat surface.
    pub fn new(h1_nm: f64, h2_nm: f64, h0_nm: f64, v1: f64, v2: f64, v0: f64) -> Result<Self> {
        for (name, v) in [("v1", v1), ("v2", v2), ("v0", v0)] {
            if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
                return Err(CasimirError::InvalidInput(format!(
                    "area fraction {name} must lie in [0, 1], got {v}"
                )));
            }
        }
        if (v1 + v2 + v0 - 1.0).abs() > 1e-12 {
            return Err(CasimirError::InvalidInput(format!(
                "area fractions must sum to 1, got {}",
                v1 + v2 + v0
            )));
        }
        for (name, h) in [("h1", h1_nm), ("h2", h2_nm), ("h0", h0_nm)] {
            if !h.is_finite() {
                return Err(CasimirError::InvalidInput(format!("height {name} is not finite")));
            }
        }
        if !(h1_nm >= h2_nm && h2_nm >= h0_nm / 2.0 && h0_nm >= 0.0) {
            return Err(CasimirError::InvalidInput(format!(
                "heights must satisfy h1 >= h2 >= h0/2 >= 0, got ({h1_nm}, {h2_nm}, {h0_nm})"
            )));
        }
        Ok(Self { h1_nm, h2_nm, h0_nm, v1, v2, v0 })
    }

    pub fn h1_nm(&self) -> f64 { self.h1_nm }
    pub fn h2_nm(&self) -> f64 { self.h2_nm }
    pub fn h0_nm(&self) -> f64 { self.h0_nm }
    pub fn v1(&self) -> f64 { self.v1 }
    pub fn v2(&self) -> f64 { self.v2 }
    pub fn v0(&self) -> f64 { self.v0 }
}

impl Default for RoughnessLevels {
    /// The AFM/SEM-measured values for the Al + Au/Pd coated surfaces:
    /// heights 40/20/10 nm with fractions 0.11/0.25/0.64.
    fn default() -> Self {
        Self {
            h1_nm: 40.0,
            h2_nm: 20.0,
            h0_nm: 10.0,
            v1: 0.11,
            v2: 0.25,
            v0: 0.64,
        }
    }
}

/// Derived roughness model: zero level, amplitude and relative levels.
///
/// β₁ and β₂ are always recomputed from the level equations. The printed
/// historical values β₁ ≈ 0.231, β₂ ≈ 0.346 are inconsistent with those
/// equations (they violate the zero cross-moment identity) and are never
/// used; see [`HISTORICAL_BETA1`], [`HISTORICAL_BETA2`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoughnessModel {
    levels: RoughnessLevels,
    zero_level_nm: f64,
    amplitude_nm: f64,
    beta1: f64,
    beta2: f64,
}

/// Printed historical value of β₁, kept for documentation only.
pub const HISTORICAL_BETA1: f64 = 0.231;
/// Printed historical value of β₂, kept for documentation only.
pub const HISTORICAL_BETA2: f64 = 0.346;

impl RoughnessModel {
    pub fn levels(&self) -> &RoughnessLevels { &self.levels }
    /// H: the level about which the area-averaged distortion vanishes.
    pub fn zero_level_nm(&self) -> f64 { self.zero_level_nm }
    /// A = h₁ − H.
    pub fn amplitude_nm(&self) -> f64 { self.amplitude_nm }
    pub fn beta1(&self) -> f64 { self.beta1 }
    pub fn beta2(&self) -> f64 { self.beta2 }
    /// True when the amplitude is zero and every roughness factor is 1.
    pub fn is_flat(&self) -> bool { self.amplitude_nm == 0.0 }
}

impl Default for RoughnessModel {
    fn default() -> Self {
        solve_zero_level(&RoughnessLevels::default())
    }
}

/// Solve the zero-level balance (h₁−H)v₁ + (h₂−H)v₂ − (H−h₀/2)v₀ = 0.
///
/// Because the fractions sum to one this is the closed form
/// H = h₁v₁ + h₂v₂ + (h₀/2)v₀. Degenerate all-equal heights yield the
/// explicit flat result A = 0 with both betas zero.
pub fn solve_zero_level(levels: &RoughnessLevels) -> RoughnessModel {
    let h = levels.h1_nm * levels.v1 + levels.h2_nm * levels.v2 + 0.5 * levels.h0_nm * levels.v0;
    let amplitude = levels.h1_nm - h;
    // Height scale for the degeneracy cutoff; an amplitude below f64 noise
    // relative to the heights is a flat surface.
    let scale = levels.h1_nm.abs().max(1.0);
    if amplitude <= scale * 1e-12 {
        return RoughnessModel {
            levels: *levels,
            zero_level_nm: h,
            amplitude_nm: 0.0,
            beta1: 0.0,
            beta2: 0.0,
        };
    }
    RoughnessModel {
        levels: *levels,
        zero_level_nm: h,
        amplitude_nm: amplitude,
        beta1: (levels.h2_nm - h) / amplitude,
        beta2: (h - 0.5 * levels.h0_nm) / amplitude,
    }
}

/// Moments of the distortion distribution over one surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionMoments {
    /// ⟨⟨f²⟩⟩ = v₁ + β₁²v₂ + β₂²v₀.
    pub m2: f64,
    /// ⟨⟨f³⟩⟩ = v₁ + β₁³v₂ − β₂³v₀.
    pub m3: f64,
    /// ⟨⟨f⁴⟩⟩ = v₁ + β₁⁴v₂ + β₂⁴v₀.
    pub m4: f64,
    /// ⟨⟨f₁f₂⟩⟩ = −(v₁ + β₁v₂ − β₂v₀)²; identically zero when the betas come
    /// from the zero-level solution.
    pub cross: f64,
    /// ⟨⟨f₁²f₂²⟩⟩ = m₂².
    pub m22: f64,
}

/// Distribution moments for a model's three-level distortion function.
pub fn moments(model: &RoughnessModel) -> DistortionMoments {
    let l = &model.levels;
    let (b1, b2) = (model.beta1, model.beta2);
    let m2 = l.v1 + b1 * b1 * l.v2 + b2 * b2 * l.v0;
    DistortionMoments {
        m2,
        m3: l.v1 + b1.powi(3) * l.v2 - b2.powi(3) * l.v0,
        m4: l.v1 + b1.powi(4) * l.v2 + b2.powi(4) * l.v0,
        cross: -(l.v1 + b1 * l.v2 - b2 * l.v0).powi(2),
        m22: m2 * m2,
    }
}

/// Fourth-order roughness factor:
/// 1 + 12⟨⟨f²⟩⟩(A/a)² + 20⟨⟨f³⟩⟩(A/a)³ + 30[⟨⟨f⁴⟩⟩ + 3⟨⟨f²⟩⟩²](A/a)⁴.
pub fn roughness_factor_series(separation_nm: f64, model: &RoughnessModel) -> Result<f64> {
    if !(separation_nm.is_finite() && separation_nm > 0.0) {
        return Err(CasimirError::InvalidInput(format!(
            "separation must be positive, got {separation_nm} nm"
        )));
    }
    let ratio = model.amplitude_nm / separation_nm;
    if ratio >= 0.5 {
        return Err(CasimirError::OutOfValidity(format!(
            "series requires A/a < 0.5, got {ratio:.3}"
        )));
    }
    if model.is_flat() {
        return Ok(1.0);
    }
    let m = moments(model);
    Ok(1.0
        + 12.0 * m.m2 * ratio * ratio
        + 20.0 * m.m3 * ratio.powi(3)
        + 30.0 * (m.m4 + 3.0 * m.m2 * m.m2) * ratio.powi(4))
}

/// The six (probability, separation shift) pairs of the two-surface
/// three-level model; the local distance is a − shift. Weights sum to 1 and
/// the probability-weighted mean shift is zero.
pub fn six_distances(model: &RoughnessModel) -> [(f64, f64); 6] {
    let l = &model.levels;
    let a = model.amplitude_nm;
    let (b1, b2) = (model.beta1, model.beta2);
    [
        (l.v1 * l.v1, 2.0 * a),
        (2.0 * l.v1 * l.v2, a * (1.0 + b1)),
        (2.0 * l.v2 * l.v0, a * (b1 - b2)),
        (l.v0 * l.v0, -2.0 * a * b2),
        (l.v2 * l.v2, 2.0 * a * b1),
        (2.0 * l.v1 * l.v0, a * (1.0 - b2)),
    ]
}

/// Roughness-corrected force as the exact six-distance sum Σᵢ wᵢ·F(aᵢ).
///
/// `base_force` maps a separation in nm to a force in pN and is evaluated at
/// the six shifted distances, all positive when a > 2A.
pub fn roughness_force_exact6<F>(
    separation_nm: f64,
    model: &RoughnessModel,
    base_force: F,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let limit = 2.0 * model.amplitude_nm;
    if !(separation_nm.is_finite() && separation_nm > limit) {
        return Err(CasimirError::ContactRegime {
            separation_nm,
            limit_nm: limit,
        });
    }
    Ok(six_distances(model)
        .iter()
        .map(|&(w, shift)| w * base_force(separation_nm - shift))
        .sum())
}

/// Verdict of the lateral-size condition max(d_p, d_s) ≤ ρ·√(aR).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LateralValidity {
    pub ok: bool,
    /// Geometric scale √(a·R) in nm.
    pub sqrt_a_r_nm: f64,
    /// ρ·√(aR), the admissible feature size.
    pub limit_nm: f64,
    pub max_feature_nm: f64,
}

/// Default margin ρ making the condition comfortably satisfied.
pub const DEFAULT_LATERAL_MARGIN: f64 = 0.3;

/// Check that lateral distortion sizes are small against √(aR).
pub fn check_lateral_validity(
    d_plate_nm: f64,
    d_sphere_nm: f64,
    separation_nm: f64,
    radius_um: f64,
    margin: f64,
) -> Result<LateralValidity> {
    for (name, v) in [("d_plate", d_plate_nm), ("d_sphere", d_sphere_nm)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(CasimirError::InvalidInput(format!(
                "{name} must be nonnegative and finite, got {v}"
            )));
        }
    }
    for (name, v) in [
        ("separation", separation_nm),
        ("radius", radius_um),
        ("margin", margin),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(CasimirError::InvalidInput(format!(
                "{name} must be positive and finite, got {v}"
            )));
        }
    }
    let sqrt_a_r_nm = (separation_nm * radius_um * 1e3).sqrt();
    let limit_nm = margin * sqrt_a_r_nm;
    let max_feature_nm = d_plate_nm.max(d_sphere_nm);
    Ok(LateralValidity {
        ok: max_feature_nm <= limit_nm,
        sqrt_a_r_nm,
        limit_nm,
        max_feature_nm,
    })
}
