//! Shared domain types: geometry, force curves and correction breakdowns.

use crate::constants::DEFAULT_SPHERE_RADIUS_UM;
use crate::error::{CasimirError, Result};

/// Sphere above an (effectively infinite) plate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereGeometry {
    radius_um: f64,
}

impl SphereGeometry {
    pub fn new(radius_um: f64) -> Result<Self> {
        if !(radius_um.is_finite() && radius_um > 0.0) {
            return Err(CasimirError::InvalidInput(format!(
                "sphere radius must be positive and finite, got {radius_um} um"
            )));
        }
        Ok(Self { radius_um })
    }

    pub fn radius_um(&self) -> f64 {
        self.radius_um
    }

    pub fn radius_nm(&self) -> f64 {
        self.radius_um * 1e3
    }

    pub fn radius_m(&self) -> f64 {
        self.radius_um * 1e-6
    }
}

impl Default for SphereGeometry {
    fn default() -> Self {
        Self {
            radius_um: DEFAULT_SPHERE_RADIUS_UM,
        }
    }
}

/// Which pair of surfaces a separation value refers to.
///
/// The measurement quotes distances both between the outer Au/Pd layers (`a`)
/// and between the underlying Al layers (`a + 2Δ`). Mixing the two silently
/// is the single easiest way to corrupt a comparison, so the convention is
/// always explicit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparationConvention {
    AuPdSurfaces,
    AlSurfaces,
}

impl SeparationConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            SeparationConvention::AuPdSurfaces => "au_pd",
            SeparationConvention::AlSurfaces => "al",
        }
    }
}

/// One (separation, force) sample of a force curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceSample {
    pub separation_nm: f64,
    pub force_pn: f64,
}

/// An ordered set of (separation, force) samples.
///
/// Separations are strictly increasing and positive; forces are signed, with
/// attraction negative wherever a sign convention matters.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceCurve {
    samples: Vec<ForceSample>,
    convention: SeparationConvention,
}

impl ForceCurve {
    pub fn new(samples: Vec<ForceSample>, convention: SeparationConvention) -> Result<Self> {
        if samples.is_empty() {
            return Err(CasimirError::InvalidInput("force curve is empty".into()));
        }
        let mut prev = 0.0;
        for (i, s) in samples.iter().enumerate() {
            if !s.separation_nm.is_finite() || s.separation_nm <= 0.0 {
                return Err(CasimirError::InvalidInput(format!(
                    "separation at index {i} must be positive and finite, got {}",
                    s.separation_nm
                )));
            }
            if s.separation_nm <= prev {
                return Err(CasimirError::InvalidInput(format!(
                    "separations must be strictly increasing (index {i}: {} after {prev})",
                    s.separation_nm
                )));
            }
            if !s.force_pn.is_finite() {
                return Err(CasimirError::InvalidInput(format!(
                    "force at index {i} is not finite"
                )));
            }
            prev = s.separation_nm;
        }
        Ok(Self { samples, convention })
    }

    /// Internal constructor for curves whose separations are already known to
    /// satisfy the invariants (e.g. force-only transformations).
    pub(crate) fn from_validated(
        samples: Vec<ForceSample>,
        convention: SeparationConvention,
    ) -> Self {
        Self { samples, convention }
    }

    pub fn samples(&self) -> &[ForceSample] {
        &self.samples
    }

    pub fn convention(&self) -> SeparationConvention {
        self.convention
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Regime a separation falls in, relative to the configured boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    SmallDistance,
    LargeDistance,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::SmallDistance => "small",
            Regime::LargeDistance => "large",
        }
    }
}

/// Per-separation force decomposition.
///
/// All four force fields are magnitudes in pN of attractive forces; the base
/// separation they refer to follows the regime convention (Al separations in
/// the small-distance regime, Au/Pd in the large-distance regime).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionBreakdown {
    /// Input separation this row was computed for (in the caller's convention).
    pub separation_nm: f64,
    /// Ideal-metal base force magnitude.
    pub f0_pn: f64,
    /// Roughness-corrected force magnitude (six-distance sum, no conductivity).
    pub f_rough_pn: f64,
    /// Conductivity-corrected force magnitude (no roughness).
    pub f_cond_pn: f64,
    /// Combined correction (regime-selected formula).
    pub f_combined_pn: f64,
    pub regime: Regime,
}
