//! Casimir force between a rough, metal-coated sphere and plate.
//!
//! The library computes the sphere–plate Casimir force with fourth-order
//! surface-roughness and finite-conductivity corrections, and implements the
//! accompanying data-reduction pipeline: electrostatic calibration of the
//! cantilever, systematic-error fitting of approach curves and RMS
//! comparison of theory against measured force curves.
//!
//! Modules:
//!
//! * [`psi`]: the dimensionless Lifshitz reduction factor Ψ(ε₁, ε₂) by
//!   adaptive 2-D quadrature, and the ideal-metal base force.
//! * [`roughness`]: the three-level roughness model: zero-distortion level,
//!   amplitude, distortion moments, fourth-order series and the exact
//!   six-distance sum.
//! * [`conductivity`]: penetration-depth corrections: effective depth of a
//!   layered coating and the plate/sphere correction factors.
//! * [`combined`]: the final force formulas joining both corrections in the
//!   small- and large-distance regimes, with per-separation breakdowns.
//! * [`electrostatics`]: the sphere–plate electrostatic series, residual
//!   potential extraction and force-constant calibration.
//! * [`reduction`]: systematic-error fitting, curve reduction, RMS
//!   statistics and a seeded synthetic-curve generator.
//! * [`heightmap`]: AFM-style height-map ingestion, three-level
//!   segmentation and a synthetic map generator.
//!
//! Unit conventions: separations in nm, forces in pN (signed, attraction
//! negative; breakdown tables carry magnitudes), sphere radii in μm,
//! voltages in volts at the API (mV in file formats). Internal computation
//! is SI.

pub mod combined;
pub mod conductivity;
pub mod constants;
pub mod electrostatics;
pub mod error;
pub mod heightmap;
pub mod psi;
pub mod quad;
pub mod reduction;
pub mod roughness;
pub mod types;
pub mod units;

pub use combined::{
    breakdown_grid, breakdown_point, combined_auto, combined_large, combined_small, regime_for,
    regime_gap_report, RegimeGapReport, ScenarioConfig,
};
pub use conductivity::{
    effective_depth, plate_factor_interp, plate_factor_order2, sphere_factor_order4,
    sphere_factor_validity, FactorValidity, MaterialStack,
};
pub use electrostatics::{
    calibrate_force_constant, electrostatic_force, estimate_residual_potential,
    CalibrationRecord, ElectrostaticSetup, ForceConstantFit, VoltagePair,
};
pub use error::{CasimirError, Result};
pub use heightmap::{
    default_thresholds, generate_synthetic_map, load_height_map, save_height_map,
    segment_three_levels, HeightMap, SegmentedLevels,
};
pub use psi::{f0_ideal, f0_sphere_plate, psi, PsiEstimate, PsiQuadratureOptions};
pub use reduction::{
    apply_separation_corrections, fit_systematics, mean_curve, rms_deviation,
    subtract_systematics, synthesize_curve, RmsReport, SystematicsFit, SystematicsParams,
};
pub use roughness::{
    check_lateral_validity, moments, roughness_factor_series, roughness_force_exact6,
    six_distances, solve_zero_level, DistortionMoments, LateralValidity, RoughnessLevels,
    RoughnessModel, DEFAULT_LATERAL_MARGIN,
};
pub use types::{
    CorrectionBreakdown, ForceCurve, ForceSample, Regime, SeparationConvention, SphereGeometry,
};
pub use units::{convert_units, Unit};
