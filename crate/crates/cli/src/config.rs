//! Run configuration: one JSON document per run, every section optional
//! with measured-configuration defaults. Keys carry unit suffixes
//! (`_nm`, `_um`, `_pN`, `_mV`); unknown keys are rejected.

use casimir_core::{
    solve_zero_level, MaterialStack, RoughnessLevels, ScenarioConfig, SeparationConvention,
    SphereGeometry,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub radius_um: Option<f64>,
    pub stack: Option<StackConfig>,
    pub roughness: Option<RoughnessConfig>,
    pub regime_boundary_nm: Option<f64>,
    pub distance_offset_nm: Option<f64>,
    #[serde(default)]
    pub force: ForceConfig,
    #[serde(default)]
    pub psi: PsiConfig,
    #[serde(default)]
    pub synth: SynthConfig,
    #[serde(default)]
    pub fit: FitConfig,
    #[serde(default)]
    pub map: MapConfig,
    #[serde(default)]
    pub calibrate: CalibrateConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StackConfig {
    pub delta0_nm: f64,
    pub delta0_tilde_nm: f64,
    pub overlayer_nm: f64,
    pub lambda_p_al_nm: f64,
    pub lambda_p_au_nm: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoughnessConfig {
    pub h1_nm: f64,
    pub h2_nm: f64,
    pub h0_nm: f64,
    pub v1: f64,
    pub v2: f64,
    pub v0: f64,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ForceConfig {
    pub min_nm: Option<f64>,
    pub max_nm: Option<f64>,
    pub points: Option<usize>,
    pub convention: Option<ConventionKey>,
    pub out_csv: Option<String>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct PsiConfig {
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub rel_tolerance: Option<f64>,
    pub x_cutoff: Option<f64>,
    pub p_cutoff: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub theory: Option<TheoryKey>,
    pub convention: Option<ConventionKey>,
    pub grid_min_nm: Option<f64>,
    pub grid_max_nm: Option<f64>,
    pub points: Option<usize>,
    pub a0_nm: Option<f64>,
    #[serde(rename = "b_nN_nm")]
    pub b_nn_nm: Option<f64>,
    #[serde(rename = "c_pN_per_nm")]
    pub c_pn_per_nm: Option<f64>,
    #[serde(rename = "e_pN")]
    pub e_pn: Option<f64>,
    #[serde(rename = "noise_sigma_pN")]
    pub noise_sigma_pn: Option<f64>,
    pub seed: Option<u64>,
    pub out_csv: Option<String>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub curve_csv: Option<String>,
    pub theory: Option<TheoryKey>,
    pub convention: Option<ConventionKey>,
    #[serde(rename = "b_nN_nm")]
    pub b_nn_nm: Option<f64>,
    pub a0_min_nm: Option<f64>,
    pub a0_max_nm: Option<f64>,
    /// Region-1 selection: points with separations above this are fitted.
    pub region_min_nm: Option<f64>,
    pub rms_ranges_nm: Option<Vec<(f64, f64)>>,
    pub out_fit_json: Option<String>,
    pub out_reduced_csv: Option<String>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    pub map_csv: Option<String>,
    pub t_low_nm: Option<f64>,
    pub t_high_nm: Option<f64>,
    /// Lateral feature sizes for the validity verdict.
    pub feature_plate_nm: Option<f64>,
    pub feature_sphere_nm: Option<f64>,
    /// Smallest separation the verdict should hold at.
    pub separation_nm: Option<f64>,
    pub out_json: Option<String>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct CalibrateConfig {
    pub records_csv: Option<String>,
    pub pairs_csv: Option<String>,
    #[serde(rename = "v2_mV")]
    pub v2_mv: Option<f64>,
    /// Separation the voltage pairs were taken at.
    pub separation_nm: Option<f64>,
    pub series_rel_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ConventionKey {
    AuPd,
    Al,
}

impl From<ConventionKey> for SeparationConvention {
    fn from(k: ConventionKey) -> Self {
        match k {
            ConventionKey::AuPd => SeparationConvention::AuPdSurfaces,
            ConventionKey::Al => SeparationConvention::AlSurfaces,
        }
    }
}

impl std::str::FromStr for ConventionKey {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "au_pd" | "aupd" => Ok(ConventionKey::AuPd),
            "al" => Ok(ConventionKey::Al),
            other => Err(format!("unknown convention '{other}' (expected au_pd or al)")),
        }
    }
}

/// Which theory curve a command evaluates.
#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum TheoryKey {
    /// Ideal-metal base force, no corrections.
    Ideal,
    /// Regime-selected combined roughness + conductivity force.
    Combined,
}

impl std::str::FromStr for TheoryKey {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ideal" => Ok(TheoryKey::Ideal),
            "combined" => Ok(TheoryKey::Combined),
            other => Err(format!("unknown theory '{other}' (expected ideal or combined)")),
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&std::path::Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("invalid config {}: {e}", path.display())))
    }

    /// Assemble the scenario (geometry + stack + roughness + regime policy).
    pub fn scenario(&self) -> Result<ScenarioConfig, CliError> {
        let geometry = match self.radius_um {
            Some(r) => SphereGeometry::new(r).map_err(CliError::from_config)?,
            None => SphereGeometry::default(),
        };
        let stack = match &self.stack {
            Some(s) => MaterialStack::new(
                s.delta0_nm,
                s.delta0_tilde_nm,
                s.overlayer_nm,
                s.lambda_p_al_nm,
                s.lambda_p_au_nm,
            )
            .map_err(CliError::from_config)?,
            None => MaterialStack::default(),
        };
        let roughness = match &self.roughness {
            Some(r) => solve_zero_level(
                &RoughnessLevels::new(r.h1_nm, r.h2_nm, r.h0_nm, r.v1, r.v2, r.v0)
                    .map_err(CliError::from_config)?,
            ),
            None => solve_zero_level(&RoughnessLevels::default()),
        };
        let boundary = self.regime_boundary_nm.unwrap_or(stack.lambda_p_au_nm());
        let offset = self.distance_offset_nm.unwrap_or(0.0);
        ScenarioConfig::new(geometry, stack, roughness, boundary, offset)
            .map_err(CliError::from_config)
    }
}
