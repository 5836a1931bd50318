//! Subcommand implementations.

use casimir_core::{
    breakdown_grid, calibrate_force_constant, check_lateral_validity, combined_auto,
    default_thresholds, estimate_residual_potential, f0_ideal, fit_systematics, load_height_map,
    psi, rms_deviation, segment_three_levels, solve_zero_level, subtract_systematics,
    synthesize_curve, ForceCurve, ForceSample, PsiQuadratureOptions, ScenarioConfig,
    SeparationConvention, SystematicsParams, DEFAULT_LATERAL_MARGIN,
};
use serde_json::json;
use std::path::Path;

use crate::cli::{CalibrateArgs, FitArgs, ForceArgs, MapArgs, PsiArgs, SynthArgs};
use crate::config::{ConventionKey, RunConfig, TheoryKey};
use crate::io;
use crate::CliError;

fn linspace(min: f64, max: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if !(min.is_finite() && max.is_finite() && min > 0.0 && min < max) {
        return Err(CliError::config(format!(
            "grid bounds must satisfy 0 < min < max, got [{min}, {max}]"
        )));
    }
    if points < 2 {
        return Err(CliError::config(format!("grid needs at least 2 points, got {points}")));
    }
    let step = (max - min) / (points - 1) as f64;
    Ok((0..points).map(|i| min + step * i as f64).collect())
}

/// Theory curve at an absolute separation in the given convention.
fn theory_fn(
    kind: TheoryKey,
    convention: SeparationConvention,
    scenario: ScenarioConfig,
) -> impl Fn(f64) -> f64 {
    move |separation_nm: f64| match kind {
        TheoryKey::Ideal => {
            f0_ideal(separation_nm, scenario.geometry.radius_um()).unwrap_or(f64::NAN)
        }
        TheoryKey::Combined => {
            let aupd = match convention {
                SeparationConvention::AuPdSurfaces => separation_nm,
                SeparationConvention::AlSurfaces => {
                    separation_nm - 2.0 * scenario.stack.overlayer_nm()
                }
            };
            combined_auto(aupd, &scenario).unwrap_or(f64::NAN)
        }
    }
}

pub fn cmd_force(cfg: &RunConfig, args: &ForceArgs) -> Result<(), CliError> {
    let scenario = cfg.scenario()?;
    let min = args.min_nm.or(cfg.force.min_nm).unwrap_or(80.0);
    let max = args.max_nm.or(cfg.force.max_nm).unwrap_or(910.0);
    let points = args.points.or(cfg.force.points).unwrap_or(200);
    let convention: SeparationConvention = args
        .convention
        .or(cfg.force.convention)
        .unwrap_or(ConventionKey::AuPd)
        .into();
    let grid = linspace(min, max, points)?;
    let rows = breakdown_grid(&grid, &scenario, convention).map_err(CliError::from_config)?;
    let csv = io::breakdown_to_csv(&grid, &rows, convention);
    io::emit(args.out.as_deref().or(cfg.force.out_csv.as_deref()), &csv)
}

pub fn cmd_synth(cfg: &RunConfig, args: &SynthArgs) -> Result<(), CliError> {
    let scenario = cfg.scenario()?;
    let seed = args
        .seed
        .or(cfg.synth.seed)
        .ok_or_else(|| CliError::config("synth requires a seed (config synth.seed or --seed)".into()))?;
    let theory_kind = args.theory.or(cfg.synth.theory).unwrap_or(TheoryKey::Combined);
    let convention_key = args.convention.or(cfg.synth.convention).unwrap_or(ConventionKey::AuPd);
    let convention: SeparationConvention = convention_key.into();
    let min = args.grid_min_nm.or(cfg.synth.grid_min_nm).unwrap_or(80.0);
    let max = args.grid_max_nm.or(cfg.synth.grid_max_nm).unwrap_or(910.0);
    let points = args.points.or(cfg.synth.points).unwrap_or(223);
    let params = SystematicsParams {
        a0_nm: args.a0_nm.or(cfg.synth.a0_nm).unwrap_or(0.0),
        b_nn_nm: args.b_nn_nm.or(cfg.synth.b_nn_nm).unwrap_or(0.0),
        c_pn_per_nm: args.c_pn_per_nm.or(cfg.synth.c_pn_per_nm).unwrap_or(0.0),
        e_pn: args.e_pn.or(cfg.synth.e_pn).unwrap_or(0.0),
    };
    let noise = args.noise_sigma_pn.or(cfg.synth.noise_sigma_pn).unwrap_or(0.0);
    let grid = linspace(min, max, points)?;
    let theory = theory_fn(theory_kind, convention, scenario);
    let curve = synthesize_curve(&theory, &grid, &params, noise, seed, convention)
        .map_err(CliError::from_numerical)?;
    if curve.samples().iter().any(|s| !s.force_pn.is_finite()) {
        return Err(CliError::numerical(
            "theory evaluation failed on the requested grid".into(),
        ));
    }
    io::emit(
        args.out.as_deref().or(cfg.synth.out_csv.as_deref()),
        &io::curve_to_csv(&curve),
    )
}

pub fn cmd_fit(cfg: &RunConfig, args: &FitArgs) -> Result<(), CliError> {
    let scenario = cfg.scenario()?;
    let curve_path = args
        .curve
        .clone()
        .or(cfg.fit.curve_csv.clone())
        .ok_or_else(|| CliError::config("fit requires a curve (config fit.curve_csv or --curve)".into()))?;
    let theory_kind = args.theory.or(cfg.fit.theory).unwrap_or(TheoryKey::Combined);
    let convention_key = args.convention.or(cfg.fit.convention).unwrap_or(ConventionKey::Al);
    let convention: SeparationConvention = convention_key.into();
    let b_nn_nm = args.b_nn_nm.or(cfg.fit.b_nn_nm).unwrap_or(-2.8);
    let a0_bounds = (
        cfg.fit.a0_min_nm.unwrap_or(115.0),
        cfg.fit.a0_max_nm.unwrap_or(125.0),
    );
    let region_min = args.region_min_nm.or(cfg.fit.region_min_nm).unwrap_or(500.0);

    let curve = io::read_curve_csv(Path::new(&curve_path), convention)?;
    let region1_samples: Vec<ForceSample> = curve
        .samples()
        .iter()
        .copied()
        .filter(|s| s.separation_nm > region_min)
        .collect();
    if region1_samples.is_empty() {
        return Err(CliError::input(format!(
            "no samples above the region-1 boundary {region_min} nm"
        )));
    }
    let region1 =
        ForceCurve::new(region1_samples, convention).map_err(CliError::from_input)?;
    let theory = theory_fn(theory_kind, convention, scenario);
    let fit = fit_systematics(&region1, &theory, b_nn_nm, a0_bounds)
        .map_err(CliError::from_numerical)?;

    // Reduce the full curve: shift to absolute separations, subtract.
    let absolute = ForceCurve::new(
        curve
            .samples()
            .iter()
            .map(|s| ForceSample {
                separation_nm: s.separation_nm + fit.a0_nm,
                force_pn: s.force_pn,
            })
            .collect(),
        convention,
    )
    .map_err(CliError::from_numerical)?;
    let reduced = subtract_systematics(&absolute, &fit);

    let default_range = (
        reduced.samples().first().unwrap().separation_nm,
        reduced.samples().last().unwrap().separation_nm,
    );
    let ranges = cfg.fit.rms_ranges_nm.clone().unwrap_or(vec![default_range]);
    let rms_entries: Vec<serde_json::Value> = ranges
        .iter()
        .map(|&(lo, hi)| match rms_deviation(&theory, &reduced, (lo, hi)) {
            Ok(r) => json!({
                "min_nm": lo,
                "max_nm": hi,
                "n_points": r.n_points,
                "sigma_pN": r.sigma_pn,
            }),
            Err(e) => json!({
                "min_nm": lo,
                "max_nm": hi,
                "error": e.to_string(),
            }),
        })
        .collect();

    let report = json!({
        "fit": {
            "a0_nm": fit.a0_nm,
            "b_nN_nm": fit.b_nn_nm,
            "c_pN_per_nm": fit.c_pn_per_nm,
            "e_pN": fit.e_pn,
            "chi2": fit.chi2,
            "n_region1": region1.len(),
        },
        "rms": rms_entries,
    });
    let fit_out = args.out_fit.as_deref().or(cfg.fit.out_fit_json.as_deref());
    io::emit(fit_out, &format!("{:#}\n", report))?;
    if let Some(path) = args
        .out_reduced
        .as_deref()
        .or(cfg.fit.out_reduced_csv.as_deref())
    {
        io::write_atomic(Path::new(path), &io::curve_to_csv(&reduced))?;
    }
    Ok(())
}

pub fn cmd_analyze_map(cfg: &RunConfig, args: &MapArgs) -> Result<(), CliError> {
    let scenario = cfg.scenario()?;
    let map_path = args
        .map
        .clone()
        .or(cfg.map.map_csv.clone())
        .ok_or_else(|| CliError::config("analyze-map requires a map (config map.map_csv or --map)".into()))?;
    let map = load_height_map(Path::new(&map_path)).map_err(CliError::from_input)?;
    let (t_low, t_high) = match (
        args.t_low_nm.or(cfg.map.t_low_nm),
        args.t_high_nm.or(cfg.map.t_high_nm),
    ) {
        (Some(lo), Some(hi)) => (lo, hi),
        (None, None) => default_thresholds(&map),
        _ => {
            return Err(CliError::config(
                "thresholds must be given both or neither".into(),
            ))
        }
    };
    let seg = segment_three_levels(&map, t_low, t_high).map_err(CliError::from_input)?;
    let model = solve_zero_level(&seg.levels);
    let feature_plate = cfg.map.feature_plate_nm.unwrap_or(250.0);
    let feature_sphere = cfg.map.feature_sphere_nm.unwrap_or(250.0);
    let separation = cfg.map.separation_nm.unwrap_or(80.0);
    let validity = check_lateral_validity(
        feature_plate,
        feature_sphere,
        separation,
        scenario.geometry.radius_um(),
        DEFAULT_LATERAL_MARGIN,
    )
    .map_err(CliError::from_config)?;
    let report = json!({
        "thresholds_nm": [t_low, t_high],
        "v1": seg.levels.v1(),
        "v2": seg.levels.v2(),
        "v0": seg.levels.v0(),
        "h1_nm": seg.levels.h1_nm(),
        "h2_nm": seg.levels.h2_nm(),
        "h0_nm": seg.levels.h0_nm(),
        "H_nm": model.zero_level_nm(),
        "A_nm": model.amplitude_nm(),
        "beta1": model.beta1(),
        "beta2": model.beta2(),
        "flat": model.is_flat(),
        "empty_classes": seg.empty_classes,
        "lateral_validity": {
            "ok": validity.ok,
            "max_feature_nm": validity.max_feature_nm,
            "sqrt_aR_nm": validity.sqrt_a_r_nm,
            "limit_nm": validity.limit_nm,
            "separation_nm": separation,
        },
    });
    io::emit(
        args.out.as_deref().or(cfg.map.out_json.as_deref()),
        &format!("{:#}\n", report),
    )
}

pub fn cmd_calibrate(cfg: &RunConfig, args: &CalibrateArgs) -> Result<(), CliError> {
    let scenario = cfg.scenario()?;
    let radius_um = scenario.geometry.radius_um();
    let v2_v = args.v2_mv.or(cfg.calibrate.v2_mv).unwrap_or(29.0) * 1e-3;
    let rel_tol = cfg.calibrate.series_rel_tol.unwrap_or(1e-9);
    let records_path = args.records.clone().or(cfg.calibrate.records_csv.clone());
    let pairs_path = args.pairs.clone().or(cfg.calibrate.pairs_csv.clone());
    if records_path.is_none() && pairs_path.is_none() {
        return Err(CliError::config(
            "calibrate needs calibration records (--records) and/or voltage pairs (--pairs)".into(),
        ));
    }
    let mut report = serde_json::Map::new();
    if let Some(path) = records_path {
        let records = io::read_records_csv(Path::new(&path))?;
        let fit = calibrate_force_constant(&records, v2_v, radius_um, rel_tol)
            .map_err(CliError::from_numerical)?;
        report.insert("k_N_per_m".into(), json!(fit.k_n_per_m));
        report.insert("n_used".into(), json!(fit.n_used));
        report.insert("n_excluded".into(), json!(fit.n_excluded));
    }
    if let Some(path) = pairs_path {
        let pairs = io::read_pairs_csv(Path::new(&path))?;
        let separation = args
            .separation_nm
            .or(cfg.calibrate.separation_nm)
            .ok_or_else(|| {
                CliError::config("residual-potential estimation needs --separation-nm".into())
            })?;
        let v2 = estimate_residual_potential(&pairs, separation, radius_um, rel_tol)
            .map_err(CliError::from_numerical)?;
        report.insert("v2_mV".into(), json!(v2 * 1e3));
    }
    println!("{:#}", serde_json::Value::Object(report));
    Ok(())
}

pub fn cmd_psi(cfg: &RunConfig, args: &PsiArgs) -> Result<(), CliError> {
    let eps1 = args
        .eps1
        .or(cfg.psi.eps1)
        .ok_or_else(|| CliError::config("psi requires --eps1 (or config psi.eps1)".into()))?;
    let eps2 = args
        .eps2
        .or(cfg.psi.eps2)
        .ok_or_else(|| CliError::config("psi requires --eps2 (or config psi.eps2)".into()))?;
    let defaults = PsiQuadratureOptions::default();
    let opts = PsiQuadratureOptions {
        rel_tolerance: args
            .rel_tolerance
            .or(cfg.psi.rel_tolerance)
            .unwrap_or(defaults.rel_tolerance),
        x_cutoff: cfg.psi.x_cutoff.unwrap_or(defaults.x_cutoff),
        p_cutoff: cfg.psi.p_cutoff.unwrap_or(defaults.p_cutoff),
    };
    let est = psi(eps1, eps2, &opts).map_err(CliError::from_numerical)?;
    let report = json!({
        "eps1": eps1,
        "eps2": eps2,
        "psi": est.value,
        "abs_error": est.abs_error,
        "ratio_to_ideal": est.value / casimir_core::constants::IDEAL_METAL_PSI,
    });
    println!("{:#}", report);
    Ok(())
}
