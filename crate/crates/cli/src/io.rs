//! File I/O: atomic writes, force-curve and breakdown CSV, calibration CSV.
//!
//! Numbers are serialized with 12 significant digits; CSV files parse back
//! losslessly at that precision.

use casimir_core::{
    CalibrationRecord, CorrectionBreakdown, ForceCurve, ForceSample, SeparationConvention,
    VoltagePair,
};
use std::path::Path;

use crate::CliError;

pub const CURVE_HEADER: &str = "separation_nm,force_pN";
pub const BREAKDOWN_HEADER: &str =
    "separation_nm,convention,F0_pN,F_rough_pN,F_cond_pN,F_combined_pN,regime";

/// 12 significant digits.
pub fn fmt_g12(v: f64) -> String {
    format!("{v:.11e}")
}

/// Write via a temp file in the same directory, then rename into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    std::fs::write(&tmp, contents)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| CliError::input(format!("cannot rename into {}: {e}", path.display())))?;
    Ok(())
}

/// Emit to the file when a path is configured, otherwise to stdout.
pub fn emit(path: Option<&str>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(Path::new(p), contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

pub fn curve_to_csv(curve: &ForceCurve) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for s in curve.samples() {
        out.push_str(&fmt_g12(s.separation_nm));
        out.push(',');
        out.push_str(&fmt_g12(s.force_pn));
        out.push('\n');
    }
    out
}

pub fn read_curve_csv(path: &Path, convention: SeparationConvention) -> Result<ForceCurve, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == CURVE_HEADER => {}
        Some((_, header)) => {
            return Err(CliError::input(format!(
                "{}: expected header '{CURVE_HEADER}', got '{}'",
                path.display(),
                header.trim()
            )))
        }
        None => return Err(CliError::input(format!("{}: empty file", path.display()))),
    }
    let mut samples = Vec::new();
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut cells = line.split(',');
        let (sep, force) = match (cells.next(), cells.next(), cells.next()) {
            (Some(a), Some(f), None) => (a, f),
            _ => {
                return Err(CliError::input(format!(
                    "{}:{}: expected 2 columns",
                    path.display(),
                    idx + 1
                )))
            }
        };
        let parse = |cell: &str, what: &str| {
            cell.trim().parse::<f64>().map_err(|_| {
                CliError::input(format!(
                    "{}:{}: {what} is not a number: '{}'",
                    path.display(),
                    idx + 1,
                    cell.trim()
                ))
            })
        };
        samples.push(ForceSample {
            separation_nm: parse(sep, "separation")?,
            force_pn: parse(force, "force")?,
        });
    }
    ForceCurve::new(samples, convention).map_err(CliError::from_input)
}

pub fn breakdown_to_csv(
    separations: &[f64],
    rows: &[casimir_core::Result<CorrectionBreakdown>],
    convention: SeparationConvention,
) -> String {
    let mut out = String::from(BREAKDOWN_HEADER);
    out.push('\n');
    for (a, row) in separations.iter().zip(rows) {
        match row {
            Ok(b) => {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    fmt_g12(*a),
                    convention.as_str(),
                    fmt_g12(b.f0_pn),
                    fmt_g12(b.f_rough_pn),
                    fmt_g12(b.f_cond_pn),
                    fmt_g12(b.f_combined_pn),
                    b.regime.as_str()
                ));
            }
            Err(_) => {
                out.push_str(&format!(
                    "{},{},ERROR,ERROR,ERROR,ERROR,error\n",
                    fmt_g12(*a),
                    convention.as_str()
                ));
            }
        }
    }
    out
}

/// Calibration records: `v1_mV,separation_nm,deflection_nm`.
pub fn read_records_csv(path: &Path) -> Result<Vec<CalibrationRecord>, CliError> {
    parse_three_column(path, "v1_mV,separation_nm,deflection_nm").map(|rows| {
        rows.into_iter()
            .map(|(v1_mv, sep, defl)| CalibrationRecord {
                plate_voltage_v: v1_mv * 1e-3,
                separation_nm: sep,
                deflection_nm: defl,
            })
            .collect()
    })
}

/// Voltage pairs: `v1_mV,f_plus_pN,f_minus_pN`.
pub fn read_pairs_csv(path: &Path) -> Result<Vec<VoltagePair>, CliError> {
    parse_three_column(path, "v1_mV,f_plus_pN,f_minus_pN").map(|rows| {
        rows.into_iter()
            .map(|(v1_mv, fp, fm)| VoltagePair {
                plate_voltage_v: v1_mv * 1e-3,
                force_plus_pn: fp,
                force_minus_pn: fm,
            })
            .collect()
    })
}

fn parse_three_column(path: &Path, header: &str) -> Result<Vec<(f64, f64, f64)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == header => {}
        Some((_, h)) => {
            return Err(CliError::input(format!(
                "{}: expected header '{header}', got '{}'",
                path.display(),
                h.trim()
            )))
        }
        None => return Err(CliError::input(format!("{}: empty file", path.display()))),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 3 {
            return Err(CliError::input(format!(
                "{}:{}: expected 3 columns",
                path.display(),
                idx + 1
            )));
        }
        let mut vals = [0.0f64; 3];
        for (i, cell) in cells.iter().enumerate() {
            vals[i] = cell.trim().parse().map_err(|_| {
                CliError::input(format!(
                    "{}:{}: column {} is not a number: '{}'",
                    path.display(),
                    idx + 1,
                    i + 1,
                    cell.trim()
                ))
            })?;
        }
        rows.push((vals[0], vals[1], vals[2]));
    }
    if rows.is_empty() {
        return Err(CliError::input(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    Ok(rows)
}
