//! Fixed unit conversions used at the library boundaries.
//!
//! This is not a general units system: only the pairs the public interfaces
//! need (nm↔m, μm↔m, pN↔N, mV↔V) are supported, everything else is rejected.

use crate::error::{CasimirError, Result};

/// Units appearing in the public interfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Nanometer,
    Micrometer,
    Meter,
    Piconewton,
    Newton,
    Millivolt,
    Volt,
}

impl Unit {
    fn label(self) -> &'static str {
        match self {
            Unit::Nanometer => "nm",
            Unit::Micrometer => "um",
            Unit::Meter => "m",
            Unit::Piconewton => "pN",
            Unit::Newton => "N",
            Unit::Millivolt => "mV",
            Unit::Volt => "V",
        }
    }
}

/// Convert `value` between a supported unit pair. Exact power-of-ten scaling.
pub fn convert_units(value: f64, from: Unit, to: Unit) -> Result<f64> {
    use Unit::*;
    let scale = match (from, to) {
        (Nanometer, Meter) => 1e-9,
        (Meter, Nanometer) => 1e9,
        (Micrometer, Meter) => 1e-6,
        (Meter, Micrometer) => 1e6,
        (Piconewton, Newton) => 1e-12,
        (Newton, Piconewton) => 1e12,
        (Millivolt, Volt) => 1e-3,
        (Volt, Millivolt) => 1e3,
        _ => {
            return Err(CasimirError::UnsupportedUnitPair {
                from: from.label(),
                to: to.label(),
            })
        }
    };
    Ok(value * scale)
}
