//! Systematic-error fitting, curve reduction, RMS statistics and the
//! synthetic-curve generator used for round-trip validation.
//!
//! The region-1 model is F = Fc(a + a₀) + B/(a + a₀) + C·(a + a₀) + E with B
//! fixed: the inverse-linear term is the residual electrostatic force, the
//! linear term the scattered-light coupling, E the offset and a₀ the absolute
//! separation at contact. For fixed a₀ the problem is linear in (C, E), so
//! the fit profiles them out in closed form and minimizes over a₀ by a
//! bracketed golden-section search.

use crate::error::{CasimirError, Result};
use crate::types::{ForceCurve, ForceSample, SeparationConvention};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Systematic-error model parameters used when generating curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystematicsParams {
    /// Absolute separation at contact, nm.
    pub a0_nm: f64,
    /// Electrostatic coefficient, nN·nm.
    pub b_nn_nm: f64,
    /// Scattered-light slope, pN/nm.
    pub c_pn_per_nm: f64,
    /// Signal offset, pN.
    pub e_pn: f64,
}

impl SystematicsParams {
    pub const ZERO: Self = Self {
        a0_nm: 0.0,
        b_nn_nm: 0.0,
        c_pn_per_nm: 0.0,
        e_pn: 0.0,
    };
}

/// Fitted systematics with the fixed B and the residual χ².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystematicsFit {
    pub a0_nm: f64,
    pub b_nn_nm: f64,
    pub c_pn_per_nm: f64,
    pub e_pn: f64,
    /// Unweighted sum of squared residuals, pN².
    pub chi2: f64,
}

/// RMS deviation between theory and data over a separation range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmsReport {
    pub range_nm: (f64, f64),
    pub n_points: usize,
    pub sigma_pn: f64,
}

fn b_term_pn(b_nn_nm: f64, separation_nm: f64) -> f64 {
    // nN·nm / nm = nN; to pN.
    b_nn_nm / separation_nm * 1e3
}

/// Rescale separations for piezo nonlinearity and shift them by the
/// per-point cantilever deflection F/k.
pub fn apply_separation_corrections(
    curve: &ForceCurve,
    piezo_linear_fraction: f64,
    k_n_per_m: f64,
) -> Result<ForceCurve> {
    if k_n_per_m.is_nan() || k_n_per_m <= 0.0 {
        return Err(CasimirError::InvalidInput(format!(
            "force constant must be positive, got {k_n_per_m} N/m"
        )));
    }
    if !piezo_linear_fraction.is_finite() {
        return Err(CasimirError::InvalidInput(
            "piezo correction must be finite".into(),
        ));
    }
    let samples = curve
        .samples()
        .iter()
        .map(|s| ForceSample {
            // pN / (N/m) = 1e-3 nm.
            separation_nm: s.separation_nm * (1.0 + piezo_linear_fraction)
                + s.force_pn * 1e-3 / k_n_per_m,
            force_pn: s.force_pn,
        })
        .collect();
    ForceCurve::new(samples, curve.convention())
}

/// Closed-form (C, E) and χ² for a fixed a₀.
fn profile_linear(
    region1: &ForceCurve,
    theory: &dyn Fn(f64) -> f64,
    b_nn_nm: f64,
    a0_nm: f64,
) -> Result<(f64, f64, f64)> {
    let n = region1.len() as f64;
    let mut sx = 0.0;
    let mut sy = 0.0;
    for s in region1.samples() {
        let x = s.separation_nm + a0_nm;
        let t = theory(x);
        if !t.is_finite() {
            return Err(CasimirError::DegenerateFit(format!(
                "theory returned a non-finite value at {x} nm"
            )));
        }
        sx += x;
        sy += s.force_pn - t - b_term_pn(b_nn_nm, x);
    }
    let (x_mean, y_mean) = (sx / n, sy / n);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for s in region1.samples() {
        let x = s.separation_nm + a0_nm - x_mean;
        let y = s.force_pn - theory(s.separation_nm + a0_nm)
            - b_term_pn(b_nn_nm, s.separation_nm + a0_nm)
            - y_mean;
        sxx += x * x;
        sxy += x * y;
    }
    if sxx <= 0.0 {
        return Err(CasimirError::DegenerateFit(
            "design matrix is singular: separations do not vary".into(),
        ));
    }
    let c = sxy / sxx;
    let e = y_mean - c * x_mean;
    let mut chi2 = 0.0;
    for s in region1.samples() {
        let x = s.separation_nm + a0_nm;
        let r = s.force_pn - theory(x) - b_term_pn(b_nn_nm, x) - c * x - e;
        chi2 += r * r;
    }
    Ok((c, e, chi2))
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Fit (a₀, C, E) with B fixed by profiling the linear pair and scanning a₀
/// over its bounds, then refining the best bracket by golden section.
pub fn fit_systematics(
    region1: &ForceCurve,
    theory: impl Fn(f64) -> f64,
    b_nn_nm: f64,
    a0_bounds_nm: (f64, f64),
) -> Result<SystematicsFit> {
    let (lo, hi) = a0_bounds_nm;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(CasimirError::InvalidInput(format!(
            "a0 bounds must be a nonempty interval, got [{lo}, {hi}]"
        )));
    }
    if region1.len() < 10 {
        return Err(CasimirError::InvalidInput(format!(
            "region-1 fit needs at least 10 points, got {}",
            region1.len()
        )));
    }
    let chi2_at = |a0: f64| -> Result<f64> {
        profile_linear(region1, &theory, b_nn_nm, a0).map(|(_, _, chi2)| chi2)
    };
    // Coarse scan guards against landing in a secondary local minimum.
    const SCAN: usize = 33;
    let step = (hi - lo) / (SCAN - 1) as f64;
    let mut best = (0usize, f64::INFINITY);
    for i in 0..SCAN {
        let chi2 = chi2_at(lo + i as f64 * step)?;
        if chi2 < best.1 {
            best = (i, chi2);
        }
    }
    let bracket_lo = lo + step * best.0.saturating_sub(1) as f64;
    let bracket_hi = lo + step * ((best.0 + 1).min(SCAN - 1)) as f64;
    let a0 = golden_section(
        |a0| chi2_at(a0).unwrap_or(f64::INFINITY),
        bracket_lo,
        bracket_hi,
        1e-7,
    );
    let (c, e, chi2) = profile_linear(region1, &theory, b_nn_nm, a0)?;
    Ok(SystematicsFit {
        a0_nm: a0,
        b_nn_nm,
        c_pn_per_nm: c,
        e_pn: e,
        chi2,
    })
}

/// Remove the fitted systematics: (Fc)m = Fm − B/a − C·a − E. Separations
/// must already be absolute.
pub fn subtract_systematics(curve: &ForceCurve, fit: &SystematicsFit) -> ForceCurve {
    let samples = curve
        .samples()
        .iter()
        .map(|s| ForceSample {
            separation_nm: s.separation_nm,
            force_pn: s.force_pn
                - b_term_pn(fit.b_nn_nm, s.separation_nm)
                - fit.c_pn_per_nm * s.separation_nm
                - fit.e_pn,
        })
        .collect();
    ForceCurve::from_validated(samples, curve.convention())
}

/// RMS deviation σ = √(Σ(F_th − F_exp)²/N) over points inside the closed range.
pub fn rms_deviation(
    theory: impl Fn(f64) -> f64,
    data: &ForceCurve,
    range_nm: (f64, f64),
) -> Result<RmsReport> {
    let (lo, hi) = range_nm;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(CasimirError::InvalidInput(format!(
            "rms range must be a valid interval, got [{lo}, {hi}]"
        )));
    }
    let mut n = 0usize;
    let mut ss = 0.0;
    for s in data.samples() {
        if s.separation_nm >= lo && s.separation_nm <= hi {
            let t = theory(s.separation_nm);
            if !t.is_finite() {
                return Err(CasimirError::DegenerateFit(format!(
                    "theory returned a non-finite value at {} nm",
                    s.separation_nm
                )));
            }
            ss += (t - s.force_pn).powi(2);
            n += 1;
        }
    }
    if n == 0 {
        return Err(CasimirError::InvalidInput(format!(
            "no data points in range [{lo}, {hi}] nm"
        )));
    }
    Ok(RmsReport {
        range_nm,
        n_points: n,
        sigma_pn: (ss / n as f64).sqrt(),
    })
}

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; u1 in (0, 1] so the log is finite.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Generate a measurement-like curve on `grid_nm` (relative separations):
/// F = theory(a) + B/a + C·a + E + N(0, σ²) at a = grid + a₀.
/// Deterministic for a fixed seed.
pub fn synthesize_curve(
    theory: impl Fn(f64) -> f64,
    grid_nm: &[f64],
    systematics: &SystematicsParams,
    noise_sigma_pn: f64,
    seed: u64,
    convention: SeparationConvention,
) -> Result<ForceCurve> {
    if !(noise_sigma_pn.is_finite() && noise_sigma_pn >= 0.0) {
        return Err(CasimirError::InvalidInput(format!(
            "noise sigma must be nonnegative, got {noise_sigma_pn}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(grid_nm.len());
    for &r in grid_nm {
        let a = r + systematics.a0_nm;
        if a.is_nan() || a <= 0.0 {
            return Err(CasimirError::InvalidInput(format!(
                "absolute separation {a} nm is not positive"
            )));
        }
        let force = theory(a)
            + b_term_pn(systematics.b_nn_nm, a)
            + systematics.c_pn_per_nm * a
            + systematics.e_pn
            + noise_sigma_pn * standard_normal(&mut rng);
        samples.push(ForceSample {
            separation_nm: r,
            force_pn: force,
        });
    }
    ForceCurve::new(samples, convention)
}

/// Average several scans sharing the same separation grid.
pub fn mean_curve(curves: &[ForceCurve]) -> Result<ForceCurve> {
    let first = curves
        .first()
        .ok_or_else(|| CasimirError::InvalidInput("no curves to average".into()))?;
    for c in &curves[1..] {
        if c.convention() != first.convention() || c.len() != first.len() {
            return Err(CasimirError::InvalidInput(
                "curves must share convention and length".into(),
            ));
        }
        for (a, b) in c.samples().iter().zip(first.samples()) {
            if a.separation_nm != b.separation_nm {
                return Err(CasimirError::InvalidInput(
                    "curves must share the separation grid".into(),
                ));
            }
        }
    }
    let n = curves.len() as f64;
    let samples = first
        .samples()
        .iter()
        .enumerate()
        .map(|(i, s)| ForceSample {
            separation_nm: s.separation_nm,
            force_pn: curves.iter().map(|c| c.samples()[i].force_pn).sum::<f64>() / n,
        })
        .collect();
    Ok(ForceCurve::from_validated(samples, first.convention()))
}
