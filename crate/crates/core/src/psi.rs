//! The dimensionless reduction factor Ψ(ε₁, ε₂) and the base sphere–plate force.
//!
//! Ψ is a double integral over x ∈ (0, ∞) and p ∈ (1, ∞) of two Fresnel-like
//! bracket terms weighted by x³/p², normalized so that the ideal-metal limit
//! is π/24. The base force scales as −Ψ·π²ħcR/(15a³).

use crate::constants::{HBAR_C_J_M, IDEAL_METAL_PSI};
use crate::error::{CasimirError, Result};
use crate::quad;

/// Controls for the Ψ quadrature.
#[derive(Debug, Clone, Copy)]
pub struct PsiQuadratureOptions {
    /// Requested relative tolerance on Ψ.
    pub rel_tolerance: f64,
    /// Upper truncation of the x integral; the integrand decays like e⁻ˣ.
    pub x_cutoff: f64,
    /// Truncation of the p integral; the remainder beyond it (an O(p⁻²)
    /// tail) is integrated separately under u = 1/p and added back.
    pub p_cutoff: f64,
}

impl Default for PsiQuadratureOptions {
    fn default() -> Self {
        Self {
            rel_tolerance: 1e-6,
            x_cutoff: 60.0,
            p_cutoff: 1e3,
        }
    }
}

impl PsiQuadratureOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tolerance > 0.0 && self.rel_tolerance <= 1e-3) {
            return Err(CasimirError::InvalidInput(format!(
                "rel_tolerance must be in (0, 1e-3], got {}",
                self.rel_tolerance
            )));
        }
        if !(self.x_cutoff >= 50.0 && self.x_cutoff.is_finite()) {
            return Err(CasimirError::InvalidInput(format!(
                "x_cutoff must be >= 50, got {}",
                self.x_cutoff
            )));
        }
        if !(self.p_cutoff >= 100.0 && self.p_cutoff.is_finite()) {
            return Err(CasimirError::InvalidInput(format!(
                "p_cutoff must be >= 100, got {}",
                self.p_cutoff
            )));
        }
        Ok(())
    }
}

/// Ψ value with its achieved absolute error bound.
#[derive(Debug, Clone, Copy)]
pub struct PsiEstimate {
    pub value: f64,
    pub abs_error: f64,
}

const PREFACTOR: f64 = 5.0 / (16.0 * std::f64::consts::PI * std::f64::consts::PI * std::f64::consts::PI);
const MAX_INTERVALS: usize = 4096;

/// The two bracket denominator factors Q₁, Q₂ at given (ε₁, ε₂, p).
///
/// Written in cancellation-free form:
///   s − p       = (ε − 1) / (s + p)
///   p ε − s     = (ε − 1)(p²(ε + 1) − 1) / (s + pε)
/// so Q₁ = [(s₁+p)(s₂+p)]² / [(ε₁−1)(ε₂−1)] ≥ 1 and
///    Q₂ = [(s₁+pε₁)(s₂+pε₂)]² / [(ε₁−1)(ε₂−1)(p²(ε₁+1)−1)(p²(ε₂+1)−1)] ≥ 1.
/// For ε = 1 both are +∞ and the corresponding term vanishes.
fn bracket_factors(eps1: f64, eps2: f64, p: f64) -> (f64, f64) {
    let s1 = (eps1 - 1.0 + p * p).sqrt();
    let s2 = (eps2 - 1.0 + p * p).sqrt();
    let em1 = (eps1 - 1.0) * (eps2 - 1.0);
    let q1 = ((s1 + p) * (s2 + p)).powi(2) / em1;
    let q2 = ((s1 + p * eps1) * (s2 + p * eps2)).powi(2)
        / (em1 * (p * p * (eps1 + 1.0) - 1.0) * (p * p * (eps2 + 1.0) - 1.0));
    (q1, q2)
}

/// x³ · [1/(Q₁eˣ − 1) + 1/(Q₂eˣ − 1)] with Qeˣ − 1 evaluated as
/// Q·expm1(x) + (Q − 1): all addends are nonnegative, so the x → 0 limit is
/// computed without cancellation and an infinite Q cleanly yields 0.
fn bracket_sum(x: f64, q1: f64, q2: f64) -> f64 {
    let ex = x.exp_m1();
    let term = |q: f64| {
        if q.is_finite() {
            let denom = q * ex + (q - 1.0);
            if denom > 0.0 {
                1.0 / denom
            } else {
                0.0
            }
        } else {
            0.0
        }
    };
    x * x * x * (term(q1) + term(q2))
}

/// Evaluate the reduction factor Ψ(ε₁, ε₂) by nested adaptive quadrature.
///
/// Requires finite ε ≥ 1; the ideal-metal value is the separate constant
/// [`IDEAL_METAL_PSI`], never computed here. Deterministic for fixed options.
pub fn psi(eps1: f64, eps2: f64, opts: &PsiQuadratureOptions) -> Result<PsiEstimate> {
    opts.validate()?;
    for (name, eps) in [("eps1", eps1), ("eps2", eps2)] {
        if !(eps.is_finite() && eps >= 1.0) {
            return Err(CasimirError::InvalidInput(format!(
                "{name} must be finite and >= 1, got {eps}"
            )));
        }
    }

    let inner_tol = opts.rel_tolerance / 20.0;
    let inner = |p: f64| -> f64 {
        let (q1, q2) = bracket_factors(eps1, eps2, p);
        quad::integrate(
            &|x| bracket_sum(x, q1, q2),
            0.0,
            opts.x_cutoff,
            inner_tol,
            1e-300,
            MAX_INTERVALS,
        )
        .map(|r| r.value)
        .unwrap_or(f64::NAN)
    };

    // Main region p in [1, p_cutoff], integrated in p with the 1/p² weight.
    let main = quad::integrate(
        &|p| inner(p) / (p * p),
        1.0,
        opts.p_cutoff,
        opts.rel_tolerance / 4.0,
        1e-300,
        MAX_INTERVALS,
    )?;

    // Tail p in [p_cutoff, inf) under u = 1/p: ∫ dp/p² g(p) = ∫₀^{1/P} g(1/u) du.
    // The integrand stays finite as u → 0 (first bracket vanishes, second
    // approaches its limiting constant), so no model approximation is needed.
    let tail = quad::integrate(
        &|u| inner(1.0 / u),
        0.0,
        1.0 / opts.p_cutoff,
        opts.rel_tolerance,
        (opts.rel_tolerance / 4.0) * main.value.abs().max(1e-300),
        MAX_INTERVALS,
    )?;

    // Truncation remainder in x: both terms are bounded by 1/(e^x - 1), so the
    // remainder is below 2·(p-measure)·∫_X^∞ x³ e⁻ˣ(1 + ..) dx ≈ 2.1·e⁻ˣ·poly.
    let xc = opts.x_cutoff;
    let x_trunc = 2.1 * (-xc).exp() * (xc * xc * xc + 3.0 * xc * xc + 6.0 * xc + 6.0);

    let value = PREFACTOR * (main.value + tail.value);
    let abs_error = PREFACTOR * (main.abs_error + tail.abs_error + x_trunc);
    if !value.is_finite() {
        return Err(CasimirError::QuadratureNotConverged {
            achieved: f64::INFINITY,
            requested: opts.rel_tolerance,
        });
    }
    Ok(PsiEstimate { value, abs_error })
}

/// Base force in SI, without validation. Negative = attractive.
pub(crate) fn f0_raw_pn(separation_nm: f64, radius_um: f64, psi_value: f64) -> f64 {
    let a_m = separation_nm * 1e-9;
    let r_m = radius_um * 1e-6;
    let pi = std::f64::consts::PI;
    let force_n = -psi_value * pi * pi * HBAR_C_J_M * r_m / (15.0 * a_m * a_m * a_m);
    force_n * 1e12
}

/// Sphere–plate force for a given reduction factor, in pN (negative =
/// attractive): −Ψ·π²ħcR/(15a³).
pub fn f0_sphere_plate(separation_nm: f64, radius_um: f64, psi_value: f64) -> Result<f64> {
    if !(separation_nm.is_finite() && separation_nm > 0.0) {
        return Err(CasimirError::InvalidInput(format!(
            "separation must be positive and finite, got {separation_nm} nm"
        )));
    }
    if !(radius_um.is_finite() && radius_um > 0.0) {
        return Err(CasimirError::InvalidInput(format!(
            "radius must be positive and finite, got {radius_um} um"
        )));
    }
    if !(psi_value.is_finite() && (0.0..=IDEAL_METAL_PSI).contains(&psi_value)) {
        return Err(CasimirError::InvalidInput(format!(
            "psi value must lie in [0, pi/24], got {psi_value}"
        )));
    }
    Ok(f0_raw_pn(separation_nm, radius_um, psi_value))
}

/// Ideal-metal sphere–plate force −π³ħcR/(360a³), in pN.
pub fn f0_ideal(separation_nm: f64, radius_um: f64) -> Result<f64> {
    f0_sphere_plate(separation_nm, radius_um, IDEAL_METAL_PSI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Frozen values from an independent fixed-grid Simpson oracle
    // (4096×4096 nodes, u = 1/p substitution, truncation at p = 1e7);
    // see tests/psi_oracle.rs for the in-tree cross-check.
    const ORACLE_PSI_10_10: f64 = 0.0363689100;
    const ORACLE_PSI_100_100: f64 = 0.0772170286;
    const ORACLE_PSI_2_5: f64 = 0.0105126809;

    fn opts() -> PsiQuadratureOptions {
        PsiQuadratureOptions::default()
    }

    #[test]
    fn vacuum_plates_give_zero() {
        let r = psi(1.0, 1.0, &opts()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn matches_simpson_oracle_values() {
        let r = psi(10.0, 10.0, &opts()).unwrap();
        assert_relative_eq!(r.value, ORACLE_PSI_10_10, max_relative = 1e-5);
        let r = psi(100.0, 100.0, &opts()).unwrap();
        assert_relative_eq!(r.value, ORACLE_PSI_100_100, max_relative = 1e-5);
        let r = psi(2.0, 5.0, &opts()).unwrap();
        assert_relative_eq!(r.value, ORACLE_PSI_2_5, max_relative = 1e-5);
    }

    #[test]
    fn monotone_in_permittivity_and_below_ideal_limit() {
        let p10 = psi(10.0, 10.0, &opts()).unwrap().value;
        let p100 = psi(100.0, 100.0, &opts()).unwrap().value;
        assert!(0.0 < p10 && p10 < p100 && p100 < IDEAL_METAL_PSI);
    }

    #[test]
    fn symmetric_under_swapping_materials() {
        let a = psi(2.0, 5.0, &opts()).unwrap().value;
        let b = psi(5.0, 2.0, &opts()).unwrap().value;
        assert_relative_eq!(a, b, max_relative = 1e-8);
    }

    #[test]
    fn truncation_robust_under_doubled_cutoffs() {
        let base = psi(10.0, 10.0, &opts()).unwrap().value;
        let doubled = psi(
            10.0,
            10.0,
            &PsiQuadratureOptions {
                x_cutoff: 120.0,
                p_cutoff: 2e3,
                ..opts()
            },
        )
        .unwrap()
        .value;
        assert!((doubled - base).abs() / base < opts().rel_tolerance);
    }

    #[test]
    fn analytic_tail_estimate_bounds_the_exact_tail() {
        // The O(1/P) model (1/P)·∫ x³/(Q₂∞ eˣ−1) dx must bound the exact
        // u-space remainder from above, and not by much: Q₂(p) decreases to
        // Q₂∞ like 1/p², so the two agree to O(1/P²).
        let o = opts();
        let (eps1, eps2) = (10.0, 10.0);
        let inner = |p: f64| {
            let (q1, q2) = bracket_factors(eps1, eps2, p);
            quad::integrate(&|x| bracket_sum(x, q1, q2), 0.0, o.x_cutoff, 1e-9, 0.0, 4096)
                .unwrap()
                .value
        };
        let tail_exact = quad::integrate(
            &|u: f64| inner(1.0 / u),
            0.0,
            1.0 / o.p_cutoff,
            1e-8,
            0.0,
            4096,
        )
        .unwrap()
        .value;
        let q2_inf = ((1.0 + eps1) * (1.0 + eps2)) / ((eps1 - 1.0) * (eps2 - 1.0));
        let estimate = 1.0 / o.p_cutoff
            * quad::integrate(
                &|x: f64| {
                    let d = q2_inf * x.exp_m1() + (q2_inf - 1.0);
                    x * x * x / d
                },
                0.0,
                o.x_cutoff,
                1e-10,
                0.0,
                4096,
            )
            .unwrap()
            .value;
        assert!(tail_exact > 0.0);
        assert!(estimate >= tail_exact);
        assert!(estimate <= tail_exact * 1.01);
        // And the tail matters at the default tolerance scale.
        let psi_val = psi(eps1, eps2, &o).unwrap().value;
        assert!(PREFACTOR * tail_exact / psi_val > 10.0 * o.rel_tolerance);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(psi(0.5, 2.0, &opts()).is_err());
        assert!(psi(2.0, f64::INFINITY, &opts()).is_err());
        let bad = PsiQuadratureOptions {
            rel_tolerance: 0.0,
            ..opts()
        };
        assert!(psi(2.0, 2.0, &bad).is_err());
        let bad = PsiQuadratureOptions {
            x_cutoff: 10.0,
            ..opts()
        };
        assert!(psi(2.0, 2.0, &bad).is_err());
        let bad = PsiQuadratureOptions {
            p_cutoff: 50.0,
            ..opts()
        };
        assert!(psi(2.0, 2.0, &bad).is_err());
    }

    #[test]
    fn f0_ideal_magnitude_at_reference_point() {
        // Independent SI arithmetic: pi^3 * hbar c * R / (360 a^3).
        let pi = std::f64::consts::PI;
        let expect_pn = pi.powi(3) * HBAR_C_J_M * 98e-6 / (360.0 * 120e-9f64.powi(3)) * 1e12;
        let f = f0_ideal(120.0, 98.0).unwrap();
        assert_relative_eq!(-f, expect_pn, max_relative = 1e-12);
        assert_relative_eq!(-f, 154.43, max_relative = 1e-2);
    }

    #[test]
    fn f0_cube_law_and_linearity() {
        let f1 = f0_ideal(120.0, 98.0).unwrap();
        let f2 = f0_ideal(240.0, 98.0).unwrap();
        assert_relative_eq!(f1 / f2, 8.0, max_relative = 1e-12);
        let f3 = f0_ideal(120.0, 196.0).unwrap();
        assert_relative_eq!(f3, 2.0 * f1, max_relative = 1e-12);
        // 950 nm value follows from the cube law.
        let f950 = f0_ideal(950.0, 98.0).unwrap();
        assert_relative_eq!(-f950, 154.43 * (120.0f64 / 950.0).powi(3), max_relative = 1e-2);
    }

    #[test]
    fn f0_zero_psi_and_preconditions() {
        assert_eq!(f0_sphere_plate(120.0, 98.0, 0.0).unwrap(), 0.0);
        assert!(f0_sphere_plate(-1.0, 98.0, 0.1).is_err());
        assert!(f0_sphere_plate(120.0, 0.0, 0.1).is_err());
        assert!(f0_sphere_plate(120.0, 98.0, 0.2).is_err());
        assert!(f0_sphere_plate(120.0, 98.0, -0.01).is_err());
    }

    #[test]
    fn f0_identity_in_si() {
        // f0_ideal(a,R) * 360 a^3 / (pi^3 hbar c R) = 1 exactly in SI.
        let a_m: f64 = 3.3e-7;
        let r_m = 5.1e-5;
        let f_n = f0_ideal(3.3e-7 * 1e9, 5.1e-5 * 1e6).unwrap() * 1e-12;
        let pi = std::f64::consts::PI;
        let unit = -f_n * 360.0 * a_m.powi(3) / (pi.powi(3) * HBAR_C_J_M * r_m);
        assert_relative_eq!(unit, 1.0, max_relative = 1e-12);
    }
}
