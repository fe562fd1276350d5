//! Special functions: Riemann zeta, log-gamma and the standard normal CDF.

use crate::error::{domain, Result};
use statrs::function::erf::erfc;

/// Number of explicitly summed terms in [`zeta`].
pub const ZETA_TERMS: u64 = 1_000_000;

/// Riemann zeta function for real `s > 1`.
///
/// Sums the first [`ZETA_TERMS`] terms from the smallest upward and adds the
/// integral tail `N^{1-s}/(s-1)` with the first Euler-Maclaurin corrections.
/// The omitted remainder is below `s(s+1)(s+2) N^{-s-3}/720`, far below
/// `1e-12` for every admissible `s`.
pub fn zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(domain("zeta", format!("requires finite s > 1, got {s}")));
    }
    let n = ZETA_TERMS as f64;
    let head: f64 = (1..=ZETA_TERMS).rev().map(|k| (k as f64).powf(-s)).sum();
    // sum_{k>N} k^{-s} = int_N^inf - N^{-s}/2 + s N^{-s-1}/12 - ...
    let tail = n.powf(1.0 - s) / (s - 1.0) - 0.5 * n.powf(-s) + s * n.powf(-s - 1.0) / 12.0;
    Ok(head + tail)
}

/// Upper and lower integral bracket for `sum_{k>K} k^{-s}`, `K >= 1`.
///
/// Returns `(lower, upper) = (int_{K+1}^inf, int_K^inf)` of `z^{-s}`.
pub fn power_tail_bracket(s: f64, k: u64) -> (f64, f64) {
    debug_assert!(s > 1.0 && k >= 1);
    let k = k as f64;
    ((k + 1.0).powf(1.0 - s) / (s - 1.0), k.powf(1.0 - s) / (s - 1.0))
}

/// Natural logarithm of the gamma function for `x > 0`.
///
/// Shifts the argument above 15 with the recurrence `Gamma(x+1) = x Gamma(x)`
/// and evaluates the Stirling series with five correction terms.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut x = x;
    let mut shift = 0.0;
    while x < 15.0 {
        shift += x.ln();
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + series - shift
}

/// Standard normal CDF.
pub fn normal_cdf(t: f64) -> f64 {
    0.5 * erfc(-t / std::f64::consts::SQRT_2)
}

/// Standard normal upper tail `1 - Phi(t)`, accurate for large `t`.
pub fn normal_sf(t: f64) -> f64 {
    0.5 * erfc(t / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zeta_even_values() {
        assert!((zeta(2.0).unwrap() - PI * PI / 6.0).abs() < 1e-12);
        assert!((zeta(4.0).unwrap() - PI.powi(4) / 90.0).abs() < 1e-12);
    }

    #[test]
    fn zeta_two_and_a_half_inside_bracket() {
        // partial sum of 10^4 terms plus the integral bracket of the tail
        let head: f64 = (1..=10_000u64).rev().map(|k| (k as f64).powf(-2.5)).sum();
        let (lo, hi) = power_tail_bracket(2.5, 10_000);
        let z = zeta(2.5).unwrap();
        assert!(z >= head + lo - 1e-13 && z <= head + hi + 1e-13);
        assert!((z - 1.341_487_3).abs() < 1e-7);
    }

    #[test]
    fn zeta_rejects_pole() {
        assert!(zeta(1.0).is_err());
        assert!(zeta(0.5).is_err());
        assert!(zeta(f64::NAN).is_err());
    }

    #[test]
    fn ln_gamma_matches_statrs() {
        for &x in &[1.0, 1.5, 2.0, 3.7, 10.0, 25.5, 130.0, 4096.0] {
            let a = ln_gamma(x);
            let b = statrs::function::gamma::ln_gamma(x);
            assert!((a - b).abs() < 1e-8 * (1.0 + b.abs()), "x={x}: {a} vs {b}");
        }
        assert!(ln_gamma(1.0).abs() < 1e-12);
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn normal_cdf_symmetry() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        for &t in &[0.3, 1.0, 2.5, 6.0] {
            assert!((normal_cdf(t) + normal_cdf(-t) - 1.0).abs() < 1e-15);
            assert!((normal_sf(t) - normal_cdf(-t)).abs() < 1e-16);
        }
    }
}
