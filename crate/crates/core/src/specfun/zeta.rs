//! Riemann zeta via Euler–Maclaurin summation and the completed zeta ξ.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::gamma::{digamma, gamma};
use crate::error::{Error, Result};

/// Bernoulli numbers B_2, B_4, ..., B_30.
const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// Number of Bernoulli correction terms used by the summation.
pub const EM_CORRECTION_TERMS: usize = 15;

fn em_cutoff(z: Complex64) -> usize {
    // Keeps |z + 2M| / (2πN) below ~0.3 so the first neglected term is < 1e-16.
    let n = ((z.norm() + 2.0 * EM_CORRECTION_TERMS as f64) / 1.8).ceil() as usize + 1;
    n.max(12)
}

/// Euler–Maclaurin evaluation of ζ(z) and ζ'(z), valid for any z ≠ 1 with
/// moderate negative real part.
fn em_zeta_and_derivative(z: Complex64, cutoff: usize, terms: usize) -> (Complex64, Complex64) {
    let mut value = Complex64::new(0.0, 0.0);
    let mut deriv = Complex64::new(0.0, 0.0);
    for n in 1..cutoff {
        let ln_n = (n as f64).ln();
        let p = (-z * ln_n).exp();
        value += p;
        deriv -= ln_n * p;
    }
    let big_n = cutoff as f64;
    let ln_big = big_n.ln();
    let n_pow = (-z * ln_big).exp(); // N^{-z}
    let zm1 = z - 1.0;
    let tail = big_n * n_pow / zm1; // N^{1-z}/(z-1)
    value += tail + 0.5 * n_pow;
    deriv += -ln_big * tail - tail / zm1 - 0.5 * ln_big * n_pow;

    // Σ_k B_2k/(2k)! · z(z+1)...(z+2k-2) · N^{-z-2k+1}
    let mut poly = z; // rising product, starts with one factor
    let mut poly_d = Complex64::new(1.0, 0.0);
    let mut factorial = 2.0; // (2k)!
    let mut npow = n_pow / big_n; // N^{-z-1}
    for k in 1..=terms {
        let coeff = BERNOULLI_EVEN[k - 1] / factorial;
        let term = coeff * poly * npow;
        value += term;
        deriv += coeff * (poly_d * npow - ln_big * poly * npow);
        // advance to k+1: multiply by (z+2k-1)(z+2k)
        for j in [2 * k - 1, 2 * k] {
            let f = z + j as f64;
            poly_d = poly_d * f + poly;
            poly *= f;
        }
        factorial *= ((2 * k + 1) * (2 * k + 2)) as f64;
        npow /= big_n * big_n;
    }
    (value, deriv)
}

/// ζ(z), with the functional equation used for Re z < 1/2.
pub fn zeta(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite("zeta argument"));
    }
    if z == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole {
            function: "zeta",
            at: "1".into(),
        });
    }
    if z.re < 0.5 && z.norm() > 0.25 {
        // ζ(z) = 2^z π^{z-1} sin(πz/2) Γ(1-z) ζ(1-z)
        let w = 1.0 - z;
        let factor = (z * 2f64.ln()).exp() * ((z - 1.0) * PI.ln()).exp() * (0.5 * PI * z).sin();
        return Ok(factor * gamma(w)? * zeta(w)?);
    }
    Ok(em_zeta_and_derivative(z, em_cutoff(z), EM_CORRECTION_TERMS).0)
}

/// ζ(z) and ζ'(z) on Re z >= 1/2 (or near the origin).
pub fn zeta_and_derivative(z: Complex64) -> Result<(Complex64, Complex64)> {
    if z == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole {
            function: "zeta",
            at: "1".into(),
        });
    }
    if z.re < 0.5 && z.norm() > 0.25 {
        return Err(Error::Domain(format!(
            "zeta derivative requested at Re z = {} < 1/2",
            z.re
        )));
    }
    Ok(em_zeta_and_derivative(z, em_cutoff(z), EM_CORRECTION_TERMS))
}

/// Euler–Maclaurin with explicit truncation, exposed for cross-checks.
pub fn zeta_euler_maclaurin(z: Complex64, cutoff: usize, terms: usize) -> Complex64 {
    em_zeta_and_derivative(z, cutoff, terms.min(EM_CORRECTION_TERMS)).0
}

/// Completed zeta ξ(u) = π^{-u/2} Γ(u/2) ζ(u), symmetric under u ↦ 1-u.
pub fn completed_xi(u: Complex64) -> Result<Complex64> {
    if u == Complex64::new(0.0, 0.0) || u == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole {
            function: "completed_xi",
            at: format!("{}", u.re),
        });
    }
    let w = if u.re < 0.5 { 1.0 - u } else { u };
    let pi_pow = (-0.5 * w * PI.ln()).exp();
    Ok(pi_pow * gamma(0.5 * w)? * zeta(w)?)
}

/// Logarithmic derivative ξ'(u)/ξ(u), using ξ'/ξ(u) = -ξ'/ξ(1-u).
pub fn xi_log_derivative(u: Complex64) -> Result<Complex64> {
    if u == Complex64::new(0.0, 0.0) || u == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole {
            function: "xi_log_derivative",
            at: format!("{}", u.re),
        });
    }
    if u.re < 0.5 {
        return Ok(-xi_log_derivative(1.0 - u)?);
    }
    let (z, dz) = zeta_and_derivative(u)?;
    Ok(-0.5 * PI.ln() + 0.5 * digamma(0.5 * u)? + dz / z)
}
