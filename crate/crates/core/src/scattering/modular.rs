//! One-cusp scattering coefficient of PSL(2,Z): φ(s) = ξ(2s−1)/ξ(2s).

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::{completed_xi, xi_log_derivative};

/// Below this distance from 1/2, φ is evaluated by a Cauchy integral.
const VALUE_CAUCHY_RADIUS: f64 = 1e-3;
/// Below this distance from 1/2, φ′ is evaluated by a Cauchy integral.
const DERIVATIVE_CAUCHY_RADIUS: f64 = 0.02;
const CIRCLE_RADIUS: f64 = 0.05;
const CIRCLE_NODES: usize = 32;

fn half() -> Complex64 {
    Complex64::new(0.5, 0.0)
}

fn direct(s: Complex64) -> Result<Complex64> {
    Ok(completed_xi(2.0 * s - 1.0)? / completed_xi(2.0 * s)?)
}

fn circle_node(k: usize) -> Complex64 {
    let theta = 2.0 * PI * (k as f64 + 0.5) / CIRCLE_NODES as f64;
    Complex64::from_polar(CIRCLE_RADIUS, theta)
}

/// m!/(2πi)∮ φ(w)/(w−s)^{m+1} dw around 1/2 (m ≤ 1), trapezoidal in the angle.
fn cauchy(s: Complex64, order: u32) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..CIRCLE_NODES {
        let dz = circle_node(k);
        let w = half() + dz;
        let f = direct(w)?;
        // dw = i dz dθ, so the 1/(2πi) prefactor leaves dz/N
        acc += f * dz / (w - s).powu(order + 1);
    }
    // m! = 1 for the orders used here
    Ok(acc / CIRCLE_NODES as f64)
}

pub fn value(s: Complex64) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole {
            function: "modular scattering coefficient",
            at: "1".into(),
        });
    }
    if (s - half()).norm() < VALUE_CAUCHY_RADIUS {
        return cauchy(s, 0);
    }
    direct(s)
}

pub fn derivative(s: Complex64) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole {
            function: "modular scattering coefficient",
            at: "1".into(),
        });
    }
    if (s - half()).norm() < DERIVATIVE_CAUCHY_RADIUS {
        return cauchy(s, 1);
    }
    let phi = direct(s)?;
    Ok(phi * 2.0 * (xi_log_derivative(2.0 * s - 1.0)? - xi_log_derivative(2.0 * s)?))
}

/// Residue at s = 1: ξ(u) ~ 1/(u−1) at u = 1 gives 1/(2ξ(2)).
pub fn residue_at_one() -> Result<f64> {
    Ok(1.0 / (2.0 * completed_xi(Complex64::new(2.0, 0.0))?.re))
}
