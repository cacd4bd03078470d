//! Pointwise Eisenstein series of PSL(2,Z).
//!
//! E(z,s) = y^s + φ(s)y^{1−s}
//!        + (4√y/ξ(2s)) Σ_{n≥1} n^{s−1/2} σ_{1−2s}(n) K_{s−1/2}(2πny) cos(2πnx),
//! with ξ(u) = π^{−u/2}Γ(u/2)ζ(u) and σ_w(n) = Σ_{d|n} d^w. The Fourier
//! coefficients are the classical ones, not derived from scattering data;
//! the automorphy and eigen-residual checks below validate them.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::scattering::ScatteringModel;
use crate::specfun::{bessel_k, completed_xi};
use crate::Complex64;

pub const MIN_HEIGHT: f64 = 0.5;
pub const MAX_TERMS: usize = 256;
/// Target for the neglected tail e^{−2πKy}.
const TAIL_TOL: f64 = 1e-12;
/// Relative step of the finite-difference Laplacian.
pub const FD_STEP: f64 = 1e-2;

/// Number of Fourier terms so that e^{−2πKy} < 1e-12.
pub fn tail_order(y: f64) -> Result<usize> {
    let k = (-TAIL_TOL.ln() / (2.0 * PI * y)).ceil() as usize;
    if k > MAX_TERMS {
        return Err(Error::Convergence(format!("{k} Fourier terms needed at y = {y}")));
    }
    Ok(k.max(1))
}

/// Σ_{d|n} d^w.
fn divisor_sum(n: usize, w: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            acc += (w * (d as f64).ln()).exp();
            let e = n / d;
            if e != d {
                acc += (w * (e as f64).ln()).exp();
            }
        }
        d += 1;
    }
    acc
}

/// Fourier coefficients c_n = 4 n^{s−1/2} σ_{1−2s}(n)/ξ(2s), n = 1..=terms.
pub(crate) fn coefficients(s: Complex64, terms: usize) -> Result<Vec<Complex64>> {
    let xi = completed_xi(2.0 * s)?;
    Ok((1..=terms)
        .map(|n| 4.0 * ((s - 0.5) * (n as f64).ln()).exp() * divisor_sum(n, 1.0 - 2.0 * s) / xi)
        .collect())
}

fn check_height(y: f64) -> Result<()> {
    if !(y >= MIN_HEIGHT) {
        return Err(Error::Domain(format!("height {y} below {MIN_HEIGHT}")));
    }
    Ok(())
}

/// E(z, s) with the first `terms` Fourier terms.
pub fn modular_eisenstein_truncated(z: Complex64, s: Complex64, terms: usize) -> Result<Complex64> {
    check_height(z.im)?;
    if terms > MAX_TERMS {
        return Err(Error::Convergence(format!("{terms} terms exceed {MAX_TERMS}")));
    }
    let (x, y) = (z.re, z.im);
    let phi = ScatteringModel::modular()?.eval(s)?[(0, 0)];
    let ln = y.ln();
    let mut acc = (s * ln).exp() + phi * ((1.0 - s) * ln).exp();
    let coef = coefficients(s, terms)?;
    for (k, c) in coef.iter().enumerate() {
        let n = (k + 1) as f64;
        let kv = bessel_k(s - 0.5, 2.0 * PI * n * y)?;
        acc += c * y.sqrt() * kv * (2.0 * PI * n * x).cos();
    }
    Ok(acc)
}

/// E(z, s) with the tail order chosen from y.
pub fn modular_eisenstein_point(z: Complex64, s: Complex64) -> Result<Complex64> {
    check_height(z.im)?;
    modular_eisenstein_truncated(z, s, tail_order(z.im)?)
}

/// |E(z) − E(−1/z)| / |E(z)|.
pub fn automorphy_defect(z: Complex64, s: Complex64, terms: Option<usize>) -> Result<f64> {
    let w = -1.0 / z;
    let eval = |p: Complex64| match terms {
        Some(k) => modular_eisenstein_truncated(p, s, k),
        None => modular_eisenstein_point(p, s),
    };
    let a = eval(z)?;
    let b = eval(w)?;
    Ok((a - b).norm() / a.norm())
}

/// |−y²(E_xx + E_yy) − s(1−s)E| / |s(1−s)E| with fourth-order five-point
/// stencils of step FD_STEP·y.
pub fn eigen_residual(z: Complex64, s: Complex64) -> Result<f64> {
    let y = z.im;
    let h = FD_STEP * y;
    check_height(y - 2.0 * h)?;
    let f = |dx: f64, dy: f64| modular_eisenstein_point(Complex64::new(z.re + dx, y + dy), s);
    let f0 = f(0.0, 0.0)?;
    let second = |g: [Complex64; 4]| (-g[0] + 16.0 * g[1] + 16.0 * g[2] - g[3] - 30.0 * f0) / (12.0 * h * h);
    let fxx = second([f(-2.0 * h, 0.0)?, f(-h, 0.0)?, f(h, 0.0)?, f(2.0 * h, 0.0)?]);
    let fyy = second([f(0.0, -2.0 * h)?, f(0.0, -h)?, f(0.0, h)?, f(0.0, 2.0 * h)?]);
    let lambda = s * (1.0 - s);
    Ok((-y * y * (fxx + fyy) - lambda * f0).norm() / (lambda * f0).norm())
}
