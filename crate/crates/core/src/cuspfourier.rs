//! Fourier analysis in a standard cusp: coefficients along horocycles, the
//! mode-wise Laplacian ODE, zero-mode solutions and the cusp Rayleigh bound.
//!
//! Coefficients follow the convention
//! f_k(y) = ∫₀¹ f(x+iy) y^{1/2} e^{2πikx} dx, with kernel e^{+2πikx} exactly
//! as written (no complex conjugate on the basis function). For real f this
//! is the conjugate of the L²(H_y)-pairing coefficient; every internal use
//! relies on the same convention.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 64;
const MIN_ODE_POINTS: usize = 8;
/// Relative step of the analytic finite-difference stencil.
const ODE_STEP: f64 = 2e-3;

/// Trapezoidal evaluation of f_k(y) from samples f(m/N + iy), m = 0..N−1.
pub fn fourier_coefficient(samples: &[Complex64], k: i64, y: f64) -> Result<Complex64> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("height {y} is not positive")));
    }
    let n = samples.len();
    if n < MIN_SAMPLES {
        return Err(Error::Grid(format!("{n} samples, need at least {MIN_SAMPLES}")));
    }
    if 2 * k.unsigned_abs() as usize >= n {
        return Err(Error::Resolution(format!(
            "mode {k} is beyond the Nyquist limit of {n} samples"
        )));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, f) in samples.iter().enumerate() {
        let phase = 2.0 * PI * (k as f64) * (m as f64) / n as f64;
        acc += f * Complex64::from_polar(1.0, phase);
    }
    Ok(acc * y.sqrt() / n as f64)
}

fn ode_defect(c: Complex64, dc: Complex64, d2c: Complex64, y: f64, k: i64, lambda: Complex64) -> f64 {
    let kk = (k as f64) * (k as f64);
    let pot = 0.25 + 4.0 * PI * PI * kk * y * y - lambda;
    (y * y * d2c + y * dc - pot * c).norm()
}

/// sup |y²c″ + yc′ − (1/4 + 4π²k²y² − λ)c| over `points` interior nodes of
/// [y0, y1], derivatives by 5-point central differences of the closure.
pub fn mode_ode_residual<F>(c: F, k: i64, lambda: Complex64, y0: f64, y1: f64, points: usize) -> Result<f64>
where
    F: Fn(f64) -> Complex64,
{
    if points < MIN_ODE_POINTS {
        return Err(Error::Grid(format!("{points} points, need at least {MIN_ODE_POINTS}")));
    }
    if !(y0 > 0.0 && y1 > y0) {
        return Err(Error::Domain(format!("interval [{y0}, {y1}] is not inside y > 0")));
    }
    let mut worst = 0.0f64;
    for j in 1..=points {
        let y = y0 + (y1 - y0) * j as f64 / (points + 1) as f64;
        let h = ODE_STEP * y;
        let f = |m: f64| c(y + m * h);
        let (fm2, fm1, f0, fp1, fp2) = (f(-2.0), f(-1.0), f(0.0), f(1.0), f(2.0));
        let d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
        let d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
        worst = worst.max(ode_defect(f0, d1, d2, y, k, lambda));
    }
    Ok(worst)
}

/// Same residual for values sampled on a uniform grid `ys`.
pub fn mode_ode_residual_sampled(ys: &[f64], values: &[Complex64], k: i64, lambda: Complex64) -> Result<f64> {
    let n = ys.len();
    if n < MIN_ODE_POINTS || values.len() != n {
        return Err(Error::Grid(format!(
            "{n} heights with {} values, need at least {MIN_ODE_POINTS} matching",
            values.len()
        )));
    }
    let h = (ys[n - 1] - ys[0]) / (n - 1) as f64;
    if !(h > 0.0) || ys.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0)) {
        return Err(Error::Grid("heights are not uniformly spaced".into()));
    }
    let mut worst = 0.0f64;
    for j in 2..n - 2 {
        let v = &values[j - 2..=j + 2];
        let d1 = (v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / (12.0 * h);
        let d2 = (-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (12.0 * h * h);
        worst = worst.max(ode_defect(v[2], d1, d2, ys[j], k, lambda));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroModeKind {
    /// (y^{s−1/2}, y^{1/2−s}); eigenfunctions y^s, y^{1−s}.
    Generic,
    /// (1, ln y); eigenfunctions y^{1/2}, y^{1/2} ln y. Only at s = 1/2.
    BranchPoint,
}

/// Fundamental solutions of the zero-mode equation at a given s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroModeSolutionBasis {
    pub s: Complex64,
    pub kind: ZeroModeKind,
}

impl ZeroModeSolutionBasis {
    /// The two solutions of the normalized coefficient ODE (k = 0) at y.
    pub fn coefficient_pair(&self, y: f64) -> (Complex64, Complex64) {
        match self.kind {
            ZeroModeKind::Generic => {
                let e = self.s - 0.5;
                let ln = y.ln();
                ((e * ln).exp(), (-e * ln).exp())
            }
            ZeroModeKind::BranchPoint => (Complex64::new(1.0, 0.0), Complex64::new(y.ln(), 0.0)),
        }
    }

    /// The two y-only eigenfunctions of the Laplacian at y.
    pub fn eigenfunction_pair(&self, y: f64) -> (Complex64, Complex64) {
        let (u, v) = self.coefficient_pair(y);
        let r = y.sqrt();
        (u * r, v * r)
    }
}

pub fn zero_mode_basis(s: Complex64) -> ZeroModeSolutionBasis {
    let kind = if s == Complex64::new(0.5, 0.0) {
        ZeroModeKind::BranchPoint
    } else {
        ZeroModeKind::Generic
    };
    ZeroModeSolutionBasis { s, kind }
}

/// Lower bound π²b² for the Rayleigh quotient of functions on a cusp above
/// height b that vanish somewhere on every horocycle.
pub fn cusp_rayleigh_bound(b: f64) -> Result<f64> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::Domain(format!("height {b} is not positive")));
    }
    Ok(PI * PI * b * b)
}
