//! Rayleigh quotient of a truncated modular Eisenstein eigenfunction by
//! composite Simpson quadrature over the standard fundamental domain.
//!
//! For a real-branch root s of the modular secular equation at height a,
//! u = E(·,s) below a and E(·,s) minus its zero mode above a. The quotient
//! ∫(u_x² + u_y²)dx dy / ∫u² dx dy/y² must reproduce λ = s(1−s). The domain
//! is cut at Y = a + 2, where the remaining modes are below e^{−2πY}.

use std::f64::consts::PI;

use serde::Serialize;

use super::modular::{coefficients, tail_order};
use crate::error::{Error, Result};
use crate::scattering::ScatteringModel;
use crate::specfun::bessel_k;
use crate::Complex64;

pub const RAYLEIGH_RTOL: f64 = 1e-3;
/// Default quadrature level: Simpson intervals per unit in each direction.
pub const DEFAULT_LEVEL: usize = 32;
/// Successive refinements further apart than this are not converged.
const REFINEMENT_RTOL: f64 = 1e-2;

struct Row {
    zero: f64,
    dzero: f64,
    /// c_n √y K_ν(2πny) and its y-derivative.
    g: Vec<f64>,
    dg: Vec<f64>,
}

struct Evaluator {
    s: f64,
    phi: f64,
    coef: Vec<f64>,
    truncation: f64,
}

impl Evaluator {
    fn new(s: f64, a: f64) -> Result<Self> {
        let terms = tail_order(3f64.sqrt() / 2.0)?;
        let coef = coefficients(Complex64::new(s, 0.0), terms)?.iter().map(|c| c.re).collect();
        let phi = ScatteringModel::modular()?.eval_real(s)?[(0, 0)].re;
        Ok(Evaluator {
            s,
            phi,
            coef,
            truncation: a,
        })
    }

    fn row(&self, y: f64) -> Result<Row> {
        let s = self.s;
        let nu = Complex64::new(s - 0.5, 0.0);
        let (mut zero, mut dzero) = (
            y.powf(s) + self.phi * y.powf(1.0 - s),
            s * y.powf(s - 1.0) + self.phi * (1.0 - s) * y.powf(-s),
        );
        if y > self.truncation {
            zero = 0.0;
            dzero = 0.0;
        }
        let mut g = Vec::with_capacity(self.coef.len());
        let mut dg = Vec::with_capacity(self.coef.len());
        let r = y.sqrt();
        for (k, c) in self.coef.iter().enumerate() {
            let w = 2.0 * PI * (k + 1) as f64;
            let x = w * y;
            let kv = bessel_k(nu, x)?.re;
            // K′_ν = −(K_{ν−1} + K_{ν+1})/2
            let dk = -0.5 * (bessel_k(nu - 1.0, x)?.re + bessel_k(nu + 1.0, x)?.re);
            g.push(c * r * kv);
            dg.push(c * (kv / (2.0 * r) + r * w * dk));
        }
        Ok(Row { zero, dzero, g, dg })
    }

    /// (∫ u_x² + u_y² dx, ∫ u² dx) over x ∈ [x0, 1/2] on one row.
    fn row_integrals(&self, row: &Row, x0: f64, nx: usize) -> (f64, f64) {
        let h = (0.5 - x0) / nx as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..=nx {
            let x = x0 + i as f64 * h;
            let w = simpson_weight(i, nx);
            let (mut u, mut ux, mut uy) = (row.zero, 0.0, row.dzero);
            for (k, (g, dg)) in row.g.iter().zip(&row.dg).enumerate() {
                let n = 2.0 * PI * (k + 1) as f64;
                let (sn, cs) = (n * x).sin_cos();
                u += g * cs;
                ux -= n * g * sn;
                uy += dg * cs;
            }
            num += w * (ux * ux + uy * uy);
            den += w * u * u;
        }
        (num * h / 3.0, den * h / 3.0)
    }
}

fn simpson_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i == n {
        1.0
    } else if i % 2 == 1 {
        4.0
    } else {
        2.0
    }
}

fn even(n: usize) -> usize {
    n.max(2) + n.max(2) % 2
}

/// Rayleigh quotient at quadrature level `level` (Simpson intervals per unit
/// length in y and per half period in x).
pub fn rayleigh_quotient(s: f64, a: f64, level: usize) -> Result<f64> {
    if !(s > 0.5 && s < 1.0) {
        return Err(Error::Domain(format!("s = {s} is not in (1/2, 1)")));
    }
    if !(a > 1.0) {
        return Err(Error::Domain(format!("truncation {a} is not above the cusp base 1")));
    }
    let ev = Evaluator::new(s, a)?;
    let nx = even(level);
    let (mut num, mut den) = (0.0, 0.0);

    // arc part: y = cos θ, θ ∈ [0, π/6], x from sin θ to 1/2
    let nt = even(level);
    let ht = (PI / 6.0) / nt as f64;
    for i in 0..=nt {
        let th = i as f64 * ht;
        let y = th.cos();
        let row = ev.row(y)?;
        let (n, d) = ev.row_integrals(&row, th.sin(), nx);
        let w = simpson_weight(i, nt) * ht / 3.0 * th.sin();
        num += w * n;
        den += w * d / (y * y);
    }
    // rectangle parts split at the truncation height
    let top = a + 2.0;
    for (y0, y1) in [(1.0, a), (a, top)] {
        let ny = even(level * (y1 - y0).ceil() as usize);
        let hy = (y1 - y0) / ny as f64;
        for i in 0..=ny {
            // stay on the correct side of the jump at y = a
            let y = if i == ny && y1 == a { a } else { y0 + i as f64 * hy };
            let row = if i == 0 && y0 == a {
                let mut r = ev.row(a)?;
                r.zero = 0.0;
                r.dzero = 0.0;
                r
            } else {
                ev.row(y)?
            };
            let (n, d) = ev.row_integrals(&row, 0.0, nx);
            let w = simpson_weight(i, ny) * hy / 3.0;
            num += w * n;
            den += w * d / (y * y);
        }
    }
    Ok(num / den)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayleighReport {
    pub s: f64,
    pub truncation: f64,
    /// λ the quotient is compared with.
    pub lambda: f64,
    pub coarse: f64,
    pub fine: f64,
    pub relative_error: f64,
    pub passes: bool,
}

/// Compares the quotient at `level` and `2·level` with `lambda`.
pub fn rayleigh_probe(s: f64, a: f64, lambda: f64, level: usize) -> Result<RayleighReport> {
    let coarse = rayleigh_quotient(s, a, level)?;
    let fine = rayleigh_quotient(s, a, 2 * level)?;
    if (fine - coarse).abs() > REFINEMENT_RTOL * fine.abs() {
        return Err(Error::Quadrature(format!(
            "levels {level} and {} differ by {:.3e}",
            2 * level,
            (fine - coarse).abs()
        )));
    }
    let relative_error = (fine - lambda).abs() / lambda.abs();
    Ok(RayleighReport {
        s,
        truncation: a,
        lambda,
        coarse,
        fine,
        relative_error,
        passes: relative_error <= RAYLEIGH_RTOL,
    })
}
