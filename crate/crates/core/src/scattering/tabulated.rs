//! User-supplied scattering data: samples on the real axis and on the
//! critical line plus declared poles with residue matrices.
//!
//! Values between samples come from local Lagrange interpolation of the
//! pole-subtracted remainder Φ(s) − Σ_p R_p/(s − s_p).

use num_complex::Complex64;

use super::Pole;
use crate::error::{Error, Result};
use crate::CMatrix;

/// Number of nodes in each local interpolation stencil.
const STENCIL: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    dim: usize,
    /// (s, remainder) on the real axis, ascending in s.
    real: Vec<(f64, CMatrix)>,
    /// (t, remainder) on s = 1/2 + it, ascending in t.
    line: Vec<(f64, CMatrix)>,
}

fn pole_part(poles: &[Pole], s: Complex64, dim: usize) -> CMatrix {
    let mut acc = CMatrix::zeros(dim, dim);
    for p in poles {
        acc += &p.residue / (s - p.s);
    }
    acc
}

fn pole_part_derivative(poles: &[Pole], s: Complex64, dim: usize) -> CMatrix {
    let mut acc = CMatrix::zeros(dim, dim);
    for p in poles {
        let d = s - p.s;
        acc -= &p.residue / (d * d);
    }
    acc
}

/// Lagrange weights and derivative weights at x for the given nodes.
fn lagrange_weights(nodes: &[f64], x: f64) -> (Vec<f64>, Vec<f64>) {
    let m = nodes.len();
    let mut w = vec![0.0; m];
    let mut dw = vec![0.0; m];
    for j in 0..m {
        let mut denom = 1.0;
        for k in 0..m {
            if k != j {
                denom *= nodes[j] - nodes[k];
            }
        }
        let mut prod = 1.0;
        for k in 0..m {
            if k != j {
                prod *= x - nodes[k];
            }
        }
        let mut dprod = 0.0;
        for l in 0..m {
            if l == j {
                continue;
            }
            let mut p = 1.0;
            for k in 0..m {
                if k != j && k != l {
                    p *= x - nodes[k];
                }
            }
            dprod += p;
        }
        w[j] = prod / denom;
        dw[j] = dprod / denom;
    }
    (w, dw)
}

fn interpolate(table: &[(f64, CMatrix)], x: f64, dim: usize) -> Result<(CMatrix, CMatrix)> {
    let lo = table.first().map(|p| p.0).unwrap_or(f64::NAN);
    let hi = table.last().map(|p| p.0).unwrap_or(f64::NAN);
    let slack = 1e-12 * (1.0 + hi.abs());
    if table.len() < 2 || !(x >= lo - slack && x <= hi + slack) {
        return Err(Error::Domain(format!(
            "tabulated scattering data does not cover {x} (range [{lo}, {hi}])"
        )));
    }
    let m = STENCIL.min(table.len());
    let idx = table.partition_point(|p| p.0 < x);
    let start = idx.saturating_sub(m / 2).min(table.len() - m);
    let window = &table[start..start + m];
    let nodes: Vec<f64> = window.iter().map(|p| p.0).collect();
    let (w, dw) = lagrange_weights(&nodes, x);
    let mut v = CMatrix::zeros(dim, dim);
    let mut d = CMatrix::zeros(dim, dim);
    for (k, (_, mat)) in window.iter().enumerate() {
        v += mat * Complex64::new(w[k], 0.0);
        d += mat * Complex64::new(dw[k], 0.0);
    }
    Ok((v, d))
}

impl Tabulated {
    /// Builds the table from raw samples (s, Φ(s)); samples must lie on the
    /// real axis or on Re s = 1/2 and away from the declared poles.
    pub fn new(dim: usize, samples: Vec<(Complex64, CMatrix)>, poles: &[Pole]) -> Result<Self> {
        let mut real = Vec::new();
        let mut line = Vec::new();
        for (s, m) in samples {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::Dimension(format!("sample at {s} is not {dim}x{dim}")));
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite("tabulated sample"));
            }
            let on_real = s.im == 0.0;
            let on_line = s.re == 0.5;
            if !on_real && !on_line {
                return Err(Error::Domain(format!(
                    "sample at {s} is neither real nor on the critical line"
                )));
            }
            if poles.iter().any(|p| (s - p.s).norm() < 1e-12) {
                return Err(Error::Domain(format!("sample at {s} sits on a declared pole")));
            }
            let rem = &m - pole_part(poles, s, dim);
            if on_real {
                real.push((s.re, rem.clone()));
            }
            if on_line {
                line.push((s.im, rem));
            }
        }
        for table in [&mut real, &mut line] {
            table.sort_by(|a, b| a.0.total_cmp(&b.0));
            if table.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::Domain("duplicate tabulated sample".into()));
            }
        }
        Ok(Tabulated { dim, real, line })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Table, abscissa, and whether the abscissa is t on the critical line.
    fn locate(&self, s: Complex64) -> Result<(&[(f64, CMatrix)], f64, bool)> {
        if s.im == 0.0 && !self.real.is_empty() && (s.re != 0.5 || self.line.is_empty()) {
            Ok((&self.real, s.re, false))
        } else if s.re == 0.5 {
            Ok((&self.line, s.im, true))
        } else {
            Err(Error::Domain(format!(
                "tabulated scattering data is only available on the real axis and the critical line, not at {s}"
            )))
        }
    }

    pub fn eval(&self, s: Complex64, poles: &[Pole]) -> Result<CMatrix> {
        let (table, x, _) = self.locate(s)?;
        let (rem, _) = interpolate(table, x, self.dim)?;
        Ok(rem + pole_part(poles, s, self.dim))
    }

    pub fn derivative(&self, s: Complex64, poles: &[Pole]) -> Result<CMatrix> {
        let (table, x, on_line) = self.locate(s)?;
        let (_, drem) = interpolate(table, x, self.dim)?;
        // on the line d/ds = −i d/dt
        let drem = if on_line { drem * Complex64::new(0.0, -1.0) } else { drem };
        Ok(drem + pole_part_derivative(poles, s, self.dim))
    }

    /// Constant Laurent term at a declared pole: the interpolated remainder
    /// plus the other poles' contributions.
    pub fn regular_part(&self, pole: f64, poles: &[Pole]) -> Result<CMatrix> {
        let (rem, _) = interpolate(&self.real, pole, self.dim)?;
        let others: Vec<Pole> = poles.iter().filter(|p| p.s != pole).cloned().collect();
        Ok(rem + pole_part(&others, Complex64::new(pole, 0.0), self.dim))
    }
}
