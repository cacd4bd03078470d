//! The eigenvalue λ = 1/4 (s = 1/2).
//!
//! With E^± the ±1 eigenspaces of Φ(1/2) and D_a = diag(2 ln a_j), the
//! multiplicity is μ = dim{α ∈ E⁻ : (D_a + Φ′(1/2)ᵗ)α ∈ E⁺}, computed as the
//! corank of the compression of D_a + Φ′(1/2)ᵗ to E⁻.

use serde::Serialize;

use super::{RootClass, SecularRoot, SpectralParameter};
use crate::error::{Error, Result};
use crate::linalg::{self, RANK_RTOL};
use crate::scattering::ScatteringModel;
use crate::surface::TruncationHeights;
use crate::{CMatrix, CVector, Complex64};

/// Samples of the coarse scan in `quarter_transition`.
const TRANSITION_SAMPLES: usize = 400;
const TRANSITION_RTOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuarterReport {
    pub heights: Vec<f64>,
    /// Orthonormal bases of the +1 and −1 eigenspaces of Φ(1/2).
    pub e_plus: Vec<CVector>,
    pub e_minus: Vec<CVector>,
    /// Diagonal of D_a.
    pub d_a: Vec<f64>,
    pub mu: usize,
    /// Singular values of the compressed matrix, descending.
    pub singular_values: Vec<f64>,
    /// Scale the rank decision is made relative to.
    pub scale: f64,
    /// Admissible α⁻ (orthonormal) and the matching α⁺.
    pub alphas_minus: Vec<CVector>,
    pub alphas_plus: Vec<CVector>,
}

impl QuarterReport {
    /// The λ = 1/4 eigenvalue as a root, when μ > 0.
    pub fn root(&self) -> Option<SecularRoot> {
        if self.mu == 0 {
            return None;
        }
        let residual = self.singular_values.iter().rev().take(self.mu).cloned().fold(0.0, f64::max);
        Some(SecularRoot {
            param: SpectralParameter::critical(0.0).expect("t = 0 is valid"),
            alpha: self.alphas_minus[0].clone(),
            nullspace: self.alphas_minus.clone(),
            multiplicity: self.mu,
            class: RootClass::Quarter,
            residual,
        })
    }

    /// Smallest singular value of the compression (0 when E⁻ is trivial).
    pub fn sigma_min(&self) -> f64 {
        self.singular_values.last().cloned().unwrap_or(f64::INFINITY)
    }
}

/// Eigenspace bases of the Hermitian involution Φ(1/2).
fn split_half(model: &ScatteringModel) -> Result<(Vec<CVector>, Vec<CVector>)> {
    let phi = model.at_half()?;
    let (vals, vecs) = linalg::hermitian_eigen(&phi);
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (k, v) in vals.iter().enumerate() {
        let col = vecs.column(k).into_owned();
        if *v < 0.0 {
            minus.push(col);
        } else {
            plus.push(col);
        }
    }
    Ok((plus, minus))
}

fn constraint_matrix(model: &ScatteringModel, a: &TruncationHeights) -> Result<(CMatrix, Vec<f64>, f64)> {
    let n = model.dim();
    if a.len() != n {
        return Err(Error::Dimension(format!("{} heights for {n} cusps", a.len())));
    }
    let d: Vec<f64> = a.as_slice().iter().map(|aj| 2.0 * aj.ln()).collect();
    let dphi = model.derivative_at_half()?;
    let mut m = dphi.transpose();
    for (j, dj) in d.iter().enumerate() {
        m[(j, j)] += Complex64::new(*dj, 0.0);
    }
    let scale = d
        .iter()
        .fold(linalg::spectral_norm(&dphi).max(1.0), |acc, x| acc.max(x.abs()));
    Ok((m, d, scale))
}

fn stack(cols: &[CVector], n: usize) -> CMatrix {
    let mut v = CMatrix::zeros(n, cols.len());
    for (k, c) in cols.iter().enumerate() {
        v.set_column(k, c);
    }
    v
}

pub fn quarter_multiplicity(model: &ScatteringModel, a: &TruncationHeights) -> Result<QuarterReport> {
    let n = model.dim();
    let (m, d_a, scale) = constraint_matrix(model, a)?;
    let (e_plus, e_minus) = split_half(model)?;
    let mut report = QuarterReport {
        heights: a.as_slice().to_vec(),
        e_plus,
        e_minus,
        d_a,
        mu: 0,
        singular_values: Vec::new(),
        scale,
        alphas_minus: Vec::new(),
        alphas_plus: Vec::new(),
    };
    if report.e_minus.is_empty() {
        return Ok(report);
    }
    let vm = stack(&report.e_minus, n);
    let kq = vm.adjoint() * &m * &vm;
    let (svs, right) = linalg::svd_right(&kq);
    let k = svs.len();
    let rank = svs.iter().filter(|&&x| x > RANK_RTOL * scale).count();
    report.mu = k - rank;
    report.singular_values = svs;
    let vp = stack(&report.e_plus, n);
    for idx in rank..k {
        let alpha_minus = linalg::normalize_phase(&(&vm * right.column(idx)));
        let raw = -(&m * &alpha_minus) * Complex64::new(0.5, 0.0);
        // drop the E⁻ component, which vanishes up to the rank tolerance
        let alpha_plus = if vp.ncols() == 0 {
            CVector::zeros(n)
        } else {
            &vp * (vp.adjoint() * raw)
        };
        report.alphas_minus.push(alpha_minus);
        report.alphas_plus.push(alpha_plus);
    }
    Ok(report)
}

/// Location along the ray t·a where the compressed matrix is most singular.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuarterTransition {
    /// Bracket [lo, hi] of the scale at the minimum of σ_min.
    pub bracket: (f64, f64),
    pub scale: f64,
    pub heights: Vec<f64>,
    /// σ_min at `scale`, relative to the rank scale.
    pub relative_sigma_min: f64,
    /// μ at `scale`.
    pub mu: usize,
}

/// Minimises σ_min of the compressed matrix over scales t ∈ [t_lo, t_hi]
/// applied to `base`: a log-spaced scan followed by golden-section search.
pub fn quarter_transition(model: &ScatteringModel, base: &TruncationHeights, t_range: (f64, f64)) -> Result<QuarterTransition> {
    let (t_lo, t_hi) = t_range;
    if !(t_lo > 0.0 && t_hi > t_lo) {
        return Err(Error::Domain(format!("scale range [{t_lo}, {t_hi}] is not positive and increasing")));
    }
    let objective = |t: f64| -> Result<f64> {
        let r = quarter_multiplicity(model, &base.scaled(t)?)?;
        Ok(r.sigma_min() / r.scale)
    };
    let ratio = (t_hi / t_lo).ln();
    let ts: Vec<f64> = (0..TRANSITION_SAMPLES)
        .map(|k| t_lo * (ratio * k as f64 / (TRANSITION_SAMPLES - 1) as f64).exp())
        .collect();
    let mut vals = Vec::with_capacity(ts.len());
    for &t in &ts {
        vals.push(objective(t)?);
    }
    let best = (0..ts.len()).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap_or(0);
    let mut lo = ts[best.saturating_sub(1)];
    let mut hi = ts[(best + 1).min(ts.len() - 1)];
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = objective(x1)?;
    let mut f2 = objective(x2)?;
    while hi - lo > TRANSITION_RTOL * hi {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = objective(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = objective(x2)?;
        }
    }
    let t = 0.5 * (lo + hi);
    let heights = base.scaled(t)?;
    let r = quarter_multiplicity(model, &heights)?;
    Ok(QuarterTransition {
        bracket: (lo, hi),
        scale: t,
        heights: heights.as_slice().to_vec(),
        relative_sigma_min: r.sigma_min() / r.scale,
        mu: r.mu,
    })
}
