//! Zero modes of Eisenstein series and of their residues, truncation above
//! the heights a, and the moderate-growth basis at s = 1/2.

use num_complex::Complex64;
use serde::Serialize;

use crate::cuspfourier::{zero_mode_basis, ZeroModeKind};
use crate::error::{Error, Result};
use crate::scattering::{ScatteringModel, POLE_MATCH_TOL, POLE_SUPPORT_TOL};
use crate::surface::TruncationHeights;
use crate::CVector;

/// Eigenspace membership tolerance for the s = 1/2 basis.
pub const EIGENSPACE_TOL: f64 = 1e-9;
/// Relative size of a boundary value that counts as a discontinuity.
pub const CONTINUITY_TOL: f64 = 1e-8;

/// Per-cusp zero mode first_j·u(y) + second_j·v(y), where (u, v) is
/// (y^s, y^{1−s}) or, at s = 1/2, (y^{1/2}, y^{1/2} ln y).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroModeProfile {
    pub s: Complex64,
    pub kind: ZeroModeKind,
    pub first: Vec<Complex64>,
    pub second: Vec<Complex64>,
}

impl ZeroModeProfile {
    pub fn num_cusps(&self) -> usize {
        self.first.len()
    }

    /// Zero mode in cusp j at height y.
    pub fn value(&self, j: usize, y: f64) -> Complex64 {
        let (u, v) = zero_mode_basis(self.s).eigenfunction_pair(y);
        self.first[j] * u + self.second[j] * v
    }

    /// d/dy of the zero mode in cusp j.
    pub fn derivative(&self, j: usize, y: f64) -> Complex64 {
        let ln = y.ln();
        match self.kind {
            ZeroModeKind::Generic => {
                let s = self.s;
                let du = s * ((s - 1.0) * ln).exp();
                let dv = (1.0 - s) * (-s * ln).exp();
                self.first[j] * du + self.second[j] * dv
            }
            ZeroModeKind::BranchPoint => {
                let r = y.sqrt();
                let du = 0.5 / r;
                let dv = (0.5 * ln + 1.0) / r;
                self.first[j] * du + self.second[j] * dv
            }
        }
    }

    fn zero(s: Complex64, kind: ZeroModeKind, n: usize) -> Self {
        let z = Complex64::new(0.0, 0.0);
        ZeroModeProfile {
            s,
            kind,
            first: vec![z; n],
            second: vec![z; n],
        }
    }

    fn add_scaled(&mut self, other: &ZeroModeProfile, c: Complex64) {
        for j in 0..self.num_cusps() {
            self.first[j] += c * other.first[j];
            self.second[j] += c * other.second[j];
        }
    }
}

fn generic(s: Complex64) -> ZeroModeKind {
    zero_mode_basis(s).kind
}

/// Zero modes of E_i(·, s): δ_ij y^s + φ_ij(s) y^{1−s}.
pub fn eisenstein_zero_mode(model: &ScatteringModel, i: usize, s: Complex64) -> Result<ZeroModeProfile> {
    let n = model.dim();
    if i >= n {
        return Err(Error::Dimension(format!("cusp {} of {n}", i + 1)));
    }
    let row = if s.im == 0.0 && model.pole_near(s.re, POLE_MATCH_TOL).is_some() {
        let cl = model.classify(s.re);
        let res = model.residue(s.re)?;
        let row_is_polar = cl.polar.contains(&i) || (0..n).any(|j| res[(i, j)].norm() > POLE_SUPPORT_TOL);
        if row_is_polar {
            return Err(Error::AtPole {
                cusp: i + 1,
                s: format!("{}", s.re),
            });
        }
        model.regular_part(s.re)?
    } else {
        model.eval(s)?
    };
    let mut p = ZeroModeProfile::zero(s, generic(s), n);
    p.first[i] = Complex64::new(1.0, 0.0);
    for j in 0..n {
        p.second[j] = row[(i, j)];
    }
    Ok(p)
}

/// Zero modes of res_{s=s_p} E_i: the y^s term drops, leaving res φ_ij y^{1−s}.
pub fn residue_zero_mode(model: &ScatteringModel, i: usize, s_pole: f64) -> Result<ZeroModeProfile> {
    let res = model.residue(s_pole)?;
    let n = model.dim();
    if !model.classify(s_pole).polar.contains(&i) {
        return Err(Error::Domain(format!(
            "E_{} has no pole at s = {s_pole}",
            i + 1
        )));
    }
    let s = Complex64::new(s_pole, 0.0);
    let mut p = ZeroModeProfile::zero(s, generic(s), n);
    for j in 0..n {
        p.second[j] = res[(i, j)];
    }
    Ok(p)
}

/// Zero mode of Σ α_i E_i (i ∈ Q(s)) + Σ α_i res E_i (i ∈ P(s)).
pub fn eigenfunction_profile(model: &ScatteringModel, s: Complex64, alpha: &CVector) -> Result<ZeroModeProfile> {
    let n = model.dim();
    if alpha.len() != n {
        return Err(Error::Dimension(format!("α has {} entries for {n} cusps", alpha.len())));
    }
    let polar = if s.im == 0.0 {
        model.classify(s.re).polar
    } else {
        Vec::new()
    };
    let mut acc = ZeroModeProfile::zero(s, generic(s), n);
    for i in 0..n {
        if alpha[i] == Complex64::new(0.0, 0.0) {
            continue;
        }
        let part = if polar.contains(&i) {
            residue_zero_mode(model, i, s.re)?
        } else {
            eisenstein_zero_mode(model, i, s)?
        };
        acc.add_scaled(&part, alpha[i]);
    }
    Ok(acc)
}

/// A zero-mode profile with the zero mode removed above a_j in every cusp.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncatedProfile {
    pub profile: ZeroModeProfile,
    pub heights: Vec<f64>,
    /// Zero mode at y = a_j (the jump of the function across H_{a_j}).
    pub boundary_values: Vec<Complex64>,
    /// ∂_y(above) − ∂_y(below) at a_j, i.e. minus the zero mode's derivative.
    pub derivative_jumps: Vec<Complex64>,
    pub discontinuous: Vec<bool>,
}

impl TruncatedProfile {
    /// Zero mode of the truncated function in cusp j at height y.
    pub fn value(&self, j: usize, y: f64) -> Complex64 {
        if y > self.heights[j] {
            Complex64::new(0.0, 0.0)
        } else {
            self.profile.value(j, y)
        }
    }

    pub fn is_continuous(&self) -> bool {
        !self.discontinuous.iter().any(|&d| d)
    }
}

fn profile_scale(p: &ZeroModeProfile, j: usize, y: f64) -> f64 {
    let (u, v) = zero_mode_basis(p.s).eigenfunction_pair(y);
    (p.first[j] * u).norm() + (p.second[j] * v).norm()
}

pub fn truncate_zero_mode(p: &ZeroModeProfile, a: &TruncationHeights) -> Result<TruncatedProfile> {
    let n = p.num_cusps();
    if a.len() != n {
        return Err(Error::Dimension(format!("{} heights for {n} cusps", a.len())));
    }
    let heights = a.as_slice().to_vec();
    let mut boundary_values = Vec::with_capacity(n);
    let mut derivative_jumps = Vec::with_capacity(n);
    let mut discontinuous = Vec::with_capacity(n);
    for (j, &aj) in heights.iter().enumerate() {
        let v = p.value(j, aj);
        let scale = profile_scale(p, j, aj);
        boundary_values.push(v);
        derivative_jumps.push(-p.derivative(j, aj));
        discontinuous.push(v.norm() > CONTINUITY_TOL * scale.max(f64::MIN_POSITIVE));
    }
    Ok(TruncatedProfile {
        profile: p.clone(),
        heights,
        boundary_values,
        derivative_jumps,
        discontinuous,
    })
}

fn eigenspace_defect(phi_half: &crate::CMatrix, v: &CVector, sign: f64) -> f64 {
    (phi_half * v - v * Complex64::new(sign, 0.0)).norm()
}

/// Zero modes at s = 1/2 of the combination built from α⁺ ∈ E⁺ and α⁻ ∈ E⁻:
/// p_j = 2α_j⁺ + Σ_i α_i⁻ φ′_ij(1/2), q_j = 2α_j⁻.
pub fn quarter_basis(model: &ScatteringModel, alpha_plus: &CVector, alpha_minus: &CVector) -> Result<ZeroModeProfile> {
    let n = model.dim();
    if alpha_plus.len() != n || alpha_minus.len() != n {
        return Err(Error::Dimension(format!("coefficient vectors must have {n} entries")));
    }
    let phi = model.at_half()?;
    let dp = eigenspace_defect(&phi, alpha_plus, 1.0);
    if dp > EIGENSPACE_TOL * alpha_plus.norm().max(1.0) {
        return Err(Error::NotInEigenspace { which: "+1", defect: dp });
    }
    let dm = eigenspace_defect(&phi, alpha_minus, -1.0);
    if dm > EIGENSPACE_TOL * alpha_minus.norm().max(1.0) {
        return Err(Error::NotInEigenspace { which: "-1", defect: dm });
    }
    let dphi = model.derivative_at_half()?;
    let tail = dphi.transpose() * alpha_minus;
    let half = Complex64::new(0.5, 0.0);
    Ok(ZeroModeProfile {
        s: half,
        kind: ZeroModeKind::BranchPoint,
        first: (0..n).map(|j| 2.0 * alpha_plus[j] + tail[j]).collect(),
        second: (0..n).map(|j| 2.0 * alpha_minus[j]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::rotation;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn modular_zero_mode_is_phi_row() {
        let m = ScatteringModel::modular().unwrap();
        let p = eisenstein_zero_mode(&m, 0, c(0.8)).unwrap();
        assert_eq!(p.first[0], c(1.0));
        assert_eq!(p.second[0], m.eval_real(0.8).unwrap()[(0, 0)]);
    }

    #[test]
    fn diagonal_and_mixed_rows() {
        let d = ScatteringModel::synthetic_diagonal(&[1.0, 0.75]).unwrap();
        let p = eisenstein_zero_mode(&d, 0, c(0.8)).unwrap();
        assert_eq!(p.second[0], crate::scattering::phi_beta(1.0, c(0.8)));
        assert_eq!(p.second[1], c(0.0));
        assert_eq!(p.first[1], c(0.0));
        let r = ScatteringModel::synthetic(vec![1.0, 0.8], rotation(30.0)).unwrap();
        let phi = r.eval_real(0.7).unwrap();
        for i in 0..2 {
            let p = eisenstein_zero_mode(&r, i, c(0.7)).unwrap();
            for j in 0..2 {
                assert_eq!(p.second[j], phi[(i, j)]);
            }
        }
    }

    #[test]
    fn pole_handling() {
        let m = ScatteringModel::modular().unwrap();
        assert!(matches!(eisenstein_zero_mode(&m, 0, c(1.0)), Err(Error::AtPole { .. })));
        let r = residue_zero_mode(&m, 0, 1.0).unwrap();
        assert_eq!(r.first[0], c(0.0));
        assert!((r.second[0].re - 3.0 / std::f64::consts::PI).abs() < 1e-12);
        // y^{1−s} = 1 at s = 1: the residue is a constant function
        assert!((r.value(0, 7.0) - r.second[0]).norm() < 1e-14);
        let s = ScatteringModel::synthetic_diagonal(&[1.0, 0.75]).unwrap();
        let r = residue_zero_mode(&s, 1, 0.75).unwrap();
        assert_eq!(r.second, vec![c(0.0), c(0.5)]);
        assert!(matches!(residue_zero_mode(&s, 1, 0.7), Err(Error::NotAPole(_))));
        // regular cusp at a singular point uses the Laurent constant term
        let e = eisenstein_zero_mode(&s, 0, c(0.75)).unwrap();
        assert!((e.second[0] + 3.0).norm() < 1e-14);
    }

    #[test]
    fn truncation_flags() {
        // φ(s) a^{1−2s} = −1 makes the zero mode vanish at a
        let m = ScatteringModel::synthetic_diagonal(&[1.0]).unwrap();
        let s = 0.75;
        let a = (3.0f64).powi(2); // s/(s−1)·a^{−1/2} = −1 ⇒ a = 9
        let p = eisenstein_zero_mode(&m, 0, c(s)).unwrap();
        let t = truncate_zero_mode(&p, &TruncationHeights::new(vec![a]).unwrap()).unwrap();
        assert!(t.is_continuous(), "{:?}", t.boundary_values);
        assert!((t.derivative_jumps[0] + p.derivative(0, a)).norm() < 1e-15);
        let t = truncate_zero_mode(&p, &TruncationHeights::new(vec![5.0]).unwrap()).unwrap();
        assert!(!t.is_continuous());
    }

    #[test]
    fn quarter_basis_examples() {
        let m = ScatteringModel::synthetic_diagonal(&[1.0]).unwrap();
        let zero = CVector::from_vec(vec![c(0.0)]);
        let am = CVector::from_vec(vec![c(0.7)]);
        let p = quarter_basis(&m, &zero, &am).unwrap();
        assert!((p.first[0] + 4.0 * 0.7).norm() < 1e-14);
        assert!((p.second[0] - 1.4).norm() < 1e-15);
        let p = quarter_basis(&m, &zero, &zero).unwrap();
        assert_eq!(p.first[0], c(0.0));
        // E⁺ is trivial for this model
        assert!(matches!(
            quarter_basis(&m, &am, &zero),
            Err(Error::NotInEigenspace { .. })
        ));
    }

    #[test]
    fn minus_eigenspace_cancels_half_power() {
        let m = ScatteringModel::synthetic(vec![1.0, 0.8], rotation(30.0)).unwrap();
        let phi = m.at_half().unwrap();
        let am = CVector::from_vec(vec![c(0.3), c(-1.1)]);
        let v = &am + phi.transpose() * &am;
        assert!(v.norm() < 1e-9);
    }
}
