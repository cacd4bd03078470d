//! Roots on the real branch s ∈ (1/2, 1].
//!
//! Regular roots are sign changes of the eigenvalues of the Hermitian
//! matrix D^{1/2} Φ(s) D^{1/2} + I (D = diag a_j^{1−2s}), which is similar to
//! M(s) + I. The scan grid is split at the poles and clusters geometrically
//! towards them and towards 1/2. Poles inside the window are examined with
//! the mixed system.

use num_complex::Complex64;
use serde::Serialize;

use super::{SecularRoot, SpectralParameter, RootClass, ROOT_TOL, SUPPORT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, RANK_RTOL};
use crate::scattering::{ScatteringModel, SingularityClass};
use crate::surface::TruncationHeights;
use crate::{CMatrix, CVector};

/// Largest step of the scan grid.
const MAX_STEP: f64 = 2e-3;
/// Closest approach of the scan to 1/2 and to poles.
const MIN_OFFSET: f64 = 1e-12;
const GEOMETRIC_RATIO: f64 = 1.3;
/// Regular roots this close to a pole are left to the mixed system.
const POLE_EXCLUSION: f64 = 1e-9;
/// Crossings closer than this are one root.
const GROUPING: f64 = 1e-9;
/// Minimum of |e_k| accepted as a tangential root, relative to ‖H‖.
const TANGENCY_TOL: f64 = 1e-9;
/// Largest ratio of a tangential minimum to the neighbouring samples.
const TANGENCY_DROP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PoleVerdict {
    /// Completely singular: no eigenvalue possible.
    Barrier,
    /// The mixed system has an admissible solution.
    Root { multiplicity: usize },
    /// The mixed system has only the trivial solution.
    NoSolution,
    /// Solutions exist but are supported on the polar cusps only.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoleExamination {
    pub s: f64,
    pub class: SingularityClass,
    pub verdict: PoleVerdict,
    /// Smallest singular value of the mixed system relative to its norm.
    pub relative_sigma_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealBranchReport {
    pub roots: Vec<SecularRoot>,
    pub poles: Vec<PoleExamination>,
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Sorted eigenvalues of D^{1/2} Φ(s) D^{1/2} + I and its largest magnitude.
fn shifted_eigenvalues(model: &ScatteringModel, a: &TruncationHeights, s: f64) -> Result<(Vec<f64>, f64)> {
    let mut h = model.eval_real(s)?;
    let n = h.nrows();
    let w: Vec<f64> = a.as_slice().iter().map(|&aj| aj.powf(0.5 - s)).collect();
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] *= w[i] * w[j];
        }
    }
    let (vals, _) = linalg::hermitian_eigen(&h);
    let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    Ok((vals.iter().map(|v| v + 1.0).collect(), scale))
}

/// Scan points in a segment; open ends are approached geometrically.
fn segment_grid(lo: f64, hi: f64, lo_open: bool, hi_open: bool) -> Vec<f64> {
    let span = hi - lo;
    let mut pts = Vec::new();
    let steps = (span / MAX_STEP).ceil().max(1.0) as usize;
    for k in 1..steps {
        pts.push(lo + span * k as f64 / steps as f64);
    }
    let limit = (0.5 * span).min(MAX_STEP);
    let mut d = MIN_OFFSET;
    while d < limit {
        if lo_open {
            pts.push(lo + d);
        }
        if hi_open {
            pts.push(hi - d);
        }
        d *= GEOMETRIC_RATIO;
    }
    if !lo_open {
        pts.push(lo);
    }
    if !hi_open {
        pts.push(hi);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts.retain(|&s| s > 0.5 && s <= 1.0);
    pts
}

fn bisect_eigenvalue(model: &ScatteringModel, a: &TruncationHeights, k: usize, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut flo = shifted_eigenvalues(model, a, lo)?.0[k];
    for _ in 0..200 {
        if hi - lo <= 0.01 * ROOT_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = shifted_eigenvalues(model, a, mid)?.0[k];
        if (fm >= 0.0) == (flo >= 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section minimum of |e_k| on [lo, hi].
fn minimize_abs_eigenvalue(model: &ScatteringModel, a: &TruncationHeights, k: usize, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let f = |s: f64| -> Result<f64> { Ok(shifted_eigenvalues(model, a, s)?.0[k].abs()) };
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > 0.01 * ROOT_TOL {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let x = 0.5 * (lo + hi);
    Ok((x, f(x)?))
}

/// Rounding level of the eigenvalues of a matrix of norm `scale`.
fn noise(scale: f64) -> f64 {
    64.0 * f64::EPSILON * scale
}

/// Crossing or tangency locations of the sorted eigenvalue functions inside
/// one pole-free segment.
fn segment_roots(model: &ScatteringModel, a: &TruncationHeights, pts: &[f64]) -> Result<Vec<f64>> {
    let mut samples = Vec::with_capacity(pts.len());
    for &s in pts {
        samples.push(shifted_eigenvalues(model, a, s)?);
    }
    let n = model.dim();
    let mut found = Vec::new();
    for k in 0..n {
        for i in 0..pts.len().saturating_sub(1) {
            let (e0, e1) = (samples[i].0[k], samples[i + 1].0[k]);
            // near a pole the eigenvalues are too large to resolve the sign
            if e0.abs() <= noise(samples[i].1) || e1.abs() <= noise(samples[i + 1].1) {
                continue;
            }
            if (e0 >= 0.0) != (e1 >= 0.0) {
                found.push(bisect_eigenvalue(model, a, k, pts[i], pts[i + 1])?);
            }
        }
        for i in 1..pts.len().saturating_sub(1) {
            let (em, e0, ep) = (samples[i - 1].0[k], samples[i].0[k], samples[i + 1].0[k]);
            let same_sign = (em >= 0.0) == (e0 >= 0.0) && (e0 >= 0.0) == (ep >= 0.0);
            if same_sign && e0.abs() < em.abs() && e0.abs() <= ep.abs() && e0.abs() < 1e-2 * samples[i].1 {
                let (x, v) = minimize_abs_eigenvalue(model, a, k, pts[i - 1], pts[i + 1])?;
                // the minimum must be a genuine zero, far below the neighbouring
                // samples and above the rounding level there
                let floor = em.abs().min(ep.abs());
                let resolved = noise(samples[i].1) <= 1e-3 * floor && v <= TANGENCY_DROP * floor;
                if resolved && v <= TANGENCY_TOL * samples[i].1 {
                    found.push(x);
                }
            }
        }
    }
    Ok(found)
}

fn regular_root(model: &ScatteringModel, a: &TruncationHeights, s: f64, multiplicity: usize) -> Result<SecularRoot> {
    let m = super::secular_matrix(model, c(s), a)?;
    let n = m.nrows();
    let sys = m.transpose() + CMatrix::identity(n, n);
    let (svs, vecs) = linalg::smallest_right_vectors(&sys, multiplicity);
    let nullspace: Vec<CVector> = vecs.iter().map(linalg::normalize_phase).collect();
    let residual = svs.iter().cloned().fold(0.0, f64::max);
    Ok(SecularRoot {
        param: SpectralParameter::real(s)?,
        alpha: nullspace[0].clone(),
        nullspace,
        multiplicity,
        class: RootClass::Regular,
        residual,
    })
}

/// The mixed matrix K with Kᵗα = 0 at a pole: rows i ∈ Q carry the regular
/// part of φ_ij, rows i ∈ P the residues, plus a_j^{2s−1} on the Q-diagonal.
fn mixed_matrix(model: &ScatteringModel, a: &TruncationHeights, s: f64, polar: &[usize]) -> Result<CMatrix> {
    let g = model.regular_part(s)?;
    let r = model.residue(s)?;
    let n = model.dim();
    let mut k = CMatrix::zeros(n, n);
    for i in 0..n {
        let src = if polar.contains(&i) { &r } else { &g };
        for j in 0..n {
            k[(i, j)] = src[(i, j)];
        }
    }
    for (j, &aj) in a.as_slice().iter().enumerate() {
        if !polar.contains(&j) {
            k[(j, j)] += c(aj.powf(2.0 * s - 1.0));
        }
    }
    Ok(k)
}

/// Solves the mixed system at a singular pole. `Ok(None)` when only the
/// trivial solution exists; `DegenerateNullspace` when every solution
/// vanishes on Q(s).
pub fn mixed_root_at(model: &ScatteringModel, a: &TruncationHeights, s_pole: f64) -> Result<Option<SecularRoot>> {
    let (root, _) = mixed_root_with_sigma(model, a, s_pole)?;
    Ok(root)
}

fn mixed_root_with_sigma(model: &ScatteringModel, a: &TruncationHeights, s_pole: f64) -> Result<(Option<SecularRoot>, f64)> {
    let cl = model.classify(s_pole);
    let s = model
        .pole_near(s_pole, crate::scattering::POLE_MATCH_TOL)
        .ok_or(Error::NotAPole(s_pole))?
        .s;
    if cl.class != SingularityClass::Singular {
        return Err(Error::Domain(format!("s = {s} is not a mixed singular point")));
    }
    let k = mixed_matrix(model, a, s, &cl.polar)?;
    let kt = k.transpose();
    let norm = linalg::spectral_norm(&kt);
    let (svs, _) = linalg::svd_right(&kt);
    let sigma = svs.last().cloned().unwrap_or(0.0) / norm.max(f64::MIN_POSITIVE);
    let null = linalg::nullspace(&kt, RANK_RTOL, norm);
    if null.is_empty() {
        return Ok((None, sigma));
    }
    // admissible combinations: those with weight on Q
    let m = null.len();
    let q = &cl.regular;
    let mut nq = CMatrix::zeros(q.len(), m);
    for (col, v) in null.iter().enumerate() {
        for (row, &j) in q.iter().enumerate() {
            nq[(row, col)] = v[j];
        }
    }
    let (q_svs, q_vecs) = linalg::svd_right(&nq);
    let mut basis = Vec::new();
    for (idx, &sv) in q_svs.iter().enumerate() {
        if sv > SUPPORT_TOL {
            let coeffs = q_vecs.column(idx);
            let mut alpha = CVector::zeros(model.dim());
            for (col, v) in null.iter().enumerate() {
                alpha += v * coeffs[col];
            }
            basis.push(linalg::normalize_phase(&alpha));
        }
    }
    if basis.is_empty() {
        return Err(Error::DegenerateNullspace(s));
    }
    let residual = basis.iter().map(|v| (&kt * v).norm()).fold(0.0, f64::max);
    let root = SecularRoot {
        param: SpectralParameter::real(s)?,
        alpha: basis[0].clone(),
        multiplicity: basis.len(),
        nullspace: basis,
        class: RootClass::SingularMixed,
        residual,
    };
    Ok((Some(root), sigma))
}

/// All Δ_a-eigenvalues with s in `window` ∩ (1/2, 1], s = 1/2 excluded.
pub fn real_branch_roots(model: &ScatteringModel, a: &TruncationHeights, window: (f64, f64)) -> Result<RealBranchReport> {
    if a.len() != model.dim() {
        return Err(Error::Dimension(format!("{} heights for {} cusps", a.len(), model.dim())));
    }
    let lo = window.0.max(0.5);
    let hi = window.1.min(1.0);
    let mut report = RealBranchReport {
        roots: Vec::new(),
        poles: Vec::new(),
    };
    if !(hi > lo) {
        return Ok(report);
    }
    let mut cuts: Vec<f64> = model
        .poles()
        .iter()
        .map(|p| p.s)
        .filter(|&p| p >= lo && p <= hi)
        .collect();
    cuts.sort_by(f64::total_cmp);

    let mut bounds = vec![(lo, lo == 0.5 || cuts.first() == Some(&lo))];
    for &p in &cuts {
        if p > lo && p < hi {
            bounds.push((p, true));
        }
    }
    bounds.push((hi, cuts.last() == Some(&hi)));

    let mut crossings = Vec::new();
    for w in bounds.windows(2) {
        let ((l, lo_open), (r, hi_open)) = (w[0], w[1]);
        let pts = segment_grid(l, r, lo_open, hi_open);
        crossings.extend(segment_roots(model, a, &pts)?);
    }
    crossings.retain(|&s| cuts.iter().all(|p| (s - p).abs() > POLE_EXCLUSION));
    crossings.sort_by(f64::total_cmp);

    let mut i = 0;
    while i < crossings.len() {
        let mut j = i + 1;
        while j < crossings.len() && crossings[j] - crossings[i] <= GROUPING {
            j += 1;
        }
        let group = &crossings[i..j];
        let s = group.iter().sum::<f64>() / group.len() as f64;
        report.roots.push(regular_root(model, a, s, group.len())?);
        i = j;
    }

    for &p in &cuts {
        let class = model.classify(p).class;
        let exam = match class {
            SingularityClass::CompletelySingular => PoleExamination {
                s: p,
                class,
                verdict: PoleVerdict::Barrier,
                relative_sigma_min: f64::NAN,
            },
            SingularityClass::Singular => match mixed_root_with_sigma(model, a, p) {
                Ok((Some(root), sigma)) => {
                    let multiplicity = root.multiplicity;
                    report.roots.push(root);
                    PoleExamination {
                        s: p,
                        class,
                        verdict: PoleVerdict::Root { multiplicity },
                        relative_sigma_min: sigma,
                    }
                }
                Ok((None, sigma)) => PoleExamination {
                    s: p,
                    class,
                    verdict: PoleVerdict::NoSolution,
                    relative_sigma_min: sigma,
                },
                Err(Error::DegenerateNullspace(_)) => PoleExamination {
                    s: p,
                    class,
                    verdict: PoleVerdict::Degenerate,
                    relative_sigma_min: 0.0,
                },
                Err(e) => return Err(e),
            },
            SingularityClass::Regular => continue,
        };
        report.poles.push(exam);
    }
    report.roots.sort_by(|x, y| x.param.s.re.total_cmp(&y.param.s.re));
    Ok(report)
}

/// Real function whose sign changes on (1/2, 1] are the real-branch roots,
/// including roots sitting on mixed poles: det(M(s) + I) with every pole of
/// order r_p multiplied out by (s − s_p)^{r_p}.
pub fn determinant_scan_function(model: &ScatteringModel, a: &TruncationHeights, s: f64) -> Result<f64> {
    let m = super::secular_matrix(model, c(s), a)?;
    let n = m.nrows();
    let det = (m + CMatrix::identity(n, n)).determinant();
    let mut v = det.re;
    for p in model.poles() {
        v *= (s - p.s).powi(model.residue_rank(p.s)? as i32);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::rotation;

    fn heights(v: &[f64]) -> TruncationHeights {
        TruncationHeights::new(v.to_vec()).unwrap()
    }

    /// Scalar oracle for β = 1: s·a^{1−2s} = 1 − s.
    fn scalar_root(a: f64) -> f64 {
        let f = |s: f64| s * a.powf(1.0 - 2.0 * s) - (1.0 - s);
        let (mut lo, mut hi) = (0.5 + 1e-9, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (f(lo) > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn beta_one_roots_match_scalar_oracle() {
        let m = ScatteringModel::synthetic_diagonal(&[1.0]).unwrap();
        for &a in &[10.0, 100.0] {
            let rep = real_branch_roots(&m, &heights(&[a]), (0.5, 1.0)).unwrap();
            assert_eq!(rep.roots.len(), 1);
            let r = &rep.roots[0];
            assert!((r.param.s.re - scalar_root(a)).abs() < 1e-10);
            assert!(r.residual < 1e-8);
        }
        let r10 = real_branch_roots(&m, &heights(&[10.0]), (0.5, 1.0)).unwrap().roots[0].param;
        assert!((r10.s.re - 0.79706).abs() < 1e-5 && (r10.lambda - 0.16176).abs() < 1e-5);
        // below e² there is no real root
        let rep = real_branch_roots(&m, &heights(&[5.0]), (0.5, 1.0)).unwrap();
        assert!(rep.roots.is_empty());
        assert_eq!(rep.poles[0].verdict, PoleVerdict::Barrier);
    }

    #[test]
    fn mixed_root_exists_only_at_nine() {
        let m = ScatteringModel::synthetic_diagonal(&[1.0, 0.75]).unwrap();
        let r = mixed_root_at(&m, &heights(&[9.0, 2.0]), 0.75).unwrap().unwrap();
        assert_eq!(r.class, RootClass::SingularMixed);
        assert!((r.param.lambda - 0.1875).abs() < 1e-15);
        assert!((r.alpha[0].norm() - 1.0).abs() < 1e-12 && r.alpha[1].norm() < 1e-12);
        for &a1 in &[8.5, 9.0 - 1e-6, 9.0 + 1e-6, 9.5] {
            assert!(mixed_root_at(&m, &heights(&[a1, 2.0]), 0.75).unwrap().is_none(), "{a1}");
        }
        let rep = real_branch_roots(&m, &heights(&[9.0, 2.0]), (0.5, 1.0)).unwrap();
        assert!(rep.roots.iter().any(|r| r.class == RootClass::SingularMixed));
    }

    #[test]
    fn one_cusp_pole_is_barrier() {
        let m = ScatteringModel::synthetic_diagonal(&[0.75]).unwrap();
        for &a in &[2.0, 9.0, 60.0, 200.0] {
            let rep = real_branch_roots(&m, &heights(&[a]), (0.5, 1.0)).unwrap();
            assert_eq!(rep.poles[0].verdict, PoleVerdict::Barrier);
            assert!(rep.roots.iter().all(|r| (r.param.s.re - 0.75).abs() > 1e-6));
        }
    }

    #[test]
    fn double_root_has_multiplicity_two() {
        let m = ScatteringModel::synthetic(vec![0.9, 0.9], rotation(45.0)).unwrap();
        let rep = real_branch_roots(&m, &heights(&[50.0, 50.0]), (0.5, 1.0)).unwrap();
        assert_eq!(rep.roots.len(), 1);
        assert_eq!(rep.roots[0].multiplicity, 2);
        assert!(rep.roots[0].residual < 1e-8);
    }

    #[test]
    fn window_partition_is_consistent() {
        let m = ScatteringModel::synthetic(vec![1.0, 0.8], rotation(30.0)).unwrap();
        let a = heights(&[40.0, 60.0]);
        let whole = real_branch_roots(&m, &a, (0.5, 1.0)).unwrap().roots;
        let mut parts = real_branch_roots(&m, &a, (0.5, 0.7)).unwrap().roots;
        parts.extend(real_branch_roots(&m, &a, (0.7, 1.0)).unwrap().roots);
        assert_eq!(whole.len(), parts.len());
        for (x, y) in whole.iter().zip(&parts) {
            assert!((x.param.s.re - y.param.s.re).abs() < 1e-10);
        }
    }
}
