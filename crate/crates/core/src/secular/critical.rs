//! Roots on the critical line s = 1/2 + it.
//!
//! M(t) = Φ(1/2+it)·diag(a_j^{−2it}) is unitary; a root is a t where one of
//! its eigenphases passes an odd multiple of π. Eigenphases are followed
//! continuously by maximal-overlap matching of eigenvectors.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{secular_matrix, RootClass, SecularRoot, SpectralParameter, ROOT_TOL};
use crate::error::{Error, Result};
use crate::linalg;
use crate::scattering::{ScatteringModel, STRUCTURE_TOL};
use crate::surface::TruncationHeights;
use crate::{CMatrix, CVector, Complex64};

/// Eigenvalues closer than this are treated as one cluster when matching.
const CLUSTER_TOL: f64 = 1e-8;
/// Starting phases this close to an odd multiple of π are the s = 1/2 root.
const START_NOISE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalOptions {
    /// Base step in t.
    pub step: f64,
    /// Smallest t examined; t = 0 belongs to the quarter computation.
    pub t_min: f64,
    /// Each refinement level divides the step by 4.
    pub max_refinements: u32,
    /// Largest accepted eigenphase increment per step.
    pub max_phase_step: f64,
    /// Smallest accepted eigenvector overlap per step.
    pub min_overlap: f64,
    /// Crossings closer than this form one multiple root.
    pub grouping: f64,
}

impl Default for CriticalOptions {
    fn default() -> Self {
        CriticalOptions {
            step: 0.01,
            t_min: 1e-9,
            max_refinements: 2,
            max_phase_step: PI / 4.0,
            min_overlap: 0.5,
            grouping: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
struct Frame {
    t: f64,
    vals: Vec<Complex64>,
    vecs: CMatrix,
    /// Unwrapped eigenphases, indexed like `vals`.
    theta: Vec<f64>,
}

fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

fn decompose(model: &ScatteringModel, a: &TruncationHeights, t: f64) -> Result<(Vec<Complex64>, CMatrix)> {
    let m = secular_matrix(model, Complex64::new(0.5, t), a)?;
    let defect = linalg::unitarity_defect(&m);
    if !(defect <= STRUCTURE_TOL) {
        return Err(Error::StructureViolation {
            site: format!("s = 1/2 + {t}i"),
            detail: format!("secular matrix not unitary (defect {defect:.3e})"),
        });
    }
    Ok(linalg::unitary_eigen(&m))
}

/// Weight of `v` in the eigenspace of `vals[l]`.
fn cluster_overlap(v: &CVector, vals: &[Complex64], vecs: &CMatrix, l: usize) -> f64 {
    let mut acc = 0.0;
    for m in 0..vals.len() {
        if (vals[m] - vals[l]).norm() <= CLUSTER_TOL {
            acc += vecs.column(m).dotc(v).norm_sqr();
        }
    }
    acc.sqrt()
}

/// Greedy maximal-overlap assignment old index k → new index perm[k], with
/// the overlap achieved.
fn assign(prev: &Frame, vals: &[Complex64], vecs: &CMatrix) -> Vec<(usize, f64)> {
    let n = vals.len();
    let mut scored = Vec::with_capacity(n * n);
    for k in 0..n {
        let v = prev.vecs.column(k).into_owned();
        for l in 0..n {
            let ov = cluster_overlap(&v, vals, vecs, l);
            let score = ov - 1e-3 * (vals[l] - prev.vals[k]).norm();
            scored.push((score, ov, k, l));
        }
    }
    scored.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut out = vec![(usize::MAX, 0.0); n];
    let mut taken = vec![false; n];
    for (_, ov, k, l) in scored {
        if out[k].0 == usize::MAX && !taken[l] {
            out[k] = (l, ov);
            taken[l] = true;
        }
    }
    out
}

/// One continuation step; `None` when the step is too coarse.
fn try_step(model: &ScatteringModel, a: &TruncationHeights, prev: &Frame, t: f64, opts: &CriticalOptions) -> Result<Option<Frame>> {
    let (vals, vecs) = decompose(model, a, t)?;
    let perm = assign(prev, &vals, &vecs);
    let n = vals.len();
    let mut next = Frame {
        t,
        vals: Vec::with_capacity(n),
        vecs: CMatrix::zeros(n, n),
        theta: Vec::with_capacity(n),
    };
    for (k, &(l, ov)) in perm.iter().enumerate() {
        let dphi = wrap(vals[l].arg() - prev.vals[k].arg());
        if ov < opts.min_overlap || dphi.abs() > opts.max_phase_step {
            return Ok(None);
        }
        next.vals.push(vals[l]);
        next.vecs.set_column(k, &vecs.column(l));
        next.theta.push(prev.theta[k] + dphi);
    }
    Ok(Some(next))
}

/// Advances to `t`, subdividing by 4 up to `level` times; pushes every
/// accepted frame.
fn advance(
    model: &ScatteringModel,
    a: &TruncationHeights,
    prev: &Frame,
    t: f64,
    level: u32,
    opts: &CriticalOptions,
    out: &mut Vec<Frame>,
) -> Result<()> {
    if let Some(f) = try_step(model, a, prev, t, opts)? {
        out.push(f);
        return Ok(());
    }
    if level >= opts.max_refinements {
        return Err(Error::PhaseTrackingLost(prev.t));
    }
    let t0 = prev.t;
    for k in 1..=4 {
        let target = t0 + (t - t0) * k as f64 / 4.0;
        let from = out.last().cloned().unwrap_or_else(|| prev.clone());
        let from = if from.t < t0 { prev.clone() } else { from };
        advance(model, a, &from, target, level + 1, opts, out)?;
    }
    Ok(())
}

/// Index of the odd multiple of π strictly below θ: ⌊(θ − π)/2π⌋.
fn odd_index(theta: f64) -> i64 {
    ((theta - PI) / (2.0 * PI)).floor() as i64
}

/// Unwrapped phase of branch k of `left` continued to τ in one step.
fn phase_at(model: &ScatteringModel, a: &TruncationHeights, left: &Frame, k: usize, tau: f64) -> Result<f64> {
    let (vals, vecs) = decompose(model, a, tau)?;
    let v = left.vecs.column(k).into_owned();
    let l = (0..vals.len())
        .max_by(|&x, &y| {
            let sx = cluster_overlap(&v, &vals, &vecs, x) - 1e-3 * (vals[x] - left.vals[k]).norm();
            let sy = cluster_overlap(&v, &vals, &vecs, y) - 1e-3 * (vals[y] - left.vals[k]).norm();
            sx.total_cmp(&sy)
        })
        .unwrap_or(0);
    Ok(left.theta[k] + wrap(vals[l].arg() - left.vals[k].arg()))
}

fn refine_crossing(model: &ScatteringModel, a: &TruncationHeights, left: &Frame, right_t: f64, k: usize, target: f64) -> Result<f64> {
    let (mut lo, mut hi) = (left.t, right_t);
    let below = left.theta[k] < target;
    for _ in 0..200 {
        if hi - lo <= 0.01 * ROOT_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if (phase_at(model, a, left, k, mid)? < target) == below {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Δ_a-eigenvalues λ = 1/4 + t² with t in `t_window`, t > 0.
pub fn critical_line_roots(
    model: &ScatteringModel,
    a: &TruncationHeights,
    t_window: (f64, f64),
    opts: &CriticalOptions,
) -> Result<Vec<SecularRoot>> {
    if a.len() != model.dim() {
        return Err(Error::Dimension(format!("{} heights for {} cusps", a.len(), model.dim())));
    }
    let t_start = t_window.0.max(opts.t_min);
    let t_end = t_window.1;
    if !(t_end > t_start) {
        return Ok(Vec::new());
    }
    if !(opts.step > 0.0) {
        return Err(Error::Grid(format!("step {} is not positive", opts.step)));
    }
    let (vals, vecs) = decompose(model, a, t_start)?;
    let theta: Vec<f64> = vals.iter().map(|v| v.arg()).collect();
    let start_artifact: Vec<bool> = theta
        .iter()
        .map(|th| (th.abs() - PI).abs() <= START_NOISE)
        .collect();
    let mut frame = Frame {
        t: t_start,
        vals,
        vecs,
        theta,
    };

    let mut crossings = Vec::new();
    let steps = ((t_end - t_start) / opts.step).ceil().max(1.0) as usize;
    let mut first = true;
    for i in 1..=steps {
        let t = if i == steps {
            t_end
        } else {
            t_start + (t_end - t_start) * i as f64 / steps as f64
        };
        let mut frames = Vec::new();
        advance(model, a, &frame, t, 0, opts, &mut frames)?;
        for next in frames {
            for k in 0..next.theta.len() {
                if first && start_artifact[k] {
                    continue;
                }
                let (m0, m1) = (odd_index(frame.theta[k]), odd_index(next.theta[k]));
                if m0 != m1 {
                    let target = (2 * m0.max(m1) + 1) as f64 * PI;
                    crossings.push(refine_crossing(model, a, &frame, next.t, k, target)?);
                }
            }
            frame = next;
            first = false;
        }
    }

    crossings.sort_by(f64::total_cmp);
    let mut roots = Vec::new();
    let mut i = 0;
    while i < crossings.len() {
        let mut j = i + 1;
        while j < crossings.len() && crossings[j] - crossings[i] <= opts.grouping {
            j += 1;
        }
        let t = crossings[i..j].iter().sum::<f64>() / (j - i) as f64;
        let mult = j - i;
        let m = secular_matrix(model, Complex64::new(0.5, t), a)?;
        let n = m.nrows();
        let (svs, vecs) = linalg::smallest_right_vectors(&(m.transpose() + CMatrix::identity(n, n)), mult);
        let nullspace: Vec<CVector> = vecs.iter().map(linalg::normalize_phase).collect();
        roots.push(SecularRoot {
            param: SpectralParameter::critical(t)?,
            alpha: nullspace[0].clone(),
            nullspace,
            multiplicity: mult,
            class: RootClass::Regular,
            residual: svs.iter().cloned().fold(0.0, f64::max),
        });
        i = j;
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(v: &[f64]) -> TruncationHeights {
        TruncationHeights::new(v.to_vec()).unwrap()
    }

    /// Roots of t ln a − arctan 2t = (m + 1)π... with m = −1 the small root.
    fn scalar_roots(a: f64, t_max: f64) -> Vec<f64> {
        let g = |t: f64| 2.0 * (2.0 * t).atan() - PI - 2.0 * t * a.ln();
        let mut out = Vec::new();
        let n = 200_000;
        let mut prev = (1e-9, g(1e-9));
        for k in 1..=n {
            let t = 1e-9 + (t_max - 1e-9) * k as f64 / n as f64;
            let v = g(t);
            let (m0, m1) = (odd_index(prev.1), odd_index(v));
            if m0 != m1 {
                let target = (2 * m0.max(m1) + 1) as f64 * PI;
                let (mut lo, mut hi) = (prev.0, t);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if (g(mid) < target) == (g(lo) < target) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                out.push(0.5 * (lo + hi));
            }
            prev = (t, v);
        }
        out
    }

    #[test]
    fn beta_one_first_root() {
        let m = ScatteringModel::synthetic_diagonal(&[1.0]).unwrap();
        let roots = critical_line_roots(&m, &h(&[10.0]), (0.0, 3.0), &CriticalOptions::default()).unwrap();
        assert_eq!(roots.len(), 1);
        let t = roots[0].param.t;
        assert!((t * 10f64.ln() - (2.0 * t).atan() - PI).abs() < 1e-9);
        assert!((t - 1.93685).abs() < 1e-5);
        assert!((roots[0].param.lambda - 4.0).abs() < 0.01);
        assert!(roots[0].residual < 1e-8);
    }

    #[test]
    fn matches_scalar_phase_oracle() {
        let m = ScatteringModel::synthetic_diagonal(&[1.0]).unwrap();
        for &a in &[3.0, 5.0, 7.0, 10.0, 60.0] {
            let got = critical_line_roots(&m, &h(&[a]), (0.0, 8.0), &CriticalOptions::default()).unwrap();
            let want = scalar_roots(a, 8.0);
            assert_eq!(got.len(), want.len(), "a = {a}");
            for (g, w) in got.iter().zip(&want) {
                assert!((g.param.t - w).abs() < 1e-8, "a = {a}: {} vs {w}", g.param.t);
            }
        }
    }

    #[test]
    fn decoupled_channels_give_union() {
        let m = ScatteringModel::synthetic_diagonal(&[1.0, 0.75]).unwrap();
        let both = critical_line_roots(&m, &h(&[10.0, 20.0]), (0.0, 5.0), &CriticalOptions::default()).unwrap();
        let one = critical_line_roots(&ScatteringModel::synthetic_diagonal(&[1.0]).unwrap(), &h(&[10.0]), (0.0, 5.0), &CriticalOptions::default()).unwrap();
        let two = critical_line_roots(&ScatteringModel::synthetic_diagonal(&[0.75]).unwrap(), &h(&[20.0]), (0.0, 5.0), &CriticalOptions::default()).unwrap();
        let mut expect: Vec<f64> = one.iter().chain(&two).map(|r| r.param.t).collect();
        expect.sort_by(f64::total_cmp);
        let got: Vec<f64> = both.iter().map(|r| r.param.t).collect();
        assert_eq!(got.len(), expect.len());
        for (g, e) in got.iter().zip(&expect) {
            assert!((g - e).abs() < 1e-8);
        }
    }

    #[test]
    fn non_unitary_model_is_rejected() {
        let m = ScatteringModel::affine(-1.0, -5.0);
        let r = critical_line_roots(&m, &h(&[5.0]), (0.0, 2.0), &CriticalOptions::default());
        assert!(matches!(r, Err(Error::StructureViolation { .. })));
    }

    #[test]
    fn coarse_step_fails_after_refinement() {
        let m = ScatteringModel::synthetic_diagonal(&[1.0]).unwrap();
        let opts = CriticalOptions {
            step: 2.0,
            ..CriticalOptions::default()
        };
        let r = critical_line_roots(&m, &h(&[1e6]), (0.0, 10.0), &opts);
        assert!(matches!(r, Err(Error::PhaseTrackingLost(_))));
    }
}
