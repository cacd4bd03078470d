//! Eigenvalue branches λ_j along a ray of truncation heights t·a₀.

use serde::{Deserialize, Serialize};

use super::{residual_spectrum, roots_between, spectrum, CriticalOptions, SecularRoot, SpectralParameter};
use crate::error::{Error, Result};
use crate::scattering::ScatteringModel;
use crate::surface::TruncationHeights;

pub const MIN_SAMPLES: usize = 8;
const BASE_T_MAX: f64 = 5.0;
const LARGEST_T_MAX: f64 = 40.0;
const WIDEN: f64 = 4.0;
/// Largest scale ratio between continuation steps.
const SUBSTEP_RATIO: f64 = 1.05;

/// Heights t·base for `samples` scales geometric in [scale_lo, scale_hi].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRay {
    pub base: TruncationHeights,
    pub scale_lo: f64,
    pub scale_hi: f64,
    pub samples: usize,
}

impl SweepRay {
    pub fn scales(&self) -> Vec<f64> {
        let r = (self.scale_hi / self.scale_lo).ln();
        (0..self.samples)
            .map(|k| self.scale_lo * (r * k as f64 / (self.samples - 1) as f64).exp())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchSample {
    pub scale: f64,
    pub heights: Vec<f64>,
    pub param: SpectralParameter,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchDiagnostics {
    pub strictly_decreasing: bool,
    /// First sample whose λ is not below its predecessor.
    pub first_violation: Option<usize>,
    /// Limit as a → ∞: the j-th residual eigenvalue, or 1/4.
    pub target: f64,
    /// λ at the last sample minus the target.
    pub final_gap: f64,
    /// The gap is positive and shrinking over the sweep.
    pub approaching: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralBranch {
    pub index: usize,
    pub samples: Vec<BranchSample>,
    pub diagnostics: BranchDiagnostics,
}

impl SpectralBranch {
    pub fn lambdas(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.param.lambda).collect()
    }
}

/// Eigenvalues with multiplicity and their parameters, up to a t cutoff.
fn eigen_list(model: &ScatteringModel, a: &TruncationHeights, t_max: f64) -> Result<Vec<SpectralParameter>> {
    let sp = spectrum(model, a, (0.5, 1.0), t_max)?;
    Ok(expand(&sp.roots))
}

fn expand(roots: &[SecularRoot]) -> Vec<SpectralParameter> {
    let mut out = Vec::new();
    for r in roots {
        for _ in 0..r.multiplicity {
            out.push(r.param);
        }
    }
    out
}

/// Eigenvalues with λ in [lo, hi], repeated by multiplicity.
fn eigen_between(model: &ScatteringModel, a: &TruncationHeights, lo: f64, hi: f64) -> Result<Vec<SpectralParameter>> {
    Ok(expand(&roots_between(model, a, (lo, hi), &CriticalOptions::default())?))
}

/// Follows the j-th eigenvalue (0-based, counted with multiplicity) from the
/// first scale of the ray. Between samples the ray is walked in small steps,
/// each taking the eigenvalue nearest the previous one.
pub fn branch_sweep(model: &ScatteringModel, ray: &SweepRay, j: usize) -> Result<SpectralBranch> {
    if ray.samples < MIN_SAMPLES {
        return Err(Error::Grid(format!("{} samples, need at least {MIN_SAMPLES}", ray.samples)));
    }
    if !(ray.scale_lo > 0.0 && ray.scale_hi > ray.scale_lo) {
        return Err(Error::Domain(format!(
            "scale interval [{}, {}] is not positive and increasing",
            ray.scale_lo, ray.scale_hi
        )));
    }
    let scales = ray.scales();
    let a0 = ray.base.scaled(scales[0])?;
    let mut t_max = BASE_T_MAX;
    let start = loop {
        let list = eigen_list(model, &a0, t_max)?;
        if list.len() > j {
            break list[j];
        }
        if t_max >= LARGEST_T_MAX {
            return Err(Error::Domain(format!(
                "only {} eigenvalues with t ≤ {t_max} at the first sample",
                list.len()
            )));
        }
        t_max *= 2.0;
    };
    let mut samples = vec![BranchSample {
        scale: scales[0],
        heights: a0.as_slice().to_vec(),
        param: start,
    }];
    let mut prev = start.lambda;
    let mut last_step = 0.0f64;
    for w in scales.windows(2) {
        let subs = ((w[1] / w[0]).ln() / SUBSTEP_RATIO.ln()).ceil().max(1.0) as usize;
        for k in 1..=subs {
            let sc = w[0] * (w[1] / w[0]).powf(k as f64 / subs as f64);
            let a = ray.base.scaled(sc)?;
            let width = 0.1 * prev.max(0.1) + 2.0 * last_step;
            let mut found = None;
            for win in [width, WIDEN * width] {
                found = eigen_between(model, &a, prev - win, prev + win)?
                    .into_iter()
                    .min_by(|x, y| (x.lambda - prev).abs().total_cmp(&(y.lambda - prev).abs()));
                if found.is_some() {
                    break;
                }
            }
            let param = found.ok_or(Error::BranchJump(sc))?;
            last_step = (param.lambda - prev).abs();
            prev = param.lambda;
            if k == subs {
                samples.push(BranchSample {
                    scale: w[1],
                    heights: a.as_slice().to_vec(),
                    param,
                });
            }
        }
    }

    let lambdas: Vec<f64> = samples.iter().map(|s| s.param.lambda).collect();
    let first_violation = (1..lambdas.len()).find(|&i| !(lambdas[i] < lambdas[i - 1]));
    let mut residual = Vec::new();
    for r in residual_spectrum(model)? {
        for _ in 0..r.multiplicity {
            residual.push(r.lambda);
        }
    }
    let target = residual.get(j).cloned().unwrap_or(0.25);
    let first_gap = lambdas[0] - target;
    let final_gap = lambdas[lambdas.len() - 1] - target;
    Ok(SpectralBranch {
        index: j,
        samples,
        diagnostics: BranchDiagnostics {
            strictly_decreasing: first_violation.is_none(),
            first_violation,
            target,
            final_gap,
            approaching: final_gap >= 0.0 && final_gap < first_gap,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::secular::Chart;

    fn ray(lo: f64, hi: f64, n: usize) -> SweepRay {
        SweepRay {
            base: TruncationHeights::new(vec![1.0]).unwrap(),
            scale_lo: lo,
            scale_hi: hi,
            samples: n,
        }
    }

    #[test]
    fn beta_one_ground_branch() {
        let m = ScatteringModel::synthetic_diagonal(&[1.0]).unwrap();
        let b = branch_sweep(&m, &ray(5.0, 500.0, 10), 0).unwrap();
        let l = b.lambdas();
        assert!(b.diagnostics.strictly_decreasing, "{l:?}");
        assert_eq!(b.diagnostics.target, 0.0);
        assert!(b.diagnostics.approaching);
        assert!(l[l.len() - 1] < 0.005 && l[l.len() - 1] > 0.0);
        // a = 5 < e²: the lowest eigenvalue sits on the critical line
        assert_eq!(b.samples[0].param.chart, Chart::CriticalLine);
        let t = b.samples[0].param.t;
        assert!((t * 5f64.ln() - (2.0 * t).atan()).abs() < 1e-8);
    }

    #[test]
    fn beta_one_first_excited_branch() {
        let m = ScatteringModel::synthetic_diagonal(&[1.0]).unwrap();
        let b = branch_sweep(&m, &ray(5.0, 500.0, 8), 1).unwrap();
        assert!(b.diagnostics.strictly_decreasing, "{:?}", b.samples);
        assert_eq!(b.diagnostics.target, 0.25);
        assert!(b.lambdas().iter().all(|&l| l > 0.25));
    }

    #[test]
    fn tampered_model_is_flagged() {
        let m = ScatteringModel::affine(-1.0, -5.0);
        let b = branch_sweep(&m, &ray(4.0, 10.0, 8), 0).unwrap();
        assert!(!b.diagnostics.strictly_decreasing);
        assert_eq!(b.diagnostics.first_violation, Some(1));
    }

    #[test]
    fn too_few_samples() {
        let m = ScatteringModel::synthetic_diagonal(&[1.0]).unwrap();
        assert!(matches!(branch_sweep(&m, &ray(5.0, 50.0, 4), 0), Err(Error::Grid(_))));
    }
}
