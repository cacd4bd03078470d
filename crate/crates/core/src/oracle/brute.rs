//! Dense determinant scan on the real branch, independent of the
//! eigenvalue-based root finder.
//!
//! The scanned function is D(s) = det(M(s)+I)·Π_p (s−s_p)^{r_p} / (s−1/2)^m
//! with r_p the residue rank at each pole and m = dim E⁻. It is finite at the
//! poles, where it is proportional to the determinant of the mixed system, so
//! mixed roots appear as ordinary sign changes and barriers as none.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scattering::ScatteringModel;
use crate::secular::{determinant_scan_function, real_branch_roots};
use crate::surface::TruncationHeights;

pub const MAX_STEP: f64 = 1e-4;
/// Grid points this close to a pole are skipped.
const POLE_SKIP: f64 = 1e-7;
/// Minimum of |D| accepted as a double root, relative to nearby |D|.
const TANGENCY_RTOL: f64 = 1e-8;
/// Oracle root positions are compared to the solver at this accuracy.
pub const POSITION_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteForceReport {
    /// Approximate s of each distinct root.
    pub roots: Vec<f64>,
    pub tangencies: usize,
    pub grid_points: usize,
}

fn deflated(model: &ScatteringModel, a: &TruncationHeights, s: f64, minus_dim: i32) -> Result<f64> {
    Ok(determinant_scan_function(model, a, s)? / (s - 0.5).powi(minus_dim))
}

/// Sign changes and tangential zeros of D on a uniform grid in `window`.
pub fn brute_force_secular(
    model: &ScatteringModel,
    a: &TruncationHeights,
    window: (f64, f64),
    step: f64,
) -> Result<BruteForceReport> {
    if !(step > 0.0 && step <= MAX_STEP) {
        return Err(Error::Grid(format!("step {step} is not in (0, {MAX_STEP}]")));
    }
    let lo = window.0.max(0.5);
    let hi = window.1.min(1.0);
    let (vals, _) = linalg::hermitian_eigen(&model.at_half()?);
    let minus_dim = vals.iter().filter(|v| **v < 0.0).count() as i32;
    let poles: Vec<f64> = model.poles().iter().map(|p| p.s).collect();

    let mut grid = Vec::new();
    let count = ((hi - lo) / step).floor() as usize;
    for k in 0..=count {
        let s = lo + k as f64 * step;
        if s <= 0.5 || poles.iter().any(|p| (s - p).abs() < POLE_SKIP) {
            continue;
        }
        grid.push((s, deflated(model, a, s, minus_dim)?));
    }
    let mut roots = Vec::new();
    for w in grid.windows(2) {
        let ((s0, d0), (s1, d1)) = (w[0], w[1]);
        if d0 == 0.0 || (d0 > 0.0) != (d1 > 0.0) {
            // linear interpolation is enough for the position check
            roots.push(if d0 == d1 { s0 } else { s0 - d0 * (s1 - s0) / (d1 - d0) });
        }
    }
    let mut tangencies = 0;
    for i in 1..grid.len().saturating_sub(1) {
        let (dm, d0, dp) = (grid[i - 1].1, grid[i].1, grid[i + 1].1);
        let same = (dm > 0.0) == (d0 > 0.0) && (d0 > 0.0) == (dp > 0.0);
        if !(same && d0.abs() < dm.abs() && d0.abs() <= dp.abs()) {
            continue;
        }
        let (mut l, mut r) = (grid[i - 1].0, grid[i + 1].0);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let f = |s: f64| deflated(model, a, s, minus_dim).map(f64::abs);
        for _ in 0..80 {
            let x1 = r - g * (r - l);
            let x2 = l + g * (r - l);
            if f(x1)? < f(x2)? {
                r = x2;
            } else {
                l = x1;
            }
        }
        let x = 0.5 * (l + r);
        let reference = dm.abs().max(dp.abs());
        if f(x)? <= TANGENCY_RTOL * reference {
            roots.push(x);
            tangencies += 1;
        }
    }
    roots.sort_by(f64::total_cmp);
    Ok(BruteForceReport {
        roots,
        tangencies,
        grid_points: grid.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootComparison {
    pub oracle: Vec<f64>,
    pub solver: Vec<f64>,
    pub counts_match: bool,
    pub max_position_error: f64,
}

impl RootComparison {
    pub fn passes(&self) -> bool {
        self.counts_match && self.max_position_error <= POSITION_TOL
    }
}

/// Distinct real-branch roots from the solver against the dense scan.
pub fn compare_real_roots(model: &ScatteringModel, a: &TruncationHeights, window: (f64, f64)) -> Result<RootComparison> {
    let oracle = brute_force_secular(model, a, window, MAX_STEP)?.roots;
    let solver: Vec<f64> = real_branch_roots(model, a, window)?
        .roots
        .iter()
        .map(|r| r.param.s.re)
        .collect();
    let counts_match = oracle.len() == solver.len();
    let max_position_error = if counts_match {
        oracle.iter().zip(&solver).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    Ok(RootComparison {
        oracle,
        solver,
        counts_match,
        max_position_error,
    })
}
