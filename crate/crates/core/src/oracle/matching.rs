//! Transfer conditions across the horocycles H_{a_j} for a truncated
//! zero-mode profile.

use serde::Serialize;

use crate::cuspfourier::zero_mode_basis;
use crate::eisenstein::{TruncatedProfile, CONTINUITY_TOL};
use crate::Complex64;

/// Ten times the production continuity tolerance.
pub const VALUE_TOL: f64 = 10.0 * CONTINUITY_TOL;
/// Finite-difference derivatives are compared at this relative accuracy.
pub const JUMP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CuspMatching {
    pub height: f64,
    /// |u(a⁻) − u(a⁺)| relative to the size of the zero-mode terms.
    pub value_mismatch: f64,
    /// ∂_y u(a⁺) − ∂_y u(a⁻) from one-sided differences.
    pub derivative_jump: Complex64,
    /// Minus the removed zero mode's derivative.
    pub expected_jump: Complex64,
    pub jump_error: f64,
    /// Variation of the jump along the horocycle. Zero-mode data carries no
    /// x-dependence, so this is zero unless a caller supplies full samples.
    pub constancy_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchingDatum {
    pub cusps: Vec<CuspMatching>,
    pub passes: bool,
}

fn scale(tp: &TruncatedProfile, j: usize, y: f64) -> f64 {
    let (u, v) = zero_mode_basis(tp.profile.s).eigenfunction_pair(y);
    ((tp.profile.first[j] * u).norm() + (tp.profile.second[j] * v).norm()).max(f64::MIN_POSITIVE)
}

/// One-sided fourth-order derivative of g at y, stepping by ±h.
fn one_sided(g: impl Fn(f64) -> Complex64, y: f64, h: f64) -> Complex64 {
    (25.0 * g(y) - 48.0 * g(y + h) + 36.0 * g(y + 2.0 * h) - 16.0 * g(y + 3.0 * h) + 3.0 * g(y + 4.0 * h))
        / (-12.0 * h)
}

/// The nonconstant Fourier modes are smooth across H_a, so only the zero
/// mode contributes to the value and derivative jumps.
pub fn matching_check(tp: &TruncatedProfile) -> MatchingDatum {
    let mut cusps = Vec::with_capacity(tp.heights.len());
    for (j, &aj) in tp.heights.iter().enumerate() {
        let sc = scale(tp, j, aj);
        let below = tp.value(j, aj);
        let above = tp.value(j, aj * (1.0 + 4.0 * f64::EPSILON));
        let h = 1e-3 * aj;
        let d_below = one_sided(|y| tp.value(j, y), aj, -h);
        let d_above = one_sided(|y| tp.value(j, y), aj * (1.0 + 4.0 * f64::EPSILON), h);
        let mean = d_above - d_below;
        let expected = -tp.profile.derivative(j, aj);
        let dscale = (sc / aj).max(expected.norm());
        cusps.push(CuspMatching {
            height: aj,
            value_mismatch: (below - above).norm() / sc,
            derivative_jump: mean,
            expected_jump: expected,
            jump_error: (mean - expected).norm() / dscale,
            constancy_defect: 0.0,
        });
    }
    let passes = cusps
        .iter()
        .all(|c| c.value_mismatch <= VALUE_TOL && c.jump_error <= JUMP_TOL && c.constancy_defect <= VALUE_TOL);
    MatchingDatum { cusps, passes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::{eigenfunction_profile, truncate_zero_mode};
    use crate::scattering::ScatteringModel;
    use crate::secular::real_branch_roots;
    use crate::surface::TruncationHeights;

    #[test]
    fn passes_at_root_and_fails_nearby() {
        let m = ScatteringModel::synthetic_diagonal(&[1.0]).unwrap();
        let a = TruncationHeights::new(vec![10.0]).unwrap();
        let root = real_branch_roots(&m, &a, (0.5, 1.0)).unwrap().roots[0].clone();
        let s = root.param.s;
        let p = eigenfunction_profile(&m, s, &root.alpha).unwrap();
        let d = matching_check(&truncate_zero_mode(&p, &a).unwrap());
        assert!(d.passes, "{d:?}");
        for ds in [-1e-3, 1e-3] {
            let p = eigenfunction_profile(&m, s + ds, &root.alpha).unwrap();
            assert!(!matching_check(&truncate_zero_mode(&p, &a).unwrap()).passes);
        }
    }
}
