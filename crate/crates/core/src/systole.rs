//! Lower-bound ingredients for the adapted analytic systole Λ_a(S): the
//! Faber–Krahn disc bound, the geodesic-annulus bound and the cusp Rayleigh
//! bound.

use serde::Serialize;
use std::f64::consts::PI;

use crate::cuspfourier::cusp_rayleigh_bound;
use crate::error::{Error, Result};
use crate::surface::{self, validate_truncation, SurfaceModel, TruncationHeights};

const SHOOT_RTOL: f64 = 1e-12;
const LAMBDA_RTOL: f64 = 1e-13;

/// Radius of the hyperbolic disc of area V = 2π(cosh R − 1).
pub fn hyperbolic_disc_radius(area: f64) -> Result<f64> {
    if !(area > 0.0 && area.is_finite()) {
        return Err(Error::Domain(format!("area {area} is not positive")));
    }
    Ok((1.0 + area / (2.0 * PI)).acosh())
}

/// Right-hand side of u″ + coth(r)u′ + λu = 0 as a first-order system.
fn radial_rhs(r: f64, y: [f64; 2], lambda: f64) -> [f64; 2] {
    [y[1], -y[1] / r.tanh() - lambda * y[0]]
}

/// Integrates the regular solution from the origin to R with an adaptive
/// Dormand–Prince 5(4) pair. Returns whether u vanished on (0, R].
fn has_node(lambda: f64, radius: f64) -> bool {
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    // series start u = 1 − λr²/4 away from the coth singularity
    let mut r = 1e-6 * radius;
    let mut y = [1.0 - lambda * r * r / 4.0, -lambda * r / 2.0];
    let mut h = 1e-3 * radius;
    while r < radius {
        h = h.min(radius - r);
        let mut k = [[0.0; 2]; 7];
        for i in 0..7 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(i) {
                yi[0] += h * A[i][j] * kj[0];
                yi[1] += h * A[i][j] * kj[1];
            }
            k[i] = radial_rhs(r + C[i] * h, yi, lambda);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for c in 0..2 {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for i in 0..7 {
                d5 += B5[i] * k[i][c];
                d4 += B4[i] * k[i][c];
            }
            y5[c] += h * d5;
            let scale = SHOOT_RTOL * (1.0 + y[c].abs().max(y5[c].abs()));
            err = err.max((h * (d5 - d4)).abs() / scale);
        }
        if err <= 1.0 {
            r += h;
            if y5[0] <= 0.0 {
                return true;
            }
            y = y5;
        }
        h *= (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
    }
    false
}

/// First Dirichlet eigenvalue of the hyperbolic geodesic disc of area V, by
/// shooting on the radial equation and bisection on the node count.
pub fn hyperbolic_disc_lambda0(area: f64) -> Result<f64> {
    let radius = hyperbolic_disc_radius(area)?;
    // no node for λ ≤ 1/4 on any finite disc
    let mut lo = 0.25;
    let mut hi = 0.25 + 1.0 / (radius * radius);
    while !has_node(hi, radius) {
        lo = hi;
        hi = 0.25 + 2.0 * (hi - 0.25);
        if !hi.is_finite() {
            return Err(Error::Convergence("no eigenvalue bracket for the disc".into()));
        }
    }
    while hi - lo > LAMBDA_RTOL * hi {
        let mid = 0.5 * (lo + hi);
        if has_node(mid, radius) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// 1/4 + min(π/|S|, sys²/|S|²).
pub fn geodesic_annulus_bound(area: f64, sys: f64) -> Result<f64> {
    if !(area > 0.0 && area.is_finite()) {
        return Err(Error::Domain(format!("area {area} is not positive")));
    }
    if !(sys > 0.0 && sys.is_finite()) {
        return Err(Error::Domain(format!("systole {sys} is not positive")));
    }
    Ok(0.25 + (PI / area).min(sys * sys / (area * area)))
}

/// π²a²: the Rayleigh bound in the cusp above height a for functions that
/// vanish somewhere on every horocycle. Only covers the cusp part of a
/// type-5 domain.
pub fn cusp_type5_ingredient(height: f64) -> Result<f64> {
    cusp_rayleigh_bound(height)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystoleReport {
    pub area: f64,
    pub systole: f64,
    /// Types 1–2: discs and their lifts.
    pub disc_bound: f64,
    /// Types 3–4: annuli around short geodesics.
    pub geodesic_annulus_bound: f64,
    pub certified_min_types_1_4: f64,
    /// π²a_i² per cusp; a partial ingredient, not a bound for type 5.
    pub cusp_bound_per_cusp: Vec<f64>,
    /// Type 5 exceeds 1/4 only qualitatively (by a compactness argument).
    pub type5_qualitative: bool,
}

pub fn systole_report(m: &SurfaceModel, a: &TruncationHeights) -> Result<SystoleReport> {
    let sys = m.systole_hint.ok_or(Error::MissingSystole)?;
    validate_truncation(m, a)?;
    let area = surface::area(m)?;
    let disc_bound = hyperbolic_disc_lambda0(area)?;
    let geodesic = geodesic_annulus_bound(area, sys)?;
    let cusp = a
        .as_slice()
        .iter()
        .map(|&h| cusp_type5_ingredient(h))
        .collect::<Result<Vec<_>>>()?;
    Ok(SystoleReport {
        area,
        systole: sys,
        disc_bound,
        geodesic_annulus_bound: geodesic,
        certified_min_types_1_4: disc_bound.min(geodesic),
        cusp_bound_per_cusp: cusp,
        type5_qualitative: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::ScatteringModel;
    use crate::surface::Topology;

    /// Cell-centred finite differences for −(sinh r u′)′ = λ sinh r u on
    /// [0, R], u(R) = 0, smallest eigenvalue by Sturm-sequence bisection.
    fn fd_lambda0(radius: f64, n: usize) -> f64 {
        let h = radius / n as f64;
        let w: Vec<f64> = (0..n).map(|i| ((i as f64 + 0.5) * h).sinh()).collect();
        let flux = |i: usize| ((i as f64) * h).sinh() / (h * h);
        // symmetric tridiagonal after scaling by w^{-1/2}
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n];
        for i in 0..n {
            let left = if i == 0 { 0.0 } else { flux(i) };
            let right = if i + 1 == n { 2.0 * flux(n) } else { flux(i + 1) };
            diag[i] = (left + right) / w[i];
            if i + 1 < n {
                off[i] = -flux(i + 1) / (w[i] * w[i + 1]).sqrt();
            }
        }
        let below = |x: f64| {
            let mut count = 0;
            let mut q = 1.0f64;
            for i in 0..n {
                let prev = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] / q };
                q = diag[i] - x - prev;
                if q == 0.0 {
                    q = 1e-300;
                }
                if q < 0.0 {
                    count += 1;
                }
            }
            count
        };
        let (mut lo, mut hi) = (0.0, diag.iter().cloned().fold(0.0, f64::max) * 4.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if below(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn disc_matches_finite_differences() {
        let v = 2.0 * PI * (1f64.cosh() - 1.0);
        assert!((hyperbolic_disc_radius(v).unwrap() - 1.0).abs() < 1e-14);
        let shoot = hyperbolic_disc_lambda0(v).unwrap();
        let fd = fd_lambda0(1.0, 2000);
        assert!((shoot - fd).abs() < 1e-5, "{shoot} vs {fd}");
    }

    #[test]
    fn small_disc_is_euclidean() {
        let j01 = 2.404_825_557_695_773f64;
        let v = 0.01;
        let l = hyperbolic_disc_lambda0(v).unwrap();
        let e = PI * j01 * j01 / v;
        assert!((l - e).abs() / e < 0.05);
    }

    #[test]
    fn disc_bound_decreases_towards_quarter() {
        let vs = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0, 1e3, 1e4];
        let ls: Vec<f64> = vs.iter().map(|&v| hyperbolic_disc_lambda0(v).unwrap()).collect();
        assert!(ls.windows(2).all(|w| w[1] < w[0]));
        assert!(ls.iter().all(|&l| l > 0.25));
        // λ₀ − 1/4 ≈ π²/R² for large R
        let r = hyperbolic_disc_radius(1e4).unwrap();
        assert!((ls[9] - 0.25) / (PI * PI / (r * r)) > 0.5);
        assert!(hyperbolic_disc_lambda0(0.0).is_err());
    }

    #[test]
    fn geodesic_bound_values() {
        let v = geodesic_annulus_bound(2.0 * PI, 1.0).unwrap();
        assert!((v - (0.25 + 1.0 / (4.0 * PI * PI))).abs() < 1e-15);
        assert!((v - 0.2753303).abs() < 1e-7);
        assert_eq!(geodesic_annulus_bound(2.0 * PI, 10.0).unwrap(), 0.75);
        assert!(geodesic_annulus_bound(2.0 * PI, 1e-6).unwrap() - 0.25 < 1e-12);
        assert!(geodesic_annulus_bound(-1.0, 1.0).is_err());
    }

    #[test]
    fn cusp_ingredient_values() {
        assert_eq!(cusp_type5_ingredient(1.0).unwrap(), PI * PI);
        assert_eq!(cusp_type5_ingredient(3.0).unwrap(), 9.0 * PI * PI);
        assert!((cusp_type5_ingredient(1.0 / PI).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn report_composition() {
        let phi = ScatteringModel::synthetic_diagonal(&[1.0]).unwrap();
        let m = SurfaceModel::new("s", Topology::Surface { genus: 1, orientable: true }, vec![1.0], phi).unwrap();
        let a = TruncationHeights::new(vec![3.0]).unwrap();
        assert!(matches!(systole_report(&m, &a), Err(Error::MissingSystole)));
        let m = m.with_systole(1.0).unwrap();
        let r = systole_report(&m, &a).unwrap();
        let disc = hyperbolic_disc_lambda0(2.0 * PI).unwrap();
        assert_eq!(r.certified_min_types_1_4, disc.min(0.25 + 1.0 / (4.0 * PI * PI)));
        assert!(r.certified_min_types_1_4 > 0.25);
        assert_eq!(r.cusp_bound_per_cusp, vec![9.0 * PI * PI]);
        // even with a huge systole the annulus bound 1/4 + π/|S| stays below the disc bound
        let big = m.clone().with_systole(100.0).unwrap();
        let r = systole_report(&big, &a).unwrap();
        assert_eq!(r.certified_min_types_1_4, r.geodesic_annulus_bound);
        for v in [0.01, 1.0, 2.0 * PI, 100.0, 1e4] {
            assert!(hyperbolic_disc_lambda0(v).unwrap() > 0.25 + PI / v);
        }
    }
}
