use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use pseudolap::cuspfourier::{cusp_rayleigh_bound, fourier_coefficient, mode_ode_residual, zero_mode_basis};
use pseudolap::eisenstein::{eisenstein_zero_mode, residue_zero_mode};
use pseudolap::linalg::{hermitian_defect, unitarity_defect};
use pseudolap::model_file::{builtin, bundled_models};
use pseudolap::oracle::compare_real_roots;
use pseudolap::scattering::rotation;
use pseudolap::secular::{count_below, real_branch_roots, secular_matrix};
use pseudolap::specfun::{bessel_i, bessel_k, completed_xi};
use pseudolap::surface::{area, euler_characteristic};
use pseudolap::systole::{geodesic_annulus_bound, hyperbolic_disc_lambda0};
use pseudolap::{CMatrix, ScatteringModel, SurfaceModel, Topology, TruncationHeights};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn heights(v: &[f64]) -> TruncationHeights {
    TruncationHeights::new(v.to_vec()).unwrap()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig::with_cases(cases)
}

proptest! {
    #![proptest_config(config(100))]

    #[test]
    fn xi_is_symmetric(re in -2.5f64..3.5, im in -10.0f64..10.0) {
        prop_assume!((re - 1.0).abs() > 1e-3 || im.abs() > 1e-3);
        prop_assume!(re.abs() > 1e-3 || im.abs() > 1e-3);
        let u = Complex64::new(re, im);
        let (a, b) = (completed_xi(u).unwrap(), completed_xi(1.0 - u).unwrap());
        prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0), "{} {}", a, b);
    }

    #[test]
    fn bessel_wronskian(nu in 0.0f64..5.0, x in 0.2f64..20.0) {
        let i = |v: f64| bessel_i(c(v), x).unwrap().re;
        let k = |v: f64| bessel_k(c(v), x).unwrap().re;
        let di = 0.5 * (i(nu - 1.0) + i(nu + 1.0));
        let dk = -0.5 * (k(nu - 1.0) + k(nu + 1.0));
        let w = i(nu) * dk - di * k(nu);
        prop_assert!((w + 1.0 / x).abs() <= 1e-8 / x, "W = {w}");
    }

    #[test]
    fn k_imaginary_order_is_real(tau in -20.0f64..20.0, x in 0.1f64..30.0) {
        let v = bessel_k(Complex64::new(0.0, tau), x).unwrap();
        prop_assert!(v.im.abs() <= 1e-12 * v.norm().max(f64::MIN_POSITIVE));
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn fourier_coefficients_are_orthogonal(m in -4i64..=4, k in -4i64..=4, y in 0.2f64..5.0) {
        let n = 64;
        let samples: Vec<Complex64> = (0..n)
            .map(|j| Complex64::from_polar(y.sqrt(), -2.0 * PI * (m * j) as f64 / n as f64))
            .collect();
        let f = fourier_coefficient(&samples, k, y).unwrap();
        let expected = if k == m { y } else { 0.0 };
        prop_assert!((f - c(expected)).norm() <= 1e-12 * y.max(1.0));
    }

    #[test]
    fn rayleigh_bound_increases(b in 0.01f64..10.0, db in 1e-6f64..5.0) {
        prop_assert!(cusp_rayleigh_bound(b + db).unwrap() > cusp_rayleigh_bound(b).unwrap());
    }

    #[test]
    fn scattering_structure_on_bundled_models(u in 0.0f64..1.0, t in 0.0f64..20.0) {
        for m in bundled_models().unwrap() {
            let phi = &m.scattering;
            let s = 0.5 + 0.5 * u;
            if phi.poles().iter().all(|p| (p.s - s).abs() > 1e-4) {
                prop_assert!(hermitian_defect(&phi.eval_real(s).unwrap()) <= 1e-8);
            }
            prop_assert!(unitarity_defect(&phi.eval(Complex64::new(0.5, t)).unwrap()) <= 1e-8);
        }
    }

    #[test]
    fn synthetic_functional_equation(b1 in 0.55f64..1.0, b2 in 0.55f64..1.0, deg in 0.0f64..180.0, re in 0.05f64..0.95, im in -5.0f64..5.0) {
        let m = ScatteringModel::synthetic(vec![b1, b2], rotation(deg)).unwrap();
        let s = Complex64::new(re, im);
        prop_assume!(m.poles().iter().all(|p| (s - p.s).norm() > 1e-3 && (1.0 - s - p.s).norm() > 1e-3));
        let prod = m.eval(s).unwrap() * m.eval(1.0 - s).unwrap();
        prop_assert!((prod - CMatrix::identity(2, 2)).norm() <= 1e-10);
    }

    #[test]
    fn synthetic_residues_positive_on_support(b1 in 0.55f64..1.0, b2 in 0.55f64..1.0, deg in 0.0f64..180.0) {
        let m = ScatteringModel::synthetic(vec![b1, b2], rotation(deg)).unwrap();
        for p in m.poles() {
            for i in m.pole_support(p) {
                prop_assert!(p.residue[(i, i)].re > 0.0);
            }
        }
    }

    #[test]
    fn zero_mode_rows_are_scattering_rows(u in 0.01f64..0.99, t in 0.0f64..10.0, critical in any::<bool>()) {
        let m = ScatteringModel::synthetic(vec![1.0, 0.8], rotation(30.0)).unwrap();
        let s = if critical { Complex64::new(0.5, t) } else { c(0.5 + 0.5 * u) };
        prop_assume!(m.poles().iter().all(|p| (s - p.s).norm() > 1e-6));
        let phi = m.eval(s).unwrap();
        for i in 0..2 {
            let p = eisenstein_zero_mode(&m, i, s).unwrap();
            for j in 0..2 {
                prop_assert_eq!(p.second[j], phi[(i, j)]);
                prop_assert_eq!(p.first[j], if i == j { c(1.0) } else { c(0.0) });
            }
        }
    }

    #[test]
    fn disc_bound_decreases_and_exceeds_quarter(v in 0.05f64..5000.0, ratio in 1.01f64..10.0) {
        let (l1, l2) = (hyperbolic_disc_lambda0(v).unwrap(), hyperbolic_disc_lambda0(v * ratio).unwrap());
        prop_assert!(l2 < l1);
        prop_assert!(l2 > 0.25);
    }

    #[test]
    fn geodesic_bound_formula(area in 0.1f64..100.0, sys in 0.01f64..10.0) {
        let expected = 0.25 + (PI / area).min(sys * sys / (area * area));
        prop_assert_eq!(geodesic_annulus_bound(area, sys).unwrap(), expected);
    }

    #[test]
    fn surface_invariants(genus in 0u32..4, cusps in 1usize..5, shift in 0usize..4) {
        prop_assume!(2 * genus as usize + cusps > 2);
        let betas: Vec<f64> = (0..cusps).map(|k| 0.6 + 0.1 * k as f64).collect();
        let build = |b: Vec<f64>| {
            SurfaceModel::new(
                "p",
                Topology::Surface { genus, orientable: true },
                vec![1.0; cusps],
                ScatteringModel::synthetic_diagonal(&b).unwrap(),
            )
            .unwrap()
        };
        let m = build(betas.clone());
        let mut rotated = betas;
        rotated.rotate_left(shift % cusps);
        let r = build(rotated);
        let a = area(&m).unwrap();
        prop_assert!(a.is_finite() && a > 0.0);
        prop_assert_eq!(euler_characteristic(&m), euler_characteristic(&r));
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn zero_mode_basis_solves_mode_equation(u in 0.0f64..1.0, t in 0.0f64..3.0, critical in any::<bool>()) {
        let s = if critical { Complex64::new(0.5, t) } else { c(0.5 + 0.5 * u) };
        let lambda = s * (1.0 - s);
        let b = zero_mode_basis(s);
        for pick in 0..2 {
            let f = |y: f64| { let (p, q) = b.coefficient_pair(y); if pick == 0 { p } else { q } };
            let r = mode_ode_residual(f, 0, lambda, 1.0, 10.0, 16).unwrap();
            prop_assert!(r <= 1e-8, "{}", r);
        }
    }

    #[test]
    fn residue_profiles_have_no_growing_part(b1 in 0.55f64..0.99, deg in 0.0f64..90.0) {
        let m = ScatteringModel::synthetic(vec![1.0, b1], rotation(deg)).unwrap();
        for p in m.poles().to_vec() {
            for i in m.pole_support(&p) {
                let prof = residue_zero_mode(&m, i, p.s).unwrap();
                prop_assert!(prof.first.iter().all(|z| *z == c(0.0)));
            }
        }
    }

    #[test]
    fn real_roots_solve_the_secular_system(beta in 0.55f64..1.0, deg in 0.0f64..90.0, a1 in 1.5f64..200.0, a2 in 1.5f64..200.0) {
        let m = ScatteringModel::synthetic(vec![1.0, beta], rotation(deg)).unwrap();
        let a = heights(&[a1, a2]);
        for r in real_branch_roots(&m, &a, (0.5, 1.0)).unwrap().roots {
            prop_assert!(r.residual <= 1e-8, "{:?}", r);
            let cl = m.classify(r.param.s.re);
            let q_weight: f64 = (0..2).filter(|j| !cl.polar.contains(j)).map(|j| r.alpha[j].norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(q_weight > 1e-6);
            if cl.polar.is_empty() {
                let mm = secular_matrix(&m, r.param.s, &a).unwrap();
                let lhs = mm.transpose() * &r.alpha + &r.alpha;
                prop_assert!(lhs.iter().all(|z| z.norm() <= 1e-8));
            }
        }
    }

    #[test]
    fn root_moves_right_as_a_grows(beta in 0.55f64..1.0, a in 8.0f64..300.0, ratio in 1.05f64..3.0) {
        let m = ScatteringModel::synthetic_diagonal(&[beta]).unwrap();
        let top = |a: f64| real_branch_roots(&m, &heights(&[a]), (0.5, 1.0)).unwrap().roots.last().map(|r| r.param.s.re);
        if let (Some(s1), Some(s2)) = (top(a), top(a * ratio)) {
            prop_assert!(s2 > s1);
        }
    }

    #[test]
    fn brute_force_agrees(beta in 0.55f64..1.0, deg in 0.0f64..90.0, a in 1.5f64..200.0) {
        let m = ScatteringModel::synthetic(vec![1.0, beta], rotation(deg)).unwrap();
        let cmp = compare_real_roots(&m, &heights(&[a, a]), (0.5, 1.0)).unwrap();
        prop_assert!(cmp.passes(), "{:?}", cmp);
    }

    #[test]
    fn counts_do_not_decrease(a in 1.2f64..100.0, ratio in 1.01f64..5.0) {
        for m in bundled_models().unwrap() {
            let n = m.num_cusps();
            let lo = count_below(&m, &TruncationHeights::uniform(n, a).unwrap(), 0.25).unwrap().total;
            let hi = count_below(&m, &TruncationHeights::uniform(n, a * ratio).unwrap(), 0.25).unwrap().total;
            prop_assert!(hi >= lo, "{}: {} then {}", m.name, lo, hi);
        }
    }
}

#[test]
fn builtin_mixing_is_orthogonal() {
    let m = builtin("rotated").unwrap();
    let u = rotation(30.0);
    assert!((u.transpose() * &u - DMatrix::<f64>::identity(2, 2)).norm() < 1e-15);
    assert_eq!(m.num_cusps(), 2);
}
