//! Acceptance criteria 1–10. Each criterion prints one PASS/FAIL line.
//!
//! Two sub-checks cannot be met by a correct implementation and are listed
//! in `UNATTAINABLE`; every other sub-check must pass.

use std::f64::consts::{E, PI};
use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;
use pseudolap::model_file::bundled_models;
use pseudolap::oracle::run_verification;
use pseudolap::scattering::StructureGrid;
use pseudolap::secular::{
    barrier_check, branch_sweep, count_below, critical_line_roots, mixed_root_at, quarter_multiplicity,
    quarter_transition, real_branch_roots, CriticalOptions, SweepRay,
};
use pseudolap::specfun::{bessel_k, completed_xi};
use pseudolap::systole::{cusp_type5_ingredient, geodesic_annulus_bound, hyperbolic_disc_lambda0};
use pseudolap::{ScatteringModel, TruncationHeights};

/// The scalar oracle puts λ₀ at a = 100 at 0.010819, and a disc of area 10⁴
/// has λ₀ ≈ 0.366.
const UNATTAINABLE: [&str; 2] = ["lambda0(100) = 0.0133 +- 1e-3", "disc lambda0(1e4) within 1e-3 of 1/4"];

struct Criterion {
    checks: Vec<(String, bool, String)>,
}

impl Criterion {
    fn new() -> Self {
        Criterion { checks: Vec::new() }
    }

    fn check(&mut self, name: &str, ok: bool, detail: String) {
        self.checks.push((name.to_string(), ok, detail));
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.1)
    }
}

fn h(v: &[f64]) -> TruncationHeights {
    TruncationHeights::new(v.to_vec()).unwrap()
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// s·a^{1−2s} = 1 − s on (1/2, 1).
fn scalar_real_root(a: f64) -> f64 {
    bisect(|s| s * a.powf(1.0 - 2.0 * s) - (1.0 - s), 0.5 + 1e-9, 1.0 - 1e-12)
}

fn beta_one() -> ScatteringModel {
    ScatteringModel::synthetic_diagonal(&[1.0]).unwrap()
}

fn lambda0(a: f64) -> f64 {
    let r = real_branch_roots(&beta_one(), &h(&[a]), (0.5, 1.0)).unwrap();
    r.roots[0].param.lambda
}

fn criterion1() -> Criterion {
    let mut c = Criterion::new();
    let start = Instant::now();
    let l = lambda0(10.0);
    let elapsed = start.elapsed().as_secs_f64();
    let s = scalar_real_root(10.0);
    let oracle = s * (1.0 - s);
    c.check("lambda0(10) = 0.1620 +- 1e-3", (l - 0.1620).abs() <= 1e-3, format!("{l:.6}"));
    c.check("matches scalar bisection", (l - oracle).abs() <= 1e-9, format!("oracle {oracle:.10}"));
    c.check("runtime < 1 s", elapsed < 1.0, format!("{elapsed:.3} s"));
    c
}

fn criterion2() -> Criterion {
    let mut c = Criterion::new();
    let (l10, l100) = (lambda0(10.0), lambda0(100.0));
    let s = scalar_real_root(100.0);
    c.check(UNATTAINABLE[0], (l100 - 0.0133).abs() <= 1e-3, format!("{l100:.6}, scalar oracle {:.6}", s * (1.0 - s)));
    c.check("lambda0(100) < lambda0(10)", l100 < l10, format!("{l100:.6} < {l10:.6}"));
    let ray = SweepRay {
        base: h(&[1.0]),
        scale_lo: 5.0,
        scale_hi: 500.0,
        samples: 25,
    };
    let b = branch_sweep(&beta_one(), &ray, 0).unwrap();
    c.check(
        "sweep on [5, 500] strictly decreasing",
        b.diagnostics.strictly_decreasing,
        format!("{} samples", b.samples.len()),
    );
    c.check("limit target 0", b.diagnostics.target == 0.0 && b.diagnostics.approaching, format!("final gap {:.3e}", b.diagnostics.final_gap));
    c
}

fn criterion3() -> Criterion {
    let mut c = Criterion::new();
    let m = beta_one();
    let tr = quarter_transition(&m, &h(&[1.0]), (5.0, 10.0)).unwrap();
    let width = (tr.bracket.0 - E * E).abs().max((tr.bracket.1 - E * E).abs());
    c.check("transition bracketed within 1e-10 of e^2", width <= 1e-10, format!("[{:.12}, {:.12}]", tr.bracket.0, tr.bracket.1));
    let mu = |a: f64| quarter_multiplicity(&m, &h(&[a])).unwrap().mu;
    c.check("mu(e^2) = 1", mu(E * E) == 1, format!("{}", mu(E * E)));
    c.check("mu(e^2 +- 0.1) = 0", mu(E * E - 0.1) == 0 && mu(E * E + 0.1) == 0, String::new());
    c
}

fn criterion4() -> Criterion {
    let mut c = Criterion::new();
    let roots = critical_line_roots(&beta_one(), &h(&[10.0]), (0.0, 3.0), &CriticalOptions::default()).unwrap();
    let t = roots[0].param.t;
    let l = roots[0].param.lambda;
    let oracle = bisect(|t| t * 10f64.ln() - (2.0 * t).atan() - PI, 1.0, 3.0);
    c.check("t = 1.936 +- 2e-3", (t - 1.936).abs() <= 2e-3, format!("{t:.6}"));
    c.check("lambda = 4.00 +- 1e-2", (l - 4.0).abs() <= 1e-2, format!("{l:.6}"));
    c.check("matches phase bisection", (t - oracle).abs() <= 1e-8, format!("oracle {oracle:.10}"));
    c
}

fn criterion5() -> Criterion {
    let mut c = Criterion::new();
    let m = ScatteringModel::modular().unwrap();
    let res = m.residue(1.0).unwrap()[(0, 0)].re;
    c.check("res phi(1) = 3/pi +- 1e-6", (res - 3.0 / PI).abs() <= 1e-6, format!("{res:.12}"));
    let half = m.eval_real(0.5).unwrap()[(0, 0)];
    c.check("phi(1/2) = -1 +- 1e-6", (half + 1.0).norm() <= 1e-6, format!("{half}"));
    let mut worst: f64 = 0.0;
    for model in bundled_models().unwrap() {
        let r = model.scattering.structure_report(&StructureGrid::standard(&model.scattering, 20)).unwrap();
        worst = worst.max(r.hermitian_defect).max(r.unitarity_defect);
    }
    c.check("structure defects <= 1e-8", worst <= 1e-8, format!("worst {worst:.3e}"));
    c
}

fn criterion6() -> Criterion {
    let mut c = Criterion::new();
    let m = ScatteringModel::synthetic_diagonal(&[1.0, 0.75]).unwrap();
    let at = |a1: f64| mixed_root_at(&m, &h(&[a1, 4.0]), 0.75).unwrap();
    let root = at(9.0);
    let alpha_ok = root
        .as_ref()
        .map(|r| (r.alpha[0].norm() - 1.0).abs() < 1e-10 && r.alpha[1].norm() < 1e-10 && (r.param.lambda - 0.1875).abs() < 1e-14)
        .unwrap_or(false);
    c.check("root at lambda = 0.1875 with alpha = (1,0) at a1 = 9", alpha_ok, format!("{:?}", root.map(|r| r.alpha.iter().map(|z| z.re).collect::<Vec<_>>())));
    let absent = [9.0 - 1e-6, 9.0 + 1e-6, 8.0, 10.0, 30.0].iter().all(|&a| at(a).is_none());
    c.check("no admissible solution for a1 != 9", absent, String::new());
    let one = ScatteringModel::synthetic_diagonal(&[0.75]).unwrap();
    let barrier = [1.5, 2.0, 5.0, 10.0, 50.0, 500.0]
        .iter()
        .all(|&a| barrier_check(&one, &h(&[a]), 0.75).map(|v| v.is_barrier && v.eigenvalue_at_pole == 0).unwrap_or(false));
    c.check("beta = 0.75 is a barrier for all tested a", barrier, String::new());
    c
}

fn criterion7() -> Criterion {
    let mut c = Criterion::new();
    for m in bundled_models().unwrap().into_iter().filter(|m| m.surface_flagged) {
        let start = Instant::now();
        let mut counts = Vec::new();
        let mut bounded = true;
        for a in [2.0, 5.0, 10.0, 50.0] {
            let r = count_below(&m, &TruncationHeights::uniform(m.num_cusps(), a).unwrap(), 0.25).unwrap();
            bounded &= r.within_budget;
            counts.push(r.total);
        }
        let elapsed = start.elapsed().as_secs_f64();
        let monotone = counts.windows(2).all(|w| w[0] <= w[1]);
        c.check(
            &format!("{}: N <= |chi|, non-decreasing, < 10 s", m.name),
            bounded && monotone && elapsed < 10.0,
            format!("counts {counts:?} budget {} in {elapsed:.2} s", m.eigenvalue_budget()),
        );
    }
    c
}

fn criterion8() -> Criterion {
    let mut c = Criterion::new();
    let vs = [0.1, 1.0, 10.0, 100.0, 1e3, 1e4];
    let ls: Vec<f64> = vs.iter().map(|&v| hyperbolic_disc_lambda0(v).unwrap()).collect();
    c.check("disc lambda0 strictly decreasing in V", ls.windows(2).all(|w| w[1] < w[0]), format!("{ls:.4?}"));
    c.check("disc lambda0 > 1/4", ls.iter().all(|&l| l > 0.25), String::new());
    let l4 = ls[ls.len() - 1];
    c.check(UNATTAINABLE[1], (l4 - 0.25).abs() <= 1e-3, format!("{l4:.6}"));
    let g = geodesic_annulus_bound(2.0 * PI, 1.0).unwrap();
    c.check("geodesic bound 0.2753303 +- 1e-7", (g - 0.2753303).abs() <= 1e-7, format!("{g:.9}"));
    let exact = [0.5, 1.0, 2.0, 3.0].iter().all(|&b| cusp_type5_ingredient(b).unwrap() == PI * PI * b * b);
    c.check("cusp ingredient = pi^2 b^2", exact, String::new());
    c
}

fn criterion9() -> Criterion {
    let mut c = Criterion::new();
    let start = Instant::now();
    let r = run_verification().unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let group = |needle: &str| r.checks.iter().filter(|k| k.name.contains(needle)).collect::<Vec<_>>();
    for (label, needle) in [
        ("brute-force root counts agree", "brute-force"),
        ("automorphy defect <= 1e-7", "automorphy"),
        ("eigen-residual <= 1e-5", "eigen-residual"),
        ("matching passes at roots", ": matching at"),
        ("matching fails at s +- 1e-3", "matching rejects"),
    ] {
        let g = group(needle);
        let worst = g.iter().map(|k| k.defect).fold(0.0, f64::max);
        c.check(label, !g.is_empty() && g.iter().all(|k| k.passed), format!("{} checks, worst defect {worst:.3e}", g.len()));
    }
    c.check("all oracle checks pass", r.all_passed, format!("{} checks", r.checks.len()));
    c.check("runtime < 2 min", elapsed < 120.0, format!("{elapsed:.2} s"));
    c
}

/// Independent K_ν by trapezoidal quadrature of ∫₀^∞ e^{−x cosh t} cosh(νt) dt.
fn k_quadrature(nu: f64, x: f64) -> f64 {
    let (n, hstep) = (4000, 0.005);
    let mut sum = 0.5 * (-x).exp();
    for k in 1..=n {
        let t = k as f64 * hstep;
        sum += (-x * t.cosh()).exp() * (nu * t).cosh();
    }
    sum * hstep
}

fn criterion10() -> Criterion {
    let mut c = Criterion::new();
    let mut worst: f64 = 0.0;
    for x in [0.1, 0.5, 1.0, 3.0, 10.0, 30.0] {
        let k = bessel_k(Complex64::new(0.5, 0.0), x).unwrap().re;
        let exact = (PI / (2.0 * x)).sqrt() * (-x).exp();
        worst = worst.max((k - exact).abs() / exact);
    }
    c.check("K_1/2 closed form to 1e-10", worst <= 1e-10, format!("{worst:.3e}"));
    let mut xi_defect: f64 = 0.0;
    for u in [Complex64::new(0.3, 0.0), Complex64::new(0.2, 5.0), Complex64::new(-1.5, 2.0), Complex64::new(0.5, 14.1)] {
        let (a, b) = (completed_xi(u).unwrap(), completed_xi(1.0 - u).unwrap());
        xi_defect = xi_defect.max((a - b).norm() / a.norm());
    }
    c.check("xi functional equation <= 1e-10", xi_defect <= 1e-10, format!("{xi_defect:.3e}"));
    let mut quad: f64 = 0.0;
    for (nu, x) in [(0.0, 1.0), (0.3, 2.0), (1.7, 0.7), (4.0, 5.0)] {
        let k = bessel_k(Complex64::new(nu, 0.0), x).unwrap().re;
        quad = quad.max((k - k_quadrature(nu, x)).abs() / k);
    }
    c.check("K_nu matches quadrature oracle to 1e-10", quad <= 1e-10, format!("{quad:.3e}"));
    let z2 = pseudolap::specfun::zeta(Complex64::new(2.0, 0.0)).unwrap().re;
    let zm1 = pseudolap::specfun::zeta(Complex64::new(-1.0, 0.0)).unwrap().re;
    c.check(
        "zeta(2) = pi^2/6 and zeta(-1) = -1/12",
        (z2 - PI * PI / 6.0).abs() <= 1e-12 && (zm1 + 1.0 / 12.0).abs() <= 1e-12,
        format!("{z2:.15} {zm1:.15}"),
    );
    c
}

#[test]
fn acceptance() {
    let criteria: Vec<(usize, fn() -> Criterion)> = vec![
        (1, criterion1),
        (2, criterion2),
        (3, criterion3),
        (4, criterion4),
        (5, criterion5),
        (6, criterion6),
        (7, criterion7),
        (8, criterion8),
        (9, criterion9),
        (10, criterion10),
    ];
    // written to the raw handle so the report survives output capture
    let mut out = std::io::stderr().lock();
    let mut unexpected = Vec::new();
    for (k, f) in criteria {
        let c = f();
        let verdict = if c.passed() { "PASS" } else { "FAIL" };
        writeln!(out, "criterion {k:>2}: {verdict}").unwrap();
        for (name, ok, detail) in &c.checks {
            writeln!(out, "    [{}] {name} {detail}", if *ok { "ok" } else { "FAIL" }).unwrap();
            if !ok && !UNATTAINABLE.contains(&name.as_str()) {
                unexpected.push(format!("criterion {k}: {name} {detail}"));
            }
        }
    }
    assert!(unexpected.is_empty(), "{unexpected:#?}");
}
