//! Discrete spectrum of Δ_a on the Eisenstein part from the secular system
//! Σ_i α_i φ_ij(s) = −α_j a_j^{2s−1}, its singular and s = 1/2 variants,
//! eigenvalue counts, and eigenvalue branches along rays in a.

mod branch;
mod critical;
mod quarter;
mod real;

pub use branch::{branch_sweep, BranchDiagnostics, BranchSample, SpectralBranch, SweepRay};
pub use critical::{critical_line_roots, CriticalOptions};
pub use quarter::{quarter_multiplicity, quarter_transition, QuarterReport, QuarterTransition};
pub use real::{
    determinant_scan_function, mixed_root_at, real_branch_roots, PoleExamination, PoleVerdict,
    RealBranchReport,
};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scattering::{ScatteringModel, SingularityClass, POLE_MATCH_TOL};
use crate::surface::{validate_truncation, SurfaceModel, TruncationHeights};
use crate::{CMatrix, CVector};

/// Root positions are refined to this accuracy in s (or t).
pub const ROOT_TOL: f64 = 1e-10;
/// Defining-system residual accepted for a returned root.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Minimum weight of α on the regular cusps Q(s).
pub const SUPPORT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    /// s ∈ (1/2, 1], λ ∈ [0, 1/4).
    RealBranch,
    /// s = 1/2 + it, t ≥ 0, λ = 1/4 + t².
    CriticalLine,
}

/// λ = s(1 − s) together with the chart of the double cover it lives on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralParameter {
    pub chart: Chart,
    pub s: Complex64,
    pub t: f64,
    pub lambda: f64,
}

impl SpectralParameter {
    pub fn real(s: f64) -> Result<Self> {
        if !(s > 0.5 && s <= 1.0) {
            return Err(Error::Domain(format!("s = {s} is not in (1/2, 1]")));
        }
        Ok(SpectralParameter {
            chart: Chart::RealBranch,
            s: Complex64::new(s, 0.0),
            t: 0.0,
            lambda: s * (1.0 - s),
        })
    }

    pub fn critical(t: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("t = {t} is not a non-negative real")));
        }
        Ok(SpectralParameter {
            chart: Chart::CriticalLine,
            s: Complex64::new(0.5, t),
            t,
            lambda: 0.25 + t * t,
        })
    }

    /// The parameter with Re s ≥ 1/2 and Im s ≥ 0 over a real λ ≥ 0.
    pub fn from_lambda(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("λ = {lambda} is negative")));
        }
        if lambda < 0.25 {
            Self::real(0.5 + (0.25 - lambda).sqrt())
        } else {
            Self::critical((lambda - 0.25).sqrt())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootClass {
    Regular,
    SingularMixed,
    Quarter,
}

/// An eigenvalue of Δ_a with its coefficient vector(s).
///
/// For regular and mixed roots `nullspace` spans the admissible α; for the
/// λ = 1/4 root it spans the admissible α⁻ ∈ E⁻. `alpha` is the first basis
/// vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecularRoot {
    pub param: SpectralParameter,
    pub alpha: CVector,
    pub nullspace: Vec<CVector>,
    pub multiplicity: usize,
    pub class: RootClass,
    pub residual: f64,
}

/// M_ij = φ_ij(s) a_j^{1−2s}.
pub fn secular_matrix(model: &ScatteringModel, s: Complex64, a: &TruncationHeights) -> Result<CMatrix> {
    let n = model.dim();
    if a.len() != n {
        return Err(Error::Dimension(format!("{} heights for {n} cusps", a.len())));
    }
    if s.im == 0.0 {
        if let Some(p) = model.pole_near(s.re, 0.0) {
            let cusp = model.pole_support(p).first().map(|i| i + 1).unwrap_or(1);
            return Err(Error::AtPole {
                cusp,
                s: format!("{}", s.re),
            });
        }
    }
    let mut m = model.eval(s)?;
    for (j, &aj) in a.as_slice().iter().enumerate() {
        let f = ((1.0 - 2.0 * s) * aj.ln()).exp();
        for i in 0..n {
            m[(i, j)] *= f;
        }
    }
    Ok(m)
}

/// ‖(Mᵗ + I)α‖ for a normalized α.
pub fn regular_residual(model: &ScatteringModel, s: Complex64, a: &TruncationHeights, alpha: &CVector) -> Result<f64> {
    let m = secular_matrix(model, s, a)?;
    let n = m.nrows();
    Ok(((m.transpose() + CMatrix::identity(n, n)) * alpha).norm() / alpha.norm())
}

/// Residual eigenvalue λ_p = s_p(1 − s_p) with multiplicity rk res Φ(s_p).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualEigenvalue {
    pub s: f64,
    pub lambda: f64,
    pub multiplicity: usize,
}

pub fn residual_spectrum(model: &ScatteringModel) -> Result<Vec<ResidualEigenvalue>> {
    let mut out = Vec::new();
    for p in model.poles() {
        out.push(ResidualEigenvalue {
            s: p.s,
            lambda: p.s * (1.0 - p.s),
            multiplicity: model.residue_rank(p.s)?,
        });
    }
    out.sort_by(|x, y| x.lambda.total_cmp(&y.lambda));
    Ok(out)
}

/// Outcome of the barrier test at a pole.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierVerdict {
    pub s_pole: f64,
    pub lambda: f64,
    pub class: SingularityClass,
    pub is_barrier: bool,
    /// Multiplicity of the Δ_a-eigenvalue found exactly at the pole.
    pub eigenvalue_at_pole: usize,
    /// Nearest Δ_a-eigenvalues below and above λ on the real branch.
    pub below: Option<f64>,
    pub above: Option<f64>,
}

pub fn barrier_check(model: &ScatteringModel, a: &TruncationHeights, s_pole: f64) -> Result<BarrierVerdict> {
    let pole = model
        .pole_near(s_pole, POLE_MATCH_TOL)
        .ok_or(Error::NotAPole(s_pole))?
        .s;
    let class = model.classify(pole).class;
    let report = real_branch_roots(model, a, (0.5, 1.0))?;
    let lambda = pole * (1.0 - pole);
    let at_pole: usize = report
        .roots
        .iter()
        .filter(|r| (r.param.s.re - pole).abs() <= POLE_MATCH_TOL)
        .map(|r| r.multiplicity)
        .sum();
    let below = report
        .roots
        .iter()
        .map(|r| r.param.lambda)
        .filter(|&l| l < lambda)
        .fold(None, |acc: Option<f64>, l| Some(acc.map_or(l, |m| m.max(l))));
    let above = report
        .roots
        .iter()
        .map(|r| r.param.lambda)
        .filter(|&l| l > lambda)
        .fold(None, |acc: Option<f64>, l| Some(acc.map_or(l, |m| m.min(l))));
    Ok(BarrierVerdict {
        s_pole: pole,
        lambda,
        class,
        is_barrier: class == SingularityClass::CompletelySingular,
        eigenvalue_at_pole: at_pole,
        below,
        above,
    })
}

/// The Eisenstein-part spectrum of Δ_a up to the critical-line cutoff.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub roots: Vec<SecularRoot>,
    pub quarter: QuarterReport,
    pub poles: Vec<PoleExamination>,
    /// Set for models without scattering structure, whose secular matrix is
    /// not unitary on the critical line.
    pub critical_line_skipped: bool,
}

impl Spectrum {
    /// Eigenvalues in ascending order, repeated by multiplicity.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for r in &self.roots {
            for _ in 0..r.multiplicity {
                out.push(r.param.lambda);
            }
        }
        out
    }
}

/// Real-branch roots in `s_window`, the λ = 1/4 eigenvalue, and
/// critical-line roots with t ≤ t_max, sorted by λ.
pub fn spectrum(
    model: &ScatteringModel,
    a: &TruncationHeights,
    s_window: (f64, f64),
    t_max: f64,
) -> Result<Spectrum> {
    let real = real_branch_roots(model, a, s_window)?;
    let quarter = quarter_multiplicity(model, a)?;
    let mut roots = real.roots;
    if let Some(q) = quarter.root() {
        roots.push(q);
    }
    let critical_line_skipped = !model.is_structured();
    if t_max > 0.0 && !critical_line_skipped {
        roots.extend(critical_line_roots(model, a, (0.0, t_max), &CriticalOptions::default())?);
    }
    roots.sort_by(|x, y| x.param.lambda.total_cmp(&y.param.lambda));
    Ok(Spectrum {
        roots,
        quarter,
        poles: real.poles,
        critical_line_skipped,
    })
}

/// Roots with λ in [lo, hi], searching only the matching part of each
/// chart, sorted by λ. The critical line is skipped for models without
/// scattering structure.
pub fn roots_between(
    model: &ScatteringModel,
    a: &TruncationHeights,
    window: (f64, f64),
    opts: &CriticalOptions,
) -> Result<Vec<SecularRoot>> {
    let (lo, hi) = (window.0.max(0.0), window.1);
    let mut roots = Vec::new();
    if !(hi >= lo) {
        return Ok(roots);
    }
    let s_of = |l: f64| 0.5 + (0.25 - l.min(0.25)).sqrt();
    let t_of = |l: f64| (l - 0.25).max(0.0).sqrt();
    if lo < 0.25 {
        roots.extend(real_branch_roots(model, a, (s_of(hi), s_of(lo)))?.roots);
    }
    if lo <= 0.25 && hi >= 0.25 {
        roots.extend(quarter_multiplicity(model, a)?.root());
    }
    if hi > 0.25 && model.is_structured() {
        roots.extend(critical_line_roots(model, a, (t_of(lo), t_of(hi)), opts)?);
    }
    roots.retain(|r| r.param.lambda >= lo && r.param.lambda <= hi);
    roots.sort_by(|x, y| x.param.lambda.total_cmp(&y.param.lambda));
    Ok(roots)
}

/// N_a(λ_max) with its parts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    pub lambda_max: f64,
    pub cuspidal: usize,
    /// True when no cuspidal data was supplied and zero was assumed.
    pub cuspidal_assumed: bool,
    pub real_branch: usize,
    pub quarter: usize,
    pub total: usize,
    pub budget: u32,
    pub within_budget: bool,
    /// Set when the count exceeds |χ(S)|: the model cannot be a surface.
    pub model_not_surface: bool,
}

/// Eigenvalues of Δ_a on the Eisenstein part plus small cuspidal ones up to
/// λ_max ≤ 1/4. The constant eigenfunction (λ = 0) is not counted.
pub fn count_below(m: &SurfaceModel, a: &TruncationHeights, lambda_max: f64) -> Result<CountReport> {
    if !(lambda_max <= 0.25) {
        return Err(Error::Domain(format!("λ_max = {lambda_max} exceeds 1/4")));
    }
    validate_truncation(m, a)?;
    let model = &m.scattering;
    let report = real_branch_roots(model, a, (0.5, 1.0))?;
    let real_branch: usize = report
        .roots
        .iter()
        .filter(|r| r.param.lambda <= lambda_max)
        .map(|r| r.multiplicity)
        .sum();
    let quarter = if lambda_max >= 0.25 {
        quarter_multiplicity(model, a)?.mu
    } else {
        0
    };
    let (cuspidal, cuspidal_assumed) = match &m.cuspidal_eigenvalues {
        Some(list) => (list.iter().filter(|&&l| l <= lambda_max).count(), false),
        None => (0, true),
    };
    let total = cuspidal + real_branch + quarter;
    let budget = m.eigenvalue_budget();
    let within_budget = total as u64 <= budget as u64;
    Ok(CountReport {
        lambda_max,
        cuspidal,
        cuspidal_assumed,
        real_branch,
        quarter,
        total,
        budget,
        within_budget,
        model_not_surface: !within_budget,
    })
}
