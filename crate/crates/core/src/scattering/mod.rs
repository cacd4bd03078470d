//! Scattering matrices Φ(s): evaluation, derivatives, poles and residues,
//! singularity classification and structural checks.

mod modular;
pub mod synthetic;
mod tabulated;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{self, RANK_RTOL};
use crate::CMatrix;

pub use synthetic::{phi_beta, phi_beta_derivative, rotation};
pub use tabulated::Tabulated;

/// Hermitian/unitary defects above this fail the structure check.
pub const STRUCTURE_TOL: f64 = 1e-8;
/// Residue-matrix diagonal entries above this put a cusp in P(s).
pub const POLE_SUPPORT_TOL: f64 = 1e-10;
/// Distance within which a real s is identified with a declared pole.
pub const POLE_MATCH_TOL: f64 = 1e-10;

/// A simple pole s_p ∈ (1/2, 1] with its residue matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Pole {
    pub s: f64,
    pub residue: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
enum Evaluator {
    Modular,
    Synthetic(synthetic::Synthetic),
    Tabulated(Tabulated),
    /// Scalar φ(s) = value + slope·(s − 1/2); not a scattering matrix.
    Affine { value: f64, slope: f64 },
}

/// How Φ′ is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeSource {
    Exact,
    Analytic,
    Interpolated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringModel {
    name: String,
    evaluator: Evaluator,
    poles: Vec<Pole>,
    structured: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularityClass {
    Regular,
    Singular,
    CompletelySingular,
}

/// P(s) (cusps where E_i has a pole) and its complement Q(s), 0-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularityClassification {
    pub s: f64,
    pub polar: Vec<usize>,
    pub regular: Vec<usize>,
    pub class: SingularityClass,
}

/// Sample sites for the structural checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureGrid {
    pub real: Vec<f64>,
    pub line: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub hermitian_defect: f64,
    pub worst_real_site: f64,
    pub unitarity_defect: f64,
    pub worst_line_site: f64,
    pub poles_in_range: bool,
    pub residues_positive: bool,
    pub skipped: bool,
}

impl StructureReport {
    pub fn passes(&self) -> bool {
        self.skipped
            || (self.hermitian_defect <= STRUCTURE_TOL
                && self.unitarity_defect <= STRUCTURE_TOL
                && self.poles_in_range
                && self.residues_positive)
    }
}

impl StructureGrid {
    /// `n` real points in (1/2, 1] kept away from the model's poles and `n`
    /// points t ∈ [0, 20].
    pub fn standard(model: &ScatteringModel, n: usize) -> Self {
        let mut real = Vec::with_capacity(n);
        for k in 0..n {
            let mut s = 0.5 + 0.5 * (k as f64 + 0.5) / n as f64;
            while model.poles.iter().any(|p| (p.s - s).abs() < 1e-3) {
                s += 2e-3;
            }
            real.push(s.min(1.0 - 1e-3));
        }
        let line = (0..n)
            .map(|k| 20.0 * k as f64 / (n.max(2) - 1) as f64)
            .collect();
        StructureGrid { real, line }
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl ScatteringModel {
    /// One-cusp modular surface, φ(s) = ξ(2s−1)/ξ(2s), pole at 1.
    pub fn modular() -> Result<Self> {
        let res = modular::residue_at_one()?;
        Ok(ScatteringModel {
            name: "modular".into(),
            evaluator: Evaluator::Modular,
            poles: vec![Pole {
                s: 1.0,
                residue: CMatrix::from_element(1, 1, c(res)),
            }],
            structured: true,
        })
    }

    /// Φ(s) = U diag(φ_{β_i}(s)) Uᵗ.
    pub fn synthetic(betas: Vec<f64>, mixing: DMatrix<f64>) -> Result<Self> {
        let model = synthetic::Synthetic::new(betas, mixing)?;
        let poles = model
            .pole_locations()
            .into_iter()
            .map(|s| Pole {
                s,
                residue: model.residue(s),
            })
            .collect();
        Ok(ScatteringModel {
            name: "synthetic".into(),
            evaluator: Evaluator::Synthetic(model),
            poles,
            structured: true,
        })
    }

    pub fn synthetic_diagonal(betas: &[f64]) -> Result<Self> {
        let n = betas.len();
        Self::synthetic(betas.to_vec(), DMatrix::identity(n, n))
    }

    /// User data; the structure checks run here and any failure is fatal.
    pub fn tabulated(
        dim: usize,
        samples: Vec<(Complex64, CMatrix)>,
        poles: Vec<Pole>,
    ) -> Result<Self> {
        for p in &poles {
            if p.residue.nrows() != dim || p.residue.ncols() != dim {
                return Err(Error::Dimension(format!("residue at {} is not {dim}x{dim}", p.s)));
            }
        }
        let table = Tabulated::new(dim, samples, &poles)?;
        let model = ScatteringModel {
            name: "tabulated".into(),
            evaluator: Evaluator::Tabulated(table),
            poles,
            structured: true,
        };
        model.check_pole_data()?;
        model.check_structure(&model.tabulated_grid())?;
        Ok(model)
    }

    /// Scalar φ(s) = value + slope·(s − 1/2). Violates the scattering
    /// structure on purpose; used as a negative control.
    pub fn affine(value: f64, slope: f64) -> Self {
        ScatteringModel {
            name: "affine".into(),
            evaluator: Evaluator::Affine { value, slope },
            poles: Vec::new(),
            structured: false,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        match &self.evaluator {
            Evaluator::Modular | Evaluator::Affine { .. } => 1,
            Evaluator::Synthetic(m) => m.dim(),
            Evaluator::Tabulated(t) => t.dim(),
        }
    }

    /// False for models that bypass the structure checks.
    pub fn is_structured(&self) -> bool {
        self.structured
    }

    pub fn derivative_source(&self) -> DerivativeSource {
        match self.evaluator {
            Evaluator::Synthetic(_) | Evaluator::Affine { .. } => DerivativeSource::Exact,
            Evaluator::Modular => DerivativeSource::Analytic,
            Evaluator::Tabulated(_) => DerivativeSource::Interpolated,
        }
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    pub fn pole_near(&self, s: f64, tol: f64) -> Option<&Pole> {
        self.poles.iter().find(|p| (p.s - s).abs() <= tol)
    }

    fn reject_pole(&self, s: Complex64) -> Result<()> {
        if s.im == 0.0 {
            if let Some(p) = self.poles.iter().find(|p| p.s == s.re) {
                return Err(Error::Pole {
                    function: "scattering matrix",
                    at: format!("{}", p.s),
                });
            }
        }
        Ok(())
    }

    /// Φ(s).
    pub fn eval(&self, s: Complex64) -> Result<CMatrix> {
        if !s.re.is_finite() || !s.im.is_finite() {
            return Err(Error::NonFinite("spectral parameter"));
        }
        self.reject_pole(s)?;
        let m = match &self.evaluator {
            Evaluator::Modular => CMatrix::from_element(1, 1, modular::value(s)?),
            Evaluator::Synthetic(m) => m.eval(s),
            Evaluator::Tabulated(t) => t.eval(s, &self.poles)?,
            Evaluator::Affine { value, slope } => {
                CMatrix::from_element(1, 1, *value + *slope * (s - 0.5))
            }
        };
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("scattering matrix"));
        }
        Ok(m)
    }

    pub fn eval_real(&self, s: f64) -> Result<CMatrix> {
        self.eval(c(s))
    }

    /// Φ′(s).
    pub fn derivative(&self, s: Complex64) -> Result<CMatrix> {
        self.reject_pole(s)?;
        let m = match &self.evaluator {
            Evaluator::Modular => CMatrix::from_element(1, 1, modular::derivative(s)?),
            Evaluator::Synthetic(m) => m.derivative(s),
            Evaluator::Tabulated(t) => t.derivative(s, &self.poles)?,
            Evaluator::Affine { slope, .. } => CMatrix::from_element(1, 1, c(*slope)),
        };
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("scattering derivative"));
        }
        Ok(m)
    }

    fn pole_or_err(&self, s_pole: f64) -> Result<&Pole> {
        self.pole_near(s_pole, POLE_MATCH_TOL)
            .ok_or(Error::NotAPole(s_pole))
    }

    pub fn residue(&self, s_pole: f64) -> Result<CMatrix> {
        Ok(self.pole_or_err(s_pole)?.residue.clone())
    }

    /// Constant term G of the Laurent expansion Φ(s) = R/(s − s_p) + G + ….
    pub fn regular_part(&self, s_pole: f64) -> Result<CMatrix> {
        let pole = self.pole_or_err(s_pole)?.s;
        match &self.evaluator {
            Evaluator::Synthetic(m) => Ok(m.regular_part(pole)),
            Evaluator::Tabulated(t) => t.regular_part(pole, &self.poles),
            _ => self.circle_mean(pole),
        }
    }

    /// Mean of Φ over a small circle around the pole (Cauchy formula for
    /// the constant Laurent coefficient).
    fn circle_mean(&self, pole: f64) -> Result<CMatrix> {
        let mut gap = (pole - 0.5).abs();
        for p in &self.poles {
            if p.s != pole {
                gap = gap.min((p.s - pole).abs());
            }
        }
        let r = (0.25 * gap).min(0.05);
        let nodes = 64;
        let n = self.dim();
        let mut acc = CMatrix::zeros(n, n);
        for k in 0..nodes {
            let dz = Complex64::from_polar(r, 2.0 * PI * (k as f64 + 0.5) / nodes as f64);
            acc += self.eval(c(pole) + dz)?;
        }
        Ok(acc / c(nodes as f64))
    }

    /// Numerical rank of res Φ(s_p) at relative threshold 1e-9.
    pub fn residue_rank(&self, s_pole: f64) -> Result<usize> {
        let r = &self.pole_or_err(s_pole)?.residue;
        Ok(linalg::numerical_rank(r, RANK_RTOL, 0.0))
    }

    /// Cusps whose diagonal residue entry at the pole is nonzero.
    pub fn pole_support(&self, pole: &Pole) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| pole.residue[(i, i)].norm() > POLE_SUPPORT_TOL)
            .collect()
    }

    pub fn classify(&self, s: f64) -> SingularityClassification {
        let n = self.dim();
        let polar = match self.pole_near(s, POLE_MATCH_TOL) {
            Some(p) => self.pole_support(p),
            None => Vec::new(),
        };
        let regular: Vec<usize> = (0..n).filter(|i| !polar.contains(i)).collect();
        let class = if polar.is_empty() {
            SingularityClass::Regular
        } else if regular.is_empty() {
            SingularityClass::CompletelySingular
        } else {
            SingularityClass::Singular
        };
        SingularityClassification {
            s,
            polar,
            regular,
            class,
        }
    }

    /// Φ(1/2), defined by continuity where 1/2 is removable.
    pub fn at_half(&self) -> Result<CMatrix> {
        self.eval_real(0.5)
    }

    pub fn derivative_at_half(&self) -> Result<CMatrix> {
        self.derivative(c(0.5))
    }

    fn check_pole_data(&self) -> Result<()> {
        for p in &self.poles {
            if !(p.s > 0.5 && p.s <= 1.0) {
                return Err(Error::StructureViolation {
                    site: format!("pole {}", p.s),
                    detail: "pole outside (1/2, 1]".into(),
                });
            }
            let support = self.pole_support(p);
            if support.is_empty() {
                return Err(Error::StructureViolation {
                    site: format!("pole {}", p.s),
                    detail: "residue matrix has zero diagonal".into(),
                });
            }
            for &i in &support {
                let d = p.residue[(i, i)];
                if !(d.re > 0.0 && d.im.abs() <= STRUCTURE_TOL) {
                    return Err(Error::StructureViolation {
                        site: format!("pole {}", p.s),
                        detail: format!("res φ_{}{} = {d} is not positive", i + 1, i + 1),
                    });
                }
            }
        }
        Ok(())
    }

    fn tabulated_grid(&self) -> StructureGrid {
        let Evaluator::Tabulated(_) = &self.evaluator else {
            return StructureGrid::standard(self, 20);
        };
        // only sites inside the sampled ranges are checkable
        let mut grid = StructureGrid::standard(self, 20);
        grid.real.retain(|&s| self.eval_real(s).is_ok());
        grid.line.retain(|&t| self.eval(Complex64::new(0.5, t)).is_ok());
        grid
    }

    /// Measures the Hermitian and unitary defects and the pole data without
    /// failing.
    pub fn structure_report(&self, grid: &StructureGrid) -> Result<StructureReport> {
        if !self.structured {
            return Ok(StructureReport {
                hermitian_defect: f64::NAN,
                worst_real_site: f64::NAN,
                unitarity_defect: f64::NAN,
                worst_line_site: f64::NAN,
                poles_in_range: true,
                residues_positive: true,
                skipped: true,
            });
        }
        let mut herm = (0.0, f64::NAN);
        for &s in &grid.real {
            let d = linalg::hermitian_defect(&self.eval_real(s)?);
            if !(d <= herm.0) {
                herm = (d, s);
            }
        }
        let mut unit = (0.0, f64::NAN);
        for &t in &grid.line {
            let d = linalg::unitarity_defect(&self.eval(Complex64::new(0.5, t))?);
            if !(d <= unit.0) {
                unit = (d, t);
            }
        }
        let poles_in_range = self.poles.iter().all(|p| p.s > 0.5 && p.s <= 1.0);
        let residues_positive = self.check_pole_data().is_ok();
        Ok(StructureReport {
            hermitian_defect: herm.0,
            worst_real_site: herm.1,
            unitarity_defect: unit.0,
            worst_line_site: unit.1,
            poles_in_range,
            residues_positive,
            skipped: false,
        })
    }

    /// As `structure_report`, but any violation is an error naming the site.
    pub fn check_structure(&self, grid: &StructureGrid) -> Result<StructureReport> {
        self.check_pole_data()?;
        let report = self.structure_report(grid)?;
        if report.skipped {
            return Ok(report);
        }
        if !(report.hermitian_defect <= STRUCTURE_TOL) {
            return Err(Error::StructureViolation {
                site: format!("s = {}", report.worst_real_site),
                detail: format!("Hermitian defect {:.3e}", report.hermitian_defect),
            });
        }
        if !(report.unitarity_defect <= STRUCTURE_TOL) {
            return Err(Error::StructureViolation {
                site: format!("s = 1/2 + {}i", report.worst_line_site),
                detail: format!("unitarity defect {:.3e}", report.unitarity_defect),
            });
        }
        Ok(report)
    }
}
