//! Surface descriptors: topology, cusps, truncation heights.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::scattering::ScatteringModel;

/// Topological type of the underlying surface.
///
/// `Orbifold` covers quotients such as the modular surface, where the
/// Gauss–Bonnet area is not 2π|χ| of a smooth surface; the area and the
/// eigenvalue budget replacing |χ(S)| are given explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Topology {
    Surface { genus: u32, orientable: bool },
    Orbifold { area: f64, chi_budget: u32 },
}

/// Truncation heights a = (a_1, ..., a_n), one per cusp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TruncationHeights(Vec<f64>);

impl TruncationHeights {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Dimension("no truncation heights given".into()));
        }
        if let Some(bad) = a.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Domain(format!("truncation height {bad} is not positive")));
        }
        Ok(TruncationHeights(a))
    }

    /// The same height in each of `n` cusps.
    pub fn uniform(n: usize, a: f64) -> Result<Self> {
        Self::new(vec![a; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Point t·a on the scaling ray through a.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|v| v * t).collect())
    }
}

/// A cusped hyperbolic surface together with its scattering data.
#[derive(Debug, Clone)]
pub struct SurfaceModel {
    pub name: String,
    pub topology: Topology,
    pub base_heights: Vec<f64>,
    pub systole_hint: Option<f64>,
    /// Small cuspidal eigenvalues supplied from outside; `None` means unknown.
    pub cuspidal_eigenvalues: Option<Vec<f64>>,
    /// Whether surface-only theorems are expected to hold for this model.
    pub surface_flagged: bool,
    pub scattering: ScatteringModel,
}

impl SurfaceModel {
    pub fn new(
        name: impl Into<String>,
        topology: Topology,
        base_heights: Vec<f64>,
        scattering: ScatteringModel,
    ) -> Result<Self> {
        let model = SurfaceModel {
            name: name.into(),
            topology,
            base_heights,
            systole_hint: None,
            cuspidal_eigenvalues: None,
            surface_flagged: true,
            scattering,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn with_systole(mut self, sys: f64) -> Result<Self> {
        if !(sys.is_finite() && sys > 0.0) {
            return Err(Error::Domain(format!("systole {sys} is not positive")));
        }
        self.systole_hint = Some(sys);
        Ok(self)
    }

    pub fn with_cuspidal(mut self, mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::Domain("cuspidal eigenvalues must be positive".into()));
        }
        eigenvalues.sort_by(f64::total_cmp);
        self.cuspidal_eigenvalues = Some(eigenvalues);
        Ok(self)
    }

    pub fn with_surface_flag(mut self, flagged: bool) -> Self {
        self.surface_flagged = flagged;
        self
    }

    pub fn num_cusps(&self) -> usize {
        self.base_heights.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_cusps();
        if n == 0 {
            return Err(Error::InvalidTopology("a cusped surface needs n >= 1".into()));
        }
        if let Some(b) = self.base_heights.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
            return Err(Error::InvalidTopology(format!("base height {b} is not positive")));
        }
        if self.scattering.dim() != n {
            return Err(Error::Dimension(format!(
                "scattering model has dimension {} but the surface has {n} cusps",
                self.scattering.dim()
            )));
        }
        match self.topology {
            Topology::Surface { .. } => {
                let chi = euler_characteristic(self);
                if chi >= 0 {
                    return Err(Error::InvalidTopology(format!(
                        "Euler characteristic {chi} is not negative"
                    )));
                }
            }
            Topology::Orbifold { area, chi_budget } => {
                if !(area.is_finite() && area > 0.0) || chi_budget == 0 {
                    return Err(Error::InvalidTopology(
                        "orbifold needs positive area and eigenvalue budget".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Upper bound on the number of eigenvalues ≤ 1/4: |χ(S)|, or the stated
    /// budget for orbifolds.
    pub fn eigenvalue_budget(&self) -> u32 {
        match self.topology {
            Topology::Surface { .. } => euler_characteristic(self).unsigned_abs() as u32,
            Topology::Orbifold { chi_budget, .. } => chi_budget,
        }
    }
}

/// χ(S) = 2 − 2g − n (orientable) or 2 − g − n (non-orientable). For
/// orbifolds this returns −budget.
pub fn euler_characteristic(m: &SurfaceModel) -> i64 {
    let n = m.num_cusps() as i64;
    match m.topology {
        Topology::Surface { genus, orientable } => {
            let g = genus as i64;
            if orientable {
                2 - 2 * g - n
            } else {
                2 - g - n
            }
        }
        Topology::Orbifold { chi_budget, .. } => -(chi_budget as i64),
    }
}

/// Hyperbolic area, 2π|χ| by Gauss–Bonnet.
pub fn area(m: &SurfaceModel) -> Result<f64> {
    match m.topology {
        Topology::Surface { .. } => {
            let chi = euler_characteristic(m);
            if chi >= 0 {
                return Err(Error::InvalidTopology(format!("χ = {chi} is not negative")));
            }
            Ok(2.0 * PI * chi.unsigned_abs() as f64)
        }
        Topology::Orbifold { area, .. } => Ok(area),
    }
}

/// Length of the horocycle H_t at height t in any cusp.
pub fn horocycle_length(_cusp: usize, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("height {t} is not positive")));
    }
    Ok(1.0 / t)
}

/// Checks a > b componentwise.
pub fn validate_truncation(m: &SurfaceModel, a: &TruncationHeights) -> Result<()> {
    if a.len() != m.num_cusps() {
        return Err(Error::Dimension(format!(
            "{} truncation heights for {} cusps",
            a.len(),
            m.num_cusps()
        )));
    }
    let indices: Vec<usize> = a
        .as_slice()
        .iter()
        .zip(&m.base_heights)
        .enumerate()
        .filter(|(_, (ai, bi))| ai <= bi)
        .map(|(i, _)| i + 1)
        .collect();
    if indices.is_empty() {
        Ok(())
    } else {
        Err(Error::TruncationBelowBase { indices })
    }
}
