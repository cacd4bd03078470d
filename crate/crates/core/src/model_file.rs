//! TOML model files and the builtin models.
//!
//! ```toml
//! name = "example"
//! systole = 1.0
//! cuspidal = [0.2]
//!
//! [topology]
//! kind = "surface"
//! genus = 1
//! orientable = true
//!
//! [cusps]
//! base_heights = [1.0]
//!
//! [scattering]
//! kind = "synthetic"
//! betas = [1.0]
//! ```
//!
//! Synthetic mixing is given either as `mixing` (row-major) or as
//! `rotation_degrees` for two cusps. Tabulated scattering uses `samples`
//! records `{ s_re, s_im, entries }` and `poles` records `{ s, residue }`,
//! where complex entries are `[re, im]` pairs in row-major order.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scattering::{rotation, Pole, ScatteringModel};
use crate::surface::{SurfaceModel, Topology};
use crate::{CMatrix, Complex64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub name: String,
    pub topology: Topology,
    pub cusps: CuspBlock,
    pub scattering: ScatteringSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cuspidal: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub systole: Option<f64>,
    /// Whether theorem diagnostics are binding for this model.
    #[serde(default = "default_true")]
    pub surface: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CuspBlock {
    pub base_heights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScatteringSpec {
    Modular,
    Synthetic {
        betas: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mixing: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rotation_degrees: Option<f64>,
    },
    Tabulated {
        dim: usize,
        samples: Vec<SampleRecord>,
        #[serde(default)]
        poles: Vec<PoleRecord>,
    },
    Affine {
        value: f64,
        slope: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleRecord {
    pub s_re: f64,
    pub s_im: f64,
    pub entries: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoleRecord {
    pub s: f64,
    pub residue: Vec<[f64; 2]>,
}

fn complex_matrix(dim: usize, entries: &[[f64; 2]], what: &str) -> Result<CMatrix> {
    if entries.len() != dim * dim {
        return Err(Error::Dimension(format!(
            "{what} has {} entries, expected {}",
            entries.len(),
            dim * dim
        )));
    }
    Ok(CMatrix::from_row_iterator(
        dim,
        dim,
        entries.iter().map(|e| Complex64::new(e[0], e[1])),
    ))
}

impl ScatteringSpec {
    pub fn build(&self) -> Result<ScatteringModel> {
        match self {
            ScatteringSpec::Modular => ScatteringModel::modular(),
            ScatteringSpec::Synthetic {
                betas,
                mixing,
                rotation_degrees,
            } => {
                let n = betas.len();
                let u = match (mixing, rotation_degrees) {
                    (Some(_), Some(_)) => {
                        return Err(Error::Parse("give either mixing or rotation_degrees, not both".into()))
                    }
                    (Some(m), None) => {
                        if m.len() != n * n {
                            return Err(Error::Dimension(format!(
                                "mixing has {} entries for {n} cusps",
                                m.len()
                            )));
                        }
                        DMatrix::from_row_slice(n, n, m)
                    }
                    (None, Some(deg)) => {
                        if n != 2 {
                            return Err(Error::Dimension("rotation mixing needs two cusps".into()));
                        }
                        rotation(*deg)
                    }
                    (None, None) => DMatrix::identity(n, n),
                };
                ScatteringModel::synthetic(betas.clone(), u)
            }
            ScatteringSpec::Tabulated { dim, samples, poles } => {
                let samples = samples
                    .iter()
                    .map(|r| {
                        Ok((
                            Complex64::new(r.s_re, r.s_im),
                            complex_matrix(*dim, &r.entries, "sample")?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let poles = poles
                    .iter()
                    .map(|p| {
                        Ok(Pole {
                            s: p.s,
                            residue: complex_matrix(*dim, &p.residue, "residue")?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                ScatteringModel::tabulated(*dim, samples, poles)
            }
            ScatteringSpec::Affine { value, slope } => Ok(ScatteringModel::affine(*value, *slope)),
        }
    }
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn build(&self) -> Result<SurfaceModel> {
        let phi = self.scattering.build()?.with_name(self.name.clone());
        let mut m = SurfaceModel::new(
            self.name.clone(),
            self.topology.clone(),
            self.cusps.base_heights.clone(),
            phi,
        )?
        .with_surface_flag(self.surface);
        if let Some(sys) = self.systole {
            m = m.with_systole(sys)?;
        }
        if let Some(list) = &self.cuspidal {
            m = m.with_cuspidal(list.clone())?;
        }
        Ok(m)
    }
}

pub fn load_model(path: &Path) -> Result<SurfaceModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    ModelFile::parse(&text)?.build()
}

fn genus_one() -> Topology {
    Topology::Surface {
        genus: 1,
        orientable: true,
    }
}

fn synthetic_spec(betas: &[f64], rotation_degrees: Option<f64>) -> ScatteringSpec {
    ScatteringSpec::Synthetic {
        betas: betas.to_vec(),
        mixing: None,
        rotation_degrees,
    }
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 7] = [
    "modular",
    "synthetic-beta1",
    "synthetic-beta075",
    "mixed",
    "rotated",
    "rotated-double",
    "tampered",
];

/// Model file of a builtin model.
pub fn builtin_file(name: &str) -> Result<ModelFile> {
    let file = |topology, base: Vec<f64>, scattering, systole| ModelFile {
        name: name.to_string(),
        topology,
        cusps: CuspBlock { base_heights: base },
        scattering,
        cuspidal: None,
        systole,
        surface: true,
    };
    Ok(match name {
        "modular" => file(
            Topology::Orbifold {
                area: PI / 3.0,
                chi_budget: 1,
            },
            vec![1.0],
            ScatteringSpec::Modular,
            None,
        ),
        "synthetic-beta1" => file(genus_one(), vec![1.0], synthetic_spec(&[1.0], None), Some(1.0)),
        "synthetic-beta075" => file(genus_one(), vec![1.0], synthetic_spec(&[0.75], None), Some(1.0)),
        "mixed" => file(genus_one(), vec![1.0, 1.0], synthetic_spec(&[1.0, 0.75], None), Some(1.0)),
        "rotated" => file(genus_one(), vec![1.0, 1.0], synthetic_spec(&[1.0, 0.8], Some(30.0)), Some(1.0)),
        "rotated-double" => file(genus_one(), vec![1.0, 1.0], synthetic_spec(&[0.9, 0.9], Some(45.0)), Some(1.0)),
        "tampered" => file(
            genus_one(),
            vec![1.0],
            ScatteringSpec::Affine {
                value: -1.0,
                slope: -5.0,
            },
            Some(1.0),
        ),
        other => {
            return Err(Error::Parse(format!(
                "unknown builtin model '{other}' (known: {})",
                BUILTIN_NAMES.join(", ")
            )))
        }
    })
}

pub fn builtin(name: &str) -> Result<SurfaceModel> {
    builtin_file(name)?.build()
}

/// The builtin models with genuine scattering structure. The tampered
/// negative control is left out.
pub fn bundled_models() -> Result<Vec<SurfaceModel>> {
    BUILTIN_NAMES
        .iter()
        .filter(|n| **n != "tampered")
        .map(|n| builtin(n))
        .collect()
}
