//! Independent checks of the solver output: transfer conditions, a dense
//! determinant scan, pointwise modular Eisenstein series and a Rayleigh
//! quotient, collected into a verification report.

mod brute;
mod matching;
mod modular;
mod rayleigh;

pub use brute::{brute_force_secular, compare_real_roots, BruteForceReport, RootComparison};
pub use matching::{matching_check, CuspMatching, MatchingDatum};
pub use modular::{automorphy_defect, eigen_residual, modular_eisenstein_point, modular_eisenstein_truncated, tail_order};
pub use rayleigh::{rayleigh_probe, rayleigh_quotient, RayleighReport};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::eisenstein::{eigenfunction_profile, truncate_zero_mode};
use crate::error::Result;
use crate::model_file::bundled_models;
use crate::scattering::{StructureGrid, STRUCTURE_TOL};
use crate::secular::{real_branch_roots, RootClass};
use crate::surface::{SurfaceModel, TruncationHeights};
use crate::Complex64;

/// Truncation heights (uniform over the cusps) used by the suite.
pub const SUITE_HEIGHTS: [f64; 4] = [2.0, 5.0, 10.0, 50.0];
pub const AUTOMORPHY_TOL: f64 = 1e-7;
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-5;
/// Offset in s at which the matching check must fail.
pub const MATCHING_OFFSET: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// SHA-256 of the check's inputs in canonical JSON.
    pub inputs_digest: String,
    pub defect: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckRecord>,
    pub all_passed: bool,
}

fn digest(inputs: &serde_json::Value) -> String {
    hex::encode(Sha256::digest(inputs.to_string().as_bytes()))
}

struct Recorder(Vec<CheckRecord>);

impl Recorder {
    fn upper(&mut self, name: String, inputs: serde_json::Value, defect: f64, tolerance: f64) {
        self.0.push(CheckRecord {
            name,
            inputs_digest: digest(&inputs),
            defect,
            tolerance,
            passed: defect <= tolerance,
        });
    }

    /// A negative control: passes when the defect exceeds the tolerance.
    fn lower(&mut self, name: String, inputs: serde_json::Value, defect: f64, tolerance: f64) {
        self.0.push(CheckRecord {
            name,
            inputs_digest: digest(&inputs),
            defect,
            tolerance,
            passed: defect > tolerance,
        });
    }
}

fn matching_defect(d: &MatchingDatum) -> f64 {
    d.cusps
        .iter()
        .map(|c| (c.value_mismatch / matching::VALUE_TOL).max(c.jump_error / matching::JUMP_TOL))
        .fold(0.0, f64::max)
}

fn verify_model(m: &SurfaceModel, rec: &mut Recorder) -> Result<()> {
    let model = &m.scattering;
    let n = model.dim();
    let grid = StructureGrid::standard(model, 20);
    let st = model.structure_report(&grid)?;
    rec.upper(
        format!("{}: structure", m.name),
        serde_json::json!({ "model": m.name, "grid": grid }),
        st.hermitian_defect.max(st.unitarity_defect),
        STRUCTURE_TOL,
    );
    for &h in &SUITE_HEIGHTS {
        let a = TruncationHeights::uniform(n, h)?;
        let inputs = serde_json::json!({ "model": m.name, "a": a, "window": [0.5, 1.0], "step": brute::MAX_STEP });
        let cmp = compare_real_roots(model, &a, (0.5, 1.0))?;
        rec.upper(
            format!("{}: brute-force roots at a = {h}", m.name),
            inputs,
            cmp.max_position_error,
            brute::POSITION_TOL,
        );
        for root in real_branch_roots(model, &a, (0.5, 1.0))?.roots {
            let s = root.param.s;
            let inputs = serde_json::json!({ "model": m.name, "a": a, "s": s.re, "alpha": root.alpha });
            let d = matching_check(&truncate_zero_mode(&eigenfunction_profile(model, s, &root.alpha)?, &a)?);
            rec.upper(
                format!("{}: matching at s = {:.10} (a = {h})", m.name, s.re),
                inputs.clone(),
                matching_defect(&d),
                1.0,
            );
            if root.class != RootClass::Regular {
                continue;
            }
            for ds in [-MATCHING_OFFSET, MATCHING_OFFSET] {
                let sp = s + ds;
                if sp.re <= 0.5 || sp.re > 1.0 || model.pole_near(sp.re, 1e-6).is_some() {
                    continue;
                }
                let d = matching_check(&truncate_zero_mode(&eigenfunction_profile(model, sp, &root.alpha)?, &a)?);
                rec.lower(
                    format!("{}: matching rejects s {:+e} (a = {h})", m.name, ds),
                    serde_json::json!({ "base": inputs, "offset": ds }),
                    matching_defect(&d),
                    1.0,
                );
            }
        }
    }
    Ok(())
}

fn verify_modular_pointwise(rec: &mut Recorder) -> Result<()> {
    let z = Complex64::new(0.3, 1.1);
    let s = Complex64::new(0.8, 0.0);
    rec.upper(
        "modular: automorphy z ↦ −1/z".into(),
        serde_json::json!({ "z": [z.re, z.im], "s": [s.re, s.im] }),
        automorphy_defect(z, s, None)?,
        AUTOMORPHY_TOL,
    );
    for (x, y, sr, si) in [(0.3, 1.1, 0.8, 0.0), (0.1, 0.9, 0.7, 0.0), (-0.4, 2.0, 0.5, 3.0)] {
        let (z, s) = (Complex64::new(x, y), Complex64::new(sr, si));
        rec.upper(
            format!("modular: eigen-residual at z = {x}+{y}i, s = {sr}+{si}i"),
            serde_json::json!({ "z": [x, y], "s": [sr, si] }),
            eigen_residual(z, s)?,
            EIGEN_RESIDUAL_TOL,
        );
    }
    let modular = crate::scattering::ScatteringModel::modular()?;
    let a = TruncationHeights::new(vec![10.0])?;
    if let Some(root) = real_branch_roots(&modular, &a, (0.5, 1.0))?.roots.first() {
        let s = root.param.s.re;
        let lambda = root.param.lambda;
        let p = rayleigh_probe(s, 10.0, lambda, rayleigh::DEFAULT_LEVEL)?;
        rec.upper(
            "modular: Rayleigh quotient of the a = 10 root".into(),
            serde_json::json!({ "s": s, "a": 10.0, "level": rayleigh::DEFAULT_LEVEL }),
            p.relative_error,
            rayleigh::RAYLEIGH_RTOL,
        );
    }
    Ok(())
}

/// Runs every oracle over the bundled models.
pub fn run_verification() -> Result<VerificationReport> {
    let mut rec = Recorder(Vec::new());
    for m in bundled_models()? {
        verify_model(&m, &mut rec)?;
    }
    verify_modular_pointwise(&mut rec)?;
    let all_passed = rec.0.iter().all(|c| c.passed);
    Ok(VerificationReport {
        checks: rec.0,
        all_passed,
    })
}
