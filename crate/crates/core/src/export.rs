//! Delimited tables and structured (JSON) reports.
//!
//! Every table has a header row; numbers are written in scientific notation
//! with 15 significant digits, so identical inputs give identical bytes.
//! The `origin` column names the operation that produced a row.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::VerificationReport;
use crate::secular::{Chart, CountReport, ResidualEigenvalue, RootClass, SecularRoot, SpectralBranch};
use crate::systole::SystoleReport;
use crate::Complex64;

/// x with 15 significant digits.
pub fn number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.14e}")
    } else {
        x.to_string()
    }
}

pub fn chart_name(c: Chart) -> &'static str {
    match c {
        Chart::RealBranch => "real_branch",
        Chart::CriticalLine => "critical_line",
    }
}

fn class_name(c: RootClass) -> &'static str {
    match c {
        RootClass::Regular => "regular",
        RootClass::SingularMixed => "singular_mixed",
        RootClass::Quarter => "quarter",
    }
}

fn origin(c: RootClass, chart: Chart) -> &'static str {
    match (c, chart) {
        (RootClass::Quarter, _) => "quarter_multiplicity",
        (_, Chart::CriticalLine) => "critical_line_roots",
        _ => "real_branch_roots",
    }
}

/// One row per root and basis vector of its coefficient space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootRecord {
    pub chart: Chart,
    /// Index of the coefficient vector within the root's nullspace basis.
    pub basis: usize,
    pub s_re: f64,
    pub s_im: f64,
    pub lambda: f64,
    pub multiplicity: usize,
    pub class: RootClass,
    pub alpha: Vec<Complex64>,
}

pub fn root_records(roots: &[SecularRoot]) -> Vec<RootRecord> {
    let mut out = Vec::new();
    for r in roots {
        let basis: Vec<&crate::CVector> = if r.nullspace.is_empty() {
            vec![&r.alpha]
        } else {
            r.nullspace.iter().collect()
        };
        for (k, v) in basis.into_iter().enumerate() {
            out.push(RootRecord {
                chart: r.param.chart,
                basis: k,
                s_re: r.param.s.re,
                s_im: r.param.s.im,
                lambda: r.param.lambda,
                multiplicity: r.multiplicity,
                class: r.class,
                alpha: v.iter().cloned().collect(),
            });
        }
    }
    out
}

fn write_table(header: Vec<String>, rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).map_err(io_err)?;
    for r in rows {
        w.write_record(&r).map_err(io_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn io_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Root table for a model with `cusps` cusps.
pub fn roots_table(roots: &[SecularRoot], cusps: usize) -> Result<String> {
    let mut header: Vec<String> = ["origin", "chart", "basis", "s_re", "s_im", "lambda", "multiplicity", "class"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for j in 0..cusps {
        header.push(format!("alpha{j}_re"));
        header.push(format!("alpha{j}_im"));
    }
    let mut rows = Vec::new();
    for r in root_records(roots) {
        if r.alpha.len() != cusps {
            return Err(Error::Dimension(format!("root has {} coefficients for {cusps} cusps", r.alpha.len())));
        }
        let mut row = vec![
            origin(r.class, r.chart).to_string(),
            chart_name(r.chart).to_string(),
            r.basis.to_string(),
            number(r.s_re),
            number(r.s_im),
            number(r.lambda),
            r.multiplicity.to_string(),
            class_name(r.class).to_string(),
        ];
        for z in &r.alpha {
            row.push(number(z.re));
            row.push(number(z.im));
        }
        rows.push(row);
    }
    write_table(header, rows)
}

/// (scale, λ) pairs per branch.
pub fn branches_table(branches: &[SpectralBranch]) -> Result<String> {
    let header = ["origin", "branch", "scale", "lambda", "chart"].iter().map(|s| s.to_string()).collect();
    let rows = branches
        .iter()
        .flat_map(|b| {
            b.samples.iter().map(move |s| {
                vec![
                    "branch_sweep".to_string(),
                    b.index.to_string(),
                    number(s.scale),
                    number(s.param.lambda),
                    chart_name(s.param.chart).to_string(),
                ]
            })
        })
        .collect();
    write_table(header, rows)
}

pub fn count_table(reports: &[(Vec<f64>, CountReport)]) -> Result<String> {
    let header = [
        "origin",
        "a",
        "lambda_max",
        "cuspidal",
        "cuspidal_assumed",
        "real_branch",
        "quarter",
        "total",
        "budget",
        "within_budget",
        "model_not_surface",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let rows = reports
        .iter()
        .map(|(a, c)| {
            vec![
                "count_below".to_string(),
                a.iter().map(|v| number(*v)).collect::<Vec<_>>().join(" "),
                number(c.lambda_max),
                c.cuspidal.to_string(),
                c.cuspidal_assumed.to_string(),
                c.real_branch.to_string(),
                c.quarter.to_string(),
                c.total.to_string(),
                c.budget.to_string(),
                c.within_budget.to_string(),
                c.model_not_surface.to_string(),
            ]
        })
        .collect();
    write_table(header, rows)
}

/// Flat one-row summary; per-cusp values are space separated.
pub fn systole_table(r: &SystoleReport) -> Result<String> {
    let header = [
        "origin",
        "area",
        "systole",
        "disc_bound",
        "geodesic_annulus_bound",
        "certified_min_types_1_4",
        "cusp_bound_per_cusp",
        "type5_qualitative",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let row = vec![
        "systole_report".to_string(),
        number(r.area),
        number(r.systole),
        number(r.disc_bound),
        number(r.geodesic_annulus_bound),
        number(r.certified_min_types_1_4),
        r.cusp_bound_per_cusp.iter().map(|v| number(*v)).collect::<Vec<_>>().join(" "),
        r.type5_qualitative.to_string(),
    ];
    write_table(header, vec![row])
}

pub fn residuals_table(res: &[ResidualEigenvalue]) -> Result<String> {
    let header = ["origin", "s", "lambda", "multiplicity"].iter().map(|s| s.to_string()).collect();
    let rows = res
        .iter()
        .map(|r| {
            vec![
                "residual_spectrum".to_string(),
                number(r.s),
                number(r.lambda),
                r.multiplicity.to_string(),
            ]
        })
        .collect();
    write_table(header, rows)
}

pub fn verification_table(r: &VerificationReport) -> Result<String> {
    let header = ["name", "inputs_digest", "defect", "tolerance", "verdict"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows = r
        .checks
        .iter()
        .map(|c| {
            vec![
                c.name.clone(),
                c.inputs_digest.clone(),
                number(c.defect),
                number(c.tolerance),
                if c.passed { "PASS" } else { "FAIL" }.to_string(),
            ]
        })
        .collect();
    write_table(header, rows)
}

/// Pretty-printed JSON document with a trailing newline.
pub fn structured<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::ScatteringModel;
    use crate::secular::spectrum;
    use crate::surface::TruncationHeights;

    #[test]
    fn fifteen_significant_digits() {
        assert_eq!(number(0.161758), "1.61758000000000e-1");
        assert_eq!(number(-4.0), "-4.00000000000000e0");
        let parsed: f64 = number(std::f64::consts::PI).parse().unwrap();
        assert!((parsed - std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn root_table_has_one_row_per_basis_vector() {
        let m = ScatteringModel::synthetic(vec![0.9, 0.9], crate::scattering::rotation(45.0)).unwrap();
        let a = TruncationHeights::uniform(2, 50.0).unwrap();
        let sp = spectrum(&m, &a, (0.5, 1.0), 0.0).unwrap();
        let double = sp.roots.iter().find(|r| r.multiplicity == 2).unwrap();
        let t = roots_table(std::slice::from_ref(double), 2).unwrap();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("origin,chart,basis,s_re"));
        assert!(lines[0].ends_with("alpha1_re,alpha1_im"));
        assert!(lines[1].contains(",0,") && lines[2].starts_with("real_branch_roots,real_branch,1,"));
    }

    #[test]
    fn tables_are_deterministic() {
        let m = ScatteringModel::synthetic_diagonal(&[1.0]).unwrap();
        let a = TruncationHeights::new(vec![10.0]).unwrap();
        let run = || {
            let sp = spectrum(&m, &a, (0.5, 1.0), 3.0).unwrap();
            (roots_table(&sp.roots, 1).unwrap(), structured(&sp).unwrap())
        };
        assert_eq!(run(), run());
        let (t, _) = run();
        assert!(t.contains("critical_line_roots,critical_line,0,"));
        assert!(t.lines().nth(1).unwrap().contains("1.61758"));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let m = ScatteringModel::synthetic_diagonal(&[1.0]).unwrap();
        let a = TruncationHeights::new(vec![10.0]).unwrap();
        let sp = spectrum(&m, &a, (0.5, 1.0), 0.0).unwrap();
        assert!(roots_table(&sp.roots, 2).is_err());
    }
}
