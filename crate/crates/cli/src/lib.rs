//! Command-line front end for the `pseudolap` toolkit.
//!
//! Exit codes: 0 success, 2 bad input or configuration, 3 numerical
//! failure, 4 a theorem diagnostic failed on a model flagged as a genuine
//! surface.

mod config;

use std::fs;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub use config::{CommandKind, Format, ModelSource, RunConfig};
use pseudolap::export::{
    branches_table, chart_name, count_table, number, residuals_table, roots_table, structured, systole_table, verification_table,
};
use pseudolap::oracle::run_verification;
use pseudolap::secular::{
    branch_sweep, count_below, residual_spectrum, roots_between, CriticalOptions, SpectralBranch, SweepRay,
};
use pseudolap::surface::validate_truncation;
use pseudolap::systole::systole_report;
use pseudolap::{Error, SurfaceModel, TruncationHeights};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_DIAGNOSTIC: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "pseudolap", version, about = "Discrete spectra of pseudo-Laplacians on cusped hyperbolic surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues with λ in the window: real branch, λ = 1/4 and critical line.
    Spectrum(Common),
    /// Follow eigenvalue branches along the ray t·a.
    Branches(Common),
    /// Count eigenvalues up to --lambda-max against |χ(S)|.
    Count(Common),
    /// Residual eigenvalues and their multiplicities.
    Residuals(Common),
    /// Lower bounds for the analytic systole.
    Systole(Common),
    /// Run the oracle suite on the bundled models.
    Verify(Common),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Builtin model name or path to a TOML model file.
    #[arg(long, default_value = "synthetic-beta1")]
    pub model: String,
    /// Truncation heights, comma separated; one value applies to all cusps.
    /// For `branches` this is the base of the ray (default: base heights).
    #[arg(long = "a", value_delimiter = ',')]
    pub a: Option<Vec<f64>>,
    /// `lo,hi`: λ window for `spectrum` (default 0 to 1/4 + tmax²), scale
    /// range for `branches` (default 5,500).
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub window: Option<Vec<f64>>,
    /// Largest t = Im s searched on the critical line.
    #[arg(long, default_value_t = 5.0)]
    pub tmax: f64,
    /// Number of samples along the ray for `branches`.
    #[arg(long, default_value_t = 16)]
    pub grid: usize,
    /// Number of branches followed by `branches`, from the lowest.
    #[arg(long, default_value_t = 1)]
    pub branches: usize,
    /// Upper end of the count for `count` (at most 1/4).
    #[arg(long, default_value_t = 0.25)]
    pub lambda_max: f64,
    /// Critical-line root grouping tolerance in t (default 1e-8).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output directory; tables go to stdout when absent.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Delimited)]
    pub format: Format,
}

/// Failure of a run with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_input_error() { EXIT_INPUT } else { EXIT_NUMERIC };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

const DEFAULT_HEIGHT: f64 = 10.0;
const DEFAULT_SCALES: (f64, f64) = (5.0, 500.0);

impl Command {
    fn parts(&self) -> (CommandKind, &Common) {
        match self {
            Command::Spectrum(c) => (CommandKind::Spectrum, c),
            Command::Branches(c) => (CommandKind::Branches, c),
            Command::Count(c) => (CommandKind::Count, c),
            Command::Residuals(c) => (CommandKind::Residuals, c),
            Command::Systole(c) => (CommandKind::Systole, c),
            Command::Verify(c) => (CommandKind::Verify, c),
        }
    }

    pub fn to_config(&self) -> Result<RunConfig, Failure> {
        let (command, c) = self.parts();
        let window = match &c.window {
            None => None,
            Some(v) if v.len() == 2 => Some((v[0], v[1])),
            Some(v) => return Err(input(format!("--window needs two values, got {}", v.len()))),
        };
        Ok(RunConfig {
            command,
            model: ModelSource::parse(&c.model),
            heights: c.a.clone().unwrap_or_default(),
            window,
            t_max: c.tmax,
            grid: c.grid,
            branches: c.branches,
            lambda_max: c.lambda_max,
            tol: c.tol,
            out: c.out.clone(),
            format: c.format,
        })
    }
}

/// Heights for the model: the configured list (one value broadcast) or
/// `default` in every cusp.
fn heights(m: &SurfaceModel, cfg: &RunConfig, default: Option<&[f64]>) -> Result<TruncationHeights, Failure> {
    let n = m.num_cusps();
    let v = match (cfg.heights.len(), default) {
        (0, Some(d)) => d.to_vec(),
        (0, None) => vec![DEFAULT_HEIGHT; n],
        (1, _) => vec![cfg.heights[0]; n],
        _ => cfg.heights.clone(),
    };
    if v.len() != n {
        return Err(input(format!("{} heights for a model with {n} cusps", v.len())));
    }
    Ok(TruncationHeights::new(v)?)
}

/// Output of one command.
pub struct Outcome {
    pub table: String,
    pub document: serde_json::Value,
    /// Human-readable summary lines.
    pub summary: Vec<String>,
    pub code: i32,
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    config: &'a RunConfig,
    model: &'a str,
    result: T,
}

fn document<T: Serialize>(cfg: &RunConfig, model: &str, result: T) -> Result<serde_json::Value, Failure> {
    serde_json::to_value(Document {
        config: cfg,
        model,
        result,
    })
    .map_err(|e| Failure {
        code: EXIT_NUMERIC,
        message: e.to_string(),
    })
}

fn critical_options(cfg: &RunConfig) -> Result<CriticalOptions, Failure> {
    let mut opts = CriticalOptions::default();
    if let Some(tol) = cfg.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(input(format!("tolerance {tol} is not positive")));
        }
        opts.grouping = tol;
    }
    Ok(opts)
}

fn cmd_spectrum(cfg: &RunConfig, m: &SurfaceModel) -> Result<Outcome, Failure> {
    let a = heights(m, cfg, None)?;
    validate_truncation(m, &a)?;
    if !(cfg.t_max >= 0.0 && cfg.t_max.is_finite()) {
        return Err(input(format!("--tmax {} is not a non-negative number", cfg.t_max)));
    }
    let window = cfg.window.unwrap_or((0.0, 0.25 + cfg.t_max * cfg.t_max));
    let hi = window.1.min(0.25 + cfg.t_max * cfg.t_max);
    let roots = if window.0 < hi {
        roots_between(&m.scattering, &a, (window.0, hi), &critical_options(cfg)?)?
    } else {
        Vec::new()
    };
    let summary = roots
        .iter()
        .map(|r| format!("{} λ = {} (multiplicity {})", chart_name(r.param.chart), number(r.param.lambda), r.multiplicity))
        .collect();
    Ok(Outcome {
        table: roots_table(&roots, m.num_cusps())?,
        document: document(cfg, &m.name, &roots)?,
        summary,
        code: EXIT_OK,
    })
}

fn cmd_branches(cfg: &RunConfig, m: &SurfaceModel) -> Result<Outcome, Failure> {
    let base = heights(m, cfg, Some(&m.base_heights))?;
    let (lo, hi) = cfg.window.unwrap_or(DEFAULT_SCALES);
    let ray = SweepRay {
        base,
        scale_lo: lo,
        scale_hi: hi,
        samples: cfg.grid,
    };
    validate_truncation(m, &ray.base.scaled(lo)?)?;
    let mut branches: Vec<SpectralBranch> = Vec::new();
    for j in 0..cfg.branches {
        branches.push(branch_sweep(&m.scattering, &ray, j)?);
    }
    let mut code = EXIT_OK;
    let mut summary = Vec::new();
    for b in &branches {
        let d = &b.diagnostics;
        let ok = d.strictly_decreasing && d.approaching;
        if !ok && m.surface_flagged {
            code = EXIT_DIAGNOSTIC;
        }
        summary.push(format!(
            "branch {}: decreasing {} (first violation {:?}), target {}, final gap {} {}",
            b.index,
            d.strictly_decreasing,
            d.first_violation,
            number(d.target),
            number(d.final_gap),
            if ok { "PASS" } else { "FAIL" }
        ));
    }
    Ok(Outcome {
        table: branches_table(&branches)?,
        document: document(cfg, &m.name, &branches)?,
        summary,
        code,
    })
}

fn cmd_count(cfg: &RunConfig, m: &SurfaceModel) -> Result<Outcome, Failure> {
    let a = heights(m, cfg, None)?;
    let r = count_below(m, &a, cfg.lambda_max)?;
    let mut line = format!(
        "{} ≤ {} {}",
        r.total,
        r.budget,
        if r.within_budget { "PASS" } else { "FAIL MODEL-NOT-SURFACE" }
    );
    if r.cuspidal_assumed {
        line.push_str(" (no cuspidal data, assumed 0)");
    }
    let code = if !r.within_budget && m.surface_flagged {
        EXIT_DIAGNOSTIC
    } else {
        EXIT_OK
    };
    Ok(Outcome {
        table: count_table(&[(a.as_slice().to_vec(), r.clone())])?,
        document: document(cfg, &m.name, &r)?,
        summary: vec![line],
        code,
    })
}

fn cmd_residuals(cfg: &RunConfig, m: &SurfaceModel) -> Result<Outcome, Failure> {
    let res = residual_spectrum(&m.scattering)?;
    let summary = res.iter().map(|r| format!("({},{})", r.lambda, r.multiplicity)).collect();
    Ok(Outcome {
        table: residuals_table(&res)?,
        document: document(cfg, &m.name, &res)?,
        summary,
        code: EXIT_OK,
    })
}

fn cmd_systole(cfg: &RunConfig, m: &SurfaceModel) -> Result<Outcome, Failure> {
    let a = heights(m, cfg, None)?;
    let r = systole_report(m, &a)?;
    let summary = vec![format!(
        "certified minimum over types 1-4: {} ({})",
        number(r.certified_min_types_1_4),
        if r.certified_min_types_1_4 > 0.25 { "> 1/4" } else { "NOT > 1/4" }
    )];
    Ok(Outcome {
        table: systole_table(&r)?,
        document: document(cfg, &m.name, &r)?,
        summary,
        code: EXIT_OK,
    })
}

fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let r = run_verification()?;
    let failed = r.checks.iter().filter(|c| !c.passed).count();
    let summary = vec![format!(
        "{} checks, {} failed: {}",
        r.checks.len(),
        failed,
        if r.all_passed { "PASS" } else { "FAIL" }
    )];
    Ok(Outcome {
        table: verification_table(&r)?,
        document: document(cfg, "bundled", &r)?,
        summary,
        code: if r.all_passed { EXIT_OK } else { EXIT_NUMERIC },
    })
}

/// Runs the configured command without writing anything.
pub fn execute(cfg: &RunConfig) -> Result<Outcome, Failure> {
    if cfg.command == CommandKind::Verify {
        return cmd_verify(cfg);
    }
    let m = cfg.model.load()?;
    match cfg.command {
        CommandKind::Spectrum => cmd_spectrum(cfg, &m),
        CommandKind::Branches => cmd_branches(cfg, &m),
        CommandKind::Count => cmd_count(cfg, &m),
        CommandKind::Residuals => cmd_residuals(cfg, &m),
        CommandKind::Systole => cmd_systole(cfg, &m),
        CommandKind::Verify => unreachable!(),
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| input(format!("cannot write {}: {e}", path.display())))
}

/// Executes and emits the outcome; returns the exit code.
pub fn run(cfg: &RunConfig, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32 {
    let result = execute(cfg).and_then(|o| {
        let body = match cfg.format {
            Format::Delimited => o.table.clone(),
            Format::Structured => {
                let mut s = structured(&o.document)?;
                if !s.ends_with('\n') {
                    s.push('\n');
                }
                s
            }
        };
        match &cfg.out {
            Some(dir) => {
                fs::create_dir_all(dir).map_err(|e| input(format!("cannot create {}: {e}", dir.display())))?;
                let ext = match cfg.format {
                    Format::Delimited => "csv",
                    Format::Structured => "json",
                };
                write(&dir.join(format!("{}.{ext}", cfg.command.name())), &body)?;
                write(&dir.join("config.toml"), &cfg.to_toml().map_err(input)?)?;
                for line in &o.summary {
                    let _ = writeln!(stdout, "{line}");
                }
            }
            None => {
                let _ = stdout.write_all(body.as_bytes());
                for line in &o.summary {
                    let _ = writeln!(stderr, "{line}");
                }
            }
        }
        Ok(o.code)
    });
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
