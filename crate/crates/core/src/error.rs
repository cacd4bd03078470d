use thiserror::Error;

/// Errors raised by the spectral toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pole of {function} at {at}")]
    Pole { function: &'static str, at: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid resolution insufficient: {0}")]
    Resolution(String),

    #[error("grid too small: {0}")]
    Grid(String),

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("truncation heights not above base heights at cusp(s) {indices:?}")]
    TruncationBelowBase { indices: Vec<usize> },

    #[error("mixing matrix is not orthogonal (defect {defect:.3e})")]
    InvalidMixing { defect: f64 },

    #[error("scattering structure violation at {site}: {detail}")]
    StructureViolation { site: String, detail: String },

    #[error("s = {0} is not a pole of the scattering model")]
    NotAPole(f64),

    #[error("Eisenstein series E_{cusp} has a pole at s = {s}")]
    AtPole { cusp: usize, s: String },

    #[error("coefficient vector is not in the {which} eigenspace of the scattering matrix at 1/2 (defect {defect:.3e})")]
    NotInEigenspace { which: &'static str, defect: f64 },

    #[error("nullspace vector supported on the polar cusps only at s = {0}")]
    DegenerateNullspace(f64),

    #[error("eigenphase tracking lost near t = {0} after refinement")]
    PhaseTrackingLost(f64),

    #[error("branch continuation lost the root at scale {0}")]
    BranchJump(f64),

    #[error("systole hint missing from surface model")]
    MissingSystole,

    #[error("series did not converge: {0}")]
    Convergence(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("output error: {0}")]
    Io(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

impl Error {
    /// True for errors caused by bad user input or model data, as opposed to
    /// numerical failures inside a computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidTopology(_)
                | Error::TruncationBelowBase { .. }
                | Error::InvalidMixing { .. }
                | Error::StructureViolation { .. }
                | Error::MissingSystole
                | Error::Dimension(_)
                | Error::Parse(_)
                | Error::Domain(_)
                | Error::Grid(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
