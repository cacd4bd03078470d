//! Special functions: Γ, ζ, the completed zeta ξ, and modified Bessel
//! functions of complex order.
//!
//! All routines work in binary64 and are pure functions of their inputs.
//! Non-finite inputs and poles are reported as errors, never propagated as
//! NaN.

mod bessel;
mod gamma;
mod zeta;

pub use bessel::{bessel_i, bessel_k, bessel_k_scaled, BESSEL_RTOL, MAX_ORDER};
pub use gamma::{digamma, gamma, recip_gamma};
pub use zeta::{
    completed_xi, xi_log_derivative, zeta, zeta_and_derivative, zeta_euler_maclaurin,
    EM_CORRECTION_TERMS,
};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex number with checked finite components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexValue(Complex64);

impl ComplexValue {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if re.is_finite() && im.is_finite() {
            Ok(ComplexValue(Complex64::new(re, im)))
        } else {
            Err(Error::NonFinite("complex value"))
        }
    }

    pub fn get(self) -> Complex64 {
        self.0
    }
}

impl TryFrom<Complex64> for ComplexValue {
    type Error = Error;

    fn try_from(z: Complex64) -> Result<Self> {
        ComplexValue::new(z.re, z.im)
    }
}

/// Relative-tolerance targets for the special functions.
pub mod tolerances {
    pub const GAMMA_RTOL: f64 = 1e-12;
    pub const ZETA_RTOL: f64 = 1e-12;
    pub const XI_SYMMETRY: f64 = 1e-10;
    pub const BESSEL_RTOL: f64 = 1e-10;
}
