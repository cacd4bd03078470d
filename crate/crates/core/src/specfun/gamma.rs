//! Gamma and digamma functions for complex arguments.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

// Godfrey's coefficients for g = 607/128, 15 terms.
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_COEFFS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_76e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_64e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// ln Γ(z) on Re z >= 1/2 (principal branch not guaranteed; used only
/// through `exp`).
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (k, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Γ(z) with reflection for Re z < 1/2.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite("gamma argument"));
    }
    if is_nonpositive_integer(z) {
        return Err(Error::Pole {
            function: "gamma",
            at: format!("{}", z.re),
        });
    }
    if z.re < 0.5 {
        let sin = (PI * z).sin();
        let right = ln_gamma_right(1.0 - z).exp();
        return Ok(PI / (sin * right));
    }
    Ok(ln_gamma_right(z).exp())
}

/// 1/Γ(z); entire, returns zero at the poles of Γ.
pub fn recip_gamma(z: Complex64) -> Complex64 {
    if is_nonpositive_integer(z) {
        return Complex64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        let sin = (PI * z).sin();
        return sin * ln_gamma_right(1.0 - z).exp() / PI;
    }
    (-ln_gamma_right(z)).exp()
}

/// Digamma ψ(z) = Γ'(z)/Γ(z).
pub fn digamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole {
            function: "digamma",
            at: format!("{}", z.re),
        });
    }
    if z.re < 0.5 {
        // ψ(z) = ψ(1 - z) - π cot(πz)
        let cot = (PI * z).cos() / (PI * z).sin();
        return Ok(digamma(1.0 - z)? - PI * cot);
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm() < 12.0 {
        shift -= 1.0 / w;
        w += 1.0;
    }
    // Asymptotic series with Bernoulli numbers B_2k / (2k).
    const B: [f64; 8] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
        -3617.0 / 510.0,
    ];
    let inv2 = 1.0 / (w * w);
    let mut pow = inv2;
    let mut series = w.ln() - 0.5 / w;
    for (k, &b) in B.iter().enumerate() {
        series -= b / (2.0 * (k + 1) as f64) * pow;
        pow *= inv2;
    }
    Ok(series + shift)
}
