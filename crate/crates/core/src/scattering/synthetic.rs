//! Rational family Φ(s) = U diag(φ_β(s)) Uᵗ with φ_β(s) = (s+β−1)/(s−β).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::{CMatrix, CVector};

/// Orthogonality tolerance for the mixing matrix.
pub const MIXING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Synthetic {
    pub betas: Vec<f64>,
    pub mixing: DMatrix<f64>,
}

pub fn phi_beta(beta: f64, s: Complex64) -> Complex64 {
    (s + beta - 1.0) / (s - beta)
}

pub fn phi_beta_derivative(beta: f64, s: Complex64) -> Complex64 {
    let d = s - beta;
    (1.0 - 2.0 * beta) / (d * d)
}

impl Synthetic {
    pub fn new(betas: Vec<f64>, mixing: DMatrix<f64>) -> Result<Self> {
        let n = betas.len();
        if n == 0 || mixing.nrows() != n || mixing.ncols() != n {
            return Err(Error::Dimension(format!(
                "{} betas with a {}x{} mixing matrix",
                n,
                mixing.nrows(),
                mixing.ncols()
            )));
        }
        if let Some(b) = betas.iter().find(|b| !(**b > 0.5 && **b <= 1.0)) {
            return Err(Error::StructureViolation {
                site: format!("pole {b}"),
                detail: "pole outside (1/2, 1]".into(),
            });
        }
        let defect = (mixing.transpose() * &mixing - DMatrix::<f64>::identity(n, n)).amax();
        if !(defect <= MIXING_TOL) {
            return Err(Error::InvalidMixing { defect });
        }
        Ok(Synthetic { betas, mixing })
    }

    pub fn dim(&self) -> usize {
        self.betas.len()
    }

    fn conjugate(&self, diag: impl Fn(f64) -> Complex64) -> CMatrix {
        let u = self.mixing.map(|x| Complex64::new(x, 0.0));
        let d = CVector::from_iterator(self.dim(), self.betas.iter().map(|&b| diag(b)));
        &u * CMatrix::from_diagonal(&d) * u.transpose()
    }

    pub fn eval(&self, s: Complex64) -> CMatrix {
        self.conjugate(|b| phi_beta(b, s))
    }

    pub fn derivative(&self, s: Complex64) -> CMatrix {
        self.conjugate(|b| phi_beta_derivative(b, s))
    }

    /// Distinct pole locations, ascending.
    pub fn pole_locations(&self) -> Vec<f64> {
        let mut p = self.betas.clone();
        p.sort_by(f64::total_cmp);
        p.dedup();
        p
    }

    pub fn residue(&self, pole: f64) -> CMatrix {
        self.conjugate(|b| {
            if b == pole {
                Complex64::new(2.0 * b - 1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Constant Laurent term at a pole: 1 on the polar channels.
    pub fn regular_part(&self, pole: f64) -> CMatrix {
        let s = Complex64::new(pole, 0.0);
        self.conjugate(|b| {
            if b == pole {
                Complex64::new(1.0, 0.0)
            } else {
                phi_beta(b, s)
            }
        })
    }
}

/// Rotation by `degrees` in the plane, as a 2×2 orthogonal matrix.
pub fn rotation(degrees: f64) -> DMatrix<f64> {
    let (s, c) = degrees.to_radians().sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn scalar_values() {
        assert!((phi_beta(1.0, c(0.5)) + 1.0).norm() < 1e-15);
        assert!((phi_beta(0.75, c(0.5)) + 1.0).norm() < 1e-15);
        // residue at β: 2β − 1
        let eps = 1e-7;
        let r = phi_beta(0.75, c(0.75 + eps)) * eps;
        assert!((r.re - 0.5).abs() < 1e-6);
        assert!((phi_beta_derivative(1.0, c(0.5)).re + 4.0).abs() < 1e-14);
    }

    #[test]
    fn functional_equation_holds() {
        let m = Synthetic::new(vec![1.0, 0.8], rotation(30.0)).unwrap();
        for &s in &[Complex64::new(0.7, 0.0), Complex64::new(0.5, 3.0), Complex64::new(0.2, -1.0)] {
            let prod = m.eval(s) * m.eval(1.0 - s);
            let defect = (prod - CMatrix::identity(2, 2)).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(defect < 1e-13);
        }
    }

    #[test]
    fn rejects_non_orthogonal_mixing() {
        let u = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(Synthetic::new(vec![1.0, 0.8], u), Err(Error::InvalidMixing { .. })));
    }

    #[test]
    fn equal_betas_give_full_rank_residue() {
        let m = Synthetic::new(vec![0.9, 0.9], rotation(45.0)).unwrap();
        let r = m.residue(0.9);
        assert!((r[(0, 0)].re - 0.8).abs() < 1e-15 && r[(0, 1)].norm() < 1e-15);
        assert_eq!(m.pole_locations(), vec![0.9]);
    }
}
