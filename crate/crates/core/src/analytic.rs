//! Matrix exponential and the hyperbolic functions derived from it.

use crate::error::{Error, Result};
use crate::matrix::MatrixK;

/// Relative size of the last Taylor term kept.
const SERIES_CUTOFF: f64 = 1e-16;
const MAX_TERMS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalyticFn {
    Exp,
    Sinh,
    Cosh,
}

pub fn mat_analytic(a: &MatrixK, f: AnalyticFn) -> Result<MatrixK> {
    match f {
        AnalyticFn::Exp => expm(a),
        AnalyticFn::Sinh => Ok(sinh_cosh(a)?.0),
        AnalyticFn::Cosh => Ok(sinh_cosh(a)?.1),
    }
}

/// Scaling and squaring around a truncated Taylor series.
pub fn expm(a: &MatrixK) -> Result<MatrixK> {
    let norm = a.norm_fro();
    if !norm.is_finite() {
        return Err(Error::Invalid("matrix exponential of a non-finite matrix".into()));
    }
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let b = a.scale(0.5f64.powi(squarings));

    let mut sum = MatrixK::identity(a.field(), a.n());
    let mut term = sum.clone();
    let mut converged = false;
    for k in 1..=MAX_TERMS {
        term = (&term * &b).scale(1.0 / k as f64);
        sum = &sum + &term;
        if term.norm_fro() <= SERIES_CUTOFF * sum.norm_fro() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "exponential series",
            iterations: MAX_TERMS,
        });
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}

/// `(sinh(A), cosh(A)) = ((e^A - e^-A) / 2, (e^A + e^-A) / 2)`.
pub fn sinh_cosh(a: &MatrixK) -> Result<(MatrixK, MatrixK)> {
    let ep = expm(a)?;
    let em = expm(&a.scale(-1.0))?;
    Ok(((&ep - &em).scale(0.5), (&ep + &em).scale(0.5)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, rng};
    use crate::scalar::{Field, Quat};

    #[test]
    fn exp_of_zero_is_identity() {
        let z = MatrixK::zeros(Field::H, 3);
        assert_eq!(expm(&z).unwrap(), MatrixK::identity(Field::H, 3));
    }

    #[test]
    fn quaternion_exponential_matches_scalar_series() {
        // exp(theta i) = cos theta + i sin theta, summed term by term as an oracle
        for &theta in &[0.3, 1.7, -4.2] {
            let a = MatrixK::from_scalar(Field::H, Quat::I * theta);
            let got = expm(&a).unwrap()[(0, 0)];
            let mut oracle = Quat::ZERO;
            let mut term = Quat::ONE;
            for k in 1..80 {
                oracle += term;
                term = term * Quat::I * (theta / k as f64);
            }
            assert!((got - oracle).norm() < 1e-12);
            assert!((got - Quat::new(theta.cos(), theta.sin(), 0.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn hyperbolic_identities() {
        let mut r = rng(7);
        for field in [Field::R, Field::C, Field::H] {
            let a = random_matrix(field, 4, &mut r);
            let (s, c) = sinh_cosh(&a).unwrap();
            let id = MatrixK::identity(field, 4);
            assert!((&(&c * &c) - &(&s * &s)).dist(&id) < 1e-10);
            assert!((&c + &s).dist(&expm(&a).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn exp_of_skew_is_unitary() {
        let mut r = rng(8);
        let a = random_matrix(Field::H, 3, &mut r).skew_part().scale(3.0);
        assert!(expm(&a).unwrap().unitary_defect() < 1e-12);
    }
}
