//! The compact group `O(n, K) = {A : AA* = I}` and its tangent spaces.

use std::ops::Deref;

use nalgebra::DMatrix;

use crate::analytic::expm;
use crate::error::{Error, Result};
use crate::matrix::MatrixK;
use crate::random::{random_skew, rng, SymRng};
use crate::scalar::Field;

/// A matrix known to satisfy `AA* = I` within the tolerance it was checked at.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement(MatrixK);

impl GroupElement {
    pub fn new(a: MatrixK, tol: f64) -> Result<Self> {
        let (ok, defect) = is_in_group(&a, tol);
        if ok {
            Ok(GroupElement(a))
        } else {
            Err(Error::Invalid(format!(
                "matrix is not in the group (defect {defect:.3e})"
            )))
        }
    }

    /// Wraps without checking; callers vouch for membership.
    pub fn new_unchecked(a: MatrixK) -> Self {
        GroupElement(a)
    }

    pub fn matrix(&self) -> &MatrixK {
        &self.0
    }

    pub fn into_inner(self) -> MatrixK {
        self.0
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement(self.0.conj_transpose())
    }

    /// Sign of the determinant for real matrices (`None` over C and H,
    /// where the group is connected).
    pub fn orientation(&self) -> Option<f64> {
        determinant_sign(&self.0)
    }
}

impl Deref for GroupElement {
    type Target = MatrixK;
    fn deref(&self) -> &MatrixK {
        &self.0
    }
}

/// Sign of `det A` for a real matrix.
pub fn determinant_sign(a: &MatrixK) -> Option<f64> {
    if a.field() != Field::R {
        return None;
    }
    let n = a.n();
    let m = DMatrix::from_fn(n, n, |i, j| a[(i, j)].w);
    Some(m.determinant().signum())
}

/// `(||AA* - I||_F <= tol, ||AA* - I||_F)`.
pub fn is_in_group(a: &MatrixK, tol: f64) -> (bool, f64) {
    let defect = a.unitary_defect();
    (defect <= tol, defect)
}

/// Orthogonal projection onto the Lie algebra: `(Z - Z*) / 2`.
pub fn project_skew(z: &MatrixK) -> MatrixK {
    z.skew_part()
}

/// `||YA* + AY*||_F`.
pub fn tangent_residual(a: &MatrixK, y: &MatrixK) -> f64 {
    let ya = y * &a.conj_transpose();
    (&ya + &ya.conj_transpose()).norm_fro()
}

pub fn is_tangent_at(a: &MatrixK, y: &MatrixK, tol: f64) -> bool {
    tangent_residual(a, y) <= tol
}

/// Orthogonal projection of an ambient matrix onto `T_A G`: `(Z - A Z* A) / 2`.
pub fn project_tangent_group(a: &MatrixK, z: &MatrixK) -> MatrixK {
    (z - &(&(a * &z.conj_transpose()) * a)).scale(0.5)
}

/// `exp(S)` for a random skew-Hermitian `S`; lands in the identity component.
pub fn random_group_element(n: usize, field: Field, seed: u64) -> GroupElement {
    random_group_element_with(n, field, &mut rng(seed))
}

pub fn random_group_element_with(n: usize, field: Field, rng: &mut SymRng) -> GroupElement {
    let s = random_skew(field, n, rng);
    let a = expm(&s).expect("exponential of a finite matrix");
    GroupElement(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::inner;
    use crate::random::random_matrix;
    use crate::scalar::Quat;

    #[test]
    fn membership_examples() {
        let id = MatrixK::identity(Field::C, 3);
        assert_eq!(is_in_group(&id, 1e-12), (true, 0.0));

        let q = (Quat::I + Quat::J + Quat::K) * (1.0 / 3f64.sqrt());
        assert!(is_in_group(&MatrixK::from_scalar(Field::H, q), 1e-12).0);

        let two = MatrixK::identity(Field::R, 2).scale(2.0);
        let (ok, d) = is_in_group(&two, 1e-9);
        assert!(!ok);
        assert!((d - MatrixK::identity(Field::R, 2).scale(3.0).norm_fro()).abs() < 1e-14);
    }

    #[test]
    fn skew_projection() {
        let mut r = rng(21);
        let h = random_matrix(Field::H, 3, &mut r).hermitian_part();
        assert!(project_skew(&h).norm_fro() < 1e-15);
        let s = random_skew(Field::H, 3, &mut r);
        assert_eq!(project_skew(&s), s);

        // Z - P(Z) is orthogonal to every skew matrix; check over a skew basis
        let z = random_matrix(Field::C, 2, &mut r);
        let rest = &z - &project_skew(&z);
        let d = MatrixK::real_dim(Field::C, 2);
        for k in 0..d {
            let mut v = vec![0.0; d];
            v[k] = 1.0;
            let w = project_skew(&MatrixK::from_real_vec(Field::C, 2, &v));
            assert!(inner(&rest, &w).abs() < 1e-14);
        }
        // idempotent and self-adjoint
        let p = project_skew(&z);
        assert!(project_skew(&p).dist(&p) < 1e-15);
        let y = random_matrix(Field::C, 2, &mut r);
        assert!((inner(&project_skew(&z), &y) - inner(&z, &project_skew(&y))).abs() < 1e-13);
    }

    #[test]
    fn tangency_examples() {
        let id = MatrixK::identity(Field::H, 2);
        let mut r = rng(22);
        let s = random_skew(Field::H, 2, &mut r);
        assert!(is_tangent_at(&id, &s, 1e-12));
        assert!(!is_tangent_at(&id, &id, 1e-12));
        let a = random_group_element(2, Field::H, 5);
        assert!(is_tangent_at(&a, &(&s * &*a), 1e-12));
        let z = random_matrix(Field::H, 2, &mut r);
        assert!(is_tangent_at(&a, &project_tangent_group(&a, &z), 1e-12));
    }

    #[test]
    fn random_elements() {
        for field in [Field::R, Field::C, Field::H] {
            let a = random_group_element(4, field, 9);
            assert!(is_in_group(&a, 1e-10).0);
            assert_eq!(a, random_group_element(4, field, 9));
            let b = random_group_element(4, field, 10);
            assert!(is_in_group(&(&*a * &*b), 1e-10).0);
            assert!(is_in_group(a.inverse().matrix(), 1e-10).0);
            assert!((a.conj_transpose() * a.matrix()).unitary_defect() < 1e-10);
        }
        let q = random_group_element(1, Field::H, 77);
        assert!((q[(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert_eq!(random_group_element(3, Field::R, 1).orientation(), Some(1.0));
    }
}
