//! The generalized Cayley transform `c_A(X) = (I - A*X)(A + X)^-1`, its
//! contraction of a domain onto its center, and the chart it induces on a
//! critical set.

use crate::error::{Error, Result};
use crate::height::HeightProblem;
use crate::linalg::singular_values;
use crate::matrix::MatrixK;
use crate::space::{constraint_null_space, Automorphism, Manifold};
use crate::tolerance::Tolerances;

/// Smallest singular value of `A + X`.
pub fn omega_margin(a: &MatrixK, x: &MatrixK) -> f64 {
    singular_values(&(a + x))
        .map(|s| s.last().copied().unwrap_or(0.0))
        .unwrap_or(0.0)
}

/// Whether `A + X` is invertible, judged against the singularity threshold.
pub fn in_omega(a: &MatrixK, x: &MatrixK, tols: &Tolerances) -> bool {
    let sum = a + x;
    let s = omega_margin(a, x);
    s > tols.singular_for(sum.norm_fro()).max(f64::MIN_POSITIVE)
}

/// `c_A(X) = (I - A*X)(A + X)^-1`.
pub fn cayley(a: &MatrixK, x: &MatrixK) -> Result<MatrixK> {
    cayley_with(a, x, &Tolerances::default())
}

pub fn cayley_with(a: &MatrixK, x: &MatrixK, tols: &Tolerances) -> Result<MatrixK> {
    let sum = a + x;
    let inv = sum.try_inverse(tols.singular).map_err(|e| match e {
        Error::SingularMatrix { sigma_min, .. } => Error::OutsideDomain { sigma_min },
        other => other,
    })?;
    let n = a.n();
    let id = MatrixK::identity(sum.field(), n);
    Ok(&(&id - &(&a.conj_transpose() * x)) * &inv)
}

/// The Cayley transform centered at a group element; its inverse is the
/// transform centered at `A*`.
#[derive(Clone, Debug)]
pub struct CayleyChart {
    center: MatrixK,
}

impl CayleyChart {
    pub fn new(center: MatrixK) -> Self {
        CayleyChart { center }
    }

    pub fn center(&self) -> &MatrixK {
        &self.center
    }

    pub fn apply(&self, x: &MatrixK) -> Result<MatrixK> {
        cayley(&self.center, x)
    }

    pub fn invert(&self, y: &MatrixK) -> Result<MatrixK> {
        cayley(&self.center.conj_transpose(), y)
    }

    pub fn contains(&self, x: &MatrixK, tols: &Tolerances) -> bool {
        in_omega(&self.center, x, tols)
    }
}

/// `||c_{sigma(A)}(sigma(X)) - sigma(c_A(X))||_F`.
pub fn sigma_commutation_check(sigma: &Automorphism, a: &MatrixK, x: &MatrixK) -> Result<f64> {
    let lhs = cayley(&sigma.apply(a), &sigma.apply(x))?;
    let rhs = sigma.apply(&cayley(a, x)?);
    Ok(lhs.dist(&rhs))
}

/// `nu(X, t) = c_{A*}(t c_A(X))`, a path from `A` (t = 0) to `X` (t = 1).
pub fn contraction(a: &MatrixK, x: &MatrixK, t: f64) -> Result<MatrixK> {
    let beta = cayley(a, x)?;
    cayley(&a.conj_transpose(), &beta.scale(t))
}

/// Retraction `xi -> c_{P*}(-P* xi P* / 2)` of a tangent vector at `p`.
/// Equal to the classical Cayley retraction `(I + W/2)(I - W/2)^-1 P` with
/// `W = xi P*`, and it keeps Cartan model points in the model.
pub fn cayley_retract(p: &MatrixK, xi: &MatrixK) -> Result<MatrixK> {
    let ps = p.conj_transpose();
    let y = (&(&ps * xi) * &ps).scale(-0.5);
    cayley(&ps, &y)
}

/// Basis of the chart space `{beta in T_{A*} : A*Xhat beta + beta Xhat A* = 0}`
/// at a critical point `A`.
#[derive(Clone, Debug)]
pub struct ChartSpace {
    pub base: MatrixK,
    pub basis: Vec<MatrixK>,
}

impl ChartSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `sum_i c_i basis_i`.
    pub fn combine(&self, coeffs: &[f64]) -> MatrixK {
        let zero = MatrixK::zeros(self.base.field(), self.base.n());
        self.basis
            .iter()
            .zip(coeffs)
            .fold(zero, |acc, (b, &c)| &acc + &b.scale(c))
    }
}

/// Chart space at a critical point, as the real null space of the stacked
/// tangency, sigma and anticommutation conditions.
pub fn chart_space(problem: &HeightProblem<'_>, a: &MatrixK, tols: &Tolerances) -> Result<ChartSpace> {
    let residual = problem.critical_residual(a);
    let tolerance = problem.critical_tolerance(tols);
    if residual > tolerance {
        return Err(Error::NotCritical { residual, tolerance });
    }
    let a_star = a.conj_transpose();
    let left = &a_star * problem.xhat();
    let right = problem.xhat() * &a_star;
    let field = problem.field().join(a.field());
    let manifold = problem.manifold();
    let basis = constraint_null_space(field, a.n(), |beta| {
        let tangent = beta * a;
        let mut conds = vec![&tangent + &tangent.conj_transpose(), &(&left * beta) + &(beta * &right)];
        if let Manifold::Model(s) = manifold {
            conds.push(s.apply(beta) - beta.conj_transpose());
        }
        conds
    });
    Ok(ChartSpace { base: a.clone(), basis })
}

/// `c_{A*}(beta)`, a critical point near `A` for `beta` in the chart space.
pub fn chart_to_critical(a: &MatrixK, beta: &MatrixK) -> Result<MatrixK> {
    cayley(&a.conj_transpose(), beta)
}
