//! Height functions `h_X(A) = Re Tr(XA)` restricted to the group or to a
//! Cartan model: gradients, Hessians, criticality tests and spectra.
//!
//! Both restrictions are driven by a generator pair `(Xhat, sigma(Xhat))`.
//! On the model `Xhat = X* + sigma(X)`; on the group the pair is `(2X*, 2X)`,
//! which turns every model formula into its group counterpart.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::real_sym_eigen;
use crate::matrix::{inner, MatrixK};
use crate::space::{Automorphism, Manifold};
use crate::tolerance::Tolerances;

/// `Re Tr(XA)`.
pub fn height(x: &MatrixK, a: &MatrixK) -> f64 {
    (x * a).re_trace()
}

/// `Xhat = X* + sigma(X)`; satisfies `sigma(Xhat) = Xhat*`.
pub fn xhat(sigma: &Automorphism, x: &MatrixK) -> MatrixK {
    &x.conj_transpose() + &sigma.apply(x)
}

/// `(X* - AXA) / 2`, the gradient on the group.
pub fn grad_group(x: &MatrixK, a: &MatrixK) -> MatrixK {
    (&x.conj_transpose() - &(&(a * x) * a)).scale(0.5)
}

/// `(Xhat - A sigma(Xhat) A) / 4`, the gradient on the Cartan model.
pub fn grad_model(sigma: &Automorphism, x: &MatrixK, a: &MatrixK) -> MatrixK {
    let xh = xhat(sigma, x);
    (&xh - &(&(a * &sigma.apply(&xh)) * a)).scale(0.25)
}

/// `-(A sigma(Xhat) W + W sigma(Xhat) A) / 4`.
pub fn hessian_model(sigma: &Automorphism, x: &MatrixK, a: &MatrixK, w: &MatrixK) -> MatrixK {
    let sx = sigma.apply(&xhat(sigma, x));
    hessian_with(&sx, a, w)
}

/// `-(AXW + WXA) / 2`.
pub fn hessian_group(x: &MatrixK, a: &MatrixK, w: &MatrixK) -> MatrixK {
    hessian_with(&x.scale(2.0), a, w)
}

fn hessian_with(sigma_xhat: &MatrixK, a: &MatrixK, w: &MatrixK) -> MatrixK {
    (&(&(a * sigma_xhat) * w) + &(&(w * sigma_xhat) * a)).scale(-0.25)
}

/// `(||X* - AXA||_F <= tol, ||X* - AXA||_F)`.
pub fn is_critical_group(x: &MatrixK, a: &MatrixK, tol: f64) -> (bool, f64) {
    let r = x.conj_transpose().dist(&(&(a * x) * a));
    (r <= tol, r)
}

/// `(||Xhat - A sigma(Xhat) A||_F <= tol, ||Xhat - A sigma(Xhat) A||_F)`.
pub fn is_critical_model(sigma: &Automorphism, x: &MatrixK, a: &MatrixK, tol: f64) -> (bool, f64) {
    let xh = xhat(sigma, x);
    let r = xh.dist(&(&(a * &sigma.apply(&xh)) * a));
    (r <= tol, r)
}

/// `||B - B*||_F` for `B = Xhat* A`; vanishes exactly at critical points.
pub fn hermitian_criterion_defect(xhat: &MatrixK, a: &MatrixK) -> f64 {
    (&xhat.conj_transpose() * a).hermitian_defect()
}

/// A height function on the group or on a Cartan model.
#[derive(Clone, Debug)]
pub struct HeightProblem<'a> {
    manifold: Manifold<'a>,
    x: MatrixK,
    xhat: MatrixK,
    sigma_xhat: MatrixK,
}

impl<'a> HeightProblem<'a> {
    pub fn new(manifold: Manifold<'a>, x: MatrixK) -> Result<Self> {
        if x.norm_fro() == 0.0 {
            return Err(Error::Invalid("height function needs X != 0".into()));
        }
        let (xhat, sigma_xhat) = match manifold {
            Manifold::Group => (x.conj_transpose().scale(2.0), x.scale(2.0)),
            Manifold::Model(s) => {
                if s.n() != x.n() {
                    return Err(Error::DimensionMismatch {
                        expected: s.n(),
                        found: x.n(),
                    });
                }
                let xh = xhat(s, &x);
                let sx = s.apply(&xh);
                (xh, sx)
            }
        };
        Ok(HeightProblem {
            manifold,
            x,
            xhat,
            sigma_xhat,
        })
    }

    pub fn manifold(&self) -> Manifold<'a> {
        self.manifold
    }

    pub fn x(&self) -> &MatrixK {
        &self.x
    }

    /// `Xhat` on the model, `2X*` on the group.
    pub fn xhat(&self) -> &MatrixK {
        &self.xhat
    }

    pub fn sigma_xhat(&self) -> &MatrixK {
        &self.sigma_xhat
    }

    pub fn n(&self) -> usize {
        self.x.n()
    }

    /// Field the manifold points live in.
    pub fn field(&self) -> crate::scalar::Field {
        self.manifold.working_field(self.x.field())
    }

    pub fn value(&self, a: &MatrixK) -> f64 {
        height(&self.x, a)
    }

    pub fn gradient(&self, a: &MatrixK) -> MatrixK {
        (&self.xhat - &(&(a * &self.sigma_xhat) * a)).scale(0.25)
    }

    pub fn hessian(&self, a: &MatrixK, w: &MatrixK) -> MatrixK {
        hessian_with(&self.sigma_xhat, a, w)
    }

    /// `||Xhat - A sigma(Xhat) A||_F`, i.e. four times the gradient norm.
    pub fn critical_residual(&self, a: &MatrixK) -> f64 {
        self.xhat.dist(&(&(a * &self.sigma_xhat) * a))
    }

    /// Default criticality threshold, relative to `||Xhat||`.
    pub fn critical_tolerance(&self, tols: &Tolerances) -> f64 {
        tols.critical_for(self.xhat.norm_fro())
    }

    pub fn tangent_basis(&self, a: &MatrixK) -> Vec<MatrixK> {
        self.manifold.tangent_basis(a)
    }

    /// Real matrix of the Hessian in a real-orthonormal tangent basis,
    /// together with that basis.
    pub fn hessian_matrix(&self, a: &MatrixK) -> (DMatrix<f64>, Vec<MatrixK>) {
        let basis = self.tangent_basis(a);
        let d = basis.len();
        let images: Vec<MatrixK> = basis.iter().map(|w| self.hessian(a, w)).collect();
        let m = DMatrix::from_fn(d, d, |i, j| inner(&basis[i], &images[j]));
        (m, basis)
    }

    /// Spectrum and record at `a`, regardless of how critical `a` is.
    pub fn spectrum_record(&self, a: &MatrixK, tols: &Tolerances) -> CriticalPointRecord {
        let (m, _) = self.hessian_matrix(a);
        let sym = (&m + m.transpose()) * 0.5;
        let (values, _) = real_sym_eigen(&sym);
        let kernel_dim = kernel_dimension(&values, tols);
        CriticalPointRecord {
            point: a.clone(),
            value: self.value(a),
            residual: self.critical_residual(a),
            hessian_eigenvalues: values,
            kernel_dim,
            morse: kernel_dim == 0,
        }
    }

    /// As [`spectrum_record`](Self::spectrum_record), failing with
    /// `NotCritical` when the residual exceeds the critical tolerance.
    pub fn hessian_spectrum(&self, a: &MatrixK, tols: &Tolerances) -> Result<CriticalPointRecord> {
        let tol = self.critical_tolerance(tols);
        let residual = self.critical_residual(a);
        if residual > tol {
            return Err(Error::NotCritical {
                residual,
                tolerance: tol,
            });
        }
        Ok(self.spectrum_record(a, tols))
    }
}

/// Number of eigenvalues below `kernel_gap * max(max |lambda|, kernel_floor)`.
pub fn kernel_dimension(values: &[f64], tols: &Tolerances) -> usize {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(tols.kernel_floor);
    values.iter().filter(|v| v.abs() < tols.kernel_gap * scale).count()
}

/// Hessian spectrum of `h_X` at `a` on the given manifold.
pub fn hessian_spectrum(
    manifold: Manifold<'_>,
    x: &MatrixK,
    a: &MatrixK,
    tols: &Tolerances,
) -> Result<CriticalPointRecord> {
    HeightProblem::new(manifold, x.clone())?.hessian_spectrum(a, tols)
}

/// A critical point with its Hessian data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriticalPointRecord {
    pub point: MatrixK,
    pub value: f64,
    pub residual: f64,
    pub hessian_eigenvalues: Vec<f64>,
    pub kernel_dim: usize,
    pub morse: bool,
}

/// Outcome of [`critical_inclusion_check`].
#[derive(Clone, Debug, Default, Serialize)]
pub struct InclusionReport {
    /// Model points checked to be critical for `h` on the group with `X` replaced by `sigma(Xhat)`.
    pub model_points_checked: usize,
    /// Group critical points found to lie in the model (and checked model-critical).
    pub group_points_in_model: usize,
    /// Whether `sigma(X) = X*`, in which case the two model sets were compared.
    pub self_adjoint_case: bool,
}

/// Checks the relations between group and model critical sets on the given points:
/// model critical points are group-critical for `sigma(Xhat)`; group critical points
/// lying in the model are model-critical; and when `sigma(X) = X*`, both sets agree.
pub fn critical_inclusion_check(
    sigma: &Automorphism,
    x: &MatrixK,
    group_points: &[MatrixK],
    model_points: &[MatrixK],
    tol: f64,
) -> Result<InclusionReport> {
    let xh = xhat(sigma, x);
    let sxh = sigma.apply(&xh);
    let mut rep = InclusionReport::default();
    for (index, a) in model_points.iter().enumerate() {
        let (ok, residual) = is_critical_group(&sxh, a, tol);
        if !ok {
            return Err(Error::RelationViolated {
                relation: "model critical points are group-critical for sigma(Xhat)",
                index,
                residual,
            });
        }
        rep.model_points_checked += 1;
    }
    let in_model: Vec<&MatrixK> = group_points
        .iter()
        .filter(|a| sigma.model_defect(a) <= tol.max(1e-9))
        .collect();
    for (index, a) in in_model.iter().enumerate() {
        let (ok, residual) = is_critical_model(sigma, x, a, tol);
        if !ok {
            return Err(Error::RelationViolated {
                relation: "group critical points in the model are model-critical",
                index,
                residual,
            });
        }
        rep.group_points_in_model += 1;
    }
    rep.self_adjoint_case = sigma.apply(x).dist(&x.conj_transpose()) <= tol;
    if rep.self_adjoint_case {
        for (index, a) in model_points.iter().enumerate() {
            let (ok, residual) = is_critical_group(x, a, tol);
            if !ok {
                return Err(Error::RelationViolated {
                    relation: "model critical set equals group critical set within the model",
                    index,
                    residual,
                });
            }
        }
    }
    Ok(rep)
}

/// `sum_k d_k s_k` for a diagonal `d` and a sign per entry; grouping the
/// signs by repeated value gives `t_1 Tr E_1 + ... + t_k Tr E_k`.
pub fn critical_value_from_signs(d: &[f64], signs: &[i8]) -> Result<f64> {
    if d.len() != signs.len() {
        return Err(Error::DimensionMismatch {
            expected: d.len(),
            found: signs.len(),
        });
    }
    if let Some(s) = signs.iter().find(|s| s.abs() != 1) {
        return Err(Error::Invalid(format!("sign must be +1 or -1, got {s}")));
    }
    Ok(d.iter().zip(signs).map(|(t, &s)| t * f64::from(s)).sum())
}

/// All values `t_1 Tr E_1 + ... + t_k Tr E_k` over sign patterns, where
/// entries of `d` closer than `gap` share a block (sorted, deduplicated to `gap`).
pub fn critical_value_set(d: &[f64], gap: f64) -> Vec<f64> {
    let mut sorted = d.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mut blocks: Vec<(f64, usize)> = Vec::new();
    for t in sorted {
        match blocks.last_mut() {
            Some((v, m)) if (t - *v).abs() <= gap => *m += 1,
            _ => blocks.push((t, 1)),
        }
    }
    let mut values = vec![0.0];
    for (t, m) in blocks {
        let traces = (0..=m).map(|k| 2.0 * k as f64 - m as f64);
        values = values
            .iter()
            .flat_map(|v| traces.clone().map(move |tr| v + t * tr))
            .collect();
    }
    values.sort_by(|a, b| a.total_cmp(b));
    values.dedup_by(|a, b| (*a - *b).abs() <= gap);
    values
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{random_group_element, tangent_residual};
    use crate::random::{random_hermitian, random_matrix, rng};
    use crate::scalar::{Field, Quat};
    use crate::space::cartan_embed;

    fn sp1() -> Automorphism {
        Automorphism::new(MatrixK::from_scalar(Field::H, Quat::I), false).unwrap()
    }

    fn grassmann() -> Automorphism {
        Automorphism::new(MatrixK::diag_real(Field::C, &[1.0, -1.0]), false).unwrap()
    }

    fn q(v: Quat) -> MatrixK {
        MatrixK::from_scalar(Field::H, v)
    }

    fn ijk() -> Quat {
        Quat::I + Quat::J + Quat::K
    }

    #[test]
    fn height_examples() {
        let x = MatrixK::diag_real(Field::C, &[0.0, 1.0]);
        assert_eq!(height(&x, &MatrixK::identity(Field::C, 2)), 1.0);
        let a = q((Quat::J + Quat::K) * (1.0 / 2f64.sqrt()));
        assert!((height(&q(ijk()), &a) + 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(height(&q(ijk()), &MatrixK::zeros(Field::H, 1)), 0.0);
    }

    #[test]
    fn xhat_examples() {
        let got = xhat(&sp1(), &q(ijk()));
        assert!(got.dist(&q((Quat::J + Quat::K) * -2.0)) < 1e-14);
        let got = xhat(&grassmann(), &MatrixK::diag_real(Field::C, &[0.0, 1.0]));
        assert!(got.dist(&MatrixK::diag_real(Field::C, &[0.0, 2.0])) < 1e-14);
        // sigma(Xhat) = Xhat* on random data
        let mut r = rng(3);
        let s = Automorphism::new(MatrixK::scalar(Field::H, 2, Quat::I), false).unwrap();
        let x = random_matrix(Field::H, 2, &mut r);
        let xh = xhat(&s, &x);
        assert!(s.apply(&xh).dist(&xh.conj_transpose()) < 1e-13);
    }

    #[test]
    fn gradient_examples() {
        let x = q(ijk());
        let g = grad_group(&x, &MatrixK::identity(Field::H, 1));
        assert!(g.dist(&q(-ijk())) < 1e-14);
        let crit = q(ijk() * (1.0 / 3f64.sqrt()));
        assert!(grad_group(&x, &crit).norm_fro() < 1e-14);

        let a = q((Quat::J + Quat::K) * (1.0 / 2f64.sqrt()));
        assert!(grad_model(&sp1(), &x, &a).norm_fro() < 1e-14);
        let xg = MatrixK::diag_real(Field::C, &[0.0, 1.0]);
        assert!(grad_model(&grassmann(), &xg, &MatrixK::identity(Field::C, 2)).norm_fro() < 1e-14);
    }

    #[test]
    fn model_gradient_is_projection_of_x_star() {
        let s = Automorphism::new(MatrixK::scalar(Field::H, 2, Quat::I), false).unwrap();
        let mut r = rng(11);
        for seed in 0..5 {
            let a = cartan_embed(&s, &random_group_element(2, Field::H, seed));
            let x = random_matrix(Field::H, 2, &mut r);
            let basis = Manifold::Model(&s).tangent_basis(&a);
            let xs = x.conj_transpose();
            let proj = basis
                .iter()
                .fold(MatrixK::zeros(Field::H, 2), |acc, e| &acc + &e.scale(inner(e, &xs)));
            assert!(grad_model(&s, &x, &a).dist(&proj) < 1e-9);
        }
    }

    #[test]
    fn group_gradient_is_projection_of_x_star() {
        let mut r = rng(12);
        let a = random_group_element(3, Field::C, 4);
        let x = random_matrix(Field::C, 3, &mut r);
        let g = grad_group(&x, &a);
        assert!(tangent_residual(&a, &g) < 1e-12);
        let basis = Manifold::Group.tangent_basis(&a);
        let xs = x.conj_transpose();
        let proj = basis
            .iter()
            .fold(MatrixK::zeros(Field::C, 3), |acc, e| &acc + &e.scale(inner(e, &xs)));
        assert!(g.dist(&proj) < 1e-9);
    }

    #[test]
    fn grassmann_pole_hessian() {
        let s = grassmann();
        let x = MatrixK::diag_real(Field::C, &[0.0, 1.0]);
        let tols = Tolerances::default();
        for eps in [1.0, -1.0] {
            let a = MatrixK::identity(Field::C, 2).scale(eps);
            for w in Manifold::Model(&s).tangent_basis(&a) {
                assert!(hessian_model(&s, &x, &a, &w).dist(&w.scale(-eps / 2.0)) < 1e-14);
            }
            let rec = hessian_spectrum(Manifold::Model(&s), &x, &a, &tols).unwrap();
            assert_eq!(rec.hessian_eigenvalues.len(), 2);
            for l in &rec.hessian_eigenvalues {
                assert!((l + eps / 2.0).abs() < 1e-12);
            }
            assert_eq!(rec.kernel_dim, 0);
            assert!(rec.morse);
            assert_eq!(rec.value, eps);
        }
    }

    #[test]
    fn sphere_points() {
        let s = sp1();
        let x = q(ijk());
        let tols = Tolerances::default();
        for sign in [1.0, -1.0] {
            let a = q((Quat::J + Quat::K) * (sign / 2f64.sqrt()));
            let (ok, _) = is_critical_model(&s, &x, &a, 1e-12);
            assert!(ok);
            let rec = hessian_spectrum(Manifold::Model(&s), &x, &a, &tols).unwrap();
            assert_eq!(rec.kernel_dim, 0);
            let b = q(ijk() * (sign / 3f64.sqrt()));
            assert!(is_critical_group(&x, &b, 1e-12).0);
            assert!(s.model_defect(&b) > 0.1);
        }
        let not = q(Quat::J);
        assert!(matches!(
            hessian_spectrum(Manifold::Model(&s), &x, &not, &tols),
            Err(Error::NotCritical { .. })
        ));
        assert!(is_critical_group(&MatrixK::identity(Field::C, 2), &MatrixK::identity(Field::C, 2), 0.0).0);
    }

    #[test]
    fn hessian_is_self_adjoint_at_critical_points() {
        // build a critical point of a random height function on Sp(2)/U(2)
        let s = Automorphism::new(MatrixK::scalar(Field::H, 2, Quat::I), false).unwrap();
        let mut r = rng(19);
        let a = cartan_embed(&s, &random_group_element(2, Field::H, 6));
        let z = random_hermitian(Field::H, 2, &mut r);
        let h = (&z + &(&(&a.conj_transpose() * &s.apply(&z)) * &*a)).scale(0.5);
        let xhat_target = &*a * &h;
        let x = xhat_target.conj_transpose().scale(0.5);
        let p = HeightProblem::new(Manifold::Model(&s), x).unwrap();
        assert!(p.xhat().dist(&xhat_target) < 1e-12);
        assert!(p.critical_residual(&a) < 1e-12);
        assert!(hermitian_criterion_defect(p.xhat(), &a) < 1e-12);
        let (m, basis) = p.hessian_matrix(&a);
        assert!((&m - m.transpose()).norm() < 1e-9);
        for w in &basis {
            assert!(Manifold::Model(&s).tangent_residual(&a, &p.hessian(&a, w)) < 1e-10);
        }
    }

    #[test]
    fn distance_and_height_share_critical_points() {
        // tangential derivative of ||A - X*||^2 is -2 grad h
        let s = sp1();
        let x = q(ijk());
        let a = q((Quat::J + Quat::K) * (1.0 / 2f64.sqrt()));
        let d = (&a - &x.conj_transpose()).scale(2.0);
        assert!(Manifold::Model(&s).project(&a, &d).norm_fro() < 1e-14);
    }

    #[test]
    fn inclusion_relations() {
        let s = sp1();
        let x = q(ijk());
        let h = 1.0 / 2f64.sqrt();
        let model = [q((Quat::J + Quat::K) * h), q((Quat::J + Quat::K) * -h)];
        let group = [q(ijk() * (1.0 / 3f64.sqrt())), q(ijk() * (-1.0 / 3f64.sqrt()))];
        let rep = critical_inclusion_check(&s, &x, &group, &model, 1e-9).unwrap();
        assert_eq!(rep.model_points_checked, 2);
        assert_eq!(rep.group_points_in_model, 0);
        assert!(!rep.self_adjoint_case);

        let g = grassmann();
        let xg = MatrixK::diag_real(Field::C, &[0.0, 1.0]);
        let id = MatrixK::identity(Field::C, 2);
        let poles = [id.clone(), id.scale(-1.0)];
        let rep = critical_inclusion_check(&g, &xg, &poles, &poles, 1e-9).unwrap();
        assert!(rep.self_adjoint_case);
        assert_eq!(rep.group_points_in_model, 2);

        assert!(critical_inclusion_check(&s, &x, &[], &[], 1e-9).is_ok());
        let bad = [q(Quat::J)];
        assert!(matches!(
            critical_inclusion_check(&s, &x, &[], &bad, 1e-9),
            Err(Error::RelationViolated { index: 0, .. })
        ));
    }

    #[test]
    fn values_from_signs() {
        let r2 = 2f64.sqrt();
        let d = [2.0, 2.0 * r2];
        assert!((critical_value_from_signs(&d, &[1, 1]).unwrap() - (2.0 + 2.0 * r2)).abs() < 1e-14);
        assert!((critical_value_from_signs(&d, &[-1, 1]).unwrap() - (-2.0 + 2.0 * r2)).abs() < 1e-14);
        let set = critical_value_set(&[r2, r2], 1e-8);
        assert_eq!(set.len(), 3);
        for (got, want) in set.iter().zip([-2.0 * r2, 0.0, 2.0 * r2]) {
            assert!((got - want).abs() < 1e-14);
        }
        assert_eq!(critical_value_set(&d, 1e-8).len(), 4);
        assert!(critical_value_from_signs(&d, &[1]).is_err());
        assert!(critical_value_from_signs(&d, &[1, 0]).is_err());
    }
}
