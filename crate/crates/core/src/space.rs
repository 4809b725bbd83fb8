//! Involutive automorphisms, Cartan models and their tangent spaces.
//!
//! An automorphism is stored as `sigma(X) = C op(X) C^-1`, where `op` is the
//! identity or entrywise conjugation. The Cartan model of the symmetric
//! space is realised inside the group as `N = {A : sigma(A) = A*}`.

use std::ops::Deref;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::group::{project_tangent_group, random_group_element_with, tangent_residual, GroupElement};
use crate::linalg::real_null_space;
use crate::matrix::MatrixK;
use crate::random::{random_matrix, rng, SymRng};
use crate::scalar::Field;
use crate::tolerance::Tolerances;

#[derive(Clone, Debug, PartialEq)]
pub struct Automorphism {
    conjugator: MatrixK,
    conjugator_inv: MatrixK,
    entrywise_conjugation: bool,
}

impl Automorphism {
    pub fn new(conjugator: MatrixK, entrywise_conjugation: bool) -> Result<Self> {
        if entrywise_conjugation && conjugator.field() == Field::H {
            return Err(Error::IncompatibleAutomorphism(Field::H));
        }
        let conjugator_inv = conjugator.inverse()?;
        Ok(Automorphism {
            conjugator,
            conjugator_inv,
            entrywise_conjugation,
        })
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let id = MatrixK::identity(field, n);
        Automorphism {
            conjugator: id.clone(),
            conjugator_inv: id,
            entrywise_conjugation: false,
        }
    }

    pub fn conjugator(&self) -> &MatrixK {
        &self.conjugator
    }

    pub fn entrywise_conjugation(&self) -> bool {
        self.entrywise_conjugation
    }

    pub fn field(&self) -> Field {
        self.conjugator.field()
    }

    pub fn n(&self) -> usize {
        self.conjugator.n()
    }

    /// `C op(X) C^-1`. Panics on a size mismatch; see [`apply_sigma`] for the checked form.
    pub fn apply(&self, x: &MatrixK) -> MatrixK {
        assert_eq!(x.n(), self.n(), "automorphism applied to a matrix of the wrong size");
        let inner = if self.entrywise_conjugation {
            x.entrywise_conj()
        } else {
            x.clone()
        };
        &(&self.conjugator * &inner) * &self.conjugator_inv
    }

    /// `||sigma(A) - A*||_F`.
    pub fn model_defect(&self, a: &MatrixK) -> f64 {
        self.apply(a).dist(&a.conj_transpose())
    }
}

/// Checked application of an automorphism.
pub fn apply_sigma(sigma: &Automorphism, x: &MatrixK) -> Result<MatrixK> {
    if x.n() != sigma.n() {
        return Err(Error::DimensionMismatch {
            expected: sigma.n(),
            found: x.n(),
        });
    }
    if sigma.entrywise_conjugation && x.field() == Field::H {
        return Err(Error::IncompatibleAutomorphism(Field::H));
    }
    Ok(sigma.apply(x))
}

/// Largest relative residual seen for each automorphism property.
#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct AutomorphismReport {
    pub samples: usize,
    pub involution: f64,
    pub homomorphism: f64,
    pub star: f64,
    pub unit: f64,
}

impl AutomorphismReport {
    pub fn max_residual(&self) -> f64 {
        self.involution.max(self.homomorphism).max(self.star).max(self.unit)
    }
}

/// Spot-checks `sigma^2 = id`, `sigma(XY) = sigma(X)sigma(Y)`, `sigma(X*) = sigma(X)*`
/// and `sigma(I) = I` on random matrices.
pub fn measure_automorphism(sigma: &Automorphism, samples: usize, seed: u64) -> AutomorphismReport {
    let mut r = rng(seed);
    let (field, n) = (sigma.field(), sigma.n());
    let sample_field = if sigma.entrywise_conjugation {
        field
    } else {
        field.join(Field::C)
    };
    let id = MatrixK::identity(field, n);
    let mut rep = AutomorphismReport {
        samples,
        unit: sigma.apply(&id).dist(&id) / (n as f64).sqrt(),
        ..Default::default()
    };
    for _ in 0..samples {
        let x = random_matrix(sample_field, n, &mut r);
        let y = random_matrix(sample_field, n, &mut r);
        let (nx, ny) = (x.norm_fro(), y.norm_fro());
        let sx = sigma.apply(&x);
        rep.involution = rep.involution.max(sigma.apply(&sx).dist(&x) / nx);
        let hom = sigma.apply(&(&x * &y)).dist(&(&sx * &sigma.apply(&y))) / (nx * ny);
        rep.homomorphism = rep.homomorphism.max(hom);
        rep.star = rep
            .star
            .max(sigma.apply(&x.conj_transpose()).dist(&sx.conj_transpose()) / nx);
    }
    rep
}

/// As [`measure_automorphism`], failing on the first property whose residual
/// exceeds the membership tolerance.
pub fn validate_automorphism(sigma: &Automorphism, samples: usize, seed: u64) -> Result<AutomorphismReport> {
    validate_automorphism_with(sigma, samples, seed, Tolerances::default().membership)
}

pub fn validate_automorphism_with(
    sigma: &Automorphism,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<AutomorphismReport> {
    let rep = measure_automorphism(sigma, samples, seed);
    for (property, residual) in [
        ("sigma(I) = I", rep.unit),
        ("sigma o sigma = id", rep.involution),
        ("sigma(XY) = sigma(X) sigma(Y)", rep.homomorphism),
        ("sigma(X*) = sigma(X)*", rep.star),
    ] {
        if !(residual <= tol) {
            return Err(Error::ValidationFailure { property, residual });
        }
    }
    Ok(rep)
}

/// A symmetric space given by its automorphism, plus catalog metadata.
#[derive(Clone, Debug)]
pub struct SymmetricSpaceSpec {
    pub name: String,
    pub field: Field,
    pub n: usize,
    /// `None` for the pure group.
    pub sigma: Option<Automorphism>,
    /// Whether the Cartan model is all of `N` (not just its identity component).
    pub model_equals_n: bool,
}

impl SymmetricSpaceSpec {
    pub fn group(field: Field, n: usize) -> Self {
        SymmetricSpaceSpec {
            name: "group".into(),
            field,
            n,
            sigma: None,
            model_equals_n: true,
        }
    }

    pub fn manifold(&self, mode: Mode) -> Result<Manifold<'_>> {
        match (mode, &self.sigma) {
            (Mode::Group, _) => Ok(Manifold::Group),
            (Mode::Model, Some(s)) => Ok(Manifold::Model(s)),
            (Mode::Model, None) => Err(Error::Invalid(format!(
                "space `{}` has no automorphism; use group mode",
                self.name
            ))),
        }
    }

    /// The automorphism, or an error for the pure group.
    pub fn sigma(&self) -> Result<&Automorphism> {
        self.sigma
            .as_ref()
            .ok_or_else(|| Error::Invalid(format!("space `{}` has no automorphism", self.name)))
    }
}

/// Which height function is studied: on the group or on the Cartan model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Group,
    Model,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "group" => Ok(Mode::Group),
            "model" => Ok(Mode::Model),
            other => Err(format!("unknown mode `{other}` (expected group or model)")),
        }
    }
}

/// The submanifold a height function is restricted to.
#[derive(Clone, Copy, Debug)]
pub enum Manifold<'a> {
    Group,
    Model(&'a Automorphism),
}

impl Manifold<'_> {
    pub fn mode(&self) -> Mode {
        match self {
            Manifold::Group => Mode::Group,
            Manifold::Model(_) => Mode::Model,
        }
    }

    /// Distance from the manifold for a matrix already in the group:
    /// `0` in group mode, `||sigma(A) - A*||_F` otherwise.
    pub fn model_defect(&self, a: &MatrixK) -> f64 {
        match self {
            Manifold::Group => 0.0,
            Manifold::Model(s) => s.model_defect(a),
        }
    }

    /// Combined group and model defect.
    pub fn defect(&self, a: &MatrixK) -> f64 {
        a.unitary_defect().max(self.model_defect(a))
    }

    /// Orthogonal projection of an ambient matrix onto the tangent space at `a`.
    pub fn project(&self, a: &MatrixK, z: &MatrixK) -> MatrixK {
        let y = project_tangent_group(a, z);
        match self {
            Manifold::Group => y,
            // Y -> sigma(Y)* is an isometric involution of T_A G fixing T_A M.
            Manifold::Model(s) => (&y + &s.apply(&y).conj_transpose()).scale(0.5),
        }
    }

    /// Residual of the tangency conditions at `a`.
    pub fn tangent_residual(&self, a: &MatrixK, y: &MatrixK) -> f64 {
        let g = tangent_residual(a, y);
        match self {
            Manifold::Group => g,
            Manifold::Model(s) => g.max(s.apply(y).dist(&y.conj_transpose())),
        }
    }

    /// Real-orthonormal basis of the tangent space at `a`, computed as the
    /// null space of the defining linear conditions.
    pub fn tangent_basis(&self, a: &MatrixK) -> Vec<MatrixK> {
        let field = self.working_field(a.field());
        let a_star = a.conj_transpose();
        match self {
            Manifold::Group => constraint_null_space(field, a.n(), |y| {
                let ya = y * &a_star;
                vec![&ya + &ya.conj_transpose()]
            }),
            Manifold::Model(s) => constraint_null_space(field, a.n(), |y| {
                let ya = y * &a_star;
                vec![&ya + &ya.conj_transpose(), s.apply(y) - y.conj_transpose()]
            }),
        }
    }

    pub fn working_field(&self, field: Field) -> Field {
        match self {
            Manifold::Group => field,
            Manifold::Model(s) => field.join(s.field()),
        }
    }

    /// A random point: `exp` of a skew matrix in group mode, its Cartan
    /// image `B sigma(B)*` in model mode. Both lie in identity components.
    pub fn random_point(&self, field: Field, n: usize, rng: &mut SymRng) -> MatrixK {
        let b = random_group_element_with(n, self.working_field(field), rng);
        match self {
            Manifold::Group => b.into_inner(),
            Manifold::Model(s) => cartan_embed(s, &b).into_inner(),
        }
    }
}

/// Orthonormal basis (under `Re Tr(X*Y)`) of `{Y in K^{n x n} : L(Y) = 0}`
/// for a real-linear map `L` given as a list of matrix-valued conditions.
pub fn constraint_null_space(field: Field, n: usize, conditions: impl Fn(&MatrixK) -> Vec<MatrixK>) -> Vec<MatrixK> {
    let dim = MatrixK::real_dim(field, n);
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut v = vec![0.0; dim];
        v[k] = 1.0;
        let e = MatrixK::from_real_vec(field, n, &v);
        let col: Vec<f64> = conditions(&e)
            .iter()
            .flat_map(|m| m.with_field(Field::H).to_real_vec())
            .collect();
        columns.push(col);
    }
    let rows = columns.first().map_or(0, |c| c.len());
    let l = DMatrix::from_fn(rows, dim, |r, c| columns[c][r]);
    real_null_space(&l, 1e-9)
        .into_iter()
        .map(|v| MatrixK::from_real_vec(field, n, v.as_slice()))
        .collect()
}

/// A point of `N = {A in G : sigma(A) = A*}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CartanPoint(MatrixK);

impl CartanPoint {
    pub fn new(sigma: &Automorphism, a: MatrixK, tol: f64) -> Result<Self> {
        let (ok, defect) = is_in_cartan_model(sigma, &a, tol);
        if ok && a.unitary_defect() <= tol {
            Ok(CartanPoint(a))
        } else {
            Err(Error::Invalid(format!(
                "matrix is not in the Cartan model (defect {defect:.3e})"
            )))
        }
    }

    pub fn new_unchecked(a: MatrixK) -> Self {
        CartanPoint(a)
    }

    pub fn matrix(&self) -> &MatrixK {
        &self.0
    }

    pub fn into_inner(self) -> MatrixK {
        self.0
    }
}

impl Deref for CartanPoint {
    type Target = MatrixK;
    fn deref(&self) -> &MatrixK {
        &self.0
    }
}

/// `(||sigma(A) - A*||_F <= tol, ||sigma(A) - A*||_F)`.
pub fn is_in_cartan_model(sigma: &Automorphism, a: &MatrixK, tol: f64) -> (bool, f64) {
    let d = sigma.model_defect(a);
    (d <= tol, d)
}

/// Cartan embedding `B -> B sigma(B)^-1`.
pub fn cartan_embed(sigma: &Automorphism, b: &GroupElement) -> CartanPoint {
    CartanPoint(b.matrix() * &sigma.apply(b).conj_transpose())
}

/// Isometric action `A -> B A sigma(B)^-1` on the model.
pub fn translate_model(sigma: &Automorphism, b: &GroupElement, a: &MatrixK) -> CartanPoint {
    CartanPoint(&(b.matrix() * a) * &sigma.apply(b).conj_transpose())
}

/// Basis of `T_A M = {Y : YA* + AY* = 0, sigma(Y) = Y*}`.
pub fn tangent_basis_model(sigma: &Automorphism, a: &MatrixK) -> Vec<MatrixK> {
    Manifold::Model(sigma).tangent_basis(a)
}

/// `sigma'(X) = Theta sigma(X) Theta*`, defined when `sigma(Theta) = Theta*`.
pub fn twist_automorphism(sigma: &Automorphism, theta: &MatrixK, tol: f64) -> Result<Automorphism> {
    let defect = sigma.model_defect(theta);
    if defect > tol {
        return Err(Error::HypothesisViolated(format!(
            "twist requires sigma(Theta) = Theta* (residual {defect:.3e})"
        )));
    }
    let conjugator = theta * &sigma.conjugator;
    let conjugator_inv = &sigma.conjugator_inv * &theta.conj_transpose();
    Ok(Automorphism {
        conjugator,
        conjugator_inv,
        entrywise_conjugation: sigma.entrywise_conjugation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::random_group_element;
    use crate::matrix::inner;
    use crate::scalar::Quat;

    fn i11() -> Automorphism {
        Automorphism::new(MatrixK::diag_real(Field::C, &[1.0, -1.0]), false).unwrap()
    }

    fn quat_i(n: usize) -> Automorphism {
        Automorphism::new(MatrixK::scalar(Field::H, n, Quat::I), false).unwrap()
    }

    #[test]
    fn apply_examples() {
        let x = MatrixK::diag_real(Field::C, &[0.0, 1.0]);
        assert_eq!(apply_sigma(&i11(), &x).unwrap(), x);

        let q = MatrixK::from_scalar(Field::H, Quat::I + Quat::J + Quat::K);
        let got = apply_sigma(&quat_i(1), &q).unwrap();
        assert!(got.dist(&MatrixK::from_scalar(Field::H, Quat::I - Quat::J - Quat::K)) < 1e-15);

        for s in [i11(), quat_i(2)] {
            let id = MatrixK::identity(s.field(), 2);
            assert!(apply_sigma(&s, &id).unwrap().dist(&id) < 1e-15);
        }
        assert!(matches!(
            Automorphism::new(MatrixK::identity(Field::H, 2), true),
            Err(Error::IncompatibleAutomorphism(_))
        ));
        let conj_c = Automorphism::new(MatrixK::identity(Field::C, 1), true).unwrap();
        assert!(matches!(
            apply_sigma(&conj_c, &MatrixK::from_scalar(Field::H, Quat::J)),
            Err(Error::IncompatibleAutomorphism(_))
        ));
    }

    #[test]
    fn validation() {
        let rep = validate_automorphism(&i11(), 20, 1).unwrap();
        assert!(rep.max_residual() < 1e-12);
        assert!(validate_automorphism(&quat_i(1), 20, 2).unwrap().max_residual() < 1e-12);
        assert!(validate_automorphism(&quat_i(2), 20, 2).is_ok());

        // C^2 = I but C is not unitary: an involutive automorphism that does
        // not commute with conjugate transposition
        let c = MatrixK::from_real_rows(&[&[1.0, 1.0], &[0.0, -1.0]]).with_field(Field::C);
        let bad = Automorphism::new(c, false).unwrap();
        match validate_automorphism(&bad, 10, 3) {
            Err(Error::ValidationFailure { property, .. }) => assert_eq!(property, "sigma(X*) = sigma(X)*"),
            other => panic!("expected a star failure, got {other:?}"),
        }
    }

    #[test]
    fn cartan_model_membership() {
        let s = quat_i(1);
        assert!(is_in_cartan_model(&s, &MatrixK::identity(Field::H, 1), 1e-12).0);
        let a = MatrixK::from_scalar(Field::H, (Quat::J + Quat::K) * (1.0 / 2f64.sqrt()));
        assert!(is_in_cartan_model(&s, &a, 1e-12).0);
        let g = MatrixK::from_scalar(Field::H, (Quat::I + Quat::J + Quat::K) * (1.0 / 3f64.sqrt()));
        assert!(!is_in_cartan_model(&s, &g, 1e-9).0);
    }

    #[test]
    fn cartan_embedding() {
        let s = quat_i(2);
        let id = GroupElement::new_unchecked(MatrixK::identity(Field::H, 2));
        assert!(cartan_embed(&s, &id).dist(&id) < 1e-15);

        // elements of K = {sigma(B) = B} map to the identity
        let k = GroupElement::new_unchecked(MatrixK::diag(
            Field::H,
            &[Quat::complex(0.6, 0.8), Quat::complex(0.0, 1.0)],
        ));
        assert!(cartan_embed(&s, &k).dist(&id) < 1e-15);

        for seed in 0..10 {
            let b = random_group_element(2, Field::H, seed);
            let g = cartan_embed(&s, &b);
            assert!(is_in_cartan_model(&s, &g, 1e-12).0);
            // right translation by K does not move the image
            let bk = GroupElement::new_unchecked(b.matrix() * k.matrix());
            assert!(cartan_embed(&s, &bk).dist(&g) < 1e-12);
        }
    }

    #[test]
    fn translation_is_an_action() {
        let s = quat_i(2);
        let a = cartan_embed(&s, &random_group_element(2, Field::H, 1));
        let id = GroupElement::new_unchecked(MatrixK::identity(Field::H, 2));
        assert!(translate_model(&s, &id, &a).dist(&a) < 1e-15);
        let b1 = random_group_element(2, Field::H, 2);
        let b2 = random_group_element(2, Field::H, 3);
        assert!(translate_model(&s, &b1, &id).dist(&cartan_embed(&s, &b1)) < 1e-15);
        let b12 = GroupElement::new_unchecked(b1.matrix() * b2.matrix());
        let lhs = translate_model(&s, &b12, &a);
        let rhs = translate_model(&s, &b1, &translate_model(&s, &b2, &a));
        assert!(lhs.dist(&rhs) < 1e-10);
        assert!(is_in_cartan_model(&s, &lhs, 1e-12).0);
        // isometric: distances between model points are preserved
        let c = cartan_embed(&s, &random_group_element(2, Field::H, 4));
        let d0 = a.dist(&c);
        let d1 = translate_model(&s, &b1, &a).dist(&translate_model(&s, &b1, &c));
        assert!((d0 - d1).abs() < 1e-12);
    }

    fn check_basis(s: &Automorphism, a: &MatrixK, expected_dim: usize) -> Vec<MatrixK> {
        let basis = tangent_basis_model(s, a);
        assert_eq!(basis.len(), expected_dim);
        for (i, y) in basis.iter().enumerate() {
            assert!(Manifold::Model(s).tangent_residual(a, y) < 1e-10);
            for (j, z) in basis.iter().enumerate() {
                let g = inner(y, z);
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((g - e).abs() < 1e-10);
            }
        }
        basis
    }

    #[test]
    fn tangent_bases() {
        // Sp(1)/U(1) at 1: span{j, k}
        let s = quat_i(1);
        let basis = check_basis(&s, &MatrixK::identity(Field::H, 1), 2);
        for y in &basis {
            let q = y[(0, 0)];
            assert!(q.w.abs() < 1e-12 && q.x.abs() < 1e-12);
        }
        // complex Grassmannian at +-I: off-diagonal (0 z; -conj z 0)
        for eps in [1.0, -1.0] {
            let a = MatrixK::identity(Field::C, 2).scale(eps);
            for y in check_basis(&i11(), &a, 2) {
                assert!(y[(0, 0)].norm() < 1e-12 && y[(1, 1)].norm() < 1e-12);
                assert!((y[(1, 0)] + y[(0, 1)].conj()).norm() < 1e-12);
            }
        }
        // Sp(2)/U(2): dim Sp(2) - dim U(2) = 10 - 4
        check_basis(&quat_i(2), &MatrixK::identity(Field::H, 2), 6);
        let a = cartan_embed(&quat_i(2), &random_group_element(2, Field::H, 8));
        check_basis(&quat_i(2), &a, 6);
        // group tangent space has the dimension of the Lie algebra
        assert_eq!(Manifold::Group.tangent_basis(&MatrixK::identity(Field::H, 2)).len(), 10);
        assert_eq!(Manifold::Group.tangent_basis(&MatrixK::identity(Field::R, 3)).len(), 3);
    }

    #[test]
    fn closed_form_projection_matches_basis_projection() {
        let s = quat_i(2);
        let a = cartan_embed(&s, &random_group_element(2, Field::H, 31));
        let mut r = rng(32);
        let z = random_matrix(Field::H, 2, &mut r);
        let basis = tangent_basis_model(&s, &a);
        let via_basis = basis
            .iter()
            .fold(MatrixK::zeros(Field::H, 2), |acc, e| &acc + &e.scale(inner(e, &z)));
        assert!(Manifold::Model(&s).project(&a, &z).dist(&via_basis) < 1e-10);
    }

    #[test]
    fn twisting() {
        let s = quat_i(2);
        let id = MatrixK::identity(Field::H, 2);
        let same = twist_automorphism(&s, &id, 1e-12).unwrap();
        let mut r = rng(40);
        let x = random_matrix(Field::H, 2, &mut r);
        assert!(same.apply(&x).dist(&s.apply(&x)) < 1e-14);

        // Theta from the final worked Sp(2)/U(2) example
        let h = 1.0 / 2f64.sqrt();
        let theta = MatrixK::diag(Field::H, &[-Quat::J, Quat::new(h, 0.0, -h, 0.0)]);
        let twisted = twist_automorphism(&s, &theta, 1e-12).unwrap();
        let u = theta.conj_transpose();
        let expected = &(&u.conj_transpose() * &s.apply(&x)) * &u;
        assert!(twisted.apply(&x).dist(&expected) < 1e-14);
        let alt = (&(&u * &x) * &u.conj_transpose())
            .left_scalar(-Quat::I)
            .right_scalar(Quat::I);
        assert!(twisted.apply(&x).dist(&alt) < 1e-14);
        assert!(validate_automorphism(&twisted, 10, 5).is_ok());

        // N' = Theta N
        for seed in 0..5 {
            let a = cartan_embed(&s, &random_group_element(2, Field::H, seed));
            assert!(twisted.model_defect(&(&theta * &*a)) < 1e-12);
        }
        let bad = MatrixK::scalar(Field::H, 2, Quat::I);
        assert!(matches!(
            twist_automorphism(&s, &bad, 1e-9),
            Err(Error::HypothesisViolated(_))
        ));
    }
}
