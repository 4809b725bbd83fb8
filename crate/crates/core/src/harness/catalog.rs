//! Built-in symmetric spaces and their known critical sets.

use crate::error::{Error, Result};
use crate::matrix::MatrixK;
use crate::scalar::{Field, Quat};
use crate::space::{validate_automorphism, Automorphism, Mode, SymmetricSpaceSpec};

/// A critical set known in closed form for a catalog space.
#[derive(Clone, Debug)]
pub struct KnownCriticalSet {
    pub description: &'static str,
    pub x: MatrixK,
    pub mode: Mode,
    /// Isolated critical points, when the set is finite.
    pub points: Vec<MatrixK>,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub space: SymmetricSpaceSpec,
    pub known_results: Vec<KnownCriticalSet>,
}

pub const CATALOG_NAMES: [&str; 3] = ["sp1_u1", "grassmann_c11", "sp2_u2"];

fn h(q: Quat) -> MatrixK {
    MatrixK::from_scalar(Field::H, q)
}

/// `x = i + j + k` on `Sp(1)`, conjugation by `i`.
pub fn sphere_x() -> MatrixK {
    h(Quat::I + Quat::J + Quat::K)
}

/// `diag(0, 1)` on `U(2)`.
pub fn grassmann_x() -> MatrixK {
    MatrixK::diag_real(Field::C, &[0.0, 1.0])
}

/// `diag(1 + j, i + j)` on `Sp(2)`.
pub fn symplectic_x() -> MatrixK {
    MatrixK::diag(Field::H, &[Quat::ONE + Quat::J, Quat::I + Quat::J])
}

/// The four critical points of the height of [`symplectic_x`] on `Sp(2)/U(2)`:
/// `diag(+-(1 - j)/sqrt 2, +-(-j))`.
pub fn symplectic_model_points() -> Vec<MatrixK> {
    let r = 1.0 / 2f64.sqrt();
    let a = Quat::new(r, 0.0, -r, 0.0);
    let b = -Quat::J;
    let mut out = Vec::new();
    for sa in [1.0, -1.0] {
        for sb in [1.0, -1.0] {
            out.push(MatrixK::diag(Field::H, &[a * sa, b * sb]));
        }
    }
    out
}

fn sp1_u1() -> CatalogEntry {
    let sigma = Automorphism::new(h(Quat::I), false).expect("unit conjugator");
    let g = 1.0 / 3f64.sqrt();
    let m = 1.0 / 2f64.sqrt();
    let ijk = Quat::I + Quat::J + Quat::K;
    let jk = Quat::J + Quat::K;
    CatalogEntry {
        name: "sp1_u1",
        description: "Sp(1)/U(1), the 2-sphere in the unit quaternions, sigma(q) = -i q i",
        space: SymmetricSpaceSpec {
            name: "sp1_u1".into(),
            field: Field::H,
            n: 1,
            sigma: Some(sigma),
            model_equals_n: true,
        },
        known_results: vec![
            KnownCriticalSet {
                description: "height of i+j+k on Sp(1)",
                x: sphere_x(),
                mode: Mode::Group,
                points: vec![h(ijk * g), h(ijk * -g)],
            },
            KnownCriticalSet {
                description: "height of i+j+k on the sphere",
                x: sphere_x(),
                mode: Mode::Model,
                points: vec![h(jk * m), h(jk * -m)],
            },
        ],
    }
}

fn grassmann_c11() -> CatalogEntry {
    let sigma = Automorphism::new(MatrixK::diag_real(Field::C, &[1.0, -1.0]), false).expect("unit conjugator");
    let id = MatrixK::identity(Field::C, 2);
    CatalogEntry {
        name: "grassmann_c11",
        description: "U(2)/(U(1) x U(1)), conjugation by diag(1, -1)",
        space: SymmetricSpaceSpec {
            name: "grassmann_c11".into(),
            field: Field::C,
            n: 2,
            sigma: Some(sigma),
            // N also contains diag(1, -1) and diag(-1, 1)
            model_equals_n: false,
        },
        known_results: vec![KnownCriticalSet {
            description: "height of diag(0, 1) on the Cartan model",
            x: grassmann_x(),
            mode: Mode::Model,
            points: vec![id.clone(), id.scale(-1.0)],
        }],
    }
}

fn sp2_u2() -> CatalogEntry {
    let sigma = Automorphism::new(MatrixK::scalar(Field::H, 2, Quat::I), false).expect("unit conjugator");
    CatalogEntry {
        name: "sp2_u2",
        description: "Sp(2)/U(2), sigma(A) = -i A i",
        space: SymmetricSpaceSpec {
            name: "sp2_u2".into(),
            field: Field::H,
            n: 2,
            sigma: Some(sigma),
            model_equals_n: true,
        },
        known_results: vec![KnownCriticalSet {
            description: "height of diag(1+j, i+j) on the Cartan model",
            x: symplectic_x(),
            mode: Mode::Model,
            points: symplectic_model_points(),
        }],
    }
}

/// All named model spaces.
pub fn catalog() -> Vec<CatalogEntry> {
    vec![sp1_u1(), grassmann_c11(), sp2_u2()]
}

/// Looks up a catalog space; `group` needs the field and size of the group.
pub fn lookup(name: &str, group_shape: Option<(Field, usize)>) -> Result<SymmetricSpaceSpec> {
    if name == "group" {
        let (field, n) =
            group_shape.ok_or_else(|| Error::Invalid("the `group` space takes its field and size from X".into()))?;
        return Ok(SymmetricSpaceSpec::group(field, n));
    }
    let entry = catalog()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::Invalid(format!("unknown space `{name}`")))?;
    if let Some(s) = &entry.space.sigma {
        validate_automorphism(s, 8, 0)?;
    }
    Ok(entry.space)
}

pub fn entry(name: &str) -> Option<CatalogEntry> {
    catalog().into_iter().find(|e| e.name == name)
}
