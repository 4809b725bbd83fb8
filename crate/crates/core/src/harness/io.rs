//! File formats for spaces, automorphisms and matrices.
//!
//! Matrices use the [`MatrixK`] JSON form. A space file is
//! `{"name", "field", "n", "sigma": {"conjugator", "entrywise_conjugation"}, "model_equals_n"}`
//! with `sigma` and `model_equals_n` optional.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::catalog;
use crate::matrix::MatrixK;
use crate::scalar::Field;
use crate::space::{validate_automorphism, Automorphism, SymmetricSpaceSpec};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SigmaFile {
    pub conjugator: MatrixK,
    #[serde(default)]
    pub entrywise_conjugation: bool,
}

impl SigmaFile {
    pub fn into_automorphism(self) -> Result<Automorphism> {
        Automorphism::new(self.conjugator, self.entrywise_conjugation)
    }
}

impl From<&Automorphism> for SigmaFile {
    fn from(s: &Automorphism) -> Self {
        SigmaFile {
            conjugator: s.conjugator().clone(),
            entrywise_conjugation: s.entrywise_conjugation(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceFile {
    pub name: String,
    pub field: Field,
    pub n: usize,
    #[serde(default)]
    pub sigma: Option<SigmaFile>,
    #[serde(default = "default_true")]
    pub model_equals_n: bool,
}

fn default_true() -> bool {
    true
}

impl SpaceFile {
    pub fn into_spec(self) -> Result<SymmetricSpaceSpec> {
        let sigma = self.sigma.map(SigmaFile::into_automorphism).transpose()?;
        if let Some(s) = &sigma {
            if s.n() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    found: s.n(),
                });
            }
            validate_automorphism(s, 8, 0)?;
        }
        Ok(SymmetricSpaceSpec {
            name: self.name,
            field: self.field,
            n: self.n,
            sigma,
            model_equals_n: self.model_equals_n,
        })
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<MatrixK> {
    read_json(path)
}

/// A catalog name or the path of a space file. `group` takes its field and
/// size from `shape`.
pub fn load_space(name_or_path: &str, shape: Option<(Field, usize)>) -> Result<SymmetricSpaceSpec> {
    let path = Path::new(name_or_path);
    if path.is_file() {
        read_json::<SpaceFile>(path)?.into_spec()
    } else {
        catalog::lookup(name_or_path, shape)
    }
}

/// An automorphism file, a space file with a `sigma`, or a catalog name.
pub fn load_sigma(name_or_path: &str) -> Result<Automorphism> {
    let path = Path::new(name_or_path);
    if !path.is_file() {
        return catalog::lookup(name_or_path, None)?.sigma().cloned();
    }
    let value: serde_json::Value = read_json(path)?;
    let sigma = if value.get("conjugator").is_some() {
        serde_json::from_value::<SigmaFile>(value)?.into_automorphism()?
    } else {
        serde_json::from_value::<SpaceFile>(value)?
            .into_spec()?
            .sigma()?
            .clone()
    };
    validate_automorphism(&sigma, 8, 0)?;
    Ok(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_file_round_trip() {
        let spec = catalog::lookup("sp2_u2", None).unwrap();
        let file = SpaceFile {
            name: spec.name.clone(),
            field: spec.field,
            n: spec.n,
            sigma: spec.sigma.as_ref().map(SigmaFile::from),
            model_equals_n: true,
        };
        let text = serde_json::to_string(&file).unwrap();
        let back: SpaceFile = serde_json::from_str(&text).unwrap();
        let spec2 = back.into_spec().unwrap();
        assert_eq!(spec2.sigma, spec.sigma);

        let bare = r#"{"name":"u3","field":"C","n":3}"#;
        let s: SpaceFile = serde_json::from_str(bare).unwrap();
        let s = s.into_spec().unwrap();
        assert!(s.sigma.is_none() && s.model_equals_n);
    }

    #[test]
    fn rejects_non_involution() {
        let c = MatrixK::diag(
            Field::C,
            &[crate::scalar::Quat::ONE, crate::scalar::Quat::complex(0.6, 0.8)],
        );
        let file = SpaceFile {
            name: "bad".into(),
            field: Field::C,
            n: 2,
            sigma: Some(SigmaFile {
                conjugator: c,
                entrywise_conjugation: false,
            }),
            model_equals_n: true,
        };
        assert!(file.into_spec().is_err());
    }
}
