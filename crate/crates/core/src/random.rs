//! Seeded random sampling of matrices.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::matrix::MatrixK;
use crate::scalar::{Field, Quat};

pub type SymRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SymRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Child generator for stream `index` of a run seeded with `seed`.
pub fn substream(seed: u64, index: u64) -> SymRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index.wrapping_add(1));
    r
}

pub fn normal(rng: &mut SymRng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn random_scalar(field: Field, rng: &mut SymRng) -> Quat {
    let mut c = [0.0; 4];
    for slot in c.iter_mut().take(field.dim()) {
        *slot = normal(rng);
    }
    Quat::from_components(c)
}

/// Matrix with independent standard normal components.
pub fn random_matrix(field: Field, n: usize, rng: &mut SymRng) -> MatrixK {
    MatrixK::from_fn(field, n, |_, _| random_scalar(field, rng))
}

/// Skew-Hermitian matrix `(Z - Z*) / 2` for a normal `Z`.
pub fn random_skew(field: Field, n: usize, rng: &mut SymRng) -> MatrixK {
    random_matrix(field, n, rng).skew_part()
}

/// Hermitian matrix `(Z + Z*) / 2` for a normal `Z`.
pub fn random_hermitian(field: Field, n: usize, rng: &mut SymRng) -> MatrixK {
    random_matrix(field, n, rng).hermitian_part()
}

/// Uniform draw from `[0, 1)`.
pub fn uniform(rng: &mut SymRng) -> f64 {
    rand::RngExt::random::<f64>(rng)
}
