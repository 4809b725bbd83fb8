//! Dense square matrices over R, C or H.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{Complex, DMatrix};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Field, Quat};

/// An `n x n` matrix whose entries lie in `field`.
///
/// Entries are stored row-major as quaternions; constructors drop any
/// components that fall outside the declared field, so the field tag is
/// always truthful. Binary operations promote to the larger field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "MatrixJson", try_from = "MatrixJson")]
pub struct MatrixK {
    field: Field,
    n: usize,
    data: Vec<Quat>,
}

impl MatrixK {
    pub fn from_fn(field: Field, n: usize, mut f: impl FnMut(usize, usize) -> Quat) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j).restrict(field));
            }
        }
        MatrixK { field, n, data }
    }

    /// Row-major entries; fails when the length is not `n * n`.
    pub fn from_entries(field: Field, n: usize, entries: Vec<Quat>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Invalid(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        let data = entries.into_iter().map(|q| q.restrict(field)).collect();
        Ok(MatrixK { field, n, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        MatrixK::from_fn(Field::R, n, |i, j| Quat::real(rows[i][j]))
    }

    pub fn zeros(field: Field, n: usize) -> Self {
        MatrixK {
            field,
            n,
            data: vec![Quat::ZERO; n * n],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        MatrixK::from_fn(field, n, |i, j| if i == j { Quat::ONE } else { Quat::ZERO })
    }

    /// `q * I`.
    pub fn scalar(field: Field, n: usize, q: Quat) -> Self {
        MatrixK::from_fn(field, n, |i, j| if i == j { q } else { Quat::ZERO })
    }

    pub fn diag(field: Field, entries: &[Quat]) -> Self {
        MatrixK::from_fn(
            field,
            entries.len(),
            |i, j| if i == j { entries[i] } else { Quat::ZERO },
        )
    }

    pub fn diag_real(field: Field, entries: &[f64]) -> Self {
        MatrixK::from_fn(field, entries.len(), |i, j| {
            if i == j {
                Quat::real(entries[i])
            } else {
                Quat::ZERO
            }
        })
    }

    /// A 1x1 matrix.
    pub fn from_scalar(field: Field, q: Quat) -> Self {
        MatrixK::from_fn(field, 1, |_, _| q)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Quat] {
        &self.data
    }

    /// Same entries viewed over a different field (components outside it are dropped).
    pub fn with_field(&self, field: Field) -> Self {
        MatrixK::from_fn(field, self.n, |i, j| self[(i, j)])
    }

    /// Smallest field containing every entry exactly.
    pub fn minimal_field(&self) -> Field {
        self.data.iter().map(|q| q.field()).max().unwrap_or(Field::R)
    }

    pub fn map(&self, f: impl Fn(Quat) -> Quat) -> Self {
        MatrixK::from_fn(self.field, self.n, |i, j| f(self[(i, j)]))
    }

    pub fn row(&self, i: usize) -> &[Quat] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<Quat> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[Quat]) {
        for (i, q) in col.iter().enumerate() {
            self[(i, j)] = q.restrict(self.field);
        }
    }

    /// Entry (i, j) of the result is `conj(A[j, i])`.
    pub fn conj_transpose(&self) -> Self {
        MatrixK::from_fn(self.field, self.n, |i, j| self[(j, i)].conj())
    }

    /// Entrywise quaternion conjugation (complex conjugation over C).
    pub fn entrywise_conj(&self) -> Self {
        self.map(Quat::conj)
    }

    pub fn trace(&self) -> Quat {
        (0..self.n).fold(Quat::ZERO, |acc, i| acc + self[(i, i)])
    }

    /// Real part of the trace.
    pub fn re_trace(&self) -> f64 {
        self.trace().w
    }

    pub fn norm_fro_sqr(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).sum()
    }

    pub fn norm_fro(&self) -> f64 {
        self.norm_fro_sqr().sqrt()
    }

    /// Frobenius distance.
    pub fn dist(&self, other: &MatrixK) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|q| q * s)
    }

    /// `q * A`.
    pub fn left_scalar(&self, q: Quat) -> Self {
        let f = self.field.join(q.field());
        MatrixK::from_fn(f, self.n, |i, j| q * self[(i, j)])
    }

    /// `A * q`.
    pub fn right_scalar(&self, q: Quat) -> Self {
        let f = self.field.join(q.field());
        MatrixK::from_fn(f, self.n, |i, j| self[(i, j)] * q)
    }

    /// `(A - A*) / 2`.
    pub fn skew_part(&self) -> Self {
        (self - &self.conj_transpose()).scale(0.5)
    }

    /// `(A + A*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.conj_transpose()).scale(0.5)
    }

    /// `||A - A*||_F`.
    pub fn hermitian_defect(&self) -> f64 {
        self.dist(&self.conj_transpose())
    }

    /// `||A A* - I||_F`.
    pub fn unitary_defect(&self) -> f64 {
        (self * &self.conj_transpose()).dist(&MatrixK::identity(self.field, self.n))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|q| q.is_finite())
    }

    /// Components of every entry that belong to the field, row-major.
    pub fn to_real_vec(&self) -> Vec<f64> {
        let d = self.field.dim();
        self.data
            .iter()
            .flat_map(|q| q.components().into_iter().take(d))
            .collect()
    }

    /// Inverse of [`MatrixK::to_real_vec`].
    pub fn from_real_vec(field: Field, n: usize, v: &[f64]) -> Self {
        let d = field.dim();
        assert_eq!(v.len(), d * n * n, "real vector has wrong length");
        MatrixK::from_fn(field, n, |i, j| {
            let base = (i * n + j) * d;
            let mut c = [0.0; 4];
            c[..d].copy_from_slice(&v[base..base + d]);
            Quat::from_components(c)
        })
    }

    /// Real dimension of the ambient space `K^{n x n}`.
    pub fn real_dim(field: Field, n: usize) -> usize {
        field.dim() * n * n
    }

    /// Block `[r0..r0+rows) x [c0..c0+cols)` as a square matrix (rows must equal cols).
    pub fn block(&self, r0: usize, c0: usize, size: usize) -> Self {
        MatrixK::from_fn(self.field, size, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Frobenius mass of the rectangular block `[r0..r1) x [c0..c1)`.
    pub fn block_mass(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> f64 {
        let mut s = 0.0;
        for i in r0..r1 {
            for j in c0..c1 {
                s += self[(i, j)].norm_sqr();
            }
        }
        s.sqrt()
    }

    /// The complex adjoint `chi(A)` of size `2n`, writing `A = A1 + A2 j`:
    /// `chi(A) = [[A1, A2], [-conj(A2), conj(A1)]]`.
    pub fn complex_adjoint(&self) -> MatrixK {
        let n = self.n;
        MatrixK::from_fn(Field::C, 2 * n, |i, j| {
            let (bi, bj) = (i / n, j / n);
            let ((ar, ai), (br, bim)) = self[(i % n, j % n)].split();
            match (bi, bj) {
                (0, 0) => Quat::complex(ar, ai),
                (0, 1) => Quat::complex(br, bim),
                (1, 0) => Quat::complex(-br, bim),
                _ => Quat::complex(ar, -ai),
            }
        })
    }

    /// Reads `A` back from (the top block row of) a complex adjoint.
    pub fn from_complex_adjoint(chi: &MatrixK, field: Field) -> Result<MatrixK> {
        if !chi.n.is_multiple_of(2) {
            return Err(Error::Invalid("complex adjoint must have even size".into()));
        }
        let n = chi.n / 2;
        Ok(MatrixK::from_fn(field, n, |i, j| {
            let a = chi[(i, j)];
            let b = chi[(i, j + n)];
            Quat::join((a.w, a.x), (b.w, b.x))
        }))
    }

    pub(crate) fn to_nalgebra_complex(&self) -> DMatrix<Complex<f64>> {
        DMatrix::from_fn(self.n, self.n, |i, j| {
            let q = self[(i, j)];
            Complex::new(q.w, q.x)
        })
    }

    pub(crate) fn from_nalgebra_complex(m: &DMatrix<Complex<f64>>) -> MatrixK {
        MatrixK::from_fn(Field::C, m.nrows(), |i, j| Quat::complex(m[(i, j)].re, m[(i, j)].im))
    }

    /// Inverse computed through the complex adjoint.
    ///
    /// Fails with [`Error::SingularMatrix`] when the smallest singular value
    /// is below `rel_threshold * ||A||_F`.
    pub fn try_inverse(&self, rel_threshold: f64) -> Result<MatrixK> {
        let chi = self.complex_adjoint().to_nalgebra_complex();
        let sigma_min = chi.singular_values().iter().cloned().fold(f64::INFINITY, f64::min);
        let threshold = rel_threshold * self.norm_fro();
        if !(sigma_min > threshold) || sigma_min == 0.0 {
            return Err(Error::SingularMatrix { sigma_min, threshold });
        }
        let inv = chi
            .lu()
            .try_inverse()
            .ok_or(Error::SingularMatrix { sigma_min, threshold })?;
        MatrixK::from_complex_adjoint(&MatrixK::from_nalgebra_complex(&inv), self.field)
    }

    /// Inverse with the default singularity threshold.
    pub fn inverse(&self) -> Result<MatrixK> {
        self.try_inverse(crate::tolerance::Tolerances::default().singular)
    }

    fn check_same_shape(&self, other: &MatrixK) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field,
                right: other.field,
            });
        }
        Ok(())
    }
}

/// `<X, Y> = Re Tr(X* Y)`; both arguments must share field and size.
pub fn re_trace_inner(x: &MatrixK, y: &MatrixK) -> Result<f64> {
    x.check_same_shape(y)?;
    Ok(inner(x, y))
}

/// `Re Tr(X* Y)` without the shape contract (fields are promoted).
pub(crate) fn inner(x: &MatrixK, y: &MatrixK) -> f64 {
    assert_eq!(x.n, y.n, "dimension mismatch");
    // Re(conj(a) b) summed over entries is the Euclidean product of components.
    x.data
        .iter()
        .zip(&y.data)
        .map(|(a, b)| a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z)
        .sum()
}

impl Index<(usize, usize)> for MatrixK {
    type Output = Quat;
    fn index(&self, (i, j): (usize, usize)) -> &Quat {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for MatrixK {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Quat {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &MatrixK {
    type Output = MatrixK;
    fn mul(self, rhs: &MatrixK) -> MatrixK {
        assert_eq!(self.n, rhs.n, "dimension mismatch in product");
        let n = self.n;
        let field = self.field.join(rhs.field);
        let mut data = vec![Quat::ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Quat::ZERO {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        MatrixK { field, n, data }
    }
}

impl Mul for MatrixK {
    type Output = MatrixK;
    fn mul(self, rhs: MatrixK) -> MatrixK {
        &self * &rhs
    }
}

impl Mul<&MatrixK> for MatrixK {
    type Output = MatrixK;
    fn mul(self, rhs: &MatrixK) -> MatrixK {
        &self * rhs
    }
}

impl Mul<MatrixK> for &MatrixK {
    type Output = MatrixK;
    fn mul(self, rhs: MatrixK) -> MatrixK {
        self * &rhs
    }
}

macro_rules! elementwise {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr for &MatrixK {
            type Output = MatrixK;
            fn $method(self, rhs: &MatrixK) -> MatrixK {
                assert_eq!(self.n, rhs.n, "dimension mismatch");
                let field = self.field.join(rhs.field);
                let data = self.data.iter().zip(&rhs.data).map(|(a, b)| *a $op *b).collect();
                MatrixK { field, n: self.n, data }
            }
        }
        impl $tr for MatrixK {
            type Output = MatrixK;
            fn $method(self, rhs: MatrixK) -> MatrixK {
                &self $op &rhs
            }
        }
        impl $tr<&MatrixK> for MatrixK {
            type Output = MatrixK;
            fn $method(self, rhs: &MatrixK) -> MatrixK {
                &self $op rhs
            }
        }
        impl $tr<MatrixK> for &MatrixK {
            type Output = MatrixK;
            fn $method(self, rhs: MatrixK) -> MatrixK {
                self $op &rhs
            }
        }
    };
}

elementwise!(Add, add, +);
elementwise!(Sub, sub, -);

impl Neg for &MatrixK {
    type Output = MatrixK;
    fn neg(self) -> MatrixK {
        self.map(|q| -q)
    }
}

impl Neg for MatrixK {
    type Output = MatrixK;
    fn neg(self) -> MatrixK {
        -&self
    }
}

impl fmt::Display for MatrixK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|q| format!("{q:.6}")).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// JSON form `{"field", "n", "rows"}`; entries are `x`, `[re, im]` or `[w, x, y, z]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct MatrixJson {
    field: Field,
    n: usize,
    rows: Vec<Vec<EntryJson>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum EntryJson {
    Real(f64),
    Complex([f64; 2]),
    Quaternion([f64; 4]),
}

impl From<MatrixK> for MatrixJson {
    fn from(m: MatrixK) -> Self {
        let rows = (0..m.n)
            .map(|i| {
                m.row(i)
                    .iter()
                    .map(|q| match m.field {
                        Field::R => EntryJson::Real(q.w),
                        Field::C => EntryJson::Complex([q.w, q.x]),
                        Field::H => EntryJson::Quaternion(q.components()),
                    })
                    .collect()
            })
            .collect();
        MatrixJson {
            field: m.field,
            n: m.n,
            rows,
        }
    }
}

impl TryFrom<MatrixJson> for MatrixK {
    type Error = String;

    fn try_from(j: MatrixJson) -> std::result::Result<Self, String> {
        if j.rows.len() != j.n || j.rows.iter().any(|r| r.len() != j.n) {
            return Err(format!("matrix rows do not form a {0}x{0} array", j.n));
        }
        let mut data = Vec::with_capacity(j.n * j.n);
        for e in j.rows.iter().flatten() {
            let q = match *e {
                EntryJson::Real(w) => Quat::real(w),
                EntryJson::Complex([w, x]) => Quat::complex(w, x),
                EntryJson::Quaternion(c) => Quat::from_components(c),
            };
            if q.off_field(j.field) != 0.0 {
                return Err(format!("entry {q} is not in {}", j.field));
            }
            data.push(q);
        }
        Ok(MatrixK {
            field: j.field,
            n: j.n,
            data,
        })
    }
}
