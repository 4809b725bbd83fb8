//! Eigen- and singular-value factorizations.
//!
//! The Hermitian eigensolver and the SVD are cyclic Jacobi methods written
//! directly on quaternion entries. Rotations built from real or complex
//! entries stay real or complex, so a real input produces real factors and
//! a complex input complex ones. Real-valued helpers (null spaces, symmetric
//! spectra of coordinate matrices) are delegated to nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::MatrixK;
use crate::scalar::Quat;

const MAX_SWEEPS: usize = 80;

/// `H = V diag(values) V*` with eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: MatrixK,
}

/// `Y = U diag(s) V*` with singular values descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: MatrixK,
    pub s: Vec<f64>,
    pub v: MatrixK,
}

impl Svd {
    pub fn reconstruct(&self) -> MatrixK {
        let d = MatrixK::diag_real(self.u.field(), &self.s);
        &(&self.u * &d) * &self.v.conj_transpose()
    }

    pub fn sigma_min(&self) -> f64 {
        self.s.last().copied().unwrap_or(0.0)
    }
}

/// Eigendecomposition of the Hermitian part of `h`.
pub fn hermitian_eigen(h: &MatrixK) -> Result<HermitianEigen> {
    let n = h.n();
    let field = h.field();
    let mut a = h.hermitian_part();
    let mut v = MatrixK::identity(field, n);
    let scale = a.norm_fro();

    let mut converged = n <= 1 || scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a[(i, j)].norm_sqr();
                }
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = a[(p, q)];
                let gn = g.norm();
                if gn <= 1e-300 || gn <= 1e-17 * scale {
                    continue;
                }
                // Phase on index q makes the pivot real and positive.
                let phi = g.conj() * (1.0 / gn);
                for i in 0..n {
                    a[(i, q)] *= phi;
                    v[(i, q)] *= phi;
                }
                for j in 0..n {
                    a[(q, j)] = phi.conj() * a[(q, j)];
                }
                let app = a[(p, p)].w;
                let aqq = a[(q, q)].w;
                let zeta = (aqq - app) / (2.0 * gn);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let (aip, aiq) = (a[(i, p)], a[(i, q)]);
                    a[(i, p)] = aip * c - aiq * s;
                    a[(i, q)] = aip * s + aiq * c;
                    let (vip, viq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = vip * c - viq * s;
                    v[(i, q)] = vip * s + viq * c;
                }
                for j in 0..n {
                    let (apj, aqj) = (a[(p, j)], a[(q, j)]);
                    a[(p, j)] = apj * c - aqj * s;
                    a[(q, j)] = apj * s + aqj * c;
                }
                a[(p, q)] = Quat::ZERO;
                a[(q, p)] = Quat::ZERO;
                a[(p, p)] = Quat::real(a[(p, p)].w);
                a[(q, q)] = Quat::real(a[(q, q)].w);
            }
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "Hermitian Jacobi eigensolver",
            iterations: MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].w.total_cmp(&a[(j, j)].w));
    let values = order.iter().map(|&i| a[(i, i)].w).collect();
    let vectors = MatrixK::from_fn(field, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

fn col_dot(a: &MatrixK, p: usize, b: &MatrixK, q: usize) -> Quat {
    // a_p* b_q
    (0..a.n()).fold(Quat::ZERO, |acc, i| acc + a[(i, p)].conj() * b[(i, q)])
}

fn col_norm_sqr(a: &MatrixK, p: usize) -> f64 {
    (0..a.n()).map(|i| a[(i, p)].norm_sqr()).sum()
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(y: &MatrixK) -> Result<Svd> {
    let n = y.n();
    let field = y.field();
    let mut w = y.clone();
    let mut v = MatrixK::identity(field, n);

    let mut converged = n <= 1;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = col_norm_sqr(&w, p);
                let beta = col_norm_sqr(&w, q);
                let gamma = col_dot(&w, p, &w, q);
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phi = gamma.conj() * (1.0 / g);
                for i in 0..n {
                    w[(i, q)] *= phi;
                    v[(i, q)] *= phi;
                }
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let (wp, wq) = (w[(i, p)], w[(i, q)]);
                    w[(i, p)] = wp * c - wq * s;
                    w[(i, q)] = wp * s + wq * c;
                    let (vp, vq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = vp * c - vq * s;
                    v[(i, q)] = vp * s + vq * c;
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "one-sided Jacobi SVD",
            iterations: MAX_SWEEPS,
        });
    }

    let norms: Vec<f64> = (0..n).map(|j| col_norm_sqr(&w, j).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let v = MatrixK::from_fn(field, n, |i, k| v[(i, order[k])]);
    let mut cols: Vec<Vec<Quat>> = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        if s[k] > 1e-300 {
            cols.push(w.column(j).into_iter().map(|q| q / s[k]).collect());
        }
    }
    let u_cols = orthonormal_completion(cols, n);
    let mut u = MatrixK::zeros(field, n);
    for (k, c) in u_cols.iter().enumerate() {
        u.set_column(k, c);
    }
    Ok(Svd { u, s, v })
}

/// Singular values, descending.
pub fn singular_values(y: &MatrixK) -> Result<Vec<f64>> {
    Ok(svd(y)?.s)
}

/// Modified Gram-Schmidt (right quaternion coefficients) of the given
/// columns, completed with standard basis vectors to `n` columns.
pub fn orthonormal_completion(cols: Vec<Vec<Quat>>, n: usize) -> Vec<Vec<Quat>> {
    let mut out: Vec<Vec<Quat>> = Vec::with_capacity(n);
    let push = |out: &mut Vec<Vec<Quat>>, mut c: Vec<Quat>, min_norm: f64| -> bool {
        for _ in 0..2 {
            for u in out.iter() {
                let coeff = (0..n).fold(Quat::ZERO, |acc, i| acc + u[i].conj() * c[i]);
                for i in 0..n {
                    c[i] -= u[i] * coeff;
                }
            }
        }
        let norm = c.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt();
        if norm > min_norm {
            out.push(c.into_iter().map(|q| q / norm).collect());
            true
        } else {
            false
        }
    };
    for c in cols {
        if out.len() == n {
            break;
        }
        push(&mut out, c, 1e-8);
    }
    for k in 0..n {
        if out.len() == n {
            break;
        }
        let mut e = vec![Quat::ZERO; n];
        e[k] = Quat::ONE;
        push(&mut out, e, 0.1);
    }
    out
}

/// Orthonormal basis (columns) of the null space of a real matrix.
///
/// Singular values at or below `rel_tol * max(sigma_max, 1)` count as zero.
pub fn real_null_space(a: &DMatrix<f64>, rel_tol: f64) -> Vec<DVector<f64>> {
    let cols = a.ncols();
    if cols == 0 {
        return Vec::new();
    }
    let padded;
    let a = if a.nrows() < cols {
        let mut m = DMatrix::zeros(cols, cols);
        m.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
        padded = m;
        &padded
    } else {
        a
    };
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let thr = rel_tol * smax.max(1.0);
    let mut basis = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= thr {
            basis.push(v_t.row(k).transpose());
        }
    }
    basis
}

/// Symmetric eigendecomposition of a real matrix, eigenvalues ascending.
pub fn real_sym_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, random_matrix, rng};
    use crate::scalar::Field;

    #[test]
    fn eigen_reconstructs_and_preserves_field() {
        let mut r = rng(11);
        for field in [Field::R, Field::C, Field::H] {
            for n in 1..=5 {
                let h = random_hermitian(field, n, &mut r);
                let e = hermitian_eigen(&h).unwrap();
                assert_eq!(e.vectors.field(), field);
                assert!(e.vectors.unitary_defect() < 1e-12);
                let d = MatrixK::diag_real(field, &e.values);
                let back = &(&e.vectors * &d) * &e.vectors.conj_transpose();
                assert!(back.dist(&h) < 1e-12, "{field} n={n}");
                assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn quaternion_spectrum_matches_complex_adjoint() {
        // independent route: nalgebra's complex solver on chi(H) sees every
        // eigenvalue twice
        let mut r = rng(12);
        let h = random_hermitian(Field::H, 4, &mut r);
        let ours = hermitian_eigen(&h).unwrap().values;
        let chi = h.complex_adjoint().to_nalgebra_complex();
        let mut theirs: Vec<f64> = chi.symmetric_eigen().eigenvalues.iter().cloned().collect();
        theirs.sort_by(f64::total_cmp);
        for (k, v) in ours.iter().enumerate() {
            assert!((theirs[2 * k] - v).abs() < 1e-10);
            assert!((theirs[2 * k + 1] - v).abs() < 1e-10);
        }
    }

    #[test]
    fn svd_reconstructs_all_fields() {
        let mut r = rng(13);
        for field in [Field::R, Field::C, Field::H] {
            for n in 1..=6 {
                let y = random_matrix(field, n, &mut r);
                let f = svd(&y).unwrap();
                assert_eq!(f.u.field(), field);
                assert!(f.u.unitary_defect() < 1e-12);
                assert!(f.v.unitary_defect() < 1e-12);
                assert!(f.reconstruct().dist(&y) < 1e-11 * y.norm_fro().max(1.0));
                assert!(f.s.windows(2).all(|w| w[0] >= w[1]));
            }
        }
    }

    #[test]
    fn svd_singular_values_double_under_complex_adjoint() {
        let mut r = rng(14);
        let y = random_matrix(Field::H, 3, &mut r);
        let ours = singular_values(&y).unwrap();
        let chi = y.complex_adjoint().to_nalgebra_complex();
        let mut theirs: Vec<f64> = chi.singular_values().iter().cloned().collect();
        theirs.sort_by(|a, b| b.total_cmp(a));
        for (k, s) in ours.iter().enumerate() {
            assert!((theirs[2 * k] - s).abs() < 1e-10);
            assert!((theirs[2 * k + 1] - s).abs() < 1e-10);
        }
    }

    #[test]
    fn svd_of_rank_deficient_and_zero() {
        let z = MatrixK::zeros(Field::H, 3);
        let f = svd(&z).unwrap();
        assert!(f.s.iter().all(|&s| s == 0.0));
        assert!(f.u.unitary_defect() < 1e-14);

        let mut r = rng(15);
        let a = random_matrix(Field::C, 4, &mut r);
        let mut f = svd(&a).unwrap();
        f.s[2] = 0.0;
        f.s[3] = 0.0;
        let low = f.reconstruct();
        let g = svd(&low).unwrap();
        assert!(g.s[2] < 1e-12 && g.s[3] < 1e-12);
        assert!(g.reconstruct().dist(&low) < 1e-12);
        assert!(g.u.unitary_defect() < 1e-12);
    }

    #[test]
    fn null_space_of_simple_system() {
        // x + y + z = 0 has a two-dimensional solution space
        let a = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
        let ns = real_null_space(&a, 1e-10);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!((v.sum()).abs() < 1e-12);
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }
}
