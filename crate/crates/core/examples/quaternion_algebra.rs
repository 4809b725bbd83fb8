//! Quaternion scalars, matrices over R/C/H and their linear algebra.

use symflow::linalg::{hermitian_eigen, svd};
use symflow::matrix::MatrixK;
use symflow::random::{random_hermitian, random_matrix, rng};
use symflow::scalar::{Field, Quat};

fn main() -> symflow::error::Result<()> {
    let (i, j, k) = (Quat::I, Quat::J, Quat::K);
    println!("ij = {}, ji = {}, ijk = {}", i * j, j * i, i * j * k);

    let q = Quat::new(1.0, 2.0, -1.0, 0.5);
    println!(
        "q = {q}, |q| = {:.6}, q q^-1 = {}",
        q.norm(),
        q * q.inv().expect("nonzero")
    );

    let mut r = rng(7);
    let a = random_matrix(Field::H, 3, &mut r);
    let b = random_matrix(Field::H, 3, &mut r);
    let ab = &a * &b;
    let ba = &b * &a;
    println!(
        "||AB - BA|| = {:.3e} (quaternion matrices do not commute)",
        ab.dist(&ba)
    );
    println!("Re Tr(AB) - Re Tr(BA) = {:.3e}", ab.re_trace() - ba.re_trace());

    let inv = a.inverse()?;
    println!(
        "||A A^-1 - I|| = {:.3e}",
        (&a * &inv).dist(&MatrixK::identity(Field::H, 3))
    );

    let d = svd(&a)?;
    println!("singular values of A: {:?}", d.s);
    println!("||U S V* - A|| = {:.3e}", d.reconstruct().dist(&a));

    let h = random_hermitian(Field::H, 3, &mut r);
    let e = hermitian_eigen(&h)?;
    println!("eigenvalues of a Hermitian H: {:?}", e.values);

    // mixed-field arithmetic promotes to the larger field
    let c = MatrixK::scalar(Field::C, 3, Quat::complex(0.0, 1.0));
    println!("field of (C matrix) * (H matrix): {}", (&c * &a).field());
    Ok(())
}
