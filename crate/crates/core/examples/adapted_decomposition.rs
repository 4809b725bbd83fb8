//! Polar and singular value decompositions adapted to an involution, and the
//! reduction of a height function to a diagonal generator.

use symflow::decomposition::{adapted_polar, adapted_svd, reduce_to_diagonal, svd_canonical, Side};
use symflow::harness::catalog::{entry, symplectic_x};
use symflow::height::xhat;
use symflow::random::{random_matrix, rng};
use symflow::scalar::Quat;
use symflow::tolerance::Tolerances;

fn main() -> symflow::error::Result<()> {
    let e = entry("sp2_u2").expect("catalog space");
    let sigma = e.space.sigma()?;
    let tols = Tolerances::default();

    // Y = Z* + sigma(Z) always satisfies sigma(Y) = Y*
    let mut r = rng(5);
    let z = random_matrix(sigma.field(), sigma.n(), &mut r);
    let y = xhat(sigma, &z);
    let ap = adapted_polar(sigma, &y, Side::Left, &tols)?;
    println!("adapted polar residuals: {:?}", ap.residuals);

    // zeroing the smallest eigenvalue of S keeps Y0 = S0 Omega compatible
    let c = svd_canonical(&ap.polar.s)?;
    let mut d = c.d.clone();
    d[(0, 0)] = Quat::ZERO;
    let y0 = &(&(&c.u * &d) * &c.u.conj_transpose()) * &ap.polar.omega;
    println!(
        "||sigma(Y0) - Y0*|| = {:.2e}",
        sigma.apply(&y0).dist(&y0.conj_transpose())
    );
    let ap = adapted_polar(sigma, &y0, Side::Left, &tols)?;
    println!(
        "singular input: epsilons {:?}, Omega steps {:?}",
        ap.epsilons, ap.omega_steps
    );

    let xs = xhat(sigma, &symplectic_x()).conj_transpose();
    let ad = adapted_svd(sigma, &xs, &tols)?;
    println!(
        "singular values {:?}, ||sigma(Theta) - Theta*|| = {:.2e}",
        ad.svd.values, ad.theta_residual
    );

    let red = reduce_to_diagonal(&e.space, &symplectic_x(), &tols)?;
    println!("D = {}", red.d);
    println!("Theta = {}", red.theta);
    Ok(())
}
