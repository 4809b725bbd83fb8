//! Involutive automorphisms, their Cartan models and tangent spaces.

use symflow::group::random_group_element;
use symflow::harness::catalog::catalog;
use symflow::space::{cartan_embed, validate_automorphism, Mode};

fn main() -> symflow::error::Result<()> {
    for entry in catalog() {
        let spec = &entry.space;
        let sigma = spec.sigma()?;
        let report = validate_automorphism(sigma, 20, 1)?;
        println!("{}: {}", entry.name, entry.description);
        println!("  automorphism residual {:.2e}", report.max_residual());

        let model = spec.manifold(Mode::Model)?;
        let b = random_group_element(spec.n, spec.field, 3);
        let a = cartan_embed(sigma, &b);
        println!("  B sigma(B)* has model defect {:.2e}", sigma.model_defect(&a));

        let gdim = spec.manifold(Mode::Group)?.tangent_basis(&a).len();
        let mdim = model.tangent_basis(&a).len();
        println!("  dim G = {gdim}, dim M = {mdim}");
    }
    Ok(())
}
