//! Critical points of height functions on the group and on a Cartan model,
//! found by the multistart oracle and classified by their Hessian spectra.

use symflow::harness::catalog::{entry, symplectic_x};
use symflow::harness::oracle::{oracle_critical_set, OracleConfig};
use symflow::height::HeightProblem;
use symflow::space::Mode;
use symflow::tolerance::Tolerances;

fn main() -> symflow::error::Result<()> {
    let e = entry("sp2_u2").expect("catalog space");
    let tols = Tolerances::default();
    let cfg = OracleConfig {
        restarts: 48,
        seed: 1,
        ..Default::default()
    };
    for mode in [Mode::Group, Mode::Model] {
        let problem = HeightProblem::new(e.space.manifold(mode)?, symplectic_x())?;
        let set = oracle_critical_set(&problem, &cfg, &tols)?;
        println!(
            "{mode:?}: {} of {} restarts converged, {} clusters, {} components",
            set.converged,
            set.restarts,
            set.records.len(),
            set.components.len()
        );
        for c in &set.components {
            let r = &set.records[c.members[0]];
            let scale = r.hessian_eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let index = r.hessian_eigenvalues.iter().filter(|&&v| v < -1e-6 * scale).count();
            println!(
                "  value {:+.6}  kernel {}  index {}  clusters {}",
                c.value,
                c.kernel_dim,
                index,
                c.members.len()
            );
        }
    }
    Ok(())
}
