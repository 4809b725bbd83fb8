//! Morse versus Morse-Bott height functions on the group: distinct singular
//! values give isolated critical points, repeated ones give families whose
//! dimension is read off the Cayley chart.

use symflow::cayley::chart_space;
use symflow::decomposition::is_morse_group;
use symflow::group::random_group_element;
use symflow::harness::oracle::{oracle_critical_set, OracleConfig};
use symflow::height::HeightProblem;
use symflow::matrix::MatrixK;
use symflow::scalar::Field;
use symflow::space::Manifold;
use symflow::tolerance::Tolerances;

fn main() -> symflow::error::Result<()> {
    let tols = Tolerances::default();
    let u = random_group_element(3, Field::C, 1);
    let v = random_group_element(3, Field::C, 2);
    for (label, d) in [("distinct", [1.0, 2.0, 3.0]), ("repeated", [1.0, 2.0, 2.0])] {
        let x = &(&*u * &MatrixK::diag_real(Field::C, &d)) * &v.conj_transpose();
        let (morse, reason) = is_morse_group(&x, &tols)?;
        let problem = HeightProblem::new(Manifold::Group, x)?;
        let set = oracle_critical_set(
            &problem,
            &OracleConfig {
                restarts: 36,
                ..Default::default()
            },
            &tols,
        )?;
        println!(
            "{label}: morse = {morse} ({reason}), {} components",
            set.components.len()
        );
        for c in &set.components {
            let a = &set.records[c.members[0]].point;
            let chart = chart_space(&problem, a, &tols)?;
            println!(
                "  value {:+.4}  kernel {}  chart dimension {}",
                c.value,
                c.kernel_dim,
                chart.dim()
            );
        }
    }
    Ok(())
}
