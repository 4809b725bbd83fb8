//! Explicit gradient flow lines through the Cayley chart, compared with a
//! numerical integration, and the group flow drifting off the model.

use symflow::flow::{flow_closed_form_trace, flow_numeric, flow_transversality_demo, write_traces_csv};
use symflow::harness::catalog::{entry, sphere_x};
use symflow::height::HeightProblem;
use symflow::matrix::MatrixK;
use symflow::scalar::{Field, Quat};
use symflow::space::Mode;
use symflow::tolerance::Tolerances;

fn main() -> symflow::error::Result<()> {
    let e = entry("sp1_u1").expect("catalog space");
    let sigma = e.space.sigma()?;
    let problem = HeightProblem::new(e.space.manifold(Mode::Model)?, sphere_x())?;
    let center = MatrixK::from_scalar(Field::H, (Quat::J + Quat::K) * (1.0 / 2f64.sqrt()));
    let one = MatrixK::identity(Field::H, 1);
    let times: Vec<f64> = (0..=8).map(|k| k as f64 * 0.25).collect();

    let closed = flow_closed_form_trace(&problem, &center, &one, &times, &Tolerances::default())?;
    let numeric = flow_numeric(&problem, &one, &times, 1e-3)?;
    let gap = closed
        .points
        .iter()
        .zip(&numeric.points)
        .map(|(a, b)| a.dist(b))
        .fold(0.0, f64::max);
    println!("max |closed - rk4| = {gap:.3e}");
    write_traces_csv(std::io::stdout(), &[(Some("closed"), &closed), (Some("rk4"), &numeric)])?;

    let rep = flow_transversality_demo(sigma, &sphere_x(), &one, &times, 1e-3)?;
    println!("group flow model defect: {:?}", rep.group_flow_defect);
    println!("model flow max defect:   {:.3e}", rep.max_model_defect());
    Ok(())
}
