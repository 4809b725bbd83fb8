//! Central-difference checks of the analytic gradient along Cayley-retracted
//! tangent directions.

use crate::cayley::cayley_retract;
use crate::height::HeightProblem;
use crate::matrix::{inner, MatrixK};
use crate::random::{normal, substream};
use crate::space::Manifold;

pub const FD_STEP: f64 = 1e-6;

/// `(finite difference, analytic)` directional derivatives of the height at
/// `a` along `xi`.
pub fn directional_derivatives(
    problem: &HeightProblem<'_>,
    gradient: &MatrixK,
    a: &MatrixK,
    xi: &MatrixK,
    step: f64,
) -> (f64, f64) {
    let plus = cayley_retract(a, &xi.scale(step)).expect("small steps stay in the chart");
    let minus = cayley_retract(a, &xi.scale(-step)).expect("small steps stay in the chart");
    let fd = (problem.value(&plus) - problem.value(&minus)) / (2.0 * step);
    (fd, inner(gradient, xi))
}

/// Relative disagreement, floored at `1e-3 ||g|| ||xi||` so that directions
/// nearly orthogonal to the gradient do not dominate.
pub fn relative_error(fd: f64, an: f64, floor: f64) -> f64 {
    (fd - an).abs() / fd.abs().max(an.abs()).max(floor).max(f64::MIN_POSITIVE)
}

/// Largest relative error over random points and unit tangent directions,
/// using `gradient` as the analytic gradient.
pub fn finite_difference_check_with(
    problem: &HeightProblem<'_>,
    samples: usize,
    seed: u64,
    gradient: impl Fn(&MatrixK) -> MatrixK,
) -> f64 {
    let manifold: Manifold<'_> = problem.manifold();
    let mut worst = 0.0f64;
    for s in 0..samples as u64 {
        let mut rng = substream(seed, s);
        let a = manifold.random_point(problem.field(), problem.n(), &mut rng);
        let basis = problem.tangent_basis(&a);
        let zero = MatrixK::zeros(a.field(), a.n());
        let xi = basis.iter().fold(zero, |acc, b| &acc + &b.scale(normal(&mut rng)));
        let norm = xi.norm_fro();
        if norm == 0.0 {
            continue;
        }
        let xi = xi.scale(1.0 / norm);
        let g = gradient(&a);
        let (fd, an) = directional_derivatives(problem, &g, &a, &xi, FD_STEP);
        worst = worst.max(relative_error(fd, an, 1e-3 * g.norm_fro()));
    }
    worst
}

/// [`finite_difference_check_with`] against the analytic gradient.
pub fn finite_difference_check(problem: &HeightProblem<'_>, samples: usize, seed: u64) -> f64 {
    finite_difference_check_with(problem, samples, seed, |a| problem.gradient(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::catalog::catalog;
    use crate::space::Mode;

    #[test]
    fn catalog_gradients_match_differences() {
        for e in catalog() {
            for k in &e.known_results {
                for mode in [Mode::Group, Mode::Model] {
                    let p = HeightProblem::new(e.space.manifold(mode).unwrap(), k.x.clone()).unwrap();
                    let err = finite_difference_check(&p, 20, 5);
                    assert!(err < 1e-5, "{} {mode:?}: {err}", e.name);
                }
            }
        }
    }

    #[test]
    fn critical_points_have_zero_derivatives() {
        for e in catalog() {
            for k in &e.known_results {
                let p = HeightProblem::new(e.space.manifold(k.mode).unwrap(), k.x.clone()).unwrap();
                for a in &k.points {
                    let g = p.gradient(a);
                    for xi in p.tangent_basis(a) {
                        let (fd, an) = directional_derivatives(&p, &g, a, &xi, FD_STEP);
                        assert!(fd.abs() < 1e-8 && an.abs() < 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn corrupted_gradient_is_detected() {
        let e = &catalog()[2];
        let k = &e.known_results[0];
        let p = HeightProblem::new(e.space.manifold(Mode::Model).unwrap(), k.x.clone()).unwrap();
        let zero = finite_difference_check_with(&p, 10, 1, |a| MatrixK::zeros(a.field(), a.n()));
        assert!((zero - 1.0).abs() < 1e-6, "{zero}");
        let doubled = finite_difference_check_with(&p, 10, 1, |a| p.gradient(a).scale(2.0));
        assert!((doubled - 0.5).abs() < 1e-4, "{doubled}");
    }
}
