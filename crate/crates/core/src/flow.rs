//! Gradient flows `4 alpha' = Xhat - alpha sigma(Xhat) alpha`: the explicit
//! solution through a critical point, a Runge-Kutta integrator used as an
//! independent check, and a comparison of group and model flows.

use std::io::Write;

use serde::Serialize;

use crate::analytic::{expm, sinh_cosh};
use crate::cayley::{cayley, in_omega};
use crate::error::{Error, Result};
use crate::height::HeightProblem;
use crate::linalg::svd;
use crate::matrix::MatrixK;
use crate::scalar::Field;
use crate::space::{Automorphism, Manifold};
use crate::tolerance::Tolerances;

/// Largest pre-projection defect an integrator step may produce.
pub const MAX_STEP_DEFECT: f64 = 1e-3;

/// A sampled trajectory.
#[derive(Clone, Debug, Default, Serialize)]
pub struct FlowTrace {
    pub times: Vec<f64>,
    pub points: Vec<MatrixK>,
    pub heights: Vec<f64>,
    pub grad_norms: Vec<f64>,
    pub model_defects: Vec<f64>,
}

impl FlowTrace {
    fn push(&mut self, problem: &HeightProblem<'_>, t: f64, a: MatrixK) {
        self.times.push(t);
        self.heights.push(problem.value(&a));
        self.grad_norms.push(problem.gradient(&a).norm_fro());
        self.model_defects.push(problem.manifold().defect(&a));
        self.points.push(a);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest decrease between consecutive heights (0 for a monotone trace).
    pub fn max_height_drop(&self) -> f64 {
        self.heights.windows(2).fold(0.0f64, |m, w| m.max(w[0] - w[1]))
    }

    pub fn max_model_defect(&self) -> f64 {
        self.model_defects.iter().fold(0.0f64, |m, &d| m.max(d))
    }

    /// Column names: `t`, one per real entry component, then the diagnostics.
    pub fn csv_header(field: Field, n: usize) -> Vec<String> {
        let suffixes: &[&str] = match field {
            Field::R => &[""],
            Field::C => &["_re", "_im"],
            Field::H => &["_w", "_x", "_y", "_z"],
        };
        let mut h = vec!["t".to_string()];
        for i in 1..=n {
            for j in 1..=n {
                for s in suffixes {
                    h.push(format!("a{i}{j}{s}"));
                }
            }
        }
        h.extend(["height", "grad_norm", "model_defect"].map(String::from));
        h
    }

    fn row(&self, k: usize, field: Field) -> Vec<String> {
        let mut row = vec![self.times[k].to_string()];
        for q in self.points[k].entries() {
            row.extend(q.components()[..field.dim()].iter().map(|c| c.to_string()));
        }
        row.push(self.heights[k].to_string());
        row.push(self.grad_norms[k].to_string());
        row.push(self.model_defects[k].to_string());
        row
    }

    fn field_and_n(&self) -> (Field, usize) {
        self.points
            .iter()
            .fold((Field::R, 0), |(f, _), p| (f.join(p.field()), p.n()))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_traces_csv(w, &[(None, self)])
    }
}

/// Writes several traces to one CSV; when any trace is labelled a leading
/// `method` column carries the label.
pub fn write_traces_csv<W: Write>(w: W, traces: &[(Option<&str>, &FlowTrace)]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let (field, n) = traces.iter().fold((Field::R, 0), |(f, n), (_, t)| {
        let (tf, tn) = t.field_and_n();
        (f.join(tf), n.max(tn))
    });
    let labelled = traces.iter().any(|(l, _)| l.is_some());
    let mut header = FlowTrace::csv_header(field, n);
    if labelled {
        header.insert(0, "method".into());
    }
    wtr.write_record(&header)?;
    for (label, trace) in traces {
        for k in 0..trace.len() {
            let mut row = trace.row(k, field);
            if labelled {
                row.insert(0, label.unwrap_or("").to_string());
            }
            wtr.write_record(&row)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

fn check_center(problem: &HeightProblem<'_>, center: &MatrixK, tols: &Tolerances) -> Result<()> {
    let residual = problem.critical_residual(center);
    if residual > problem.critical_tolerance(tols) {
        return Err(Error::NotCriticalCenter { residual });
    }
    Ok(())
}

fn check_domain(center: &MatrixK, alpha0: &MatrixK, tols: &Tolerances) -> Result<()> {
    if !in_omega(center, alpha0, tols) {
        let sigma_min = crate::cayley::omega_margin(center, alpha0);
        return Err(Error::OutsideDomain { sigma_min });
    }
    Ok(())
}

/// Explicit flow line through `alpha0`, organised around the critical point `center`:
/// `alpha(t) = A (sinh M + cosh M A* alpha0)(cosh M + sinh M A* alpha0)^-1`, `M = t A* Xhat / 4`.
pub fn flow_closed_form(
    problem: &HeightProblem<'_>,
    center: &MatrixK,
    alpha0: &MatrixK,
    t: f64,
    tols: &Tolerances,
) -> Result<MatrixK> {
    check_center(problem, center, tols)?;
    check_domain(center, alpha0, tols)?;
    closed_form_unchecked(problem, center, alpha0, t, tols)
}

fn closed_form_unchecked(
    problem: &HeightProblem<'_>,
    center: &MatrixK,
    alpha0: &MatrixK,
    t: f64,
    tols: &Tolerances,
) -> Result<MatrixK> {
    let a_star = center.conj_transpose();
    let m = (&a_star * problem.xhat()).scale(t / 4.0);
    let (sh, ch) = sinh_cosh(&m)?;
    let b = &a_star * alpha0;
    let num = &sh + &(&ch * &b);
    let den = &ch + &(&sh * &b);
    let inv = den
        .try_inverse(tols.singular)
        .map_err(|_| Error::SingularEvaluation { t })?;
    Ok(&(center * &num) * &inv)
}

/// Trace of the explicit flow line at the given times.
pub fn flow_closed_form_trace(
    problem: &HeightProblem<'_>,
    center: &MatrixK,
    alpha0: &MatrixK,
    times: &[f64],
    tols: &Tolerances,
) -> Result<FlowTrace> {
    check_center(problem, center, tols)?;
    check_domain(center, alpha0, tols)?;
    let mut trace = FlowTrace::default();
    for &t in times {
        let a = closed_form_unchecked(problem, center, alpha0, t, tols)?;
        trace.push(problem, t, a);
    }
    Ok(trace)
}

/// The same flow line computed through the chart: `beta0 = c_A(alpha0)`,
/// `beta(t) = exp(-t A* Xhat / 4) beta0 exp(-t Xhat A* / 4)`, `alpha = c_{A*}(beta)`.
/// Returns `(beta(t), alpha(t))`.
pub fn flow_via_chart(
    problem: &HeightProblem<'_>,
    center: &MatrixK,
    alpha0: &MatrixK,
    t: f64,
    tols: &Tolerances,
) -> Result<(MatrixK, MatrixK)> {
    check_center(problem, center, tols)?;
    let a_star = center.conj_transpose();
    let beta0 = cayley(center, alpha0)?;
    let left = expm(&(&a_star * problem.xhat()).scale(-t / 4.0))?;
    let right = expm(&(problem.xhat() * &a_star).scale(-t / 4.0))?;
    let beta = &(&left * &beta0) * &right;
    let alpha = cayley(&a_star, &beta).map_err(|_| Error::SingularEvaluation { t })?;
    Ok((beta, alpha))
}

/// Nearest unitary matrix `UV*`.
pub fn polar_unitary(a: &MatrixK) -> Result<MatrixK> {
    let d = svd(a)?;
    Ok(&d.u * &d.v.conj_transpose())
}

/// Fixed-step RK4 on `4 alpha' = Xhat - alpha sigma(Xhat) alpha`, projecting to the
/// nearest unitary after each step. The model condition is recorded, not enforced.
/// Samples are taken at `times` (ascending); steps are at most `step` long.
pub fn flow_numeric(problem: &HeightProblem<'_>, alpha0: &MatrixK, times: &[f64], step: f64) -> Result<FlowTrace> {
    if !(step > 0.0) {
        return Err(Error::Invalid("integration step must be positive".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Invalid("sample times must be ascending".into()));
    }
    let mut trace = FlowTrace::default();
    let Some(&t_start) = times.first() else {
        return Ok(trace);
    };
    let f = |a: &MatrixK| problem.gradient(a);
    let mut a = alpha0.clone();
    let mut t = t_start;
    for &target in times {
        let span = target - t;
        let steps = (span / step).ceil().max(0.0) as usize;
        let h = if steps > 0 { span / steps as f64 } else { 0.0 };
        for _ in 0..steps {
            let k1 = f(&a);
            let k2 = f(&(&a + &k1.scale(h / 2.0)));
            let k3 = f(&(&a + &k2.scale(h / 2.0)));
            let k4 = f(&(&a + &k3.scale(h)));
            let incr = &(&k1 + &k2.scale(2.0)) + &(&k3.scale(2.0) + &k4);
            let next = &a + &incr.scale(h / 6.0);
            t += h;
            let defect = problem.manifold().defect(&next);
            if !(defect <= MAX_STEP_DEFECT) {
                return Err(Error::StepRejected { t, defect });
            }
            a = polar_unitary(&next)?;
        }
        t = target;
        trace.push(problem, t, a.clone());
    }
    Ok(trace)
}

/// Model defects of the group flow and the model flow of the same `X` from
/// the same starting point.
#[derive(Clone, Debug, Serialize)]
pub struct TransversalityReport {
    pub times: Vec<f64>,
    pub group_flow_defect: Vec<f64>,
    pub model_flow_defect: Vec<f64>,
}

impl TransversalityReport {
    pub fn max_group_defect(&self) -> f64 {
        self.group_flow_defect.iter().fold(0.0, |m: f64, &d| m.max(d))
    }

    pub fn max_model_defect(&self) -> f64 {
        self.model_flow_defect.iter().fold(0.0, |m: f64, &d| m.max(d))
    }

    /// Group-flow defect at the first sample time at or beyond `t`.
    pub fn group_defect_at(&self, t: f64) -> Option<f64> {
        self.times
            .iter()
            .position(|&s| s >= t - 1e-12)
            .map(|k| self.group_flow_defect[k])
    }
}

/// Integrates `2 alpha' = X* - alpha X alpha` on the group and the model flow of
/// the same `X`, both from `alpha0`, and measures how far each is from the model.
pub fn flow_transversality_demo(
    sigma: &Automorphism,
    x: &MatrixK,
    alpha0: &MatrixK,
    times: &[f64],
    step: f64,
) -> Result<TransversalityReport> {
    let group = HeightProblem::new(Manifold::Group, x.clone())?;
    let model = HeightProblem::new(Manifold::Model(sigma), x.clone())?;
    let g = flow_numeric(&group, alpha0, times, step)?;
    let m = flow_numeric(&model, alpha0, times, step)?;
    Ok(TransversalityReport {
        times: times.to_vec(),
        group_flow_defect: g.points.iter().map(|a| sigma.model_defect(a)).collect(),
        model_flow_defect: m.points.iter().map(|a| sigma.model_defect(a)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Quat;

    fn sp1() -> Automorphism {
        Automorphism::new(MatrixK::from_scalar(Field::H, Quat::I), false).unwrap()
    }

    fn q(v: Quat) -> MatrixK {
        MatrixK::from_scalar(Field::H, v)
    }

    fn ijk() -> Quat {
        Quat::I + Quat::J + Quat::K
    }

    fn model_line(t: f64) -> MatrixK {
        let s = t * 2f64.sqrt();
        let dir = (Quat::J + Quat::K) * (1.0 / 2f64.sqrt());
        q(Quat::real(1.0 / s.cosh()) - dir * s.tanh())
    }

    #[test]
    fn explicit_sphere_flow() {
        let s = sp1();
        let p = HeightProblem::new(Manifold::Model(&s), q(ijk())).unwrap();
        let center = q((Quat::J + Quat::K) * (1.0 / 2f64.sqrt()));
        let one = MatrixK::identity(Field::H, 1);
        let tols = Tolerances::default();
        for t in [0.0, 0.25, 0.5, 1.0, 2.0] {
            let a = flow_closed_form(&p, &center, &one, t, &tols).unwrap();
            assert!(a.dist(&model_line(t)) < 1e-12, "t = {t}");
            let (_, b) = flow_via_chart(&p, &center, &one, t, &tols).unwrap();
            assert!(b.dist(&a) < 1e-12);
        }
        // the critical point is a fixed point
        let a = flow_closed_form(&p, &center, &center, 1.3, &tols).unwrap();
        assert!(a.dist(&center) < 1e-12);
        // non-critical center
        assert!(matches!(
            flow_closed_form(&p, &one, &one, 1.0, &tols),
            Err(Error::NotCriticalCenter { .. })
        ));
        // alpha0 = -A is outside the domain
        assert!(matches!(
            flow_closed_form(&p, &center, &center.scale(-1.0), 1.0, &tols),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn explicit_group_flow() {
        let p = HeightProblem::new(Manifold::Group, q(ijk())).unwrap();
        let center = q(ijk() * (1.0 / 3f64.sqrt()));
        let one = MatrixK::identity(Field::H, 1);
        let tols = Tolerances::default();
        for t in [0.25, 1.0] {
            let s = t * 3f64.sqrt();
            let want = q(Quat::real(1.0 / s.cosh()) - ijk() * (s.tanh() / 3f64.sqrt()));
            let a = flow_closed_form(&p, &center, &one, t, &tols).unwrap();
            assert!(a.dist(&want) < 1e-12);
        }
    }

    #[test]
    fn numeric_flow_matches_explicit() {
        let s = sp1();
        let p = HeightProblem::new(Manifold::Model(&s), q(ijk())).unwrap();
        let one = MatrixK::identity(Field::H, 1);
        let trace = flow_numeric(&p, &one, &[0.0, 0.1, 0.5, 1.0], 1e-3).unwrap();
        for (t, a) in trace.times.iter().zip(&trace.points) {
            assert!(a.dist(&model_line(*t)) < 1e-6);
        }
        assert!(trace.max_height_drop() == 0.0);
        assert!(trace.heights.windows(2).all(|w| w[1] > w[0]));
        assert!(trace.max_model_defect() < 1e-9);

        let center = q((Quat::J + Quat::K) * (1.0 / 2f64.sqrt()));
        let still = flow_numeric(&p, &center, &[0.0, 1.0], 1e-2).unwrap();
        assert!(still.points[1].dist(&center) < 1e-12);
    }

    #[test]
    fn group_flow_leaves_the_model() {
        let s = sp1();
        let one = MatrixK::identity(Field::H, 1);
        let times: Vec<f64> = (0..=10).map(|k| k as f64 * 0.1).collect();
        let rep = flow_transversality_demo(&s, &q(ijk()), &one, &times, 1e-3).unwrap();
        assert!(rep.group_defect_at(0.5).unwrap() > 1e-2);
        assert!(rep.max_model_defect() < 1e-8);

        let g = Automorphism::new(MatrixK::diag_real(Field::C, &[1.0, -1.0]), false).unwrap();
        let x = MatrixK::diag_real(Field::C, &[0.0, 1.0]);
        let c = 0.6f64;
        let start = MatrixK::from_fn(Field::C, 2, |i, j| match (i, j) {
            (0, 0) | (1, 1) => Quat::real(c),
            (1, 0) => Quat::complex(0.0, 0.8),
            _ => Quat::complex(0.0, 0.8),
        });
        assert!(g.model_defect(&start) < 1e-12);
        let times: Vec<f64> = (0..=20).map(|k| k as f64 * 0.1).collect();
        let rep = flow_transversality_demo(&g, &x, &start, &times, 1e-3).unwrap();
        assert!(rep.max_group_defect() < 1e-8);
    }

    #[test]
    fn csv_layout() {
        let s = sp1();
        let p = HeightProblem::new(Manifold::Model(&s), q(ijk())).unwrap();
        let one = MatrixK::identity(Field::H, 1);
        let trace = flow_numeric(&p, &one, &[0.0, 0.5], 1e-2).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,a11_w,a11_x,a11_y,a11_z,height,grad_norm,model_defect"
        );
        assert_eq!(lines.count(), 2);
    }
}
