//! Brute-force multistart search for critical points of a height function.
//!
//! Each restart runs one of three searches from a random point: projected
//! gradient ascent, descent, or a minimization of `||grad||^2` (Gauss-Newton
//! or steepest descent, which also reach saddles). Converged points are
//! polished with Newton steps, a second round of Newton runs starts one
//! long Cayley step away from them, and everything is clustered and grouped
//! into connected components through the Cayley chart at each critical point.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::{cayley, cayley_retract, omega_margin};
use crate::error::{Error, Result};
use crate::flow::polar_unitary;
use crate::group::random_group_element_with;
use crate::height::{CriticalPointRecord, HeightProblem};
use crate::linalg::real_sym_eigen;
use crate::matrix::{inner, MatrixK};
use crate::random::substream;
use crate::scalar::Field;
use crate::space::{cartan_embed, Manifold};
use crate::tolerance::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Initial step, in units of `1 / ||Xhat||`.
    pub step: f64,
    /// Frobenius radius under which two points count as one.
    pub cluster_radius: f64,
    pub seed: u64,
    /// Budget of Newton runs started next to already found points.
    pub explore: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            restarts: 64,
            max_iters: 400,
            step: 2.0,
            cluster_radius: 1e-4,
            seed: 0,
            explore: 64,
        }
    }
}

/// A set of critical points connected through Cayley charts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriticalComponent {
    /// Indices into [`CriticalSet::records`].
    pub members: Vec<usize>,
    pub value: f64,
    pub kernel_dim: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriticalSet {
    /// One record per cluster, sorted by height value then by entries.
    pub records: Vec<CriticalPointRecord>,
    /// Number of converged runs (restarts and exploration) in each cluster.
    pub cluster_sizes: Vec<usize>,
    pub components: Vec<CriticalComponent>,
    pub converged: usize,
    pub restarts: usize,
}

impl CriticalSet {
    pub fn points(&self) -> Vec<&MatrixK> {
        self.records.iter().map(|r| &r.point).collect()
    }

    /// Whether every point of `expected` is within `radius` of a record and
    /// every record is within `radius` of a point of `expected`.
    pub fn matches(&self, expected: &[MatrixK], radius: f64) -> bool {
        let covered = |p: &MatrixK, qs: &[&MatrixK]| qs.iter().any(|q| p.dist(q) < radius);
        let found = self.points();
        expected.iter().all(|e| covered(e, &found))
            && found.iter().all(|f| covered(f, &expected.iter().collect::<Vec<_>>()))
    }

    /// Largest distance from a record to the nearest point of `expected`.
    pub fn max_distance_to(&self, expected: &[MatrixK]) -> f64 {
        self.records
            .iter()
            .map(|r| expected.iter().map(|e| r.point.dist(e)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug)]
enum Search {
    Ascent,
    Descent,
    /// Gauss-Newton on `||grad||^2`.
    GradientNorm,
    /// Steepest descent on `||grad||^2`, polished afterwards.
    GradientNormSteepest,
}

fn start_point(manifold: Manifold<'_>, field: Field, n: usize, index: u64, seed: u64) -> MatrixK {
    let mut rng = substream(seed, index);
    let mut b = random_group_element_with(n, field, &mut rng).into_inner();
    // O(n) has two components; odd restarts sample the reflected one
    if field == Field::R && index % 2 == 1 {
        let mut r = MatrixK::identity(Field::R, n);
        r[(0, 0)] = -r[(0, 0)];
        b = &b * &r;
    }
    match manifold {
        Manifold::Group => b,
        Manifold::Model(s) => {
            let g = crate::group::GroupElement::new_unchecked(b);
            cartan_embed(s, &g).into_inner()
        }
    }
}

/// Nearest point of the manifold to a slightly perturbed point: the unitary
/// polar factor, after symmetrizing `(A + sigma(A)*) / 2` on a model.
fn clean(manifold: Manifold<'_>, a: MatrixK) -> MatrixK {
    let sym = match manifold {
        Manifold::Group => a,
        Manifold::Model(s) => (&a + &s.apply(&a).conj_transpose()).scale(0.5),
    };
    polar_unitary(&sym).unwrap_or(sym)
}

/// Gradient coordinates and Hessian matrix in an orthonormal tangent basis.
fn local_model(problem: &HeightProblem<'_>, a: &MatrixK) -> (Vec<f64>, nalgebra::DMatrix<f64>, Vec<MatrixK>) {
    let (h, basis) = problem.hessian_matrix(a);
    let g = problem.gradient(a);
    let c = basis.iter().map(|b| inner(b, &g)).collect();
    (c, (&h + h.transpose()) * 0.5, basis)
}

fn combine(basis: &[MatrixK], coeffs: &[f64], like: &MatrixK) -> MatrixK {
    let zero = MatrixK::zeros(like.field(), like.n());
    basis.iter().zip(coeffs).fold(zero, |acc, (b, &c)| &acc + &b.scale(c))
}

/// Pseudo-inverse Newton direction `-H^+ g` in basis coordinates.
fn newton_direction(c: &[f64], h: &nalgebra::DMatrix<f64>) -> Vec<f64> {
    let (values, vectors) = real_sym_eigen(h);
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = 1e-9 * scale.max(f64::MIN_POSITIVE);
    let d = c.len();
    let mut out = vec![0.0; d];
    for (k, &lam) in values.iter().enumerate() {
        if lam.abs() <= cut {
            continue;
        }
        let proj: f64 = (0..d).map(|i| vectors[(i, k)] * c[i]).sum();
        for (i, o) in out.iter_mut().enumerate() {
            *o -= vectors[(i, k)] * proj / lam;
        }
    }
    out
}

/// Backtracked steps that decrease `||grad||`, along the Newton direction
/// (`newton = true`, falling back to steepest descent of `||grad||^2 / 2`)
/// or along steepest descent only. Returns the last iterate.
fn reduce_gradient(problem: &HeightProblem<'_>, mut a: MatrixK, iters: usize, target: f64, newton: bool) -> MatrixK {
    let mut res = problem.critical_residual(&a);
    for _ in 0..iters {
        if res <= target {
            break;
        }
        let (c, h, basis) = local_model(problem, &a);
        let steepest = || -> Vec<f64> {
            let mut dir: Vec<f64> = (&h * nalgebra::DVector::from_column_slice(&c))
                .iter()
                .map(|v| -v)
                .collect();
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            let gnorm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                dir.iter_mut().for_each(|v| *v *= gnorm / norm);
            }
            dir
        };
        let candidates = if newton {
            vec![newton_direction(&c, &h), steepest()]
        } else {
            vec![steepest()]
        };
        let mut improved = false;
        for dir in candidates {
            let xi = combine(&basis, &dir, &a);
            let mut t = 1.0;
            for _ in 0..30 {
                if let Ok(next) = cayley_retract(&a, &xi.scale(t)) {
                    let next = clean(problem.manifold(), next);
                    let r = problem.critical_residual(&next);
                    if r < res {
                        a = next;
                        res = r;
                        improved = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if improved {
                break;
            }
        }
        if !improved {
            break;
        }
    }
    a
}

fn newton_polish(problem: &HeightProblem<'_>, a: MatrixK, iters: usize, target: f64) -> MatrixK {
    reduce_gradient(problem, a, iters, target, true)
}

/// Armijo-backtracked gradient ascent (`sign = 1`) or descent (`sign = -1`).
fn gradient_flow(problem: &HeightProblem<'_>, mut a: MatrixK, sign: f64, cfg: &OracleConfig, stop: f64) -> MatrixK {
    let scale = problem.xhat().norm_fro().max(f64::MIN_POSITIVE);
    let t_max = 16.0 * cfg.step / scale;
    let mut t = cfg.step / scale;
    let mut value = sign * problem.value(&a);
    for _ in 0..cfg.max_iters {
        let g = problem.gradient(&a);
        let gg = g.norm_fro_sqr();
        if 4.0 * gg.sqrt() <= stop {
            break;
        }
        let mut accepted = false;
        for _ in 0..40 {
            if let Ok(next) = cayley_retract(&a, &g.scale(sign * t)) {
                let next = clean(problem.manifold(), next);
                let v = sign * problem.value(&next);
                if v >= value + 1e-4 * t * gg {
                    a = next;
                    value = v;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        t = (2.0 * t).min(t_max);
    }
    a
}

fn run_restart(problem: &HeightProblem<'_>, index: u64, cfg: &OracleConfig, tols: &Tolerances) -> Option<MatrixK> {
    let a0 = start_point(problem.manifold(), problem.field(), problem.n(), index, cfg.seed);
    let scale = problem.xhat().norm_fro();
    // ascent and descent almost always land on the extrema, so most
    // restarts go to the saddle search
    let search = match index % 6 {
        0 => Search::Ascent,
        1 => Search::Descent,
        2 | 3 => Search::GradientNorm,
        _ => Search::GradientNormSteepest,
    };
    let a = match search {
        Search::Ascent => gradient_flow(problem, a0, 1.0, cfg, 1e-4 * scale),
        Search::Descent => gradient_flow(problem, a0, -1.0, cfg, 1e-4 * scale),
        Search::GradientNorm => newton_polish(problem, a0, cfg.max_iters, 1e-4 * scale),
        Search::GradientNormSteepest => reduce_gradient(problem, a0, cfg.max_iters, 1e-3 * scale, false),
    };
    let a = newton_polish(problem, a, 40, 1e-14 * scale);
    let residual = problem.critical_residual(&a);
    let tolerance = problem.critical_tolerance(tols);
    if residual <= tolerance {
        Some(a)
    } else {
        let err = Error::NonConvergence {
            what: "oracle restart",
            iterations: cfg.max_iters,
        };
        log::debug!("{err}: restart {index} ({search:?}), residual {residual:.3e}");
        None
    }
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    parent[i] = r;
    r
}

/// Whether `b` lies on the chart image through `a`: `beta = c_A(B)` solves
/// the linear chart conditions at `a`.
fn same_component(problem: &HeightProblem<'_>, a: &MatrixK, b: &MatrixK, value_tol: f64) -> bool {
    if (problem.value(a) - problem.value(b)).abs() > value_tol || omega_margin(a, b) < 1e-3 {
        return false;
    }
    let Ok(beta) = cayley(a, b) else { return false };
    let a_star = a.conj_transpose();
    let xh = problem.xhat();
    let anti = &(&(&a_star * xh) * &beta) + &(&(&beta * xh) * &a_star);
    let mut defect = anti.norm_fro();
    if let Manifold::Model(s) = problem.manifold() {
        defect += (s.apply(&beta) - beta.conj_transpose()).norm_fro();
    }
    defect <= 1e-6 * (1.0 + beta.norm_fro()) * (1.0 + xh.norm_fro())
}

/// Second stage: Newton runs started from far Cayley steps along the Hessian
/// eigenvectors at already found points. Saddles next to the extrema have
/// small basins for random starts but sit one such step away.
fn explore(problem: &HeightProblem<'_>, found: &[MatrixK], cfg: &OracleConfig, tols: &Tolerances) -> Vec<MatrixK> {
    let mut seeds: Vec<MatrixK> = Vec::new();
    for p in found {
        if seeds.iter().any(|q| q.dist(p) < cfg.cluster_radius) {
            continue;
        }
        seeds.push(p.clone());
    }
    let mut starts: Vec<MatrixK> = Vec::new();
    'outer: for p in &seeds {
        let (_, h, basis) = local_model(problem, p);
        let (values, vectors) = real_sym_eigen(&h);
        let top = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (k, lam) in values.iter().enumerate() {
            if lam.abs() <= tols.kernel_gap * top {
                continue;
            }
            let coeffs: Vec<f64> = (0..basis.len()).map(|i| vectors[(i, k)]).collect();
            let v = combine(&basis, &coeffs, p);
            for len in [11.0, -11.0] {
                if starts.len() >= cfg.explore {
                    break 'outer;
                }
                if let Ok(s) = cayley_retract(p, &v.scale(len)) {
                    starts.push(clean(problem.manifold(), s));
                }
            }
        }
    }
    let scale = problem.xhat().norm_fro();
    let tolerance = problem.critical_tolerance(tols);
    starts
        .into_par_iter()
        .map(|s| newton_polish(problem, s, cfg.max_iters.min(100), 1e-14 * scale))
        .filter(|a| problem.critical_residual(a) <= tolerance)
        .collect()
}

/// Multistart critical-set search. Restarts run in parallel; the result
/// depends only on the configuration.
pub fn oracle_critical_set(problem: &HeightProblem<'_>, cfg: &OracleConfig, tols: &Tolerances) -> Result<CriticalSet> {
    if cfg.restarts == 0 {
        return Err(Error::Invalid("oracle needs at least one restart".into()));
    }
    let found: Vec<Option<MatrixK>> = (0..cfg.restarts as u64)
        .into_par_iter()
        .map(|i| run_restart(problem, i, cfg, tols))
        .collect();
    let mut converged: Vec<MatrixK> = found.into_iter().flatten().collect();
    let from_restarts = converged.len();
    converged.extend(explore(problem, &converged, cfg, tols));

    let mut reps: Vec<MatrixK> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();
    for p in &converged {
        match reps.iter().position(|r| r.dist(p) < cfg.cluster_radius) {
            Some(k) => sizes[k] += 1,
            None => {
                reps.push(p.clone());
                sizes.push(1);
            }
        }
    }

    let scale = problem.xhat().norm_fro().max(f64::MIN_POSITIVE);
    let key_unit = 1e-9 * scale;
    let mut order: Vec<usize> = (0..reps.len()).collect();
    let keys: Vec<(i64, Vec<f64>)> = reps
        .iter()
        .map(|r| {
            (
                (problem.value(r) / key_unit).round() as i64,
                r.with_field(Field::H).to_real_vec(),
            )
        })
        .collect();
    order.sort_by(|&i, &j| {
        keys[i].0.cmp(&keys[j].0).then_with(|| {
            keys[i]
                .1
                .iter()
                .zip(&keys[j].1)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });

    let records: Vec<CriticalPointRecord> = order
        .par_iter()
        .map(|&k| problem.hessian_spectrum(&reps[k], tols))
        .collect::<Result<_>>()?;
    let cluster_sizes: Vec<usize> = order.iter().map(|&k| sizes[k]).collect();

    let m = records.len();
    let mut parent: Vec<usize> = (0..m).collect();
    let value_tol = 1e-8 * scale;
    for i in 0..m {
        for j in (i + 1)..m {
            if find(&mut parent, i) != find(&mut parent, j)
                && same_component(problem, &records[i].point, &records[j].point, value_tol)
            {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[rj.max(ri)] = ri.min(rj);
            }
        }
    }
    let mut components: Vec<CriticalComponent> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; m];
    for (i, rec) in records.iter().enumerate().take(m) {
        let root = find(&mut parent, i);
        match root_of[root] {
            Some(c) => components[c].members.push(i),
            None => {
                root_of[root] = Some(components.len());
                components.push(CriticalComponent {
                    members: vec![i],
                    value: rec.value,
                    kernel_dim: rec.kernel_dim,
                });
            }
        }
    }
    for c in &mut components {
        c.kernel_dim = c.members.iter().map(|&i| records[i].kernel_dim).max().unwrap_or(0);
    }

    Ok(CriticalSet {
        records,
        cluster_sizes,
        converged: from_restarts,
        restarts: cfg.restarts,
        components,
    })
}

/// Empirical Morse test on a Cartan model: every critical point found by the
/// oracle has a trivial Hessian kernel.
pub fn is_morse_model(problem: &HeightProblem<'_>, cfg: &OracleConfig, tols: &Tolerances) -> Result<bool> {
    let set = oracle_critical_set(problem, cfg, tols)?;
    Ok(!set.records.is_empty() && set.records.iter().all(|r| r.kernel_dim == 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::catalog::{entry, grassmann_x, sphere_x};
    use crate::space::{is_in_cartan_model, Mode};

    #[test]
    fn sphere_critical_sets() {
        let e = entry("sp1_u1").unwrap();
        let tols = Tolerances::default();
        for k in &e.known_results {
            let m = e.space.manifold(k.mode).unwrap();
            let p = HeightProblem::new(m, sphere_x()).unwrap();
            let set = oracle_critical_set(
                &p,
                &OracleConfig {
                    restarts: 12,
                    ..Default::default()
                },
                &tols,
            )
            .unwrap();
            assert_eq!(set.records.len(), 2, "{}", k.description);
            assert!(set.max_distance_to(&k.points) < 1e-8);
            assert!(set.matches(&k.points, 1e-8));
            assert!(set.records[0].value < set.records[1].value);
            assert!(set.records.iter().all(|r| r.morse));
        }
    }

    #[test]
    fn grassmann_group_has_two_circles() {
        let m = Manifold::Group;
        let p = HeightProblem::new(m, grassmann_x()).unwrap();
        let tols = Tolerances::default();
        let set = oracle_critical_set(
            &p,
            &OracleConfig {
                restarts: 30,
                seed: 3,
                ..Default::default()
            },
            &tols,
        )
        .unwrap();
        assert_eq!(set.components.len(), 2);
        for c in &set.components {
            assert_eq!(c.kernel_dim, 1);
            assert!((c.value.abs() - 1.0).abs() < 1e-10);
        }
        for r in &set.records {
            assert!((r.point[(1, 1)].norm() - 1.0).abs() < 1e-8);
            assert!(r.point[(0, 1)].norm() < 1e-8);
        }
        let e = entry("grassmann_c11").unwrap();
        let s = e.space.sigma().unwrap();
        let pm = HeightProblem::new(e.space.manifold(Mode::Model).unwrap(), grassmann_x()).unwrap();
        let set = oracle_critical_set(
            &pm,
            &OracleConfig {
                restarts: 12,
                ..Default::default()
            },
            &tols,
        )
        .unwrap();
        assert!(set.matches(&e.known_results[0].points, 1e-8));
        assert!(set.records.iter().all(|r| is_in_cartan_model(s, &r.point, 1e-9).0));
    }

    #[test]
    fn deterministic_given_seed() {
        let p = HeightProblem::new(Manifold::Group, sphere_x()).unwrap();
        let cfg = OracleConfig {
            restarts: 9,
            seed: 11,
            ..Default::default()
        };
        let tols = Tolerances::default();
        let a = oracle_critical_set(&p, &cfg, &tols).unwrap();
        let b = oracle_critical_set(&p, &cfg, &tols).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn orthogonal_group_reaches_both_components() {
        let x = MatrixK::diag_real(Field::R, &[1.0, 2.0, 3.0]);
        let p = HeightProblem::new(Manifold::Group, x).unwrap();
        let set = oracle_critical_set(
            &p,
            &OracleConfig {
                restarts: 96,
                ..Default::default()
            },
            &Tolerances::default(),
        )
        .unwrap();
        // the critical points are the eight sign matrices
        assert_eq!(set.records.len(), 8);
        assert!(set.records.iter().all(|r| r.morse));
    }
}
