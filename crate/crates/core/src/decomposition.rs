//! Canonical singular value decompositions, polar forms, their versions
//! adapted to an involution, and the reduction of a height function to a
//! real diagonal one.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::height::{is_critical_group, xhat, HeightProblem};
use crate::linalg::{hermitian_eigen, svd};
use crate::matrix::MatrixK;
use crate::scalar::Quat;
use crate::space::{twist_automorphism, Automorphism, Manifold, SymmetricSpaceSpec};
use crate::tolerance::Tolerances;

/// `Y = U D V*` with `D` ordered as a zero block followed by ascending
/// blocks `t_i I_{n_i}`.
#[derive(Clone, Debug, Serialize)]
pub struct CanonicalSvd {
    pub u: MatrixK,
    pub d: MatrixK,
    pub v: MatrixK,
    /// `(n_0, n_1, ..., n_k)`; `n_0` may be zero.
    pub block_sizes: Vec<usize>,
    /// `t_1 < ... < t_k`.
    pub values: Vec<f64>,
}

impl CanonicalSvd {
    pub fn reconstruct(&self) -> MatrixK {
        &(&self.u * &self.d) * &self.v.conj_transpose()
    }

    /// Diagonal of `D`.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.d.n()).map(|i| self.d[(i, i)].w).collect()
    }

    /// Index ranges of the blocks of `D`, zero block first.
    pub fn block_ranges(&self) -> Vec<std::ops::Range<usize>> {
        block_ranges(&self.block_sizes)
    }

    /// No zero singular value and no repeated value.
    pub fn is_generic(&self) -> bool {
        self.block_sizes[0] == 0 && self.block_sizes[1..].iter().all(|&m| m == 1)
    }
}

fn block_ranges(sizes: &[usize]) -> Vec<std::ops::Range<usize>> {
    let mut start = 0;
    sizes
        .iter()
        .map(|&m| {
            let r = start..start + m;
            start += m;
            r
        })
        .collect()
}

/// Groups ascending values into clusters whose consecutive gaps are at most
/// `gap * scale`; values at most `gap * scale` form the zero block.
/// Returns `(n_0, [(t_i, n_i)])` with `t_i` the cluster means.
fn cluster_values(ascending: &[f64], gap: f64) -> (usize, Vec<(f64, usize)>) {
    let scale = ascending.last().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let thr = gap * scale;
    let n0 = ascending.iter().take_while(|&&s| s <= thr).count();
    let mut blocks: Vec<(f64, usize, f64)> = Vec::new();
    for &s in &ascending[n0..] {
        match blocks.last_mut() {
            Some((sum, m, last)) if s - *last <= thr => {
                *sum += s;
                *m += 1;
                *last = s;
            }
            _ => blocks.push((s, 1, s)),
        }
    }
    (n0, blocks.into_iter().map(|(sum, m, _)| (sum / m as f64, m)).collect())
}

/// SVD in canonical order, with each column of `U` rotated so that its first
/// nonzero entry is real and positive (the matching column of `V` rotated alike).
pub fn svd_canonical(y: &MatrixK) -> Result<CanonicalSvd> {
    svd_canonical_with(y, Tolerances::default().cluster_gap)
}

pub fn svd_canonical_with(y: &MatrixK, gap: f64) -> Result<CanonicalSvd> {
    let n = y.n();
    let field = y.field();
    let raw = svd(y)?;
    // raw values are descending; canonical order is ascending
    let order: Vec<usize> = (0..n).rev().collect();
    let ascending: Vec<f64> = order.iter().map(|&k| raw.s[k]).collect();
    let (n0, blocks) = cluster_values(&ascending, gap);

    let mut u = MatrixK::zeros(field, n);
    let mut v = MatrixK::zeros(field, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut uc = raw.u.column(src);
        let mut vc = raw.v.column(src);
        if let Some(first) = uc.iter().find(|q| q.norm() > 1e-12) {
            let phase = first.conj().unit().unwrap_or(Quat::ONE);
            uc.iter_mut().for_each(|q| *q *= phase);
            vc.iter_mut().for_each(|q| *q *= phase);
        }
        u.set_column(dst, &uc);
        v.set_column(dst, &vc);
    }
    let mut diag = vec![0.0; n0];
    let mut block_sizes = vec![n0];
    let mut values = Vec::with_capacity(blocks.len());
    for (t, m) in blocks {
        diag.extend(std::iter::repeat_n(t, m));
        block_sizes.push(m);
        values.push(t);
    }
    Ok(CanonicalSvd {
        u,
        d: MatrixK::diag_real(field, &diag),
        v,
        block_sizes,
        values,
    })
}

/// Which polar factorization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `Y = S Omega`, `S = (YY*)^(1/2)`.
    Left,
    /// `Y = Omega S'`, `S' = (Y*Y)^(1/2)`.
    Right,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolarForm {
    pub s: MatrixK,
    pub omega: MatrixK,
    pub side: Side,
}

impl PolarForm {
    pub fn reconstruct(&self) -> MatrixK {
        match self.side {
            Side::Left => &self.s * &self.omega,
            Side::Right => &self.omega * &self.s,
        }
    }
}

/// Polar decomposition from the canonical SVD: `Omega = UV*`, `S = UDU*` or `S' = VDV*`.
pub fn polar(y: &MatrixK, side: Side) -> Result<PolarForm> {
    let c = svd_canonical(y)?;
    Ok(polar_from_svd(&c, side))
}

fn polar_from_svd(c: &CanonicalSvd, side: Side) -> PolarForm {
    let omega = &c.u * &c.v.conj_transpose();
    let s = match side {
        Side::Left => &(&c.u * &c.d) * &c.u.conj_transpose(),
        Side::Right => &(&c.v * &c.d) * &c.v.conj_transpose(),
    };
    PolarForm {
        s: s.hermitian_part(),
        omega,
        side,
    }
}

/// `Sigma = W Delta W*` for a Hermitian square root `Sigma` of `YY*`, with
/// `|Delta|` in the canonical order of the singular values of `Y`.
#[derive(Clone, Debug, Serialize)]
pub struct SquareRootStructure {
    pub w: MatrixK,
    pub delta: Vec<f64>,
    /// Singular values of `Y` in the same order.
    pub d: Vec<f64>,
}

impl SquareRootStructure {
    /// `+1` / `-1` per nonzero entry of `Delta`, `0` on the zero block.
    pub fn signs(&self, gap: f64) -> Vec<i8> {
        let scale = self.d.iter().fold(0.0f64, |m, &v| m.max(v)).max(f64::MIN_POSITIVE);
        self.delta
            .iter()
            .map(|&x| {
                if x.abs() <= gap * scale {
                    0
                } else if x > 0.0 {
                    1
                } else {
                    -1
                }
            })
            .collect()
    }
}

pub fn hermitian_square_root_structure(sigma: &MatrixK, y: &MatrixK, tols: &Tolerances) -> Result<SquareRootStructure> {
    let yy = y * &y.conj_transpose();
    let scale = yy.norm_fro().max(1.0);
    let residual = sigma.hermitian_defect().max((sigma * sigma).dist(&yy) / scale);
    if residual > tols.membership.max(1e-9) {
        return Err(Error::NotSquareRoot { residual });
    }
    let eig = hermitian_eigen(sigma)?;
    let n = sigma.n();
    let mut order: Vec<usize> = (0..n).collect();
    // ascending |value|; ties keep the eigensolver order (negative first)
    order.sort_by(|&i, &j| eig.values[i].abs().total_cmp(&eig.values[j].abs()));
    let mut w = MatrixK::zeros(eig.vectors.field(), n);
    for (dst, &src) in order.iter().enumerate() {
        w.set_column(dst, &eig.vectors.column(src));
    }
    let delta: Vec<f64> = order.iter().map(|&k| eig.values[k]).collect();
    let canon = svd_canonical_with(y, tols.cluster_gap)?;
    let d = canon.diagonal();
    let worst = delta
        .iter()
        .zip(&d)
        .map(|(a, b)| (a * a - b * b).abs())
        .fold(0.0f64, f64::max);
    if worst > 1e-8 * scale {
        return Err(Error::NotSquareRoot { residual: worst });
    }
    Ok(SquareRootStructure { w, delta, d })
}

/// Outcome of [`global_max_polar_test`].
#[derive(Clone, Debug, Serialize)]
pub struct PolarTest {
    /// `YA` is positive semidefinite, i.e. `A` is a global maximum of `h_Y`.
    pub is_global_max: bool,
    pub min_eigenvalue: f64,
    pub value: f64,
}

/// For a critical point `A` of `h_Y` on the group, tests whether `Y = (YA)A*`
/// is a true polar decomposition.
pub fn global_max_polar_test(y: &MatrixK, a: &MatrixK, tols: &Tolerances) -> Result<PolarTest> {
    let tol = tols.critical_for(y.norm_fro());
    let (ok, residual) = is_critical_group(y, a, tol);
    if !ok {
        return Err(Error::NotCritical {
            residual,
            tolerance: tol,
        });
    }
    let sigma = y * a;
    let eig = hermitian_eigen(&sigma)?;
    let min_eigenvalue = eig.values.first().copied().unwrap_or(0.0);
    let psd_tol = 1e-9 * y.norm_fro().max(1.0);
    Ok(PolarTest {
        is_global_max: min_eigenvalue >= -psd_tol,
        min_eigenvalue,
        value: sigma.re_trace(),
    })
}

/// Residuals of the three defining conditions of an adapted polar form.
#[derive(Clone, Debug, Default, Serialize)]
pub struct AdaptedResiduals {
    /// `||Y - S Omega||` (left) or `||Y - Omega S'||` (right).
    pub reconstruction: f64,
    /// `||sigma(Omega) - Omega*||`.
    pub omega: f64,
    /// `||sigma(S) - Omega* S Omega||` (left) or `||sigma(S') - Omega S' Omega*||` (right).
    pub s: f64,
    /// Smallest eigenvalue of `S`.
    pub s_min_eigenvalue: f64,
}

impl AdaptedResiduals {
    pub fn max(&self) -> f64 {
        self.reconstruction.max(self.omega).max(self.s)
    }
}

/// An adapted polar form with the data of the limit procedure for singular inputs.
#[derive(Clone, Debug, Serialize)]
pub struct AdaptedPolar {
    pub polar: PolarForm,
    pub residuals: AdaptedResiduals,
    /// Perturbation sizes that were used (empty for invertible `Y`).
    pub epsilons: Vec<f64>,
    /// `||Omega_k - Omega_{k-1}||` along the perturbation sequence.
    pub omega_steps: Vec<f64>,
}

/// Perturbation sizes, relative to `||Y||_F`, for the singular case.
pub const EPSILON_SEQUENCE: [f64; 3] = [1e-4, 1e-6, 1e-8];
/// Successive limit iterates must agree to this.
pub const STABILIZATION_TOL: f64 = 1e-6;

fn check_sigma_compatible(sigma: &Automorphism, y: &MatrixK, tols: &Tolerances) -> Result<()> {
    let defect = sigma.apply(y).dist(&y.conj_transpose());
    if defect > tols.membership * y.norm_fro().max(1.0) {
        return Err(Error::HypothesisViolated(format!(
            "sigma(Y) = Y* fails (residual {defect:.3e})"
        )));
    }
    Ok(())
}

fn check_sigma_d(sigma: &Automorphism, d: &MatrixK, tols: &Tolerances) -> Result<()> {
    let sd = sigma.apply(d);
    let scale = d.norm_fro().max(1.0);
    let herm = sd.hermitian_defect();
    let min = hermitian_eigen(&sd)?.values.first().copied().unwrap_or(0.0);
    if herm > tols.membership * scale || min < -tols.membership * scale {
        return Err(Error::HypothesisViolated(format!(
            "sigma(D) is not positive semidefinite (min eigenvalue {min:.3e}, asymmetry {herm:.3e})"
        )));
    }
    Ok(())
}

fn adapted_residuals(sigma: &Automorphism, y: &MatrixK, p: &PolarForm) -> Result<AdaptedResiduals> {
    let (om, s) = (&p.omega, &p.s);
    let target = match p.side {
        Side::Left => &(&om.conj_transpose() * s) * om,
        Side::Right => &(om * s) * &om.conj_transpose(),
    };
    Ok(AdaptedResiduals {
        reconstruction: y.dist(&p.reconstruct()),
        omega: sigma.apply(om).dist(&om.conj_transpose()),
        s: sigma.apply(s).dist(&target),
        s_min_eigenvalue: hermitian_eigen(s)?.values.first().copied().unwrap_or(0.0),
    })
}

/// Orthogonal projector onto the span of the given columns of `m`.
fn column_projector(m: &MatrixK, cols: std::ops::Range<usize>) -> MatrixK {
    let n = m.n();
    MatrixK::from_fn(m.field(), n, |i, j| {
        cols.clone()
            .fold(Quat::ZERO, |acc, k| acc + m[(i, k)] * m[(j, k)].conj())
    })
}

/// Polar decomposition `Y = S Omega` with `sigma(Omega) = Omega*` and
/// `sigma(S) = Omega* S Omega`, for `sigma(Y) = Y*`.
///
/// For singular `Y`, `Omega` is the limit of the unique polar factors of
/// `Y + eps Z` as `eps -> 0`, where `Z = P_L P_R` is the product of the
/// projectors onto `ker Y*` and `ker Y`; `Z` satisfies `sigma(Z) = Z*`, so
/// every perturbed matrix is again compatible. If `Y + eps Z` stays singular
/// the perturbation `eps I` is used instead.
pub fn adapted_polar(sigma: &Automorphism, y: &MatrixK, side: Side, tols: &Tolerances) -> Result<AdaptedPolar> {
    check_sigma_compatible(sigma, y, tols)?;
    let canon = svd_canonical_with(y, tols.cluster_gap)?;
    check_sigma_d(sigma, &canon.d, tols)?;
    let s_exact = polar_from_svd(&canon, side).s;
    let n0 = canon.block_sizes[0];
    let mut epsilons = Vec::new();
    let mut omega_steps = Vec::new();

    let omega = if n0 == 0 {
        polar_from_svd(&canon, side).omega
    } else {
        let zeros = 0..n0;
        let z = &column_projector(&canon.u, zeros.clone()) * &column_projector(&canon.v, zeros);
        let scale = if y.norm_fro() > 0.0 { y.norm_fro() } else { 1.0 };
        let iterates = perturbation_limit(y, &z, scale, tols, &mut epsilons, &mut omega_steps).or_else(|_| {
            epsilons.clear();
            omega_steps.clear();
            let id = MatrixK::identity(y.field(), y.n());
            perturbation_limit(y, &id, scale, tols, &mut epsilons, &mut omega_steps)
        })?;
        // iterate with the smallest adapted residual
        let mut best: Option<(f64, MatrixK)> = None;
        for om in iterates {
            let candidate = PolarForm {
                s: s_exact.clone(),
                omega: om,
                side,
            };
            let score = adapted_residuals(sigma, y, &candidate)?.max();
            if best.as_ref().is_none_or(|(b, _)| score < *b) {
                best = Some((score, candidate.omega));
            }
        }
        best.expect("stabilized limit has iterates").1
    };
    let polar = PolarForm {
        s: s_exact,
        omega,
        side,
    };
    let residuals = adapted_residuals(sigma, y, &polar)?;
    Ok(AdaptedPolar {
        polar,
        residuals,
        epsilons,
        omega_steps,
    })
}

fn perturbation_limit(
    y: &MatrixK,
    z: &MatrixK,
    scale: f64,
    tols: &Tolerances,
    epsilons: &mut Vec<f64>,
    steps: &mut Vec<f64>,
) -> Result<Vec<MatrixK>> {
    let mut iterates: Vec<MatrixK> = Vec::new();
    for rel in EPSILON_SEQUENCE {
        let eps = rel * scale;
        let ye = y + &z.scale(eps);
        let f = svd(&ye)?;
        if f.sigma_min() <= tols.singular * ye.norm_fro() {
            continue;
        }
        let om = &f.u * &f.v.conj_transpose();
        epsilons.push(eps);
        if let Some(prev) = iterates.last() {
            steps.push(prev.dist(&om));
        }
        iterates.push(om);
    }
    match steps.last() {
        Some(&d) if d < STABILIZATION_TOL => Ok(iterates),
        _ => Err(Error::NonConvergence {
            what: "singular adapted polar limit",
            iterations: epsilons.len(),
        }),
    }
}

/// An SVD `Y = U D V*` derived from an adapted polar form, with `Theta = U* sigma(V)`.
#[derive(Clone, Debug, Serialize)]
pub struct AdaptedSvd {
    pub svd: CanonicalSvd,
    pub theta: MatrixK,
    pub polar: AdaptedPolar,
    /// `||sigma(Theta) - Theta*||`.
    pub theta_residual: f64,
}

pub fn adapted_svd(sigma: &Automorphism, y: &MatrixK, tols: &Tolerances) -> Result<AdaptedSvd> {
    let polar = adapted_polar(sigma, y, Side::Left, tols)?;
    let mut svd = svd_canonical_with(y, tols.cluster_gap)?;
    // S = U D U*, V = Omega* U
    svd.v = &polar.polar.omega.conj_transpose() * &svd.u;
    let theta = &svd.u.conj_transpose() * &sigma.apply(&svd.v);
    let theta_residual = sigma.apply(&theta).dist(&theta.conj_transpose());
    Ok(AdaptedSvd {
        svd,
        theta,
        polar,
        theta_residual,
    })
}

/// Reduction of `h_X` on a Cartan model to `h_D` on the twisted model
/// `{sigma'(B) = B*}`, `sigma' = Theta sigma Theta*`, via `A -> U* A V`.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub sigma_prime: Automorphism,
    pub d: MatrixK,
    pub u: MatrixK,
    pub v: MatrixK,
    pub theta: MatrixK,
    pub svd: CanonicalSvd,
}

impl Reduction {
    /// `A -> U* A V`.
    pub fn to_diagonal(&self, a: &MatrixK) -> MatrixK {
        &(&self.u.conj_transpose() * a) * &self.v
    }

    /// `B -> U B V*`.
    pub fn from_diagonal(&self, b: &MatrixK) -> MatrixK {
        &(&self.u * b) * &self.v.conj_transpose()
    }

    /// The reduced height function `h_D` on the twisted model.
    pub fn reduced_problem(&self) -> Result<HeightProblem<'_>> {
        HeightProblem::new(Manifold::Model(&self.sigma_prime), self.d.clone())
    }

    /// `grad h_X(A) - U grad h_D(U*AV) V* / 2`.
    pub fn gradient_transport_residual(&self, original: &HeightProblem<'_>, a: &MatrixK) -> Result<f64> {
        let reduced = self.reduced_problem()?;
        let b = self.to_diagonal(a);
        let transported = self.from_diagonal(&reduced.gradient(&b)).scale(0.5);
        Ok(original.gradient(a).dist(&transported))
    }

    /// `H_X(A)(W) - U H_D(U*AV)(U*WV) V* / 2`.
    pub fn hessian_transport_residual(&self, original: &HeightProblem<'_>, a: &MatrixK, w: &MatrixK) -> Result<f64> {
        let reduced = self.reduced_problem()?;
        let b = self.to_diagonal(a);
        let wb = self.to_diagonal(w);
        let transported = self.from_diagonal(&reduced.hessian(&b, &wb)).scale(0.5);
        Ok(original.hessian(a, w).dist(&transported))
    }
}

/// Adapted SVD of `Xhat = X* + sigma(X)` and the twisted automorphism under which
/// `D` is fixed. Requires the model to be all of `{sigma(A) = A*}`.
pub fn reduce_to_diagonal(space: &SymmetricSpaceSpec, x: &MatrixK, tols: &Tolerances) -> Result<Reduction> {
    if !space.model_equals_n {
        return Err(Error::HypothesisViolated(format!(
            "space `{}` is not declared to have a connected Cartan model",
            space.name
        )));
    }
    let sigma = space.sigma()?;
    let xh = xhat(sigma, x);
    let ad = adapted_svd(sigma, &xh, tols)?;
    let tol = tols.membership * xh.norm_fro().max(1.0);
    let sigma_prime = twist_automorphism(sigma, &ad.theta, tol.max(1e-8))?;
    let d = ad.svd.d.clone();
    let fixed = sigma_prime.apply(&d).dist(&d);
    if fixed > 1e-8 * d.norm_fro().max(1.0) {
        return Err(Error::HypothesisViolated(format!(
            "twisted automorphism does not fix D (residual {fixed:.3e})"
        )));
    }
    Ok(Reduction {
        sigma_prime,
        d,
        u: ad.svd.u.clone(),
        v: ad.svd.v.clone(),
        theta: ad.theta,
        svd: ad.svd,
    })
}

/// One diagonal block of a critical point of `h_D` on the group.
#[derive(Clone, Debug, Serialize)]
pub struct CriticalBlock {
    pub size: usize,
    /// Singular value of the block (0 for the zero block).
    pub value: f64,
    pub block: MatrixK,
    /// `(#(+1), #(-1))` eigenvalues; `(0, 0)` for the zero block.
    pub signature: (usize, usize),
}

/// Block decomposition of a critical point `A` of `h_D`, `D = ADA`.
#[derive(Clone, Debug, Serialize)]
pub struct CriticalBlockStructure {
    pub blocks: Vec<CriticalBlock>,
    /// Sign pattern per nonzero diagonal entry, in canonical order.
    pub signs: Vec<i8>,
    /// `t_1 Tr E_1 + ... + t_k Tr E_k`.
    pub value_from_signs: f64,
    /// `Re Tr(DA)`.
    pub value: f64,
    pub off_block_mass: f64,
}

/// Verifies the block structure of a critical point of `h_D` for `D` in canonical form.
pub fn critical_blocks_diagonal(canon: &CanonicalSvd, a: &MatrixK) -> Result<CriticalBlockStructure> {
    let d = &canon.d;
    let n = d.n();
    if a.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.n(),
        });
    }
    let scale = d.norm_fro().max(1.0);
    let tol = 1e-6 * scale;
    let ranges = canon.block_ranges();
    let total = a.norm_fro_sqr();
    let inside: f64 = ranges
        .iter()
        .map(|r| a.block_mass(r.start, r.end, r.start, r.end).powi(2))
        .sum();
    let off_block_mass = (total - inside).max(0.0).sqrt();
    if off_block_mass > tol {
        return Err(Error::StructureViolated(format!(
            "off-diagonal block mass {off_block_mass:.3e}"
        )));
    }
    let mut blocks = Vec::new();
    let mut signs = Vec::new();
    for (b, r) in ranges.iter().enumerate() {
        if r.is_empty() {
            continue;
        }
        let blk = a.block(r.start, r.start, r.len());
        let value = if b == 0 { 0.0 } else { canon.values[b - 1] };
        let signature = if b == 0 {
            let u = blk.unitary_defect();
            if u > tol {
                return Err(Error::StructureViolated(format!("zero block not unitary ({u:.3e})")));
            }
            (0, 0)
        } else {
            let herm = blk.hermitian_defect();
            let inv = (&blk * &blk).dist(&MatrixK::identity(blk.field(), r.len()));
            if herm > tol || inv > tol {
                return Err(Error::StructureViolated(format!(
                    "block {b} is not a Hermitian involution (asymmetry {herm:.3e}, A^2 - I {inv:.3e})"
                )));
            }
            let eig = hermitian_eigen(&blk)?;
            let plus = eig.values.iter().filter(|&&l| l > 0.0).count();
            for &l in &eig.values {
                signs.push(if l > 0.0 { 1 } else { -1 });
            }
            (plus, r.len() - plus)
        };
        blocks.push(CriticalBlock {
            size: r.len(),
            value,
            block: blk,
            signature,
        });
    }
    let nonzero = &canon.diagonal()[canon.block_sizes[0]..];
    let value_from_signs = crate::height::critical_value_from_signs(nonzero, &signs)?;
    let value = (d * a).re_trace();
    Ok(CriticalBlockStructure {
        blocks,
        signs,
        value_from_signs,
        value,
        off_block_mass,
    })
}

/// Morse test for `h_X` on the group from the singular values of `X`:
/// Morse exactly when they are positive and pairwise distinct.
pub fn is_morse_group(x: &MatrixK, tols: &Tolerances) -> Result<(bool, String)> {
    let c = svd_canonical_with(x, tols.cluster_gap)?;
    let reason = if c.block_sizes[0] > 0 {
        format!("{} zero singular value(s)", c.block_sizes[0])
    } else if let Some((t, m)) = c.values.iter().zip(&c.block_sizes[1..]).find(|(_, &m)| m > 1) {
        format!("singular value {t} has multiplicity {m}")
    } else {
        "singular values positive and pairwise distinct".to_string()
    };
    Ok((c.is_generic(), reason))
}
