//! Numerical search for matrix tuples in prescribed classes with zero sum
//! (or identity product), and the checks that certify what was found.
//!
//! Each matrix is parametrized as `G_j D_j G_j^{-1}` with `D_j` a Jordan
//! matrix of its class, so membership holds by construction and only the
//! sum (product) has to be driven to zero. Steps are damped Gauss-Newton
//! (Levenberg-Marquardt) in the coordinates `G_j <- (I + X_j) G_j`.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::blockext::BlockSplit;
use crate::classes::{ClassSpec, Instance, Mode};
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealizationConfig {
    /// Residual threshold; relative to the size of the Jordan seeds in additive mode.
    pub tol_sum: f64,
    /// Singular values below `tol_rank` times the largest count as zero.
    pub tol_rank: f64,
    pub tol_eig: f64,
    pub restarts: usize,
    pub max_iterations: usize,
    /// A restart is abandoned once a conjugator's condition number exceeds this.
    pub condition_guard: f64,
    pub rng_seed: u64,
    /// Only accept tuples whose generated algebra is all of `M_n`.
    pub require_irreducible: bool,
}

impl Default for RealizationConfig {
    fn default() -> Self {
        RealizationConfig {
            tol_sum: 1e-10,
            tol_rank: 1e-7,
            tol_eig: 1e-6,
            restarts: 32,
            max_iterations: 5000,
            condition_guard: 1e6,
            rng_seed: 0,
            require_irreducible: false,
        }
    }
}

impl RealizationConfig {
    pub fn validate(&self) -> Result<()> {
        let tols = [self.tol_sum, self.tol_rank, self.tol_eig, self.condition_guard];
        if tols.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::validation("tolerances must be positive and finite"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub restart: usize,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericMatrixTuple {
    pub mode: Mode,
    pub matrices: Vec<CMatrix>,
    pub provenance: Option<Provenance>,
}

impl NumericMatrixTuple {
    pub fn new(mode: Mode, matrices: Vec<CMatrix>) -> Self {
        NumericMatrixTuple {
            mode,
            matrices,
            provenance: None,
        }
    }

    pub fn n(&self) -> usize {
        self.matrices.first().map_or(0, |m| m.nrows())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealizationReport {
    pub residual: f64,
    /// Per class: largest distance between an expected eigenvalue and the
    /// mean of the computed eigenvalues assigned to it (infinite on a count mismatch).
    pub membership_distances: Vec<f64>,
    pub membership_ok: Vec<bool>,
    pub algebra_dimension: usize,
    pub centralizer_dimension: usize,
    pub converged: bool,
    pub provenance: Option<Provenance>,
}

impl RealizationReport {
    pub fn irreducible(&self, n: usize) -> bool {
        self.algebra_dimension == n * n
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Block-diagonal Jordan matrix of the class, eigenvalues evaluated numerically.
pub fn jnf_seed_matrix(class: &ClassSpec) -> CMatrix {
    let n = class.size();
    let mut m = CMatrix::zeros(n, n);
    let mut at = 0;
    for (slot, part) in class.jnf().slots().iter().enumerate() {
        let value = class.eigenvalue(slot).numeric();
        for &b in part.parts() {
            for i in 0..b {
                m[(at + i, at + i)] = value;
                if i + 1 < b {
                    m[(at + i, at + i + 1)] = c(1.0);
                }
            }
            at += b;
        }
    }
    m
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Number of singular values above `tol * max(sigma_max, reference)`. The
/// reference keeps a matrix that is zero up to rounding at rank zero.
pub fn numeric_rank(m: &CMatrix, tol: f64, reference: f64) -> usize {
    let sv = singular_values(m);
    let cutoff = tol * sv.iter().copied().fold(reference, f64::max);
    if cutoff == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > cutoff).count()
}

pub fn condition_number(m: &CMatrix) -> f64 {
    let sv = singular_values(m);
    let top = sv.iter().copied().fold(0.0, f64::max);
    let bottom = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if bottom == 0.0 {
        f64::INFINITY
    } else {
        top / bottom
    }
}

fn eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    let (_, t) = m.clone().schur().unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

fn vec_of(m: &CMatrix) -> DVector<Complex64> {
    DVector::from_column_slice(m.as_slice())
}

/// Residual of the tuple: `||sum A_j||_F` or `||prod M_j - I||_F`.
pub fn residual(mode: Mode, mats: &[CMatrix]) -> f64 {
    error_matrix(mode, mats).norm()
}

fn error_matrix(mode: Mode, mats: &[CMatrix]) -> CMatrix {
    let n = mats[0].nrows();
    match mode {
        Mode::Additive => mats.iter().fold(CMatrix::zeros(n, n), |acc, m| acc + m),
        Mode::Multiplicative => mats.iter().fold(identity(n), |acc, m| acc * m) - identity(n),
    }
}

/// Partial products `L_j = M_1 ... M_{j-1}` and `R_j = M_{j+1} ... M_k`.
fn partial_products(mats: &[CMatrix]) -> (Vec<CMatrix>, Vec<CMatrix>) {
    let n = mats[0].nrows();
    let k = mats.len();
    let mut left = vec![identity(n); k];
    let mut right = vec![identity(n); k];
    for j in 1..k {
        left[j] = &left[j - 1] * &mats[j - 1];
    }
    for j in (0..k - 1).rev() {
        right[j] = &mats[j + 1] * &right[j + 1];
    }
    (left, right)
}

/// The squared residual as a function of the conjugators.
#[derive(Clone, Debug)]
pub struct ResidualObjective {
    pub mode: Mode,
    pub seeds: Vec<CMatrix>,
}

impl ResidualObjective {
    pub fn new(inst: &Instance) -> Self {
        ResidualObjective {
            mode: inst.mode(),
            seeds: inst.classes().iter().map(jnf_seed_matrix).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.seeds[0].nrows()
    }

    /// Scale used to make the additive residual relative.
    pub fn scale(&self) -> f64 {
        match self.mode {
            Mode::Additive => self.seeds.iter().map(|s| s.norm()).fold(1.0, f64::max),
            Mode::Multiplicative => 1.0,
        }
    }

    /// `G_j D_j G_j^{-1}`, or `None` if some conjugator is singular.
    pub fn matrices(&self, g: &[CMatrix]) -> Option<Vec<CMatrix>> {
        g.iter()
            .zip(&self.seeds)
            .map(|(gj, d)| gj.clone().try_inverse().map(|inv| gj * d * inv))
            .collect()
    }

    pub fn value(&self, g: &[CMatrix]) -> f64 {
        match self.matrices(g) {
            Some(m) => error_matrix(self.mode, &m).norm_squared(),
            None => f64::INFINITY,
        }
    }

    /// Gradient with respect to the real and imaginary parts of every entry
    /// of every `G_j`, packed as `d/dRe + i d/dIm`.
    pub fn gradient(&self, g: &[CMatrix]) -> Option<Vec<CMatrix>> {
        let inverses: Vec<CMatrix> = g.iter().map(|gj| gj.clone().try_inverse()).collect::<Option<_>>()?;
        let mats: Vec<CMatrix> = g
            .iter()
            .zip(&self.seeds)
            .zip(&inverses)
            .map(|((gj, d), inv)| gj * d * inv)
            .collect();
        let err_h = error_matrix(self.mode, &mats).adjoint();
        let weights: Vec<CMatrix> = match self.mode {
            Mode::Additive => vec![err_h; mats.len()],
            Mode::Multiplicative => {
                let (left, right) = partial_products(&mats);
                (0..mats.len()).map(|j| &right[j] * &err_h * &left[j]).collect()
            }
        };
        Some(
            mats.iter()
                .zip(&weights)
                .zip(&inverses)
                .map(|((a, w), inv)| {
                    let comm = a * w - w * a;
                    (inv * comm).adjoint() * c(2.0)
                })
                .collect(),
        )
    }

    /// Derivative of the error matrix in the directions `G_j <- (I + X_j) G_j`,
    /// as an `n^2 x (p+1) n^2` matrix acting on the stacked column-major `X_j`.
    fn jacobian(&self, mats: &[CMatrix]) -> CMatrix {
        let n = mats[0].nrows();
        let n2 = n * n;
        let k = mats.len();
        let mut jac = CMatrix::zeros(n2, k * n2);
        let (left, right) = match self.mode {
            Mode::Additive => (vec![identity(n); k], vec![identity(n); k]),
            Mode::Multiplicative => partial_products(mats),
        };
        for j in 0..k {
            let mr = &mats[j] * &right[j];
            let lm = &left[j] * &mats[j];
            for b in 0..n {
                for a in 0..n {
                    let col = j * n2 + a + n * b;
                    // L e_a (M R)_{b,:} - (L M) e_a R_{b,:}
                    for d in 0..n {
                        for cc in 0..n {
                            jac[(cc + n * d, col)] = left[j][(cc, a)] * mr[(b, d)] - lm[(cc, a)] * right[j][(b, d)];
                        }
                    }
                }
            }
        }
        jac
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    })
}

/// Why a single restart did not produce a tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct RestartFailure {
    pub restart: usize,
    pub residual: f64,
    pub iterations: usize,
    pub reason: String,
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// One deterministic restart of the residual minimization. Membership and
/// irreducibility of the result are not checked here.
pub fn search_restart(
    inst: &Instance,
    cfg: &RealizationConfig,
    restart: usize,
) -> std::result::Result<NumericMatrixTuple, RestartFailure> {
    let objective = ResidualObjective::new(inst);
    let n = objective.n();
    let k = objective.seeds.len();
    let scale = objective.scale();
    let target = (cfg.tol_sum * scale).powi(2);
    let mut rng = restart_rng(cfg.rng_seed, restart);
    let fail = |residual: f64, iterations: usize, reason: &str| RestartFailure {
        restart,
        residual,
        iterations,
        reason: reason.to_string(),
    };

    let mut g: Vec<CMatrix> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut m = random_matrix(&mut rng, n);
        for _ in 0..16 {
            if condition_number(&m) < cfg.condition_guard.sqrt() {
                break;
            }
            m = random_matrix(&mut rng, n);
        }
        g.push(m);
    }
    let Some(mut mats) = objective.matrices(&g) else {
        return Err(fail(f64::INFINITY, 0, "singular initial conjugator"));
    };
    let mut err = error_matrix(objective.mode, &mats);
    let mut f = err.norm_squared();
    let mut mu = 1e-2 * scale * scale;
    let n2 = n * n;

    for it in 0..cfg.max_iterations {
        if f <= target {
            let mut t = NumericMatrixTuple::new(objective.mode, mats);
            t.provenance = Some(Provenance {
                seed: cfg.rng_seed,
                restart,
                iterations: it,
            });
            return Ok(t);
        }
        if mu > 1e12 * scale * scale {
            return Err(fail(f.sqrt() / scale, it, "stalled at a local minimum"));
        }
        let jac = objective.jacobian(&mats);
        let jac_h = jac.adjoint();
        let mut h = &jac * &jac_h;
        for i in 0..n2 {
            h[(i, i)] += c(mu);
        }
        let e = vec_of(&err);
        let z = match Cholesky::new(h.clone()) {
            Some(ch) => ch.solve(&e),
            None => match h.lu().solve(&e) {
                Some(z) => z,
                None => {
                    mu *= 10.0;
                    continue;
                }
            },
        };
        let mut step = -(&jac_h * z);
        // keep I + X_j comfortably invertible
        let largest = (0..k)
            .map(|j| step.rows(j * n2, n2).norm())
            .fold(0.0, f64::max);
        if largest > 0.5 {
            step *= c(0.5 / largest);
        }
        let trial: Vec<CMatrix> = (0..k)
            .map(|j| {
                let x = CMatrix::from_column_slice(n, n, step.rows(j * n2, n2).as_slice());
                let mut gj = (identity(n) + x) * &g[j];
                let norm = gj.norm();
                if norm > 0.0 {
                    gj *= c((n as f64).sqrt() / norm);
                }
                gj
            })
            .collect();
        let candidate = objective.matrices(&trial);
        match candidate {
            Some(new_mats) => {
                let new_err = error_matrix(objective.mode, &new_mats);
                let new_f = new_err.norm_squared();
                if new_f.is_finite() && new_f < f {
                    if trial.iter().any(|gj| condition_number(gj) > cfg.condition_guard) {
                        return Err(fail(new_f.sqrt() / scale, it, "conditioning guard tripped"));
                    }
                    g = trial;
                    mats = new_mats;
                    err = new_err;
                    f = new_f;
                    mu = (mu / 3.0).max(1e-15 * scale * scale);
                } else {
                    mu *= 4.0;
                }
            }
            None => mu *= 4.0,
        }
    }
    if f <= target {
        let mut t = NumericMatrixTuple::new(objective.mode, mats);
        t.provenance = Some(Provenance {
            seed: cfg.rng_seed,
            restart,
            iterations: cfg.max_iterations,
        });
        return Ok(t);
    }
    Err(fail(f.sqrt() / scale, cfg.max_iterations, "iteration budget exhausted"))
}

/// Searches restarts in parallel; the successful restart with the lowest
/// index wins, so the result does not depend on scheduling.
pub fn find_tuple(inst: &Instance, cfg: &RealizationConfig) -> Result<NumericMatrixTuple> {
    cfg.validate()?;
    if !inst.mode().sum_is_trivial(&inst.trace_sum()) {
        return Err(Error::precondition(format!(
            "eigenvalue sum {} violates the trace condition",
            inst.trace_sum()
        )));
    }
    if inst.n() == 1 {
        let mats = inst.classes().iter().map(jnf_seed_matrix).collect();
        let mut t = NumericMatrixTuple::new(inst.mode(), mats);
        t.provenance = Some(Provenance {
            seed: cfg.rng_seed,
            restart: 0,
            iterations: 0,
        });
        return Ok(t);
    }
    let found = (0..cfg.restarts).into_par_iter().find_map_first(|r| {
        let t = search_restart(inst, cfg, r).ok()?;
        accept(inst, &t, cfg).then_some(t)
    });
    found.ok_or_else(|| {
        Error::NotFound(format!(
            "no {}tuple after {} restarts",
            if cfg.require_irreducible { "irreducible " } else { "" },
            cfg.restarts
        ))
    })
}

fn accept(inst: &Instance, t: &NumericMatrixTuple, cfg: &RealizationConfig) -> bool {
    let members = t
        .matrices
        .iter()
        .zip(inst.classes())
        .all(|(m, c)| membership_check(m, c, cfg));
    members && (!cfg.require_irreducible || irreducibility_check(t, cfg) == t.n() * t.n())
}

/// Largest distance between an expected eigenvalue and the mean of the
/// computed eigenvalues nearest to it; infinite if the counts differ.
pub fn membership_distance(m: &CMatrix, class: &ClassSpec) -> f64 {
    let expected: Vec<Complex64> = (0..class.eigenvalues().len())
        .map(|s| class.eigenvalue(s).numeric())
        .collect();
    let mults = class.multiplicities();
    let mut sums = vec![Complex64::new(0.0, 0.0); expected.len()];
    let mut counts = vec![0usize; expected.len()];
    for ev in eigenvalues(m) {
        let (best, _) = expected
            .iter()
            .enumerate()
            .map(|(i, e)| (i, (ev - e).norm()))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        sums[best] += ev;
        counts[best] += 1;
    }
    if counts != mults {
        return f64::INFINITY;
    }
    expected
        .iter()
        .zip(sums.iter().zip(&counts))
        .map(|(e, (s, &k))| (s / k as f64 - e).norm())
        .fold(0.0, f64::max)
}

/// Eigenvalues match with multiplicity, and for every eigenvalue the ranks of
/// `(m - lambda I)^k` follow the Jordan structure. Ranks are checked up to
/// one past the largest block, where the sequence has stabilized.
pub fn membership_check(m: &CMatrix, class: &ClassSpec, cfg: &RealizationConfig) -> bool {
    let n = class.size();
    if m.nrows() != n || m.ncols() != n {
        return false;
    }
    if membership_distance(m, class) > cfg.tol_eig {
        return false;
    }
    for (slot, part) in class.jnf().slots().iter().enumerate() {
        let lambda = class.eigenvalue(slot).numeric();
        let shifted = m - identity(n) * lambda;
        let top = part.parts()[0];
        let scale = m.norm().max(1.0);
        let mut power = identity(n);
        let mut reference = 1.0;
        for k in 1..=(top + 1).min(n) {
            power = &power * &shifted;
            reference *= scale;
            let expected = n - part.parts().iter().map(|&b| b.min(k)).sum::<usize>();
            if numeric_rank(&power, cfg.tol_rank, reference) != expected {
                return false;
            }
        }
    }
    true
}

fn normalized(mats: &[CMatrix]) -> Vec<CMatrix> {
    mats.iter()
        .map(|m| {
            let norm = m.norm();
            if norm > 0.0 {
                m / c(norm)
            } else {
                m.clone()
            }
        })
        .collect()
}

/// Dimension of the unital algebra generated by the tuple; `n^2` means irreducible.
pub fn algebra_dimension(mats: &[CMatrix], tol: f64) -> usize {
    let Some(first) = mats.first() else {
        return 0;
    };
    let n = first.nrows();
    let gens = normalized(mats);
    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    let mut words: Vec<CMatrix> = Vec::new();
    let push = |m: CMatrix, basis: &mut Vec<DVector<Complex64>>, words: &mut Vec<CMatrix>| -> bool {
        let v = vec_of(&m);
        let norm = v.norm();
        if norm == 0.0 {
            return false;
        }
        let mut w = v;
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for b in basis.iter() {
                let proj = b.dotc(&w);
                w -= b * proj;
            }
        }
        let rest = w.norm();
        if rest > tol * norm {
            basis.push(w / c(rest));
            words.push(m / c(norm));
            true
        } else {
            false
        }
    };
    push(identity(n), &mut basis, &mut words);
    let mut next = 0;
    while next < words.len() && basis.len() < n * n {
        let w = words[next].clone();
        for g in &gens {
            push(g * &w, &mut basis, &mut words);
        }
        next += 1;
    }
    basis.len()
}

pub fn irreducibility_check(t: &NumericMatrixTuple, cfg: &RealizationConfig) -> usize {
    algebra_dimension(&t.matrices, cfg.tol_rank)
}

/// Dimension of `{X : A_j X = X A_j for all j}`.
pub fn commutant_dimension(mats: &[CMatrix], tol: f64) -> usize {
    let Some(first) = mats.first() else {
        return 0;
    };
    let n = first.nrows();
    let n2 = n * n;
    // the scalar part commutes with everything; generators that are scalar
    // up to rounding are dropped
    let traceless: Vec<CMatrix> = mats
        .iter()
        .filter_map(|m| {
            let t = m - identity(n) * (m.trace() / c(n as f64));
            (t.norm() > tol * m.norm()).then_some(t)
        })
        .collect();
    let gens = normalized(&traceless);
    let mut map = CMatrix::zeros(gens.len() * n2, n2);
    for (j, g) in gens.iter().enumerate() {
        for b in 0..n {
            for a in 0..n {
                let col = a + n * b;
                // (g E_ab - E_ab g)_{c,d} = g_{c,a} [d = b] - [c = a] g_{b,d}
                for cc in 0..n {
                    map[(j * n2 + cc + n * b, col)] += g[(cc, a)];
                }
                for d in 0..n {
                    map[(j * n2 + a + n * d, col)] -= g[(b, d)];
                }
            }
        }
    }
    n2 - numeric_rank(&map, tol, 0.0)
}

pub fn centralizer_dimension(t: &NumericMatrixTuple, cfg: &RealizationConfig) -> usize {
    commutant_dimension(&t.matrices, cfg.tol_rank)
}

/// Residual, membership and the two dimension counts of a tuple.
pub fn verify(inst: &Instance, t: &NumericMatrixTuple, cfg: &RealizationConfig) -> RealizationReport {
    let scale = ResidualObjective::new(inst).scale();
    let res = residual(t.mode, &t.matrices) / scale;
    let membership_distances: Vec<f64> = t
        .matrices
        .iter()
        .zip(inst.classes())
        .map(|(m, c)| membership_distance(m, c))
        .collect();
    let membership_ok = t
        .matrices
        .iter()
        .zip(inst.classes())
        .map(|(m, c)| membership_check(m, c, cfg))
        .collect();
    RealizationReport {
        residual: res,
        membership_distances,
        membership_ok,
        algebra_dimension: irreducibility_check(t, cfg),
        centralizer_dimension: centralizer_dimension(t, cfg),
        converged: res <= cfg.tol_sum,
        provenance: t.provenance.clone(),
    }
}

/// Orthonormal basis (as columns) of the column space of `m`.
fn range_basis(m: &CMatrix, tol: f64) -> CMatrix {
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| top > 0.0 && svd.singular_values[i] > tol * top)
        .collect();
    CMatrix::from_fn(m.nrows(), keep.len(), |r, k| u[(r, keep[k])])
}

/// Orthonormal basis (as columns) of the null space of `m`.
fn null_basis(m: &CMatrix, tol: f64) -> CMatrix {
    let cols = m.ncols();
    // pad with zero rows so the SVD returns a full set of right vectors
    let mut padded = CMatrix::zeros(m.nrows().max(cols), cols);
    padded.rows_mut(0, m.nrows()).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let null: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| top == 0.0 || svd.singular_values[i] <= tol * top)
        .collect();
    CMatrix::from_fn(cols, null.len(), |r, k| v_t[(null[k], r)].conj())
}

/// Matrix of `X -> P X - X R` on column-major `l x m` blocks.
fn sylvester(p: &CMatrix, r: &CMatrix) -> CMatrix {
    let l = p.nrows();
    let m = r.nrows();
    let mut s = CMatrix::zeros(l * m, l * m);
    for b in 0..m {
        for a in 0..l {
            let col = a + l * b;
            for cc in 0..l {
                s[(cc + l * b, col)] += p[(cc, a)];
            }
            for d in 0..m {
                s[(a + l * d, col)] -= r[(b, d)];
            }
        }
    }
    s
}

/// The extension space at a split, measured numerically for given diagonal blocks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SemidirectReport {
    pub cocycle_dimension: usize,
    pub coboundary_dimension: usize,
    /// `cocycle_dimension - coboundary_dimension`.
    pub extension_dimension: usize,
}

/// Block upper-triangular tuple with diagonal blocks from `upper` and `lower`
/// and off-diagonal blocks forming a non-split extension: each `Q_j` lies in
/// the range of `X -> P_j X - X R_j` (so the class is kept), the sum (or
/// product) condition holds, and the cocycle avoids the coboundaries.
pub fn build_semidirect(
    inst: &Instance,
    sp: &BlockSplit,
    upper: &NumericMatrixTuple,
    lower: &NumericMatrixTuple,
    cfg: &RealizationConfig,
) -> Result<NumericMatrixTuple> {
    build_semidirect_with_report(inst, sp, upper, lower, cfg).map(|(t, _)| t)
}

/// [`build_semidirect`] together with the measured cocycle and coboundary dimensions.
pub fn build_semidirect_with_report(
    inst: &Instance,
    sp: &BlockSplit,
    upper: &NumericMatrixTuple,
    lower: &NumericMatrixTuple,
    cfg: &RealizationConfig,
) -> Result<(NumericMatrixTuple, SemidirectReport)> {
    let n = inst.n();
    let l = sp.l;
    let m = n - l;
    let k = inst.classes().len();
    if upper.n() != l || lower.n() != m || upper.matrices.len() != k || lower.matrices.len() != k {
        return Err(Error::precondition("block tuples do not match the split"));
    }
    let mode = inst.mode();
    let lm = l * m;
    // Q_j = U_j y_j with U_j a basis of the Sylvester range
    let ranges: Vec<CMatrix> = (0..k)
        .map(|j| range_basis(&sylvester(&upper.matrices[j], &lower.matrices[j]), cfg.tol_rank))
        .collect();
    // the off-diagonal block of the sum or product is linear in the Q_j
    let (left, right) = match mode {
        Mode::Additive => (vec![identity(l); k], vec![identity(m); k]),
        Mode::Multiplicative => (partial_products(&upper.matrices).0, partial_products(&lower.matrices).1),
    };
    let total: usize = ranges.iter().map(|u| u.ncols()).sum();
    let mut constraint = CMatrix::zeros(lm, total);
    let mut offsets = Vec::with_capacity(k);
    let mut at = 0;
    for j in 0..k {
        offsets.push(at);
        for col in 0..ranges[j].ncols() {
            let q = CMatrix::from_column_slice(l, m, ranges[j].column(col).as_slice());
            let image = &left[j] * q * &right[j];
            constraint.set_column(at + col, &vec_of(&image));
        }
        at += ranges[j].ncols();
    }
    let cocycles = null_basis(&constraint, cfg.tol_rank);
    // coboundaries (P_j Y - Y R_j)_j expressed in the y coordinates
    let mut cob = CMatrix::zeros(total, lm);
    for b in 0..m {
        for a in 0..l {
            let mut y = CMatrix::zeros(l, m);
            y[(a, b)] = c(1.0);
            for j in 0..k {
                let q = &upper.matrices[j] * &y - &y * &lower.matrices[j];
                let coords = ranges[j].adjoint() * vec_of(&q);
                cob.view_mut((offsets[j], a + l * b), (ranges[j].ncols(), 1)).copy_from(&coords);
            }
        }
    }
    let coboundaries = range_basis(&cob, cfg.tol_rank);
    let report = SemidirectReport {
        cocycle_dimension: cocycles.ncols(),
        coboundary_dimension: coboundaries.ncols(),
        extension_dimension: cocycles.ncols().saturating_sub(coboundaries.ncols()),
    };
    if report.extension_dimension == 0 {
        return Err(Error::precondition("the extension space at this split is zero"));
    }
    let mut rng = restart_rng(cfg.rng_seed, usize::MAX);
    let coeffs = DVector::from_fn(cocycles.ncols(), |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let mut y = &cocycles * coeffs;
    let proj = coboundaries.adjoint() * &y;
    y -= &coboundaries * proj;
    let norm = y.norm();
    if norm <= cfg.tol_rank {
        return Err(Error::NotFound("random cocycle fell into the coboundaries".into()));
    }
    y /= c(norm);
    let matrices = (0..k)
        .map(|j| {
            let coords = y.rows(offsets[j], ranges[j].ncols());
            let q = CMatrix::from_column_slice(l, m, (&ranges[j] * coords).as_slice());
            let mut a = CMatrix::zeros(n, n);
            a.view_mut((0, 0), (l, l)).copy_from(&upper.matrices[j]);
            a.view_mut((l, l), (m, m)).copy_from(&lower.matrices[j]);
            a.view_mut((0, l), (l, m)).copy_from(&q);
            a
        })
        .collect();
    Ok((NumericMatrixTuple::new(mode, matrices), report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::classes::GaussianRational;
    use crate::partitions::{d_of_jnf, Jnf, Partition};

    fn g(a: i64, b: i64) -> GaussianRational {
        GaussianRational::frac(a, b)
    }

    #[test]
    fn seed_matrices() {
        let m = Mode::Additive;
        let d = jnf_seed_matrix(&ClassSpec::distinct(m, &[g(0, 1), g(1, 1)]).unwrap());
        assert_eq!(d, CMatrix::from_diagonal(&DVector::from_vec(vec![c(0.0), c(1.0)])));
        let nil = ClassSpec::new(m, Jnf::new(vec![Partition::new(vec![2, 1])]), vec![g(0, 1)]).unwrap();
        let j = jnf_seed_matrix(&nil);
        assert_eq!(j[(0, 1)], c(1.0));
        assert_eq!(j.iter().filter(|z| z.norm() > 0.0).count(), 1);
        let mult = ClassSpec::distinct(Mode::Multiplicative, &[g(1, 2), g(0, 1)]).unwrap();
        assert!((jnf_seed_matrix(&mult)[(0, 0)] - c(-1.0)).norm() < 1e-15);
    }

    #[test]
    fn membership_of_seed_and_conjugates() {
        let cfg = RealizationConfig::default();
        let m = Mode::Additive;
        let class = ClassSpec::new(
            m,
            Jnf::new(vec![Partition::new(vec![2, 1]), Partition::new(vec![1])]),
            vec![g(1, 1), g(-3, 1)],
        )
        .unwrap();
        let seed = jnf_seed_matrix(&class);
        assert!(membership_check(&seed, &class, &cfg));
        let mut rng = restart_rng(7, 0);
        let gm = random_matrix(&mut rng, 4);
        let conj = &gm * &seed * gm.clone().try_inverse().unwrap();
        assert!(membership_check(&conj, &class, &cfg));
        // same eigenvalues, wrong Jordan structure
        let diag = ClassSpec::diagonal(m, &[(g(1, 1), 3), (g(-3, 1), 1)]).unwrap();
        assert!(!membership_check(&conj, &diag, &cfg));
        let zero = CMatrix::zeros(2, 2);
        assert!(!membership_check(&zero, &ClassSpec::distinct(m, &[g(0, 1), g(1, 1)]).unwrap(), &cfg));
    }

    #[test]
    fn dimension_counts() {
        let cfg = RealizationConfig::default();
        let scalars = vec![identity(2) * c(2.0), identity(2) * c(-2.0)];
        assert_eq!(commutant_dimension(&scalars, cfg.tol_rank), 4);
        assert_eq!(algebra_dimension(&scalars, cfg.tol_rank), 1);
        let d1 = CMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(2.0)]));
        let d2 = CMatrix::from_diagonal(&DVector::from_vec(vec![c(3.0), c(-1.0)]));
        assert_eq!(algebra_dimension(&[d1.clone(), d2.clone()], cfg.tol_rank), 2);
        assert_eq!(commutant_dimension(&[d1, d2], cfg.tol_rank), 2);
        assert_eq!(algebra_dimension(&[CMatrix::from_element(1, 1, c(3.0))], cfg.tol_rank), 1);
    }

    #[test]
    fn orbit_dimension_matches_formula() {
        let cfg = RealizationConfig::default();
        let m = Mode::Additive;
        for jnf in crate::partitions::all_jnfs(4) {
            let vals: Vec<_> = (0..jnf.slots().len()).map(|i| g(i as i64 * 2 - 1, 1)).collect();
            let class = ClassSpec::new(m, jnf.clone(), vals).unwrap();
            let seed = jnf_seed_matrix(&class);
            let dim = commutant_dimension(&[seed], cfg.tol_rank);
            assert_eq!(16 - dim, d_of_jnf(&jnf), "{jnf}");
        }
    }

    #[test]
    fn scalar_instance() {
        let m = Mode::Additive;
        let inst = Instance::new(
            m,
            vec![
                ClassSpec::distinct(m, &[g(1, 2)]).unwrap(),
                ClassSpec::distinct(m, &[g(-1, 2)]).unwrap(),
            ],
        )
        .unwrap();
        let t = find_tuple(&inst, &RealizationConfig::default()).unwrap();
        assert_eq!(residual(m, &t.matrices), 0.0);
    }

    #[test]
    fn trace_violation_is_a_precondition_error() {
        let m = Mode::Additive;
        let inst = Instance::new(
            m,
            vec![
                ClassSpec::distinct(m, &[g(1, 2), g(0, 1)]).unwrap(),
                ClassSpec::distinct(m, &[g(-1, 3), g(0, 1)]).unwrap(),
            ],
        )
        .unwrap();
        assert!(matches!(
            find_tuple(&inst, &RealizationConfig::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let inst = catalog::rigid_reducible_n4(Mode::Multiplicative);
        let obj = ResidualObjective::new(&inst);
        let mut rng = restart_rng(3, 1);
        let gs: Vec<CMatrix> = (0..3).map(|_| random_matrix(&mut rng, 4) + identity(4) * c(3.0)).collect();
        let grad = obj.gradient(&gs).unwrap();
        let h = 1e-6;
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..3 {
            for idx in 0..16 {
                for (dir, part) in [(c(1.0), 0), (Complex64::new(0.0, 1.0), 1)] {
                    let mut plus = gs.clone();
                    let mut minus = gs.clone();
                    plus[j][idx] += dir * h;
                    minus[j][idx] -= dir * h;
                    let fd = (obj.value(&plus) - obj.value(&minus)) / (2.0 * h);
                    let an = if part == 0 { grad[j][idx].re } else { grad[j][idx].im };
                    num += (fd - an).powi(2);
                    den += an * an;
                }
            }
        }
        assert!((num / den).sqrt() < 1e-4);
    }

    #[test]
    fn finds_generic_rank_two_tuple() {
        let inst = catalog::hypergeometric_n2();
        let cfg = RealizationConfig {
            require_irreducible: true,
            ..RealizationConfig::default()
        };
        let t = find_tuple(&inst, &cfg).unwrap();
        let rep = verify(&inst, &t, &cfg);
        assert!(rep.residual <= 1e-10);
        assert!(rep.membership_ok.iter().all(|&b| b));
        assert_eq!(rep.algebra_dimension, 4);
        assert_eq!(rep.centralizer_dimension, 1);
        // fixed seed, fixed answer
        let again = find_tuple(&inst, &cfg).unwrap();
        assert_eq!(t.provenance, again.provenance);
    }

    #[test]
    fn multiplicative_search_converges() {
        let inst = crate::classes::exponentiate_instance(&catalog::hypergeometric_n2()).unwrap();
        let cfg = RealizationConfig::default();
        let t = find_tuple(&inst, &cfg).unwrap();
        let rep = verify(&inst, &t, &cfg);
        assert!(rep.converged);
        assert_eq!(rep.centralizer_dimension, 1);
    }

    #[test]
    fn additive_semidirect_sum() {
        let inst = catalog::rigid_reducible_n4(Mode::Additive);
        let sp = BlockSplit::new(&inst, &[vec![1, 1, 0, 0], vec![1, 1], vec![1, 1, 0]]).unwrap();
        let (up, low) = crate::blockext::split_subinstances(&inst, &sp).unwrap();
        let cfg = RealizationConfig {
            require_irreducible: true,
            ..RealizationConfig::default()
        };
        let ut = find_tuple(&up, &cfg).unwrap();
        let lt = find_tuple(&low, &cfg).unwrap();
        let (t, ext) = build_semidirect_with_report(&inst, &sp, &ut, &lt, &cfg).unwrap();
        assert_eq!(ext.extension_dimension, 1);
        let rep = verify(&inst, &t, &cfg);
        assert!(rep.converged, "{}", rep.residual);
        assert!(rep.membership_ok.iter().all(|&b| b));
        assert_eq!(rep.centralizer_dimension, 1);
        assert!(rep.algebra_dimension < 16);
        let wrong = NumericMatrixTuple::new(Mode::Additive, vec![identity(3); 3]);
        assert!(matches!(build_semidirect(&inst, &sp, &wrong, &lt, &cfg), Err(Error::Precondition(_))));
    }
}
