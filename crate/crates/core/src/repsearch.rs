//! Numerical search for finite dimensional *-representations.
//!
//! The objective is `Σ_r ‖r(M)‖_F²` over the relations of a presentation,
//! with starred letters evaluated as conjugate transposes. Self-adjoint
//! generators are parametrized by Hermitian matrices, everything else by
//! arbitrary complex matrices. Minimization is damped Gauss-Newton
//! (Levenberg-Marquardt) from seeded random starts.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::presentation::Presentation;

pub type CMatrix = DMatrix<Complex64>;

/// A candidate `d`-dimensional representation.
#[derive(Clone, Debug, PartialEq)]
pub struct RepPoint {
    pub dim: usize,
    pub names: Vec<String>,
    pub matrices: Vec<CMatrix>,
    pub residual: f64,
}

impl RepPoint {
    /// Checks sizes and hermiticity, and computes the residual.
    pub fn new(pres: &Presentation, dim: usize, matrices: Vec<CMatrix>) -> Result<Self> {
        let model = Model::new(pres, dim);
        let params = model.params_of(&matrices)?;
        let residual = model.objective(&params);
        Ok(RepPoint { dim, names: model.names.clone(), matrices, residual })
    }

    pub fn matrix(&self, name: &str) -> Option<&CMatrix> {
        self.names.iter().position(|n| n == name).map(|k| &self.matrices[k])
    }

    /// `dim d`, `residual r`, then one row-major matrix per generator with
    /// entries written `re+imi`.
    pub fn export(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "dim {}", self.dim);
        let _ = writeln!(out, "residual {:e}", self.residual);
        for (name, m) in self.names.iter().zip(&self.matrices) {
            let _ = writeln!(out, "matrix {name}");
            for r in 0..self.dim {
                let row: Vec<String> = (0..self.dim).map(|c| format!("{}{:+}i", m[(r, c)].re, m[(r, c)].im)).collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    /// Stop once the objective is below this.
    pub tolerance: f64,
    /// Starting entries are uniform in `[-init_scale, init_scale]`.
    pub init_scale: f64,
    /// Initial damping; multiplied by `damping_up` after a rejected step and
    /// divided by `damping_down` after an accepted one.
    pub damping: f64,
    pub damping_up: f64,
    pub damping_down: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            restarts: 16,
            max_iters: 400,
            seed: 0,
            tolerance: 1e-28,
            init_scale: 1.0,
            damping: 1e-3,
            damping_up: 4.0,
            damping_down: 3.0,
        }
    }
}

/// One real coordinate of a generator's matrix: `M = Σ θ_k D_k` where each
/// `D_k` has one or two nonzero entries.
type Direction = Vec<(usize, usize, Complex64)>;

/// A relation as `(coefficient, [(generator, starred)])` terms.
type CompiledRelation = Vec<(Complex64, Vec<(usize, bool)>)>;

/// A presentation compiled for dimension `d`.
struct Model {
    dim: usize,
    names: Vec<String>,
    self_adjoint: Vec<bool>,
    /// First parameter index of each generator, plus the total at the end.
    offsets: Vec<usize>,
    directions: Vec<Vec<Direction>>,
    relations: Vec<CompiledRelation>,
}

impl Model {
    fn new(pres: &Presentation, dim: usize) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let mut offsets = vec![0];
        let mut directions = Vec::new();
        for g in pres.generators() {
            let mut dirs: Vec<Direction> = Vec::new();
            if g.self_adjoint {
                for a in 0..dim {
                    dirs.push(vec![(a, a, one)]);
                }
                for a in 0..dim {
                    for b in a + 1..dim {
                        dirs.push(vec![(a, b, one), (b, a, one)]);
                        dirs.push(vec![(a, b, i), (b, a, -i)]);
                    }
                }
            } else {
                for a in 0..dim {
                    for b in 0..dim {
                        dirs.push(vec![(a, b, one)]);
                        dirs.push(vec![(a, b, i)]);
                    }
                }
            }
            offsets.push(offsets.last().unwrap() + dirs.len());
            directions.push(dirs);
        }
        let relations = pres
            .ideal_generators()
            .map(|r| {
                r.terms()
                    .map(|(w, c)| {
                        let (re, im) = c.to_f64_pair();
                        (
                            Complex64::new(re, im),
                            w.letters().iter().map(|l| (l.generator as usize, l.starred)).collect(),
                        )
                    })
                    .collect()
            })
            .collect();
        Model {
            dim,
            names: pres.generators().iter().map(|g| g.name.clone()).collect(),
            self_adjoint: pres.generators().iter().map(|g| g.self_adjoint).collect(),
            offsets,
            directions,
            relations,
        }
    }

    fn n_params(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    fn matrices(&self, params: &[f64]) -> Vec<CMatrix> {
        (0..self.names.len())
            .map(|g| {
                let mut m = CMatrix::zeros(self.dim, self.dim);
                for (k, dir) in self.directions[g].iter().enumerate() {
                    let t = params[self.offsets[g] + k];
                    for &(a, b, c) in dir {
                        m[(a, b)] += c * t;
                    }
                }
                m
            })
            .collect()
    }

    /// Inverse of [`Model::matrices`]; fails on wrong sizes or a
    /// non-Hermitian matrix for a self-adjoint generator.
    fn params_of(&self, matrices: &[CMatrix]) -> Result<Vec<f64>> {
        if matrices.len() != self.names.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} matrices for {} generators",
                matrices.len(),
                self.names.len()
            )));
        }
        let mut params = Vec::with_capacity(self.n_params());
        for (g, m) in matrices.iter().enumerate() {
            if m.nrows() != self.dim || m.ncols() != self.dim {
                return Err(Error::DimensionMismatch(format!(
                    "{} is {}x{}, expected {d}x{d}",
                    self.names[g],
                    m.nrows(),
                    m.ncols(),
                    d = self.dim
                )));
            }
            if self.self_adjoint[g] {
                if (m - m.adjoint()).iter().any(|z| z.norm() > 0.0) {
                    return Err(Error::Invalid(format!("{} must be Hermitian", self.names[g])));
                }
                params.extend((0..self.dim).map(|a| m[(a, a)].re));
                for a in 0..self.dim {
                    for b in a + 1..self.dim {
                        params.push(m[(a, b)].re);
                        params.push(m[(a, b)].im);
                    }
                }
            } else {
                for a in 0..self.dim {
                    for b in 0..self.dim {
                        params.push(m[(a, b)].re);
                        params.push(m[(a, b)].im);
                    }
                }
            }
        }
        Ok(params)
    }

    fn letter(&self, mats: &[CMatrix], adj: &[CMatrix], (g, starred): (usize, bool)) -> CMatrix {
        if starred {
            adj[g].clone()
        } else {
            mats[g].clone()
        }
    }

    /// Values of all relations at the point.
    fn values(&self, mats: &[CMatrix]) -> Vec<CMatrix> {
        let adj: Vec<CMatrix> = mats.iter().map(|m| m.adjoint()).collect();
        let id = CMatrix::identity(self.dim, self.dim);
        self.relations
            .iter()
            .map(|terms| {
                let mut v = CMatrix::zeros(self.dim, self.dim);
                for (c, word) in terms {
                    let prod = word.iter().fold(id.clone(), |acc, &l| acc * self.letter(mats, &adj, l));
                    v += prod * *c;
                }
                v
            })
            .collect()
    }

    fn objective(&self, params: &[f64]) -> f64 {
        self.values(&self.matrices(params)).iter().map(|v| v.norm_squared()).sum()
    }

    /// Residual vector (real and imaginary parts of every relation entry)
    /// and its Jacobian with respect to the parameters.
    fn residual_and_jacobian(&self, params: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let d = self.dim;
        let mats = self.matrices(params);
        let adj: Vec<CMatrix> = mats.iter().map(|m| m.adjoint()).collect();
        let id = CMatrix::identity(d, d);
        let block = 2 * d * d;
        let mut r = DVector::zeros(block * self.relations.len());
        let mut jac = DMatrix::zeros(block * self.relations.len(), self.n_params());
        for (ri, terms) in self.relations.iter().enumerate() {
            let row0 = ri * block;
            let mut value = CMatrix::zeros(d, d);
            // one complex d x d derivative per parameter
            let mut deriv: Vec<CMatrix> = vec![CMatrix::zeros(d, d); self.n_params()];
            for (c, word) in terms {
                let factors: Vec<CMatrix> = word.iter().map(|&l| self.letter(&mats, &adj, l)).collect();
                let mut prefix = vec![id.clone()];
                for f in &factors {
                    let next = prefix.last().unwrap() * f;
                    prefix.push(next);
                }
                let mut suffix = vec![id.clone(); factors.len() + 1];
                for p in (0..factors.len()).rev() {
                    suffix[p] = &factors[p] * &suffix[p + 1];
                }
                value += &prefix[factors.len()] * *c;
                for (p, &(g, starred)) in word.iter().enumerate() {
                    let (pre, suf) = (&prefix[p], &suffix[p + 1]);
                    for (k, dir) in self.directions[g].iter().enumerate() {
                        let target = &mut deriv[self.offsets[g] + k];
                        for &(a, b, e) in dir {
                            // d(M*) has entry conj(e) at (b, a)
                            let (a, b, e) = if starred { (b, a, e.conj()) } else { (a, b, e) };
                            let s = *c * e;
                            for x in 0..d {
                                let left = pre[(x, a)] * s;
                                if left == Complex64::new(0.0, 0.0) {
                                    continue;
                                }
                                for y in 0..d {
                                    target[(x, y)] += left * suf[(b, y)];
                                }
                            }
                        }
                    }
                }
            }
            for x in 0..d {
                for y in 0..d {
                    let at = row0 + 2 * (x * d + y);
                    r[at] = value[(x, y)].re;
                    r[at + 1] = value[(x, y)].im;
                    for (k, dm) in deriv.iter().enumerate() {
                        jac[(at, k)] = dm[(x, y)].re;
                        jac[(at + 1, k)] = dm[(x, y)].im;
                    }
                }
            }
        }
        (r, jac)
    }

    fn random_start(&self, rng: &mut ChaCha8Rng, scale: f64) -> Vec<f64> {
        (0..self.n_params()).map(|_| rng.gen_range(-scale..=scale)).collect()
    }

    /// Levenberg-Marquardt from `start`; returns the final parameters.
    fn minimize(&self, start: Vec<f64>, cfg: &SearchConfig) -> Vec<f64> {
        let n = self.n_params();
        let mut x = start;
        if n == 0 {
            return x;
        }
        let mut lambda = cfg.damping;
        let mut f = self.objective(&x);
        for _ in 0..cfg.max_iters {
            if f < cfg.tolerance {
                break;
            }
            let (r, j) = self.residual_and_jacobian(&x);
            let jt = j.transpose();
            let g = &jt * &r;
            let h = &jt * &j;
            let mut accepted = false;
            while lambda < 1e12 {
                let mut a = h.clone();
                for k in 0..n {
                    a[(k, k)] += lambda * (1.0 + h[(k, k)]);
                }
                let Some(chol) = a.cholesky() else {
                    lambda *= cfg.damping_up;
                    continue;
                };
                let step = chol.solve(&(-&g));
                let candidate: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
                let fc = self.objective(&candidate);
                if fc < f {
                    x = candidate;
                    f = fc;
                    lambda = (lambda / cfg.damping_down).max(1e-15);
                    accepted = true;
                    break;
                }
                lambda *= cfg.damping_up;
            }
            if !accepted {
                break;
            }
        }
        x
    }

    fn point(&self, params: &[f64]) -> RepPoint {
        RepPoint {
            dim: self.dim,
            names: self.names.clone(),
            matrices: self.matrices(params),
            residual: self.objective(params),
        }
    }

    fn check_point(&self, rep: &RepPoint) -> Result<Vec<f64>> {
        if rep.dim != self.dim {
            return Err(Error::DimensionMismatch(format!("point has dimension {}, expected {}", rep.dim, self.dim)));
        }
        self.params_of(&rep.matrices)
    }
}

/// `Σ_r ‖r(M)‖_F²`.
pub fn residual(pres: &Presentation, rep: &RepPoint) -> Result<f64> {
    let model = Model::new(pres, rep.dim);
    let params = model.check_point(rep)?;
    Ok(model.objective(&params))
}

/// Gradient of [`residual`] with respect to the free real coordinates:
/// diagonal entries and real/imaginary parts above the diagonal for
/// self-adjoint generators, real/imaginary parts of all entries otherwise,
/// in generator order.
pub fn residual_gradient(pres: &Presentation, rep: &RepPoint) -> Result<Vec<f64>> {
    let model = Model::new(pres, rep.dim);
    let params = model.check_point(rep)?;
    let (r, j) = model.residual_and_jacobian(&params);
    Ok((j.transpose() * r * 2.0).iter().copied().collect())
}

/// Number of free real coordinates in dimension `dim`.
pub fn coordinate_count(pres: &Presentation, dim: usize) -> usize {
    Model::new(pres, dim).n_params()
}

/// Free coordinates of a point, in the order used by [`residual_gradient`].
pub fn coordinates(pres: &Presentation, rep: &RepPoint) -> Result<Vec<f64>> {
    Model::new(pres, rep.dim).check_point(rep)
}

/// The point with the given free coordinates.
pub fn from_coordinates(pres: &Presentation, dim: usize, params: &[f64]) -> Result<RepPoint> {
    let model = Model::new(pres, dim);
    if params.len() != model.n_params() {
        return Err(Error::DimensionMismatch(format!("{} coordinates, expected {}", params.len(), model.n_params())));
    }
    Ok(model.point(params))
}

/// Random generator for restart `k`: its own stream of the seeded ChaCha.
fn restart_rng(seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

fn all_restarts(model: &Model, cfg: &SearchConfig) -> Vec<RepPoint> {
    (0..cfg.restarts.max(1))
        .into_par_iter()
        .map(|k| {
            let start = model.random_start(&mut restart_rng(cfg.seed, k), cfg.init_scale);
            model.point(&model.minimize(start, cfg))
        })
        .collect()
}

/// Best local minimum over the restarts; ties go to the lower restart index.
pub fn search_rep(pres: &Presentation, dim: usize, cfg: &SearchConfig) -> RepPoint {
    let model = Model::new(pres, dim);
    let mut best: Option<RepPoint> = None;
    for p in all_restarts(&model, cfg) {
        if best.as_ref().is_none_or(|b| p.residual < b.residual) {
            best = Some(p);
        }
    }
    best.expect("at least one restart")
}

/// All restart results, in restart order.
pub fn search_all(pres: &Presentation, dim: usize, cfg: &SearchConfig) -> Vec<RepPoint> {
    all_restarts(&Model::new(pres, dim), cfg)
}

pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    (a * b - b * a).norm()
}

#[derive(Clone, Debug, PartialEq)]
pub enum NoncommutingPair {
    Found {
        point: RepPoint,
        commutator_norm: f64,
    },
    /// The budget ran out; this says nothing about existence.
    NotFound,
}

/// A representation with residual below `tol_rel` in which `g` and `h` fail
/// to commute by more than `tol_nc` (Frobenius norm). The first qualifying
/// restart is returned.
pub fn certify_noncommuting_pair(
    pres: &Presentation,
    g: &str,
    h: &str,
    dim: usize,
    cfg: &SearchConfig,
    tol_rel: f64,
    tol_nc: f64,
) -> Result<NoncommutingPair> {
    let gi = pres.generator_index(g).ok_or_else(|| Error::UnknownLetter(g.to_string()))? as usize;
    let hi = pres.generator_index(h).ok_or_else(|| Error::UnknownLetter(h.to_string()))? as usize;
    let model = Model::new(pres, dim);
    for point in all_restarts(&model, cfg) {
        if point.residual >= tol_rel {
            continue;
        }
        // re-validate from the matrices alone
        let recomputed = residual(pres, &point)?;
        let norm = commutator_norm(&point.matrices[gi], &point.matrices[hi]);
        if recomputed < 2.0 * tol_rel && norm > tol_nc {
            return Ok(NoncommutingPair::Found { point, commutator_norm: norm });
        }
    }
    Ok(NoncommutingPair::NotFound)
}
