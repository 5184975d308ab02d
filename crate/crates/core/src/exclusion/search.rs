use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::verify::probability;
use super::{verify_strong, Povm};
use crate::ensembles::Ensemble;
use crate::qcore::{eigh, inverse_sqrt, orthonormal_complement, orthonormal_span, psd_projection, CMatrix};
use crate::{Matrix, State, C64};

/// Smallest total firing probability accepted for an outcome of a searched measurement.
const MIN_RELEVANCE: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub restarts: usize,
    pub iterations: usize,
    /// Completeness residual at which a run counts as converged.
    pub tol: f64,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { restarts: 64, iterations: 5000, tol: 1e-10, seed: 0x5eed }
    }
}

/// Orthonormal basis of Hermitian `d x d` matrices under the trace inner product.
fn hermitian_basis(d: usize) -> Vec<Matrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut m = Matrix::zeros(d, d);
        m[(i, i)] = Complex::new(1.0, 0.0);
        out.push(m);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let mut re = Matrix::zeros(d, d);
            re[(i, j)] = Complex::new(h, 0.0);
            re[(j, i)] = Complex::new(h, 0.0);
            out.push(re);
            let mut im = Matrix::zeros(d, d);
            im[(i, j)] = Complex::new(0.0, h);
            im[(j, i)] = Complex::new(0.0, -h);
            out.push(im);
        }
    }
    out
}

fn coords(basis: &[Matrix], m: &Matrix) -> Vec<f64> {
    basis.iter().map(|b| b.data().iter().zip(m.data()).fold(0.0, |acc, (x, y)| acc + (x.conj() * y).re)).collect()
}

/// Pseudo-inverse of `Λ ↦ Σ_j P_j Λ P_j` on Hermitian matrices.
struct AffineSolver {
    basis: Vec<Matrix>,
    pinv: Vec<Vec<f64>>,
}

impl AffineSolver {
    fn new(projectors: &[Matrix], d: usize) -> Self {
        let basis = hermitian_basis(d);
        let n = basis.len();
        let mut l = Matrix::zeros(n, n);
        for (col, h) in basis.iter().enumerate() {
            let image = projectors.iter().fold(Matrix::zeros(d, d), |acc, p| acc.add(&p.matmul(h).matmul(p)));
            for (row, c) in coords(&basis, &image).into_iter().enumerate() {
                l[(row, col)] = Complex::new(c, 0.0);
            }
        }
        let eig = eigh(&l.hermitian_part());
        let cutoff = 1e-10 * eig.max_value().abs().max(1e-300);
        let inv = eig.reconstruct_with(|v| if v > cutoff { 1.0 / v } else { 0.0 });
        let pinv = (0..n).map(|i| (0..n).map(|j| inv[(i, j)].re).collect()).collect();
        Self { basis, pinv }
    }

    fn solve(&self, r: &Matrix) -> Matrix {
        let c = coords(&self.basis, r);
        let d = r.rows();
        let mut out = Matrix::zeros(d, d);
        for (row, b) in self.pinv.iter().zip(&self.basis) {
            let w: f64 = row.iter().zip(&c).map(|(a, b)| a * b).sum();
            if w != 0.0 {
                out = out.add(&b.scale(w));
            }
        }
        out
    }
}

/// Residual below which an unconverged run is handed to the polishing step.
const POLISH_START: f64 = 1e-3;
const POLISH_STEPS: usize = 80;

/// Solves `a x = b` in place for a symmetric positive definite `a` (row-major `n x n`).
fn cholesky_solve(a: &mut [f64], n: usize, b: &mut [f64]) -> bool {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if d <= 0.0 {
            return false;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= a[i * n + k] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= a[k * n + i] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    true
}

/// Levenberg-Marquardt on `Σ_j V_j B_j B_j† V_j† = I`, started from `Y_j = B_j B_j†`.
///
/// Alternating projection slows to a crawl when the feasible set is a single point;
/// this step is quadratic near a zero-residual solution. Steps are taken in the dual
/// form `δB = Jᵀ g` with `(J Jᵀ + μ) g = -F`, where `J Jᵀ G = 2 Σ_j (P_j G E_j + E_j G P_j)`.
fn polish(frames: &[Matrix], ys: &[Matrix], basis: &[Matrix], tol: f64) -> Option<Vec<Matrix>> {
    let d = frames[0].rows();
    let identity = Matrix::identity(d);
    let projectors: Vec<Matrix> = frames.iter().map(|v| v.matmul(&v.adjoint())).collect();
    let mut bs: Vec<Matrix> = ys.iter().map(|y| eigh(y).reconstruct_with(|l| l.max(0.0).sqrt())).collect();
    let residual = |bs: &[Matrix]| -> (Vec<Matrix>, Matrix) {
        let es: Vec<Matrix> = frames.iter().zip(bs).map(|(v, b)| {
            let w = v.matmul(b);
            w.matmul(&w.adjoint())
        }).collect();
        let f = es.iter().fold(identity.scale(-1.0), |acc, e| acc.add(e));
        (es, f)
    };
    let (mut es, mut f) = residual(&bs);
    let mut lambda = 1e-3;
    let n = basis.len();
    for _ in 0..POLISH_STEPS {
        if f.max_abs() < tol {
            return Some(bs.iter().map(|b| b.matmul(&b.adjoint())).collect());
        }
        let norm = f.frobenius_norm();
        let mut jjt = vec![0.0; n * n];
        for (col, h) in basis.iter().enumerate() {
            let image = projectors.iter().zip(&es).fold(Matrix::zeros(d, d), |acc, (p, e)| {
                acc.add(&p.matmul(h).matmul(e)).add(&e.matmul(h).matmul(p))
            });
            for (row, c) in coords(basis, &image).into_iter().enumerate() {
                jjt[row * n + col] = 2.0 * c;
            }
        }
        let rhs: Vec<f64> = coords(basis, &f).into_iter().map(|c| -c).collect();
        let mut accepted = false;
        while lambda < 1e12 {
            let mut a = jjt.clone();
            for i in 0..n {
                a[i * n + i] += lambda * norm;
            }
            let mut g = rhs.clone();
            if !cholesky_solve(&mut a, n, &mut g) {
                lambda *= 4.0;
                continue;
            }
            let gm = basis.iter().zip(&g).fold(Matrix::zeros(d, d), |acc, (b, w)| acc.add(&b.scale(*w)));
            let trial: Vec<Matrix> = frames
                .iter()
                .zip(&bs)
                .map(|(v, b)| b.add(&v.adjoint().matmul(&gm).matmul(v).matmul(b).scale(2.0)))
                .collect();
            let (te, tf) = residual(&trial);
            if tf.frobenius_norm() < norm {
                bs = trial;
                es = te;
                f = tf;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                break;
            }
            lambda *= 4.0;
        }
        if !accepted {
            return None;
        }
    }
    (f.max_abs() < tol).then(|| bs.iter().map(|b| b.matmul(&b.adjoint())).collect())
}

fn random_psd(rng: &mut ChaCha8Rng, r: usize) -> Matrix {
    let g = CMatrix::from_fn(r, r, |_, _| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    g.matmul(&g.adjoint())
}

/// Searches for positive operators `E_j` summing to the identity such that `E_j`
/// annihilates every state in `excluded[j]`. Every outcome must fire on some state.
/// Returns `None` when no run converges; that is not evidence of infeasibility.
pub fn search_povm_for_exclusions(states: &[State], excluded: &[Vec<usize>], opts: &SearchOptions) -> Option<Vec<Matrix>> {
    let d = states.first()?.dim();
    let mut frames: Vec<Matrix> = Vec::with_capacity(excluded.len());
    for ex in excluded {
        let vecs: Vec<Vec<C64>> = ex.iter().map(|&i| states[i].amplitudes().to_vec()).collect();
        let span = orthonormal_span(&vecs, 1e-10);
        let comp = orthonormal_complement(&span, d);
        if comp.is_empty() {
            return None;
        }
        frames.push(CMatrix::from_columns(&comp));
    }
    let projectors: Vec<Matrix> = frames.iter().map(|v| v.matmul(&v.adjoint())).collect();
    let solver = AffineSolver::new(&projectors, d);
    let identity = Matrix::identity(d);

    let attempt = |restart: usize| -> Option<Vec<Matrix>> {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut ys: Vec<Matrix> = frames.iter().map(|v| random_psd(&mut rng, v.cols())).collect();
        let total: f64 = frames.iter().zip(&ys).map(|(v, y)| v.matmul(y).matmul(&v.adjoint()).trace().re).sum();
        let s = d as f64 / total.max(1e-300);
        ys = ys.iter().map(|y| y.scale(s)).collect();

        let lift = |ys: &[Matrix]| -> Vec<Matrix> {
            frames.iter().zip(ys).map(|(v, y)| v.matmul(y).matmul(&v.adjoint())).collect()
        };
        let mut best = f64::INFINITY;
        let mut stalled = 0;
        let mut converged = false;
        for _ in 0..opts.iterations {
            let sum = lift(&ys).iter().fold(Matrix::zeros(d, d), |acc, m| acc.add(m));
            let lambda = solver.solve(&sum.sub(&identity));
            ys = frames
                .iter()
                .zip(&ys)
                .map(|(v, y)| psd_projection(&y.sub(&v.adjoint().matmul(&lambda).matmul(v))))
                .collect();
            let sum = lift(&ys).iter().fold(Matrix::zeros(d, d), |acc, m| acc.add(m));
            let residual = sum.max_abs_diff(&identity);
            if residual < opts.tol {
                converged = true;
                break;
            }
            if residual < best * (1.0 - 1e-6) {
                best = residual;
                stalled = 0;
            } else {
                stalled += 1;
                if stalled > 200 {
                    break;
                }
            }
        }
        if !converged {
            if best > POLISH_START {
                return None;
            }
            ys = polish(&frames, &ys, &solver.basis, opts.tol)?;
        }
        let mut ops = lift(&ys);
        let sum = ops.iter().fold(Matrix::zeros(d, d), |acc, m| acc.add(m));
        let root = inverse_sqrt(&sum)?;
        ops = ops.iter().map(|m| root.matmul(m).matmul(&root).hermitian_part()).collect();
        let relevant = ops.iter().all(|m| states.iter().map(|s| probability(s, m)).sum::<f64>() > MIN_RELEVANCE);
        relevant.then_some(ops)
    };

    (0..opts.restarts).into_par_iter().find_map_first(attempt)
}

/// Feasibility search for a strong exclusion measurement with one outcome per state.
/// Only results passing strong verification at `tol` are returned.
pub fn search_exclusion_povm(e: &Ensemble, opts: &SearchOptions, tol: f64) -> Option<Povm> {
    if e.len() < 2 {
        return None;
    }
    let excluded: Vec<Vec<usize>> = (0..e.len()).map(|j| vec![j]).collect();
    let ops = search_povm_for_exclusions(e.states(), &excluded, opts)?;
    let povm = Povm::labeled(e.layout().clone(), e.labels().iter().cloned().zip(ops).collect()).ok()?;
    let report = verify_strong(e, &povm, tol).ok()?;
    report.pass.then_some(povm)
}
