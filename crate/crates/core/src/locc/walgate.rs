use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qcore::{eigh, inner, norm, orthonormal_complement};
use crate::{Matrix, State, C64};

const DIRECTIONS: [usize; 4] = [8, 32, 128, 512];
const RANDOM_RESTARTS: usize = 200;

/// Local basis for Alice in which two orthogonal states have pointwise orthogonal
/// conditional vectors on the remaining parties.
#[derive(Clone, Debug)]
pub struct WalgateDecomposition {
    /// Row `i` is `<e_i|` in Alice's computational basis.
    pub alice_unitary: Matrix,
    /// `(<e_i| (x) I) |psi>`, unnormalized.
    pub eta: Vec<Vec<C64>>,
    /// `(<e_i| (x) I) |phi>`, unnormalized.
    pub eta_perp: Vec<Vec<C64>>,
}

impl WalgateDecomposition {
    /// Alice's basis kets `|e_i>`.
    pub fn alice_basis(&self) -> Vec<Vec<C64>> {
        (0..self.alice_unitary.rows()).map(|i| self.alice_unitary.row(i).iter().map(|z| z.conj()).collect()).collect()
    }

    /// Largest `|<eta_i|eta_i^perp>|`.
    pub fn max_conditional_overlap(&self) -> f64 {
        self.eta.iter().zip(&self.eta_perp).map(|(a, b)| inner(a, b).norm()).fold(0.0, f64::max)
    }

    /// `|| sum_i |e_i> (x) eta_i - psi ||_max`, and the same for `phi`.
    pub fn reassembly_residual(&self, psi: &State, phi: &State) -> f64 {
        let basis = self.alice_basis();
        let rebuild = |parts: &[Vec<C64>]| {
            let r = parts[0].len();
            let mut out = vec![C64::new(0.0, 0.0); basis.len() * r];
            for (e, eta) in basis.iter().zip(parts) {
                for (a, ea) in e.iter().enumerate() {
                    for (b, x) in eta.iter().enumerate() {
                        out[a * r + b] += ea * x;
                    }
                }
            }
            out
        };
        let diff = |v: Vec<C64>, s: &State| v.iter().zip(s.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        diff(rebuild(&self.eta), psi).max(diff(rebuild(&self.eta_perp), phi))
    }
}

/// Coefficient matrix of `s` with the first party as rows and the rest as columns.
pub fn coefficient_matrix(s: &State) -> Result<Matrix> {
    let dims = s.layout().dims();
    if dims.len() < 2 {
        return Err(Error::InvalidLayout("a local basis needs at least two parties".into()));
    }
    let (da, dr) = (dims[0], s.layout().responder_dim());
    Ok(Matrix::from_vec(da, dr, s.amplitudes().to_vec()))
}

/// Walgate basis for orthogonal `psi`, `phi`. Parties after the first act as one responder.
pub fn walgate_basis(psi: &State, phi: &State) -> Result<WalgateDecomposition> {
    if psi.layout() != phi.layout() {
        return Err(Error::LayoutMismatch("psi and phi live on different spaces".into()));
    }
    let x = psi.overlap(phi)?.norm();
    if x > 1e-10 {
        return Err(Error::NonOrthogonal("psi".into(), "phi".into(), x));
    }
    let mp = coefficient_matrix(psi)?;
    let mf = coefficient_matrix(phi)?;
    let u = zero_diagonal_unitary(&mp.matmul(&mf.adjoint()), 1e-10)?;
    let up = u.matmul(&mp);
    let uf = u.matmul(&mf);
    Ok(WalgateDecomposition {
        eta: (0..up.rows()).map(|i| up.row(i)).collect(),
        eta_perp: (0..uf.rows()).map(|i| uf.row(i)).collect(),
        alice_unitary: u,
    })
}

/// Unitary `U` with `|(U n U^dag)_ii| <= tol` for a traceless square `n`.
///
/// Each step picks a unit vector with zero Rayleigh quotient from the numerical range,
/// then recurses on the traceless compression to its orthogonal complement.
pub fn zero_diagonal_unitary(n: &Matrix, tol: f64) -> Result<Matrix> {
    if !n.is_square() {
        return Err(Error::DimensionMismatch { expected: n.rows(), got: n.cols() });
    }
    let d = n.rows();
    let scale = 1.0 + n.max_abs();
    if n.trace().norm() > tol * scale * d as f64 {
        return Err(Error::NotTraceless(n.trace().norm()));
    }
    let mut rows: Vec<Vec<C64>> = Vec::with_capacity(d);
    // columns of `w` span the space still to be filled; `m = w^dag n w`
    let mut w: Vec<Vec<C64>> = (0..d).map(|k| unit(d, k)).collect();
    let mut m = n.clone();
    while w.len() > 1 {
        let k = w.len();
        let v = zero_rayleigh_vector(&m, tol * scale)
            .ok_or_else(|| Error::ConvergenceFailure(format!("no zero of the numerical range in dimension {k}")))?;
        let comp = orthonormal_complement(std::slice::from_ref(&v), k);
        let lift = |c: &[C64]| -> Vec<C64> {
            (0..d).map(|r| w.iter().zip(c).map(|(col, x)| col[r] * x).sum()).collect()
        };
        rows.push(lift(&v).iter().map(|z| z.conj()).collect());
        let new_w: Vec<Vec<C64>> = comp.iter().map(|c| lift(c)).collect();
        let cm = Matrix::from_columns(&comp);
        m = cm.adjoint().matmul(&m).matmul(&cm);
        w = new_w;
    }
    rows.push(w[0].iter().map(|z| z.conj()).collect());
    let u = Matrix::from_fn(d, d, |i, j| rows[i][j]);
    let diag = u.matmul(n).matmul(&u.adjoint());
    let worst = (0..d).map(|i| diag[(i, i)].norm()).fold(0.0, f64::max);
    if worst > tol * scale {
        return Err(Error::ConvergenceFailure(format!("diagonal residual {worst:e}")));
    }
    Ok(u)
}

fn unit(d: usize, k: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); d];
    v[k] = C64::new(1.0, 0.0);
    v
}

fn rayleigh(m: &Matrix, v: &[C64]) -> C64 {
    inner(v, &m.apply(v)) / inner(v, v).re
}

fn normalized(v: Vec<C64>) -> Vec<C64> {
    let n = norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

/// Unit `v` with `|v^dag m v| <= tol` for `m` whose numerical range contains 0.
fn zero_rayleigh_vector(m: &Matrix, tol: f64) -> Option<Vec<C64>> {
    let d = m.rows();
    if m.max_abs() <= tol {
        return Some(unit(d, 0));
    }
    for &count in &DIRECTIONS {
        let points: Vec<(Vec<C64>, C64)> = (0..count)
            .map(|k| {
                let phi = std::f64::consts::TAU * k as f64 / count as f64;
                support_point(m, phi)
            })
            .collect();
        if let Some(v) = from_points(m, &points, tol) {
            return Some(v);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a11);
    for _ in 0..RANDOM_RESTARTS {
        let mut pts = Vec::new();
        for _ in 0..3 * d {
            let v: Vec<C64> = (0..d).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let v = normalized(v);
            let z = rayleigh(m, &v);
            pts.push((v, z));
        }
        if let Some(v) = from_points(m, &pts, tol) {
            return Some(v);
        }
    }
    None
}

/// Eigenvector maximizing `Re(e^{-i phi} v^dag m v)`, with its Rayleigh value.
fn support_point(m: &Matrix, phi: f64) -> (Vec<C64>, C64) {
    let rot = m.scale_complex(Complex::from_polar(1.0, -phi));
    let e = eigh(&rot.hermitian_part());
    let v = e.vector(m.rows() - 1);
    let z = rayleigh(m, &v);
    (v, z)
}

/// Uses a segment or triangle of numerical-range points around 0.
fn from_points(m: &Matrix, pts: &[(Vec<C64>, C64)], tol: f64) -> Option<Vec<C64>> {
    if let Some((v, _)) = pts.iter().find(|(_, z)| z.norm() <= tol) {
        return Some(v.clone());
    }
    let accept = |v: Vec<C64>| if rayleigh(m, &v).norm() <= tol { Some(v) } else { None };
    let n = pts.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let (zi, zj) = (pts[i].1, pts[j].1);
            // 0 on the segment: zi and zj antiparallel
            let cross = zi.re * zj.im - zi.im * zj.re;
            let dot = zi.re * zj.re + zi.im * zj.im;
            if cross.abs() <= tol * (zi.norm() + zj.norm()) && dot < 0.0 {
                if let Some(v) = segment_vector(m, &pts[i].0, &pts[j].0, C64::new(0.0, 0.0)).and_then(accept) {
                    return Some(v);
                }
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let Some(l) = barycentric(pts[i].1, pts[j].1, pts[k].1) else { continue };
                if l.iter().any(|&x| x < 0.0) || l[1] + l[2] <= 0.0 {
                    continue;
                }
                let wpt = (pts[j].1 * l[1] + pts[k].1 * l[2]) / (l[1] + l[2]);
                let Some(wv) = segment_vector(m, &pts[j].0, &pts[k].0, wpt) else { continue };
                if let Some(v) = segment_vector(m, &pts[i].0, &wv, C64::new(0.0, 0.0)).and_then(accept) {
                    return Some(v);
                }
            }
        }
    }
    None
}

fn barycentric(a: C64, b: C64, c: C64) -> Option<[f64; 3]> {
    let det = (b.re - a.re) * (c.im - a.im) - (c.re - a.re) * (b.im - a.im);
    if det.abs() < 1e-300 {
        return None;
    }
    let l1 = ((b.re) * (c.im) - (c.re) * (b.im)) / det;
    let l2 = ((c.re) * (a.im) - (a.re) * (c.im)) / det;
    let l3 = 1.0 - l1 - l2;
    Some([l1, l2, l3])
}

/// Unit vector in `span{x, y}` with Rayleigh value `mu`, where `mu` lies on the segment
/// between the Rayleigh values of unit vectors `x` and `y`.
fn segment_vector(m: &Matrix, x: &[C64], y: &[C64], mu: C64) -> Option<Vec<C64>> {
    let zx = rayleigh(m, x) - mu;
    let zy = rayleigh(m, y) - mu;
    if zx.norm() < 1e-300 {
        return Some(x.to_vec());
    }
    if zy.norm() < 1e-300 {
        return Some(y.to_vec());
    }
    // B = e^{-i psi} (m - mu) makes zx real positive and zy real negative
    let rot = Complex::from_polar(1.0, -zx.arg());
    let d = m.rows();
    let shifted = Matrix::from_fn(d, d, |i, j| (m[(i, j)] - if i == j { mu } else { C64::new(0.0, 0.0) }) * rot);
    let herm = shifted.hermitian_part();
    let skew = shifted.sub(&shifted.adjoint()).scale_complex(C64::new(0.0, -0.5));
    let p = inner(x, &herm.apply(x)).re;
    let q = inner(y, &herm.apply(y)).re;
    if p <= 0.0 || q >= 0.0 {
        return None;
    }
    let c = inner(x, &skew.apply(y));
    let phase = if c.norm() > 0.0 { C64::i() * c.conj() / c.norm() } else { C64::new(1.0, 0.0) };
    let h = (phase * inner(x, &herm.apply(y))).re;
    // q t^2 + 2 h t + p = 0 with p > 0 > q has a positive root
    let t = (-h - (h * h - p * q).sqrt()) / q;
    let v: Vec<C64> = x.iter().zip(y).map(|(a, b)| a + phase * b * t).collect();
    if norm(&v) < 1e-300 {
        return None;
    }
    Some(normalized(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::kets;
    use crate::qcore::{tensor, PartyLayout};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_traceless(rng: &mut ChaCha8Rng, d: usize) -> Matrix {
        let mut m = Matrix::from_fn(d, d, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let t = m.trace() / d as f64;
        for i in 0..d {
            m[(i, i)] -= t;
        }
        m
    }

    #[test]
    fn sigma_z_goes_to_zero_diagonal() {
        let z = Matrix::from_diagonal(&[1.0, -1.0]);
        let u = zero_diagonal_unitary(&z, 1e-12).unwrap();
        let r = u.matmul(&z).matmul(&u.adjoint());
        assert!(r[(0, 0)].norm() < 1e-12 && r[(1, 1)].norm() < 1e-12);
        assert!((r[(0, 1)].norm() - 1.0).abs() < 1e-12);
        assert!(u.matmul(&u.adjoint()).approx_eq(&Matrix::identity(2), 1e-12));
    }

    #[test]
    fn zero_diagonal_input_is_kept_valid() {
        let x = Matrix::from_vec(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let u = zero_diagonal_unitary(&x, 1e-12).unwrap();
        let r = u.matmul(&x).matmul(&u.adjoint());
        assert!(r[(0, 0)].norm() < 1e-12);
    }

    #[test]
    fn random_traceless_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [2, 3, 4, 5] {
            for _ in 0..100 {
                let n = random_traceless(&mut rng, d);
                let u = zero_diagonal_unitary(&n, 1e-10).unwrap();
                assert!(u.matmul(&u.adjoint()).approx_eq(&Matrix::identity(d), 1e-10));
                let r = u.matmul(&n).matmul(&u.adjoint());
                for i in 0..d {
                    assert!(r[(i, i)].norm() <= 1e-9, "d = {d}");
                }
            }
        }
    }

    #[test]
    fn rejects_trace() {
        let m = Matrix::from_diagonal(&[1.0, 0.5]);
        assert!(matches!(zero_diagonal_unitary(&m, 1e-10), Err(Error::NotTraceless(_))));
    }

    #[test]
    fn bell_pair_uses_hadamard_basis() {
        let l = PartyLayout::with_default_names(vec![2, 2]).unwrap();
        let s = 0.5f64.sqrt();
        let phi_p = State::new(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)], l.clone()).unwrap();
        let phi_m = State::new(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-s, 0.0)], l).unwrap();
        let w = walgate_basis(&phi_p, &phi_m).unwrap();
        for e in w.alice_basis() {
            let p = inner(&e, kets::plus().amplitudes()).norm();
            assert!((p - 1.0).abs() < 1e-10 || p < 1e-10);
        }
        assert!(w.max_conditional_overlap() < 1e-12);
        assert!(w.reassembly_residual(&phi_p, &phi_m) < 1e-12);
    }

    #[test]
    fn degenerate_pair_allows_zero_vectors() {
        let a = tensor(&kets::zero(), &kets::zero());
        let b = tensor(&kets::one(), &kets::one());
        let w = walgate_basis(&a, &b).unwrap();
        assert!(w.max_conditional_overlap() < 1e-12);
        assert!(w.reassembly_residual(&a, &b) < 1e-12);
    }

    #[test]
    fn non_orthogonal_is_rejected() {
        let a = tensor(&kets::zero(), &kets::zero());
        let b = tensor(&kets::plus(), &kets::zero());
        assert!(matches!(walgate_basis(&a, &b), Err(Error::NonOrthogonal(..))));
    }
}
