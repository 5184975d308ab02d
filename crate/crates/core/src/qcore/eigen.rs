//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::CMatrix;
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order and the matching unit eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn vector(&self, k: usize) -> Vec<Complex<T>> {
        self.vectors.column(k)
    }

    pub fn min_value(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }

    pub fn max_value(&self) -> T {
        self.values.last().copied().unwrap_or_else(T::zero)
    }

    /// `V f(Λ) V†`
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> CMatrix<T> {
        let n = self.values.len();
        let mut out = CMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w.is_zero() {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Diagonalizes the Hermitian part of `m`. Only the upper triangle's Hermitian
/// partner is assumed; callers check Hermiticity beforehand where it matters.
pub fn eigh<T: Real>(m: &CMatrix<T>) -> HermitianEigen<T> {
    assert!(m.is_square(), "eigh needs a square matrix");
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = CMatrix::<T>::identity(n);
    let scale = a.frobenius_norm();
    let eps = T::epsilon();

    if scale > T::zero() {
        for _ in 0..MAX_SWEEPS {
            let mut off = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() <= eps * scale * T::lit(0.1) {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    HermitianEigen { values, vectors }
}

fn rotate<T: Real>(a: &mut CMatrix<T>, v: &mut CMatrix<T>, p: usize, q: usize) {
    let n = a.rows();
    let apq = a[(p, q)];
    let r = apq.norm();
    if r <= T::min_positive_value() {
        return;
    }
    let phase = apq / r;
    let phase_c = phase.conj();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (r + r);
    let t = if theta.is_zero() {
        T::one()
    } else {
        theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;

    // A <- A J with J = diag(1, e^{-i phi}) R on the (p, q) plane
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * phase_c * s;
        a[(k, q)] = akp * s + akq * phase_c * c;
    }
    // A <- J† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * phase_c * s;
        v[(k, q)] = vkp * s + vkq * phase_c * c;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
}

/// Projection onto the PSD cone in Frobenius norm (negative eigenvalues clipped).
pub fn psd_projection<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    eigh(m).reconstruct_with(|l| l.max(T::zero()))
}

/// `m^{-1/2}` for a positive definite Hermitian `m`; `None` if an eigenvalue is not positive.
pub fn inverse_sqrt<T: Real>(m: &CMatrix<T>) -> Option<CMatrix<T>> {
    let e = eigh(m);
    if e.min_value() <= T::zero() {
        return None;
    }
    Some(e.reconstruct_with(|l| T::one() / l.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn diagonalizes_pauli_y() {
        let y = CMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let e = eigh(&y);
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        assert!(e.reconstruct_with(|l| l).approx_eq(&y, 1e-13));
    }

    #[test]
    fn reconstructs_random_hermitian() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 2, 3, 5, 8, 16] {
            let g = CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let h = g.hermitian_part();
            let e = eigh(&h);
            assert!(e.reconstruct_with(|l| l).approx_eq(&h, 1e-12), "n = {n}");
            let vv = e.vectors.adjoint().matmul(&e.vectors);
            assert!(vv.approx_eq(&CMatrix::identity(n), 1e-12));
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn f32_path_works() {
        let m = CMatrix::<f32>::from_diagonal(&[2.0, -1.0, 0.5]);
        let e = eigh(&m);
        assert_eq!(e.values, vec![-1.0, 0.5, 2.0]);
    }

    #[test]
    fn inverse_sqrt_of_diagonal() {
        let m = CMatrix::<f64>::from_diagonal(&[4.0, 0.25]);
        let r = inverse_sqrt(&m).unwrap();
        assert!((r[(0, 0)].re - 0.5).abs() < 1e-14);
        assert!((r[(1, 1)].re - 2.0).abs() < 1e-14);
        assert!(inverse_sqrt(&CMatrix::<f64>::from_diagonal(&[1.0, 0.0])).is_none());
    }
}
