use num_complex::Complex;

use super::layout::PartyLayout;
use super::matrix::CMatrix;
use super::state::StateVector;
use super::{eigh, Tensor};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Square operator acting on the space described by its layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator<T> {
    matrix: CMatrix<T>,
    layout: PartyLayout,
}

impl<T: Real> Operator<T> {
    pub fn new(matrix: CMatrix<T>, layout: PartyLayout) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != layout.total_dim() {
            return Err(Error::DimensionMismatch { expected: layout.total_dim(), got: matrix.rows() });
        }
        Ok(Self { matrix, layout })
    }

    pub(crate) fn from_parts(matrix: CMatrix<T>, layout: PartyLayout) -> Self {
        debug_assert_eq!(matrix.rows(), layout.total_dim());
        Self { matrix, layout }
    }

    pub fn identity(layout: PartyLayout) -> Self {
        Self { matrix: CMatrix::identity(layout.total_dim()), layout }
    }

    pub fn zeros(layout: PartyLayout) -> Self {
        let d = layout.total_dim();
        Self { matrix: CMatrix::zeros(d, d), layout }
    }

    /// `|psi><psi|`
    pub fn projector(psi: &StateVector<T>) -> Self {
        psi.projector()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn layout(&self) -> &PartyLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn dagger(&self) -> Self {
        Self { matrix: self.matrix.adjoint(), layout: self.layout.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { matrix: self.matrix.add(&other.matrix), layout: self.layout.clone() }
    }

    pub fn scale(&self, s: T) -> Self {
        Self { matrix: self.matrix.scale(s), layout: self.layout.clone() }
    }

    pub fn expectation(&self, psi: &StateVector<T>) -> Result<Complex<T>> {
        if psi.layout().dims() != self.layout.dims() {
            return Err(Error::LayoutMismatch(format!("{:?} vs {:?}", psi.layout().dims(), self.layout.dims())));
        }
        let v = self.matrix.apply(psi.amplitudes());
        Ok(super::inner(psi.amplitudes(), &v))
    }

    /// `<psi|self|psi>` as a real number; the operator is assumed Hermitian.
    pub fn probability(&self, psi: &StateVector<T>) -> Result<T> {
        Ok(self.expectation(psi)?.re)
    }
}

impl<T: Real> Tensor for Operator<T> {
    fn tensor(&self, other: &Self) -> Self {
        Self { matrix: self.matrix.kron(&other.matrix), layout: self.layout.concat(&other.layout) }
    }
}

const HERMITIAN_TOL: f64 = 1e-10;

/// `Tr(A B)` for Hermitian `A` and `B`; the result must be real.
pub fn trace_product<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<T> {
    if a.rows() != b.rows() || !a.is_square() || !b.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), got: b.rows() });
    }
    let tol = T::lit(HERMITIAN_TOL);
    for m in [a, b] {
        let defect = m.hermiticity_defect();
        if defect > tol * (T::one() + m.max_abs()) {
            return Err(Error::NotHermitian(defect.to_f64_lossy()));
        }
    }
    let n = a.rows();
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    if acc.im.abs() > tol * (T::one() + acc.re.abs()) {
        return Err(Error::ComplexTrace(acc.im.to_f64_lossy()));
    }
    Ok(acc.re)
}

/// Positive semidefiniteness up to `tol`; non-Hermitian input is an error.
pub fn is_psd<T: Real>(m: &CMatrix<T>, tol: T) -> Result<bool> {
    let defect = m.hermiticity_defect();
    if defect > tol.max(T::lit(HERMITIAN_TOL)) * (T::one() + m.max_abs()) {
        return Err(Error::NotHermitian(defect.to_f64_lossy()));
    }
    Ok(eigh(m).min_value() >= -tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::tensor;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn projector_of_plus() {
        let plus = StateVector::from_reals(&[1.0, 1.0]).unwrap();
        let p = Operator::projector(&plus);
        for i in 0..2 {
            for j in 0..2 {
                assert!((p.matrix()[(i, j)] - c(0.5, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn trace_product_values() {
        let z = CMatrix::from_diagonal(&[1.0, -1.0]);
        let i2 = CMatrix::<f64>::identity(2);
        assert_eq!(trace_product(&z, &i2).unwrap(), 0.0);
        assert_eq!(trace_product(&z, &z).unwrap(), 2.0);
        let bad = CMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(trace_product(&bad, &i2), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn psd_checks() {
        assert!(is_psd(&CMatrix::<f64>::from_diagonal(&[1.0, 0.0]), 1e-12).unwrap());
        assert!(!is_psd(&CMatrix::<f64>::from_diagonal(&[1.0, -1e-3]), 1e-12).unwrap());
        let bad = CMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(is_psd(&bad, 1e-12).is_err());
    }

    #[test]
    fn tensor_identity_layouts() {
        let a = Operator::<f64>::identity(PartyLayout::with_default_names(vec![2]).unwrap());
        let b = Operator::<f64>::identity(PartyLayout::with_default_names(vec![3]).unwrap());
        let ab = tensor(&a, &b);
        assert_eq!(ab.dim(), 6);
        assert_eq!(ab.layout().dims(), &[2, 3]);
        assert!(ab.matrix().approx_eq(&CMatrix::identity(6), 0.0));
    }
}
