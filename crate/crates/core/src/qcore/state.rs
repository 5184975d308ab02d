use num_complex::Complex;
use num_traits::{One, Zero};

use super::layout::PartyLayout;
use super::matrix::{inner, norm, CMatrix};
use super::operator::Operator;
use super::Tensor;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Unit vector over the composite computational basis of its layout.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    amps: Vec<Complex<T>>,
    layout: PartyLayout,
}

impl<T: Real> StateVector<T> {
    /// Normalizes `amps`; fails on a length mismatch or a zero/non-finite vector.
    pub fn new(amps: Vec<Complex<T>>, layout: PartyLayout) -> Result<Self> {
        if amps.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch { expected: layout.total_dim(), got: amps.len() });
        }
        let n = norm(&amps);
        if !n.is_finite() || n <= T::min_positive_value() {
            return Err(Error::NotNormalized(n.to_f64_lossy()));
        }
        Ok(Self { amps: amps.into_iter().map(|a| a / n).collect(), layout })
    }

    /// Single-party state with default party name.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let layout = PartyLayout::single(amps.len())?;
        Self::new(amps, layout)
    }

    /// Real amplitudes over a single party.
    pub fn from_reals(amps: &[T]) -> Result<Self> {
        Self::from_amplitudes(amps.iter().map(|&a| Complex::new(a, T::zero())).collect())
    }

    pub fn basis(layout: PartyLayout, index: usize) -> Result<Self> {
        let d = layout.total_dim();
        if index >= d {
            return Err(Error::Range(format!("basis index {index} >= {d}")));
        }
        let mut amps = vec![Complex::zero(); d];
        amps[index] = Complex::one();
        Ok(Self { amps, layout })
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn layout(&self) -> &PartyLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Same amplitudes viewed under another layout of equal total dimension.
    pub fn with_layout(&self, layout: PartyLayout) -> Result<Self> {
        if layout.total_dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: layout.total_dim() });
        }
        Ok(Self { amps: self.amps.clone(), layout })
    }

    pub fn overlap(&self, other: &Self) -> Result<Complex<T>> {
        overlap(self, other)
    }

    /// `|<self|other>|^2`
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        Ok(self.overlap(other)?.norm_sqr())
    }

    pub fn projector(&self) -> Operator<T> {
        Operator::from_parts(CMatrix::outer(&self.amps, &self.amps), self.layout.clone())
    }

    /// Rotates the first amplitude with magnitude above `tol` onto the positive real axis.
    pub fn canonical_phase(&self, tol: T) -> Self {
        let Some(lead) = self.amps.iter().find(|a| a.norm() > tol) else {
            return self.clone();
        };
        let phase = lead.conj() / lead.norm();
        Self { amps: self.amps.iter().map(|a| a * phase).collect(), layout: self.layout.clone() }
    }

    /// Entrywise equality after global-phase canonicalization.
    pub fn equal_up_to_phase(&self, other: &Self, tol: T) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let a = self.canonical_phase(T::lit(1e-9).max(tol));
        let b = other.canonical_phase(T::lit(1e-9).max(tol));
        a.amps.iter().zip(&b.amps).all(|(x, y)| (x - y).norm() <= tol)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.amps.iter().zip(&other.amps).fold(T::zero(), |m, (a, b)| m.max((a - b).norm()))
    }
}

impl<T: Real> Tensor for StateVector<T> {
    fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Self { amps, layout: self.layout.concat(&other.layout) }
    }
}

/// `<psi|phi>`, conjugate-linear in `psi`.
pub fn overlap<T: Real>(psi: &StateVector<T>, phi: &StateVector<T>) -> Result<Complex<T>> {
    if psi.layout.dims() != phi.layout.dims() {
        return Err(Error::LayoutMismatch(format!("{:?} vs {:?}", psi.layout.dims(), phi.layout.dims())));
    }
    Ok(inner(&psi.amps, &phi.amps))
}

/// Reorders tensor factors: output subsystem `k` is input subsystem `perm[k]`.
pub fn permute_subsystems<T: Copy + Zero>(amps: &[T], dims: &[usize], perm: &[usize]) -> Vec<T> {
    assert_eq!(dims.len(), perm.len(), "permutation length");
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let k = dims.len();
    let mut out = vec![T::zero(); amps.len()];
    let mut old_digits = vec![0usize; k];
    for (old_index, &a) in amps.iter().enumerate() {
        let mut rem = old_index;
        for s in (0..k).rev() {
            old_digits[s] = rem % dims[s];
            rem /= dims[s];
        }
        let mut new_index = 0;
        for s in 0..k {
            new_index = new_index * new_dims[s] + old_digits[perm[s]];
        }
        out[new_index] = a;
    }
    out
}
