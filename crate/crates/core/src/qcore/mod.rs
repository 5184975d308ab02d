//! Complex linear algebra on small composite Hilbert spaces.
//!
//! Composite indices are row-major with the first party most significant, so
//! `|01>` over two qubits is basis index 1 and `|10>` is index 2.

mod eigen;
mod layout;
mod matrix;
mod operator;
mod state;

pub use eigen::{eigh, inverse_sqrt, psd_projection, HermitianEigen};
pub use layout::PartyLayout;
pub use matrix::{inner, norm, orthonormal_complement, orthonormal_span, CMatrix};
pub use operator::{is_psd, trace_product, Operator};
pub use state::{overlap, permute_subsystems, StateVector};

/// Values with a Kronecker product.
pub trait Tensor: Sized {
    fn tensor(&self, other: &Self) -> Self;
}

/// `a ⊗ b` with `a` on the most significant index.
pub fn tensor<K: Tensor>(a: &K, b: &K) -> K {
    a.tensor(b)
}

/// `k_1 ⊗ k_2 ⊗ ...`; `None` for an empty list.
pub fn tensor_all<'a, K: Tensor + Clone + 'a>(items: impl IntoIterator<Item = &'a K>) -> Option<K> {
    let mut it = items.into_iter();
    let first = it.next()?.clone();
    Some(it.fold(first, |acc, k| acc.tensor(k)))
}
