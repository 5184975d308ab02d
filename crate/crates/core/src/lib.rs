//! Antidistinguishability and local state antimarking for small ensembles of
//! multipartite pure states.

pub mod ensembles;
pub mod exclusion;
pub mod error;
pub mod formats;
pub mod locc;
pub mod antimark;
pub mod qcore;
pub mod scalar;
pub mod simplex;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision complex scalar.
pub type C64 = num_complex::Complex<f64>;
/// Double-precision state vector.
pub type State = qcore::StateVector<f64>;
/// Double-precision operator.
pub type Op = qcore::Operator<f64>;
/// Double-precision dense matrix.
pub type Matrix = qcore::CMatrix<f64>;
