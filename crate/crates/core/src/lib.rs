//! Multiplication theorem for multivariate Hermite polynomials.
//!
//! For symmetric positive-definite `Σ ∈ R^{n×n}`, `Υ ∈ R^{m×m}` and a linear map
//! `Λ ∈ R^{m×n}`, the Hermite polynomial of the mapped argument expands as
//!
//! ```text
//! H_k(Λᵀx; Σ) = Σ_q T_{k,q} H_q(x; Υ),   |q| ∈ {|k|, |k|-2, ...}
//! ```
//!
//! This crate computes the coefficients `T_{k,q}` (general, isotropic and
//! inner-product special cases), evaluates the Hermite families, and carries an
//! exact rational polynomial oracle that checks every identity symbolically.
//!
//! Everything is generic over a [`Scalar`] field so the same code runs in `f64`
//! and in exact [`BigRational`] arithmetic.
//!
//! The crate is `no_std` and needs only `alloc`.
//!
//! ```
//! use hermite_mult_core::coeffs::{evaluate_expansion, expand_general, CoeffVariant};
//! use hermite_mult_core::hermite::hermite_multi;
//! use hermite_mult_core::{DenseMatrix, HermiteFamily, MultiIndex, SpdMatrix};
//!
//! # fn main() -> hermite_mult_core::Result<()> {
//! let k = MultiIndex::new(vec![2, 1])?;
//! let lambda = DenseMatrix::from_rows(vec![vec![0.5, -1.0], vec![1.0, 0.25]])?;
//! let sigma = SpdMatrix::factorize(DenseMatrix::from_rows(vec![vec![1.5, 0.2], vec![0.2, 0.8]])?)?;
//! let upsilon = SpdMatrix::factorize(DenseMatrix::identity(2))?;
//!
//! let terms = expand_general(&k, &lambda, &sigma, &upsilon, CoeffVariant::Symmetrized)?;
//! let x = [0.3, -0.7];
//! let lhs = hermite_multi(&k, &lambda.transpose().matvec(&x)?, &sigma)?;
//! let (rhs, _) = evaluate_expansion(&terms, &x, &HermiteFamily::General(upsilon))?;
//! assert!((lhs - rhs).abs() < 1e-12);
//! # Ok(())
//! # }
//! ```
#![no_std]

extern crate alloc;

pub mod coeffs;
mod error;
pub mod hermite;
pub mod multiindex;
pub mod polyoracle;
mod scalar;
pub mod tensorlin;

pub use coeffs::{CoeffVariant, ExpansionTerm, TransformedMap};
pub use error::{Error, Result};
pub use hermite::{HermiteFamily, UnivariateFamily};
pub use multiindex::{IndexTuple, MultiIndex};
pub use polyoracle::{MPoly, OracleComparison};
pub use scalar::Scalar;
pub use tensorlin::{DenseMatrix, DenseVector, SpdMatrix};

pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;

/// Largest `|k|` accepted by the tensor-contraction paths.
pub const MAX_CONTRACTION_DEGREE: u32 = 12;

/// Largest tensor (or index-tuple set) that may be materialized.
pub const MAX_TENSOR_LEN: usize = 10_000_000;
