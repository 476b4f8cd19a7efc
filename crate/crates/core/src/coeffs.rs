//! Coefficients `T_{k,q}` of the multiplication theorem
//!
//! ```text
//! H_k(Λᵀx; Σ) = Σ_q T_{k,q} H_q(x; Υ),   Λ ∈ R^{m×n}, k ∈ N^n, q ∈ N^m
//! ```
//!
//! With `A = Σ⁻¹ΛᵀΥ` (n×m), `M = Σ⁻¹ΛᵀΥΛΣ⁻¹ - Σ⁻¹` (n×n) and `i = (|k|-|q|)/2`,
//! the coefficient is `k!/(2^i q! i!)` times a contraction of the tensor
//! `v = A^{⊙q} ⊗ vec(M)^{⊗i}` against the index set of `k`.

use alloc::vec::Vec;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::hermite::{HermiteEvaluator, HermiteFamily, UnivariateFamily, MAX_DEGREE};
use crate::multiindex::{enumerate_fixed_degree, index_tuples, q_support, sorted_tuple, MultiIndex};
use crate::scalar::Scalar;
use crate::tensorlin::{DenseMatrix, SpdMatrix};
use crate::MAX_CONTRACTION_DEGREE;

/// How the order-`|k|` tensor is reduced to a single coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum CoeffVariant {
    /// Sum `v[e]` over every tuple `e` with occurrence counts `k`.
    ///
    /// This is the coefficient of `t^k/k!` in the power series and is correct
    /// for every `n`.
    #[default]
    Symmetrized,
    /// Read the single entry selected by `I_n^{⊙k}` (the sorted tuple).
    ///
    /// Agrees with `Symmetrized` when `n = 1` and is wrong in general for
    /// `n >= 2`; e.g. `k = (1,1)`, `Λ = [[0,1],[1,0]]`, `Σ = Υ = I` yields 0
    /// where the true coefficient is 1.
    SingleSelector,
}

/// One term `T_{k,q} H_q` of an expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionTerm<S> {
    pub q: MultiIndex,
    pub coeff: S,
}

/// The pair `(A, M)` entering the coefficient contraction.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformedMap<S> {
    a: DenseMatrix<S>,
    m: DenseMatrix<S>,
    /// `c` in the prefactor `1/(2c)^i`.
    pair_scale: S,
}

const MAP_SYMMETRY_RTOL: f64 = 1e-10;

fn check_map_symmetry<S: Scalar>(m: &DenseMatrix<S>) -> Result<()> {
    for i in 0..m.rows() {
        for j in i + 1..m.cols() {
            let (a, b) = (&m[(i, j)], &m[(j, i)]);
            let ok = if S::EXACT {
                a == b
            } else {
                let (a, b) = (a.to_f64(), b.to_f64());
                (a - b).abs() <= MAP_SYMMETRY_RTOL * f64::max(1.0, a.abs())
            };
            if !ok {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
    }
    Ok(())
}

impl<S: Scalar> TransformedMap<S> {
    /// `A = Σ⁻¹ΛᵀΥ`, `M = Σ⁻¹ΛᵀΥΛΣ⁻¹ - Σ⁻¹` for `Λ ∈ R^{m×n}`.
    pub fn new(lambda: &DenseMatrix<S>, sigma: &SpdMatrix<S>, upsilon: &SpdMatrix<S>) -> Result<Self> {
        Self::from_precision(lambda, sigma.inverse(), upsilon.matrix())
    }

    /// As [`TransformedMap::new`] but from `Σ⁻¹` and `Υ` directly (no definiteness required).
    pub fn from_precision(
        lambda: &DenseMatrix<S>,
        sigma_inv: &DenseMatrix<S>,
        upsilon: &DenseMatrix<S>,
    ) -> Result<Self> {
        let (m, n) = (lambda.rows(), lambda.cols());
        if !sigma_inv.is_square() || sigma_inv.rows() != n {
            return Err(Error::Dimension {
                expected: n,
                found: sigma_inv.rows(),
                what: "Sigma must be n×n for Lambda m×n",
            });
        }
        if !upsilon.is_square() || upsilon.rows() != m {
            return Err(Error::Dimension {
                expected: m,
                found: upsilon.rows(),
                what: "Upsilon must be m×m for Lambda m×n",
            });
        }
        let a = sigma_inv.matmul(&lambda.transpose())?.matmul(upsilon)?;
        let quad = a.matmul(lambda)?.matmul(sigma_inv)?;
        let m_mat = quad.sub(sigma_inv)?;
        check_map_symmetry(&m_mat)?;
        Ok(TransformedMap {
            a,
            m: m_mat,
            pair_scale: S::one(),
        })
    }

    /// The `Σ = σ²I_n`, `Υ = σ²I_m` case: `A = Λᵀ`, `M₀ = ΛᵀΛ - I_n`, prefactor `1/(2σ²)^i`.
    pub fn isotropic(lambda: &DenseMatrix<S>, sigma2: S) -> Result<Self> {
        if !(sigma2.is_finite() && sigma2 > S::zero()) {
            return Err(Error::Domain("variance must be positive and finite"));
        }
        let a = lambda.transpose();
        let m0 = a.matmul(lambda)?.sub(&DenseMatrix::identity(lambda.cols()))?;
        Ok(TransformedMap {
            a,
            m: m0,
            pair_scale: sigma2,
        })
    }

    /// `A`, an `n × m` matrix.
    pub fn a(&self) -> &DenseMatrix<S> {
        &self.a
    }

    /// `M`, an `n × n` symmetric matrix.
    pub fn m(&self) -> &DenseMatrix<S> {
        &self.m
    }

    /// Input dimension `n` (arity of `k`).
    pub fn n(&self) -> usize {
        self.a.rows()
    }

    /// Output dimension `m` (arity of `q`).
    pub fn m_dim(&self) -> usize {
        self.a.cols()
    }

    fn validate(&self, k: &MultiIndex, q: &MultiIndex) -> Result<u32> {
        if k.arity() != self.n() {
            return Err(Error::Dimension {
                expected: self.n(),
                found: k.arity(),
                what: "arity of k",
            });
        }
        if q.arity() != self.m_dim() {
            return Err(Error::Dimension {
                expected: self.m_dim(),
                found: q.arity(),
                what: "arity of q",
            });
        }
        let (kd, qd) = (k.degree(), q.degree());
        if kd > MAX_CONTRACTION_DEGREE {
            return Err(Error::TooLarge {
                what: "|k| for coefficient contraction",
                limit: MAX_CONTRACTION_DEGREE as usize,
                requested: kd as usize,
            });
        }
        if qd > kd || (kd - qd) % 2 != 0 {
            return Err(Error::Parity {
                k_degree: kd,
                q_degree: qd,
            });
        }
        Ok((kd - qd) / 2)
    }

    /// `v[e]` for `v = A^{⊙q} ⊗ vec(M)^{⊗i}`.
    ///
    /// The first `|q|` slots pair with columns of `A` in increasing column order
    /// (column `j` repeated `q_j` times); the remaining slots are read pairwise,
    /// `(j_a, j_b)` selecting `M[j_b, j_a]`.
    fn entry(&self, slots: &[usize], q_cols: &[usize]) -> S {
        let (head, tail) = slots.split_at(q_cols.len());
        let mut acc = S::one();
        for (&row, &col) in head.iter().zip(q_cols) {
            acc = acc * self.a[(row, col)].clone();
        }
        for pair in tail.chunks_exact(2) {
            acc = acc * self.m[(pair[1], pair[0])].clone();
        }
        acc
    }

    fn contraction(&self, k: &MultiIndex, q: &MultiIndex, variant: CoeffVariant) -> Result<S> {
        let q_cols = sorted_tuple(q);
        match variant {
            CoeffVariant::Symmetrized => Ok(index_tuples(k)?
                .iter()
                .fold(S::zero(), |acc, e| acc + self.entry(e.slots(), &q_cols))),
            CoeffVariant::SingleSelector => Ok(self.entry(&sorted_tuple(k), &q_cols)),
        }
    }

    /// `T_{k,q}`.
    pub fn coeff(&self, k: &MultiIndex, q: &MultiIndex, variant: CoeffVariant) -> Result<S> {
        let i = self.validate(k, q)?;
        let contraction = self.contraction(k, q, variant)?;
        if contraction.is_zero() {
            return Ok(contraction);
        }
        let denom = S::from_biguint(&(q.factorial() * factorial(i)))
            * (S::from_i64(2) * self.pair_scale.clone()).powu(i);
        Ok(S::from_biguint(&k.factorial()) / denom * contraction)
    }

    /// All nonzero terms of the expansion of `H_k`, ordered by `|q|` descending,
    /// then descending-lexicographic `q`.
    pub fn expand(&self, k: &MultiIndex, variant: CoeffVariant) -> Result<Vec<ExpansionTerm<S>>> {
        let q0 = MultiIndex::zeros(self.m_dim())?;
        self.validate(k, &q0).or_else(|e| match e {
            Error::Parity { .. } => Ok(0),
            other => Err(other),
        })?;
        let mut terms = Vec::new();
        for d in q_support(k.degree()) {
            for q in enumerate_fixed_degree(self.m_dim(), d)? {
                let coeff = self.coeff(k, &q, variant)?;
                terms.push(ExpansionTerm { q, coeff });
            }
        }
        Ok(suppress_zeros(terms))
    }
}

/// Exact fields drop exact zeros; floats drop `|T| <= 1e-14 · max|T|`.
fn suppress_zeros<S: Scalar>(terms: Vec<ExpansionTerm<S>>) -> Vec<ExpansionTerm<S>> {
    if S::EXACT {
        return terms.into_iter().filter(|t| !t.coeff.is_zero()).collect();
    }
    let max = terms
        .iter()
        .map(|t| t.coeff.to_f64().abs())
        .fold(0.0, f64::max);
    terms
        .into_iter()
        .filter(|t| !t.coeff.is_zero() && t.coeff.to_f64().abs() > ZERO_RTOL * max)
        .collect()
}

/// Relative threshold below which float coefficients are dropped from expansions.
pub const ZERO_RTOL: f64 = 1e-14;

fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, i| acc * BigUint::from(i))
}

/// `T_{k,q}(Λ; Σ, Υ)` for `Λ ∈ R^{m×n}`.
pub fn coeff_general<S: Scalar>(
    k: &MultiIndex,
    q: &MultiIndex,
    lambda: &DenseMatrix<S>,
    sigma: &SpdMatrix<S>,
    upsilon: &SpdMatrix<S>,
    variant: CoeffVariant,
) -> Result<S> {
    TransformedMap::new(lambda, sigma, upsilon)?.coeff(k, q, variant)
}

pub fn expand_general<S: Scalar>(
    k: &MultiIndex,
    lambda: &DenseMatrix<S>,
    sigma: &SpdMatrix<S>,
    upsilon: &SpdMatrix<S>,
    variant: CoeffVariant,
) -> Result<Vec<ExpansionTerm<S>>> {
    TransformedMap::new(lambda, sigma, upsilon)?.expand(k, variant)
}

/// `T_{k,q}(Λ; σ²)`, the `Σ = σ²I_n`, `Υ = σ²I_m` case.
pub fn coeff_isotropic<S: Scalar>(
    k: &MultiIndex,
    q: &MultiIndex,
    lambda: &DenseMatrix<S>,
    sigma2: S,
    variant: CoeffVariant,
) -> Result<S> {
    TransformedMap::isotropic(lambda, sigma2)?.coeff(k, q, variant)
}

fn inner_product_order(k: u32, q: &MultiIndex, lambda_len: usize) -> Result<u32> {
    if q.arity() != lambda_len {
        return Err(Error::Dimension {
            expected: lambda_len,
            found: q.arity(),
            what: "arity of q",
        });
    }
    if k > MAX_DEGREE {
        return Err(Error::TooLarge {
            what: "Hermite degree",
            limit: MAX_DEGREE as usize,
            requested: k as usize,
        });
    }
    let qd = q.degree();
    if qd > k || !(k - qd).is_multiple_of(2) {
        return Err(Error::Parity {
            k_degree: k,
            q_degree: qd,
        });
    }
    Ok((k - qd) / 2)
}

/// `T_{k,q}(λ; σ²) = k!/((2σ²)^i q! i!) · λ^q (‖λ‖² - 1)^i` for `He_k(λᵀx)`-type
/// expansions; `Probabilists` is `σ² = 1`, `Physicists` is `σ² = ½`.
pub fn coeff_inner_product<S: Scalar>(
    k: u32,
    q: &MultiIndex,
    lambda: &[S],
    family: &UnivariateFamily<S>,
) -> Result<S> {
    let i = inner_product_order(k, q, lambda.len())?;
    let two_sigma2 = match family {
        UnivariateFamily::Probabilists => S::from_i64(2),
        UnivariateFamily::Physicists => S::one(),
        UnivariateFamily::Scaled(s) => {
            if !(s.is_finite() && *s > S::zero()) {
                return Err(Error::Domain("variance must be positive and finite"));
            }
            S::from_i64(2) * s.clone()
        }
    };
    let norm2_minus_one = lambda
        .iter()
        .fold(S::zero(), |acc, l| acc + l.clone() * l.clone())
        - S::one();
    let shape = q.monomial(lambda)? * norm2_minus_one.powu(i);
    if shape.is_zero() {
        return Ok(shape);
    }
    let denom = S::from_biguint(&(q.factorial() * factorial(i))) * two_sigma2.powu(i);
    Ok(S::from_biguint(&factorial(k)) / denom * shape)
}

/// `Te_{k,q}(λ)`, coefficients of `He_k(λᵀx) = Σ_q Te_{k,q} ∏_j He_{q_j}(x_j)`.
pub fn coeff_vec_prob<S: Scalar>(k: u32, q: &MultiIndex, lambda: &[S]) -> Result<S> {
    coeff_inner_product(k, q, lambda, &UnivariateFamily::Probabilists)
}

/// `T_{k,q}(λ)`, coefficients of `H_k(λᵀx) = Σ_q T_{k,q} ∏_j H_{q_j}(x_j)`.
pub fn coeff_vec_phys<S: Scalar>(k: u32, q: &MultiIndex, lambda: &[S]) -> Result<S> {
    coeff_inner_product(k, q, lambda, &UnivariateFamily::Physicists)
}

/// Nonzero terms of the inner-product expansion of `P_k(λᵀx)`.
pub fn expand_inner_product<S: Scalar>(
    k: u32,
    lambda: &[S],
    family: &UnivariateFamily<S>,
) -> Result<Vec<ExpansionTerm<S>>> {
    if lambda.is_empty() {
        return Err(Error::InvalidArity);
    }
    let mut terms = Vec::new();
    for d in q_support(k) {
        for q in enumerate_fixed_degree(lambda.len(), d)? {
            let coeff = coeff_inner_product(k, &q, lambda, family)?;
            terms.push(ExpansionTerm { q, coeff });
        }
    }
    Ok(suppress_zeros(terms))
}

/// Coefficient of `P_{k-2i}(x)` in the univariate multiplication theorem
/// `P_k(λx) = Σ_i c_i P_{k-2i}(x)`.
pub fn coeff_univariate<S: Scalar>(k: u32, i: u32, lambda: &S, family: &UnivariateFamily<S>) -> Result<S> {
    if i > k / 2 {
        return Err(Error::OutOfRange {
            what: "univariate term index i",
            index: i as usize,
            bound: (k / 2) as usize,
        });
    }
    let q = MultiIndex::new(alloc::vec![k - 2 * i])?;
    coeff_inner_product(k, &q, core::slice::from_ref(lambda), family)
}

/// `Σ_terms T·H_q(x)` in the order given, together with `Σ |T·H_q|`.
pub fn evaluate_expansion<S: Scalar>(
    terms: &[ExpansionTerm<S>],
    x: &[S],
    family: &HermiteFamily<S>,
) -> Result<(S, S)> {
    let mut general = match family {
        HermiteFamily::General(sigma) => Some(HermiteEvaluator::new(sigma.inverse().clone(), x)?),
        _ => None,
    };
    let mut value = S::zero();
    let mut magnitude = S::zero();
    for term in terms {
        let h = match general.as_mut() {
            Some(ev) => ev.eval(&term.q)?,
            None => family.eval(&term.q, x)?,
        };
        let contribution = term.coeff.clone() * h;
        magnitude = magnitude + contribution.magnitude();
        value = value + contribution;
    }
    Ok((value, magnitude))
}
