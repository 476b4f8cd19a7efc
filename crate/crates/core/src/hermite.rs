//! Univariate and multivariate Hermite polynomial evaluation.
//!
//! The general family is `H_k(x; Σ) = (-1)^{|k|} e^{½xᵀΣ⁻¹x} ∂^k e^{-½xᵀΣ⁻¹x}`;
//! probabilists' `He_k` is `Σ = I` and physicists' `H_k` is `Σ = ½I`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::multiindex::{enumerate_up_to_degree, MultiIndex};
use crate::scalar::Scalar;
use crate::tensorlin::{DenseMatrix, SpdMatrix};

/// Highest degree accepted by the evaluators.
pub const MAX_DEGREE: u32 = 60;

/// Highest truncation degree for [`gf_partial_sum`].
pub const MAX_GF_DEGREE: u32 = 12;

/// Univariate Hermite family.
#[derive(Clone, Debug, PartialEq)]
pub enum UnivariateFamily<S> {
    /// `He_k`, weight `e^{-x²/2}`.
    Probabilists,
    /// `H_k`, weight `e^{-x²}`.
    Physicists,
    /// `H_k(·; σ²)` with the given variance `σ² > 0`.
    Scaled(S),
}

/// Hermite family over `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub enum HermiteFamily<S> {
    Probabilists,
    Physicists,
    Scaled(S),
    General(SpdMatrix<S>),
}

fn check_degree(degree: u32) -> Result<()> {
    if degree > MAX_DEGREE {
        return Err(Error::TooLarge {
            what: "Hermite degree",
            limit: MAX_DEGREE as usize,
            requested: degree as usize,
        });
    }
    Ok(())
}

/// Coefficients `(a, b)` of `P_{k+1} = a·x·P_k - b·k·P_{k-1}`.
fn recurrence_coefficients<S: Scalar>(family: &UnivariateFamily<S>) -> Result<(S, S)> {
    match family {
        UnivariateFamily::Probabilists => Ok((S::one(), S::one())),
        UnivariateFamily::Physicists => Ok((S::from_i64(2), S::from_i64(2))),
        UnivariateFamily::Scaled(sigma2) => {
            if !(sigma2.is_finite() && *sigma2 > S::zero()) {
                return Err(Error::Domain("variance must be positive and finite"));
            }
            let inv = S::one() / sigma2.clone();
            Ok((inv.clone(), inv))
        }
    }
}

/// Evaluates a univariate Hermite polynomial by its three-term recurrence.
pub fn hermite_uni<S: Scalar>(family: &UnivariateFamily<S>, k: u32, x: &S) -> Result<S> {
    if !x.is_finite() {
        return Err(Error::Domain("evaluation point must be finite"));
    }
    check_degree(k)?;
    let (a, b) = recurrence_coefficients(family)?;
    let ax = a * x.clone();
    let mut prev = S::zero();
    let mut cur = S::one();
    for j in 0..k {
        let next = ax.clone() * cur.clone() - b.clone() * S::from_u64(j as u64) * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `∏_i P_{k_i}(x_i)` for a univariate family `P`.
pub fn hermite_multi_product<S: Scalar>(
    k: &MultiIndex,
    x: &[S],
    family: &UnivariateFamily<S>,
) -> Result<S> {
    if x.len() != k.arity() {
        return Err(Error::Dimension {
            expected: k.arity(),
            found: x.len(),
            what: "Hermite argument",
        });
    }
    k.parts()
        .iter()
        .zip(x)
        .try_fold(S::one(), |acc, (&ki, xi)| Ok(acc * hermite_uni(family, ki, xi)?))
}

/// `H_k(x; Σ)` for general SPD `Σ`.
pub fn hermite_multi<S: Scalar>(k: &MultiIndex, x: &[S], sigma: &SpdMatrix<S>) -> Result<S> {
    if sigma.dim() != k.arity() {
        return Err(Error::Dimension {
            expected: k.arity(),
            found: sigma.dim(),
            what: "covariance dimension",
        });
    }
    HermiteEvaluator::new(sigma.inverse().clone(), x)?.eval(k)
}

/// `H_k(x; B⁻¹)` given the precision matrix `B` directly, raising coordinates in
/// the priority given by `order` (a permutation of `0..n`).
pub fn hermite_multi_with_order<S: Scalar>(
    k: &MultiIndex,
    x: &[S],
    precision: &DenseMatrix<S>,
    order: &[usize],
) -> Result<S> {
    HermiteEvaluator::with_order(precision.clone(), x, order.to_vec())?.eval(k)
}

/// Memoized evaluator for `H_k(x; B⁻¹)` at a fixed point `x`.
///
/// Uses `H_{k+e_i} = (Bx)_i H_k - Σ_j k_j B_ij H_{k-e_j}`. The memo lives as long
/// as the evaluator, so evaluating many indices at one point shares work.
#[derive(Clone, Debug)]
pub struct HermiteEvaluator<S> {
    precision: DenseMatrix<S>,
    bx: Vec<S>,
    order: Vec<usize>,
    memo: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> HermiteEvaluator<S> {
    pub fn new(precision: DenseMatrix<S>, x: &[S]) -> Result<Self> {
        let order = (0..precision.rows()).collect();
        Self::with_order(precision, x, order)
    }

    pub fn with_order(precision: DenseMatrix<S>, x: &[S], order: Vec<usize>) -> Result<Self> {
        let n = precision.rows();
        if !precision.is_square() {
            return Err(Error::Dimension {
                expected: n,
                found: precision.cols(),
                what: "precision matrix must be square",
            });
        }
        if x.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: x.len(),
                what: "Hermite argument",
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("evaluation point must be finite"));
        }
        let mut seen = alloc::vec![false; n];
        for &i in &order {
            if i >= n || seen[i] {
                return Err(Error::Domain("increment order must be a permutation"));
            }
            seen[i] = true;
        }
        if order.len() != n {
            return Err(Error::Domain("increment order must be a permutation"));
        }
        let bx = precision.matvec(x)?.into_inner();
        Ok(HermiteEvaluator {
            precision,
            bx,
            order,
            memo: BTreeMap::new(),
        })
    }

    pub fn eval(&mut self, k: &MultiIndex) -> Result<S> {
        if k.arity() != self.bx.len() {
            return Err(Error::Dimension {
                expected: self.bx.len(),
                found: k.arity(),
                what: "multi-index arity",
            });
        }
        check_degree(k.degree())?;
        Ok(self.eval_unchecked(k))
    }

    fn eval_unchecked(&mut self, k: &MultiIndex) -> S {
        if k.is_zero() {
            return S::one();
        }
        if let Some(v) = self.memo.get(k) {
            return v.clone();
        }
        // the coordinate raised last under the priority order
        let i = *self
            .order
            .iter()
            .rev()
            .find(|&&i| k.parts()[i] > 0)
            .expect("nonzero index");
        let prev = k.with_decremented(i).expect("positive part");
        let mut value = self.bx[i].clone() * self.eval_unchecked(&prev);
        for j in 0..prev.arity() {
            let pj = prev.parts()[j];
            if pj == 0 || self.precision[(i, j)].is_zero() {
                continue;
            }
            let lower = prev.with_decremented(j).expect("positive part");
            let h = self.eval_unchecked(&lower);
            value = value - S::from_u64(pj as u64) * self.precision[(i, j)].clone() * h;
        }
        self.memo.insert(k.clone(), value.clone());
        value
    }
}

impl<S: Scalar> HermiteFamily<S> {
    pub fn eval(&self, k: &MultiIndex, x: &[S]) -> Result<S> {
        match self {
            HermiteFamily::Probabilists => {
                hermite_multi_product(k, x, &UnivariateFamily::Probabilists)
            }
            HermiteFamily::Physicists => hermite_multi_product(k, x, &UnivariateFamily::Physicists),
            HermiteFamily::Scaled(s) => {
                hermite_multi_product(k, x, &UnivariateFamily::Scaled(s.clone()))
            }
            HermiteFamily::General(sigma) => hermite_multi(k, x, sigma),
        }
    }
}

/// `Σ_{|k| <= D} t^k / k! · H_k(x; Σ)`, the truncated generating function.
pub fn gf_partial_sum<S: Scalar>(t: &[S], x: &[S], sigma: &SpdMatrix<S>, degree: u32) -> Result<S> {
    if degree > MAX_GF_DEGREE {
        return Err(Error::TooLarge {
            what: "generating-function truncation degree",
            limit: MAX_GF_DEGREE as usize,
            requested: degree as usize,
        });
    }
    let n = sigma.dim();
    if t.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: t.len(),
            what: "generating-function parameter",
        });
    }
    let mut ev = HermiteEvaluator::new(sigma.inverse().clone(), x)?;
    let mut sum = S::zero();
    // lowest degree first
    for k in enumerate_up_to_degree(n, degree)?.iter().rev() {
        let term = k.monomial(t)? / k.factorial_scalar::<S>() * ev.eval(k)?;
        sum = sum + term;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use num_rational::BigRational;

    fn mi(p: &[u32]) -> MultiIndex {
        MultiIndex::new(p.to_vec()).unwrap()
    }

    #[test]
    fn univariate_examples() {
        let he = UnivariateFamily::<f64>::Probabilists;
        assert_eq!(hermite_uni(&he, 0, &7.5).unwrap(), 1.0);
        assert_eq!(hermite_uni(&he, 2, &2.0).unwrap(), 3.0);
        assert_eq!(hermite_uni(&UnivariateFamily::Physicists, 2, &1.0).unwrap(), 2.0);
        // He_3(x) = x³ - 3x, H_3(x) = 8x³ - 12x
        assert_eq!(hermite_uni(&he, 3, &2.0).unwrap(), 2.0);
        assert_eq!(hermite_uni(&UnivariateFamily::Physicists, 3, &2.0).unwrap(), 40.0);
    }

    #[test]
    fn univariate_errors() {
        let he = UnivariateFamily::<f64>::Probabilists;
        assert!(matches!(hermite_uni(&he, 2, &f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(hermite_uni(&he, 61, &1.0), Err(Error::TooLarge { .. })));
        assert!(matches!(
            hermite_uni(&UnivariateFamily::Scaled(0.0), 2, &1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn scaled_family_matches_named_families() {
        for k in 0..=12 {
            for &x in &[-2.5, -0.3, 0.0, 1.1, 3.0] {
                let he = hermite_uni(&UnivariateFamily::Probabilists, k, &x).unwrap();
                let s1 = hermite_uni(&UnivariateFamily::Scaled(1.0), k, &x).unwrap();
                let h = hermite_uni(&UnivariateFamily::Physicists, k, &x).unwrap();
                let s_half = hermite_uni(&UnivariateFamily::Scaled(0.5), k, &x).unwrap();
                assert!((he - s1).abs() <= 1e-12 * f64::max(1.0, he.abs()));
                assert!((h - s_half).abs() <= 1e-12 * f64::max(1.0, h.abs()));
            }
        }
    }

    #[test]
    fn multivariate_examples() {
        let sigma = SpdMatrix::factorize(DenseMatrix::from_rows(vec![
            vec![2.0, 0.5],
            vec![0.5, 1.0],
        ]).unwrap())
        .unwrap();
        let x = [0.3, -1.2];
        assert_eq!(hermite_multi(&mi(&[0, 0]), &x, &sigma).unwrap(), 1.0);
        let bx = sigma.inverse_apply(&x).unwrap();
        assert!((hermite_multi(&mi(&[1, 0]), &x, &sigma).unwrap() - bx[0]).abs() < 1e-15);
        assert!((hermite_multi(&mi(&[0, 1]), &x, &sigma).unwrap() - bx[1]).abs() < 1e-15);

        let id = SpdMatrix::factorize(DenseMatrix::<f64>::identity(2)).unwrap();
        let (a, b) = (0.7, -1.9);
        let v = hermite_multi(&mi(&[1, 2]), &[a, b], &id).unwrap();
        assert!((v - a * (b * b - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn product_examples() {
        let he = UnivariateFamily::<f64>::Probabilists;
        assert_eq!(hermite_multi_product(&mi(&[1, 1]), &[2.0, 3.0], &he).unwrap(), 6.0);
        assert_eq!(
            hermite_multi_product(&mi(&[0, 0, 0]), &[2.0, 3.0, 4.0], &UnivariateFamily::Physicists)
                .unwrap(),
            1.0
        );
        assert_eq!(hermite_multi_product(&mi(&[2, 1]), &[1.0, 3.0], &he).unwrap(), 0.0);
        assert!(hermite_multi_product(&mi(&[2, 1]), &[1.0], &he).is_err());
    }

    #[test]
    fn increment_order_does_not_matter_exactly() {
        let r = |p: i64, q: i64| BigRational::new(p.into(), q.into());
        let b = DenseMatrix::from_rows(vec![
            vec![r(3, 2), r(1, 3), r(0, 1)],
            vec![r(1, 3), r(2, 1), r(-1, 4)],
            vec![r(0, 1), r(-1, 4), r(1, 1)],
        ])
        .unwrap();
        let x = [r(1, 2), r(-2, 3), r(5, 7)];
        let k = mi(&[2, 1, 2]);
        let a = hermite_multi_with_order(&k, &x, &b, &[0, 1, 2]).unwrap();
        let c = hermite_multi_with_order(&k, &x, &b, &[2, 0, 1]).unwrap();
        let d = hermite_multi_with_order(&k, &x, &b, &[1, 2, 0]).unwrap();
        assert_eq!(a, c);
        assert_eq!(a, d);
        assert!(hermite_multi_with_order(&k, &x, &b, &[0, 0, 1]).is_err());
    }

    #[test]
    fn gf_examples() {
        let id = SpdMatrix::factorize(DenseMatrix::<f64>::identity(2)).unwrap();
        let (t, x) = ([0.05, -0.02], [0.4, 0.9]);
        assert_eq!(gf_partial_sum(&t, &x, &id, 0).unwrap(), 1.0);
        let d1 = gf_partial_sum(&t, &x, &id, 1).unwrap();
        assert!((d1 - (1.0 + t[0] * x[0] + t[1] * x[1])).abs() < 1e-15);
        assert_eq!(gf_partial_sum(&[0.0, 0.0], &x, &id, 7).unwrap(), 1.0);
        assert!(matches!(gf_partial_sum(&t, &x, &id, 13), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn dimension_errors() {
        let id = SpdMatrix::factorize(DenseMatrix::<f64>::identity(2)).unwrap();
        assert!(hermite_multi(&mi(&[1]), &[1.0], &id).is_err());
        assert!(hermite_multi(&mi(&[1, 0]), &[1.0], &id).is_err());
    }
}
