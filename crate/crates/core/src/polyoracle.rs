//! Exact sparse multivariate polynomials over `BigRational`, and the symbolic
//! oracle that checks the multiplication theorem by brute-force expansion.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::coeffs::{CoeffVariant, TransformedMap};
use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::scalar::Scalar;
use crate::tensorlin::DenseMatrix;

pub type RationalMatrix = DenseMatrix<BigRational>;

/// Largest `|k|` for [`hermite_symbolic`].
pub const MAX_SYMBOLIC_DEGREE: u32 = 8;

/// Sparse polynomial in `arity` variables with exact rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is polynomial
/// equality. Monomials iterate in canonical multi-index order.
#[derive(Clone, PartialEq, Eq)]
pub struct MPoly {
    arity: usize,
    terms: BTreeMap<MultiIndex, BigRational>,
}

impl MPoly {
    pub fn zero(arity: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidArity);
        }
        Ok(MPoly {
            arity,
            terms: BTreeMap::new(),
        })
    }

    pub fn constant(arity: usize, c: BigRational) -> Result<Self> {
        let mut p = Self::zero(arity)?;
        p.add_term(MultiIndex::zeros(arity)?, c);
        Ok(p)
    }

    pub fn one(arity: usize) -> Result<Self> {
        Self::constant(arity, BigRational::one())
    }

    /// The coordinate function `x_i` (0-based).
    pub fn variable(arity: usize, i: usize) -> Result<Self> {
        let mut p = Self::zero(arity)?;
        p.add_term(MultiIndex::unit(arity, i)?, BigRational::one());
        Ok(p)
    }

    /// Builds a polynomial from `(monomial, coefficient)` pairs, merging repeats.
    pub fn from_terms<I>(arity: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, BigRational)>,
    {
        let mut p = Self::zero(arity)?;
        for (mono, c) in terms {
            if mono.arity() != arity {
                return Err(Error::Dimension {
                    expected: arity,
                    found: mono.arity(),
                    what: "monomial arity",
                });
            }
            p.add_term(mono, c);
        }
        Ok(p)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, mono: &MultiIndex) -> BigRational {
        self.terms.get(mono).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).max()
    }

    fn add_term(&mut self, mono: MultiIndex, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono);
        match entry {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check_arity(&self, other: &MPoly) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::Dimension {
                expected: self.arity,
                found: other.arity,
                what: "polynomial arity",
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &MPoly) -> Result<MPoly> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MPoly) -> Result<MPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> MPoly {
        if c.is_zero() {
            return MPoly {
                arity: self.arity,
                terms: BTreeMap::new(),
            };
        }
        MPoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &MPoly) -> Result<MPoly> {
        self.check_arity(other)?;
        let mut out = MPoly {
            arity: self.arity,
            terms: BTreeMap::new(),
        };
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let parts = ma.parts().iter().zip(mb.parts()).map(|(a, b)| a + b).collect();
                out.add_term(MultiIndex::new(parts)?, ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<MPoly> {
        let mut acc = MPoly::one(self.arity)?;
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `∂P/∂x_i` (0-based coordinate).
    pub fn derivative(&self, i: usize) -> Result<MPoly> {
        if i >= self.arity {
            return Err(Error::OutOfRange {
                what: "coordinate",
                index: i,
                bound: self.arity,
            });
        }
        let mut out = MPoly {
            arity: self.arity,
            terms: BTreeMap::new(),
        };
        for (m, c) in &self.terms {
            let e = m.parts()[i];
            if e == 0 {
                continue;
            }
            let lowered = m.with_decremented(i).expect("positive exponent");
            out.add_term(lowered, c.clone() * BigRational::from_u64(e as u64));
        }
        Ok(out)
    }

    /// Substitutes `y = Lx`: the result is `P(Lx)` as a polynomial in `x ∈ R^m`
    /// for `L` of shape `arity × m`.
    pub fn compose_linear(&self, l: &RationalMatrix) -> Result<MPoly> {
        if l.rows() != self.arity {
            return Err(Error::Dimension {
                expected: self.arity,
                found: l.rows(),
                what: "substitution matrix rows",
            });
        }
        let m = l.cols();
        let forms: Vec<MPoly> = (0..self.arity)
            .map(|i| {
                MPoly::from_terms(
                    m,
                    l.row(i)
                        .iter()
                        .enumerate()
                        .map(|(j, c)| (MultiIndex::unit(m, j).expect("in range"), c.clone())),
                )
            })
            .collect::<Result<_>>()?;
        // powers of each linear form, grown on demand
        let mut powers: Vec<Vec<MPoly>> = (0..self.arity).map(|_| Vec::new()).collect();
        let mut out = MPoly::zero(m)?;
        for (mono, c) in &self.terms {
            let mut prod = MPoly::constant(m, c.clone())?;
            for (i, &e) in mono.parts().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[i];
                if cache.is_empty() {
                    cache.push(MPoly::one(m)?);
                }
                while cache.len() <= e as usize {
                    let next = cache.last().expect("nonempty").mul(&forms[i])?;
                    cache.push(next);
                }
                prod = prod.mul(&cache[e as usize])?;
            }
            out = out.add(&prod)?;
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[BigRational]) -> Result<BigRational> {
        if point.len() != self.arity {
            return Err(Error::Dimension {
                expected: self.arity,
                found: point.len(),
                what: "evaluation point",
            });
        }
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            acc += c.clone() * m.monomial(point)?;
        }
        Ok(acc)
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}")?;
            for (i, &e) in m.parts().iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

fn check_exact_symmetric(b: &RationalMatrix) -> Result<()> {
    if !b.is_square() {
        return Err(Error::Dimension {
            expected: b.rows(),
            found: b.cols(),
            what: "square matrix",
        });
    }
    match b.asymmetry() {
        Some((row, col)) => Err(Error::NotSymmetric { row, col }),
        None => Ok(()),
    }
}

/// Symbolic Hermite polynomials `P_k(x)` with `∂^k e^{-½xᵀBx} = (-1)^{|k|} P_k e^{-½xᵀBx}`,
/// built purely by differentiation: `P_{k+e_i} = (Bx)_i P_k - ∂_i P_k`.
///
/// Results are memoized so a whole family for one `B` shares work.
pub struct SymbolicHermite {
    linear: Vec<MPoly>,
    memo: BTreeMap<MultiIndex, MPoly>,
}

impl SymbolicHermite {
    pub fn new(b: &RationalMatrix) -> Result<Self> {
        check_exact_symmetric(b)?;
        let n = b.rows();
        let linear = (0..n)
            .map(|i| {
                MPoly::from_terms(
                    n,
                    b.row(i)
                        .iter()
                        .enumerate()
                        .map(|(j, c)| (MultiIndex::unit(n, j).expect("in range"), c.clone())),
                )
            })
            .collect::<Result<_>>()?;
        Ok(SymbolicHermite {
            linear,
            memo: BTreeMap::new(),
        })
    }

    pub fn get(&mut self, k: &MultiIndex) -> Result<MPoly> {
        let n = self.linear.len();
        if k.arity() != n {
            return Err(Error::Dimension {
                expected: n,
                found: k.arity(),
                what: "multi-index arity",
            });
        }
        if k.degree() > MAX_SYMBOLIC_DEGREE {
            return Err(Error::TooLarge {
                what: "|k| for symbolic Hermite polynomial",
                limit: MAX_SYMBOLIC_DEGREE as usize,
                requested: k.degree() as usize,
            });
        }
        self.build(k)
    }

    fn build(&mut self, k: &MultiIndex) -> Result<MPoly> {
        if k.is_zero() {
            return MPoly::one(k.arity());
        }
        if let Some(p) = self.memo.get(k) {
            return Ok(p.clone());
        }
        let i = k.parts().iter().position(|&p| p > 0).expect("nonzero index");
        let prev = k.with_decremented(i).expect("positive part");
        let p_prev = self.build(&prev)?;
        let p = self.linear[i].mul(&p_prev)?.sub(&p_prev.derivative(i)?)?;
        self.memo.insert(k.clone(), p.clone());
        Ok(p)
    }
}

/// `H_k(x; B⁻¹)` as an exact polynomial, for symmetric `B`.
pub fn hermite_symbolic(k: &MultiIndex, b: &RationalMatrix) -> Result<MPoly> {
    SymbolicHermite::new(b)?.get(k)
}

/// Outcome of [`oracle_compare`].
#[derive(Clone, Debug, PartialEq)]
pub struct OracleComparison {
    pub equal: bool,
    /// `H_k(Λᵀx; Σ)` expanded in `x`.
    pub lhs: MPoly,
    /// `Σ_q T_{k,q} H_q(x; Υ)` expanded in `x`.
    pub rhs: MPoly,
    /// `lhs - rhs`.
    pub diff: MPoly,
}

/// Checks the multiplication theorem for one instance as an exact polynomial identity.
///
/// `Σ` and `Υ` need only be symmetric and invertible.
pub fn oracle_compare(
    k: &MultiIndex,
    lambda: &RationalMatrix,
    sigma: &RationalMatrix,
    upsilon: &RationalMatrix,
    variant: CoeffVariant,
) -> Result<OracleComparison> {
    check_exact_symmetric(sigma)?;
    check_exact_symmetric(upsilon)?;
    let sigma_inv = sigma.inverse()?;
    let upsilon_inv = upsilon.inverse()?;
    let lhs = SymbolicHermite::new(&sigma_inv)?
        .get(k)?
        .compose_linear(&lambda.transpose())?;
    let terms = TransformedMap::from_precision(lambda, &sigma_inv, upsilon)?.expand(k, variant)?;
    let mut family = SymbolicHermite::new(&upsilon_inv)?;
    let mut rhs = MPoly::zero(lambda.rows())?;
    for term in &terms {
        rhs = rhs.add(&family.get(&term.q)?.scale(&term.coeff))?;
    }
    let diff = lhs.sub(&rhs)?;
    Ok(OracleComparison {
        equal: diff.is_zero(),
        lhs,
        rhs,
        diff,
    })
}
