//! Multi-indices, their enumeration, and the index-tuple sets used to address
//! symmetric tensor entries.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::{MAX_CONTRACTION_DEGREE, MAX_TENSOR_LEN};

/// An ordered tuple of naturals `k = (k_1, ..., k_n)` with `n >= 1`.
///
/// Ordering is graded, highest total degree first, then descending
/// lexicographic within a degree: `(2,0) < (1,1) < (0,2) < (1,0) < (0,1) < (0,0)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    parts: Vec<u32>,
}

impl MultiIndex {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidArity);
        }
        Ok(MultiIndex { parts })
    }

    pub fn zeros(arity: usize) -> Result<Self> {
        Self::new(vec![0; arity])
    }

    /// The unit index `e_i` (0-based coordinate).
    pub fn unit(arity: usize, i: usize) -> Result<Self> {
        let mut k = Self::zeros(arity)?;
        if i >= arity {
            return Err(Error::OutOfRange {
                what: "coordinate",
                index: i,
                bound: arity,
            });
        }
        k.parts[i] = 1;
        Ok(k)
    }

    pub fn arity(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// `|k|`.
    pub fn degree(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(|&p| p == 0)
    }

    /// `k! = ∏ k_i!`.
    pub fn factorial(&self) -> BigUint {
        self.parts
            .iter()
            .map(|&p| factorial(p))
            .fold(BigUint::one(), |acc, f| acc * f)
    }

    /// `k!` in the scalar field; only used below the contraction cap where it fits in `u64`.
    pub(crate) fn factorial_scalar<S: Scalar>(&self) -> S {
        self.parts
            .iter()
            .fold(S::one(), |acc, &p| acc * S::from_u64(factorial_u64(p)))
    }

    pub fn with_incremented(&self, i: usize) -> MultiIndex {
        let mut parts = self.parts.clone();
        parts[i] += 1;
        MultiIndex { parts }
    }

    pub fn with_decremented(&self, i: usize) -> Option<MultiIndex> {
        let mut parts = self.parts.clone();
        parts[i] = parts[i].checked_sub(1)?;
        Some(MultiIndex { parts })
    }

    /// `x^k = ∏ x_i^{k_i}`.
    pub fn monomial<S: Scalar>(&self, x: &[S]) -> Result<S> {
        if x.len() != self.arity() {
            return Err(Error::Dimension {
                expected: self.arity(),
                found: x.len(),
                what: "monomial argument",
            });
        }
        Ok(self
            .parts
            .iter()
            .zip(x)
            .fold(S::one(), |acc, (&p, xi)| acc * xi.powu(p)))
    }
}

impl TryFrom<Vec<u32>> for MultiIndex {
    type Error = Error;

    fn try_from(parts: Vec<u32>) -> Result<Self> {
        MultiIndex::new(parts)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .degree()
            .cmp(&self.degree())
            .then_with(|| self.arity().cmp(&other.arity()))
            .then_with(|| other.parts.cmp(&self.parts))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

pub(crate) fn factorial_u64(n: u32) -> u64 {
    (1..=n as u64).product()
}

fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// All multi-indices of the given arity and total degree, in canonical order.
pub fn enumerate_fixed_degree(arity: usize, degree: u32) -> Result<Vec<MultiIndex>> {
    if arity == 0 {
        return Err(Error::InvalidArity);
    }
    let mut out = Vec::new();
    let mut parts = vec![0u32; arity];
    fill_descending(&mut parts, 0, degree, &mut out);
    Ok(out)
}

fn fill_descending(parts: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == parts.len() {
        parts[pos] = remaining;
        out.push(MultiIndex {
            parts: parts.to_vec(),
        });
        return;
    }
    for p in (0..=remaining).rev() {
        parts[pos] = p;
        fill_descending(parts, pos + 1, remaining - p, out);
    }
}

/// All multi-indices with `|k| <= max_degree`, highest degree first.
pub fn enumerate_up_to_degree(arity: usize, max_degree: u32) -> Result<Vec<MultiIndex>> {
    let mut out = Vec::new();
    for d in (0..=max_degree).rev() {
        out.extend(enumerate_fixed_degree(arity, d)?);
    }
    Ok(out)
}

/// The admissible `|q|` values for an expansion of `H_k` with `|k| = degree`:
/// `[K, K-2, ..., K mod 2]`.
pub fn q_support(degree: u32) -> Vec<u32> {
    (0..=degree).rev().step_by(2).collect()
}

/// A tuple `(j_1, ..., j_K)` of 0-based coordinates in `[0, n)`.
///
/// Addresses an entry of an order-`K` tensor over `R^n`; the flat position is
/// `Σ_p j_p n^{K-1-p}`, the same layout `kron` produces.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexTuple {
    slots: Vec<usize>,
}

impl IndexTuple {
    pub fn new(slots: Vec<usize>) -> Self {
        IndexTuple { slots }
    }

    pub fn slots(&self) -> &[usize] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn flat_index(&self, n: usize) -> usize {
        self.slots.iter().fold(0, |acc, &j| acc * n + j)
    }

    /// Occurrence counts of each coordinate.
    pub fn counts(&self, arity: usize) -> Result<MultiIndex> {
        let mut parts = vec![0u32; arity];
        for &j in &self.slots {
            if j >= arity {
                return Err(Error::OutOfRange {
                    what: "tuple slot",
                    index: j,
                    bound: arity,
                });
            }
            parts[j] += 1;
        }
        MultiIndex::new(parts)
    }
}

/// Number of distinct tuples with occurrence counts `k`: `|k|! / k!`.
pub fn index_tuple_count(k: &MultiIndex) -> BigUint {
    factorial(k.degree()) / k.factorial()
}

/// Every distinct tuple whose occurrence counts equal `k`, in lexicographic order.
///
/// The first tuple is the sorted one, i.e. the single position selected by
/// `I_n^{⊙k}`.
pub fn index_tuples(k: &MultiIndex) -> Result<Vec<IndexTuple>> {
    let degree = k.degree();
    if degree > MAX_CONTRACTION_DEGREE {
        return Err(Error::TooLarge {
            what: "|k| for index-tuple enumeration",
            limit: MAX_CONTRACTION_DEGREE as usize,
            requested: degree as usize,
        });
    }
    let count = index_tuple_count(k);
    let count = usize::try_from(&count).unwrap_or(usize::MAX);
    if count > MAX_TENSOR_LEN {
        return Err(Error::TooLarge {
            what: "index-tuple set",
            limit: MAX_TENSOR_LEN,
            requested: count,
        });
    }
    let mut current = sorted_tuple(k);
    let mut out = Vec::with_capacity(count);
    loop {
        out.push(IndexTuple::new(current.clone()));
        if !next_permutation(&mut current) {
            break;
        }
    }
    Ok(out)
}

pub(crate) fn sorted_tuple(k: &MultiIndex) -> Vec<usize> {
    k.parts()
        .iter()
        .enumerate()
        .flat_map(|(j, &p)| core::iter::repeat_n(j, p as usize))
        .collect()
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(p: &[u32]) -> MultiIndex {
        MultiIndex::new(p.to_vec()).unwrap()
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(
            enumerate_fixed_degree(2, 2).unwrap(),
            vec![mi(&[2, 0]), mi(&[1, 1]), mi(&[0, 2])]
        );
        assert_eq!(enumerate_fixed_degree(1, 3).unwrap(), vec![mi(&[3])]);
        assert_eq!(enumerate_fixed_degree(3, 0).unwrap(), vec![mi(&[0, 0, 0])]);
        assert_eq!(enumerate_fixed_degree(0, 2), Err(Error::InvalidArity));
    }

    #[test]
    fn enumeration_is_sorted_by_ord() {
        let all = enumerate_up_to_degree(3, 4).unwrap();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
    }

    #[test]
    fn factorial_examples() {
        assert_eq!(mi(&[2, 0, 3]).factorial(), BigUint::from(12u32));
        assert_eq!(mi(&[0, 0]).factorial(), BigUint::from(1u32));
        assert_eq!(mi(&[1, 1]).factorial(), BigUint::from(1u32));
    }

    #[test]
    fn index_tuple_examples() {
        let t = |s: &[usize]| IndexTuple::new(s.to_vec());
        assert_eq!(index_tuples(&mi(&[1, 1])).unwrap(), vec![t(&[0, 1]), t(&[1, 0])]);
        assert_eq!(index_tuples(&mi(&[2, 0])).unwrap(), vec![t(&[0, 0])]);
        assert_eq!(index_tuples(&mi(&[0, 0])).unwrap(), vec![t(&[])]);
    }

    #[test]
    fn index_tuples_reject_large_degree() {
        let k = mi(&[13]);
        assert!(matches!(index_tuples(&k), Err(Error::TooLarge { .. })));
        // 12!/1 = 479001600 tuples: over the materialization cap
        let k = mi(&[1; 12]);
        assert!(matches!(index_tuples(&k), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn q_support_examples() {
        assert_eq!(q_support(5), vec![5, 3, 1]);
        assert_eq!(q_support(4), vec![4, 2, 0]);
        assert_eq!(q_support(0), vec![0]);
    }

    #[test]
    fn ordering_examples() {
        assert!(mi(&[2, 0]) < mi(&[1, 1]));
        assert!(mi(&[0, 2]) < mi(&[1, 0]));
        assert!(mi(&[0, 1]) < mi(&[0, 0]));
    }

    #[test]
    fn flat_index_matches_kron_layout() {
        // (j1, j2) over n = 3 maps to 3*j1 + j2
        assert_eq!(IndexTuple::new(vec![2, 1]).flat_index(3), 7);
        assert_eq!(IndexTuple::new(vec![]).flat_index(3), 0);
    }

    #[test]
    fn unit_and_monomial() {
        assert_eq!(MultiIndex::unit(3, 1).unwrap(), mi(&[0, 1, 0]));
        assert!(MultiIndex::unit(2, 2).is_err());
        assert_eq!(mi(&[2, 1]).monomial(&[3.0, 2.0]).unwrap(), 18.0);
    }
}
