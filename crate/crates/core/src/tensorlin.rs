//! Dense matrices and vectors over a [`Scalar`] field, Kronecker products and
//! powers, columnwise Kronecker powers, `vec`, and SPD covariance handling.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Deref, Index, IndexMut};

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::scalar::Scalar;
use crate::MAX_TENSOR_LEN;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

/// Column vector.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseVector<S>(Vec<S>);

impl<S> DenseVector<S> {
    pub fn new(entries: Vec<S>) -> Self {
        DenseVector(entries)
    }

    pub fn into_inner(self) -> Vec<S> {
        self.0
    }
}

impl<S> Deref for DenseVector<S> {
    type Target = [S];

    fn deref(&self) -> &[S] {
        &self.0
    }
}

impl<S> From<Vec<S>> for DenseVector<S> {
    fn from(v: Vec<S>) -> Self {
        DenseVector(v)
    }
}

fn check_len(len: usize) -> Result<()> {
    if len > MAX_TENSOR_LEN {
        return Err(Error::TooLarge {
            what: "tensor length",
            limit: MAX_TENSOR_LEN,
            requested: len,
        });
    }
    Ok(())
}

fn checked_pow(base: usize, exp: u32) -> Result<usize> {
    base.checked_pow(exp)
        .filter(|&l| l <= MAX_TENSOR_LEN)
        .ok_or(Error::TooLarge {
            what: "tensor length",
            limit: MAX_TENSOR_LEN,
            requested: usize::MAX,
        })
}

impl<S: Scalar> DenseMatrix<S> {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArity);
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                expected: rows * cols,
                found: data.len(),
                what: "matrix data",
            });
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
            return Err(Error::Dimension {
                expected: ncols,
                found: bad.len(),
                what: "matrix row length",
            });
        }
        Self::from_row_major(nrows, ncols, rows.into_iter().flatten().collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, S::one())
    }

    pub fn scaled_identity(n: usize, s: S) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = s.clone();
        }
        m
    }

    /// A single column `v` as an `len × 1` matrix.
    pub fn column(v: &[S]) -> Self {
        DenseMatrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row_major(&self) -> &[S] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension {
                expected: self.cols,
                found: rhs.rows,
                what: "matrix product",
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = S::zero();
                for l in 0..self.cols {
                    acc = acc + self[(i, l)].clone() * rhs[(l, j)].clone();
                }
                out[(i, j)] = acc;
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[S]) -> Result<DenseVector<S>> {
        if self.cols != v.len() {
            return Err(Error::Dimension {
                expected: self.cols,
                found: v.len(),
                what: "matrix-vector product",
            });
        }
        Ok(DenseVector(
            (0..self.rows)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(v)
                        .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
                })
                .collect(),
        ))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::Dimension {
                expected: self.rows * self.cols,
                found: rhs.rows * rhs.cols,
                what: "matrix difference",
            });
        }
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        })
    }

    pub fn scale(&self, s: &S) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.clone() * s.clone()).collect(),
        }
    }

    /// First `(i, j)` with `i < j` where the entry pair fails the field's symmetry test.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                if !S::symmetric_pair(&self[(i, j)], &self[(j, i)]) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Inverse by Gauss-Jordan elimination with largest-magnitude pivoting.
    ///
    /// Exact over rationals; symmetry or definiteness is not required.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension {
                expected: self.rows,
                found: self.cols,
                what: "inverse of non-square matrix",
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let pivot = (c..n)
                .filter(|&r| !a[(r, c)].is_zero())
                .max_by(|&r1, &r2| {
                    a[(r1, c)]
                        .magnitude()
                        .partial_cmp(&a[(r2, c)].magnitude())
                        .unwrap_or(core::cmp::Ordering::Equal)
                })
                .ok_or(Error::Singular)?;
            a.swap_rows(c, pivot);
            inv.swap_rows(c, pivot);
            let p = a[(c, c)].clone();
            for j in 0..n {
                a[(c, j)] = a[(c, j)].clone() / p.clone();
                inv[(c, j)] = inv[(c, j)].clone() / p.clone();
            }
            for r in 0..n {
                if r == c || a[(r, c)].is_zero() {
                    continue;
                }
                let f = a[(r, c)].clone();
                for j in 0..n {
                    a[(r, j)] = a[(r, j)].clone() - f.clone() * a[(c, j)].clone();
                    inv[(r, j)] = inv[(r, j)].clone() - f.clone() * inv[(c, j)].clone();
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<S> Index<(usize, usize)> for DenseMatrix<S> {
    type Output = S;

    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for DenseMatrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

/// Kronecker product `A ⊗ B`.
pub fn kron<S: Scalar>(a: &DenseMatrix<S>, b: &DenseMatrix<S>) -> Result<DenseMatrix<S>> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    check_len(rows.saturating_mul(cols))?;
    let mut out = DenseMatrix::zeros(rows, cols);
    for ia in 0..a.rows {
        for ja in 0..a.cols {
            let s = &a[(ia, ja)];
            for ib in 0..b.rows {
                for jb in 0..b.cols {
                    out[(ia * b.rows + ib, ja * b.cols + jb)] = s.clone() * b[(ib, jb)].clone();
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of column vectors: entry `i*q + j` is `a_i b_j` (0-based).
pub fn kron_vec<S: Scalar>(a: &[S], b: &[S]) -> Result<DenseVector<S>> {
    check_len(a.len().saturating_mul(b.len()))?;
    Ok(DenseVector(
        a.iter()
            .flat_map(|ai| b.iter().map(move |bj| ai.clone() * bj.clone()))
            .collect(),
    ))
}

/// `v^{⊗p}`, with `v^{⊗0} = [1]`.
pub fn kron_power<S: Scalar>(v: &[S], p: u32) -> Result<DenseVector<S>> {
    checked_pow(v.len(), p)?;
    let mut acc = DenseVector(vec![S::one()]);
    for _ in 0..p {
        acc = kron_vec(&acc, v)?;
    }
    Ok(acc)
}

/// Columnwise Kronecker power `A^{⊙q} = A_{:1}^{⊗q_1} ⊗ ... ⊗ A_{:m}^{⊗q_m}`.
///
/// Satisfies `(Aᵀb)^q = (A^{⊙q})ᵀ b^{⊗|q|}`.
pub fn colwise_kron_power<S: Scalar>(a: &DenseMatrix<S>, q: &MultiIndex) -> Result<DenseVector<S>> {
    if q.arity() != a.cols {
        return Err(Error::Dimension {
            expected: a.cols,
            found: q.arity(),
            what: "columnwise Kronecker power index",
        });
    }
    checked_pow(a.rows, q.degree())?;
    let mut acc = DenseVector(vec![S::one()]);
    for (j, &qj) in q.parts().iter().enumerate() {
        let col = a.col(j);
        for _ in 0..qj {
            acc = kron_vec(&acc, &col)?;
        }
    }
    Ok(acc)
}

/// Column-stacking vectorization: entry `j*rows + i` is `M_ij` (0-based).
pub fn vec<S: Scalar>(m: &DenseMatrix<S>) -> DenseVector<S> {
    DenseVector(
        (0..m.cols)
            .flat_map(|j| (0..m.rows).map(move |i| m[(i, j)].clone()))
            .collect(),
    )
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Symmetric positive-definite matrix with a cached `LDLᵀ` factorization and inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct SpdMatrix<S> {
    matrix: DenseMatrix<S>,
    unit_lower: DenseMatrix<S>,
    diag: Vec<S>,
    inverse: DenseMatrix<S>,
}

impl<S: Scalar> SpdMatrix<S> {
    /// Validates symmetry and factorizes; a non-positive pivot rejects the matrix.
    pub fn factorize(matrix: DenseMatrix<S>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension {
                expected: matrix.rows,
                found: matrix.cols,
                what: "covariance must be square",
            });
        }
        if let Some((row, col)) = matrix.asymmetry() {
            return Err(Error::NotSymmetric { row, col });
        }
        let n = matrix.rows;
        let mut l = DenseMatrix::<S>::identity(n);
        let mut d: Vec<S> = Vec::with_capacity(n);
        for j in 0..n {
            let mut dj = matrix[(j, j)].clone();
            for k in 0..j {
                dj = dj - l[(j, k)].clone() * l[(j, k)].clone() * d[k].clone();
            }
            // NaN pivots are rejected too
            if dj.partial_cmp(&S::zero()) != Some(core::cmp::Ordering::Greater) {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            for i in j + 1..n {
                let mut s = matrix[(i, j)].clone();
                for k in 0..j {
                    s = s - l[(i, k)].clone() * l[(j, k)].clone() * d[k].clone();
                }
                l[(i, j)] = s / dj.clone();
            }
            d.push(dj);
        }
        let mut spd = SpdMatrix {
            matrix,
            unit_lower: l,
            diag: d,
            inverse: DenseMatrix::zeros(n, n),
        };
        let mut inverse = DenseMatrix::zeros(n, n);
        let mut e = vec![S::zero(); n];
        for j in 0..n {
            e[j] = S::one();
            let col = spd.solve(&e);
            for i in 0..n {
                inverse[(i, j)] = col[i].clone();
            }
            e[j] = S::zero();
        }
        spd.inverse = inverse;
        Ok(spd)
    }

    /// `σ² I_n`.
    pub fn scaled_identity(n: usize, sigma2: S) -> Result<Self> {
        Self::factorize(DenseMatrix::scaled_identity(n, sigma2))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn matrix(&self) -> &DenseMatrix<S> {
        &self.matrix
    }

    pub fn inverse(&self) -> &DenseMatrix<S> {
        &self.inverse
    }

    /// `S⁻¹ v`.
    pub fn inverse_apply(&self, v: &[S]) -> Result<DenseVector<S>> {
        if v.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: v.len(),
                what: "inverse_apply argument",
            });
        }
        Ok(DenseVector(self.solve(v)))
    }

    fn solve(&self, b: &[S]) -> Vec<S> {
        let n = self.dim();
        let l = &self.unit_lower;
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] = y[i].clone() - l[(i, k)].clone() * y[k].clone();
            }
        }
        for (yi, di) in y.iter_mut().zip(&self.diag) {
            *yi = yi.clone() / di.clone();
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] = y[i].clone() - l[(k, i)].clone() * y[k].clone();
            }
        }
        y
    }
}

impl SpdMatrix<f64> {
    /// Lower-triangular Cholesky factor `L` with `LLᵀ = S`.
    pub fn cholesky(&self) -> DenseMatrix<f64> {
        let n = self.dim();
        let mut c = self.unit_lower.clone();
        for j in 0..n {
            let s = num_traits::Float::sqrt(self.diag[j]);
            for i in j..n {
                c[(i, j)] *= s;
            }
        }
        c
    }
}
