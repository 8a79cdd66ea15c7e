//! Exact linear algebra over the rationals.
//!
//! A [`Matrix`] with `rows × cols` entries acts on column vectors as a linear
//! map `Q^cols → Q^rows`. A [`Subspace`] stores a basis of row vectors in
//! reduced row-echelon form, so two subspaces are equal as sets exactly when
//! their representations are equal.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use crate::scalar::Scalar;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch in {context}: {left} vs {right}")]
    DimensionMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },
    #[error("ragged matrix: row {row} has {found} entries, expected {expected}")]
    Ragged {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("invalid rational literal {0:?}")]
    BadScalar(String),
}

pub fn int(n: i64) -> Scalar {
    Scalar::from_i64(n)
}

pub fn ratio(p: i64, q: i64) -> Scalar {
    Scalar::new(p, q)
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_scalar(s: &str) -> Result<Scalar, LinalgError> {
    let bad = || LinalgError::BadScalar(s.to_string());
    let t = s.trim();
    let (p, q) = t.split_once('/').unwrap_or((t, "1"));
    let p: BigInt = p.trim().parse().map_err(|_| bad())?;
    let q: BigInt = q.trim().parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(Scalar::from_big(BigRational::new(p, q)))
}

/// Formats as `"p/q"`, omitting the denominator for integers.
pub fn format_scalar(x: &Scalar) -> String {
    x.to_string()
}

pub fn is_zero_vector(v: &[Scalar]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    /// Builds a matrix from row vectors. An empty list gives the 0×0 matrix.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows_with_cols(rows, cols)
    }

    /// Builds a matrix from row vectors that must all have `cols` entries.
    pub fn from_rows_with_cols(rows: Vec<Vec<Scalar>>, cols: usize) -> Result<Self, LinalgError> {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::Ragged {
                    row: i,
                    found: row.len(),
                    expected: cols,
                });
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: nrows,
            cols,
            data,
        })
    }

    /// Integer matrix literal, mostly for tests and fixtures. Panics on ragged input.
    pub fn from_i64<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let rows: Vec<Vec<Scalar>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| int(x)).collect())
            .collect();
        Self::from_rows(rows).expect("ragged integer matrix literal")
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Reinterprets a parsed matrix against an expected shape. A 0×0 parse
    /// (JSON `[]`) is accepted for any shape with zero rows.
    pub fn conform(self, rows: usize, cols: usize) -> Result<Self, LinalgError> {
        if self.rows == rows && self.cols == cols {
            return Ok(self);
        }
        if self.rows == 0 && rows == 0 {
            return Ok(Self::zeros(0, cols));
        }
        if self.rows != rows {
            return Err(LinalgError::DimensionMismatch {
                context: "matrix rows",
                left: self.rows,
                right: rows,
            });
        }
        Err(LinalgError::DimensionMismatch {
            context: "matrix columns",
            left: self.cols,
            right: cols,
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> impl Iterator<Item = &[Scalar]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// `self · v` for a column vector `v`.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "vector length does not match matrix columns");
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn checked_mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                context: "matrix product",
                left: self.cols,
                right: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(l, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: usize) -> Matrix {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut out = Matrix::identity(self.rows);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                context: "vertical stack",
                left: self.cols,
                right: other.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend(self.row(i).iter().cloned());
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Reduced row-echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                if !m[(r, j)].is_zero() {
                    m[(r, j)] *= &inv;
                }
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let t = &f * &m[(r, j)];
                    m[(i, j)] -= t;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Gauss–Jordan inverse; `None` if singular or non-square.
    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        });
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots.iter().take(n).any(|&p| p >= n) {
            return None;
        }
        Some(Matrix::from_fn(n, n, |i, j| red[(i, j + n)].clone()))
    }

    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        self.row_vectors()
            .map(|r| r.iter().map(format_scalar).collect())
            .collect()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;

    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        self.checked_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}", self.rows, self.cols)?;
        f.debug_list().entries(self.to_string_rows()).finish()
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_string_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<Vec<String>>::deserialize(d)?;
        let rows = raw
            .iter()
            .map(|r| r.iter().map(|s| parse_scalar(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        Matrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// Serde adapters for bare rational vectors (`["1", "-2/3"]`).
pub mod serde_vector {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Scalar], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(format_scalar).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Scalar>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| parse_scalar(s))
            .collect::<Result<_, _>>()
            .map_err(serde::de::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<Vec<Scalar>>, s: S) -> Result<S::Ok, S::Error> {
            v.as_ref()
                .map(|v| v.iter().map(format_scalar).collect::<Vec<_>>())
                .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Scalar>>, D::Error> {
            match Option::<Vec<String>>::deserialize(d)? {
                None => Ok(None),
                Some(v) => v
                    .iter()
                    .map(|s| parse_scalar(s))
                    .collect::<Result<Vec<_>, _>>()
                    .map(Some)
                    .map_err(serde::de::Error::custom),
            }
        }
    }
}

/// A subspace of `Q^n`, stored as the nonzero rows of a reduced row-echelon basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace {
    basis: Matrix,
}

/// Row space of `m`, in canonical form.
pub fn canonicalize(m: &Matrix) -> Subspace {
    let (red, pivots) = m.rref();
    let keep: Vec<usize> = (0..pivots.len()).collect();
    Subspace {
        basis: red.select_rows(&keep),
    }
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            basis: Matrix::zeros(0, ambient),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            basis: Matrix::identity(ambient),
        }
    }

    /// Span of the given vectors, each of length `ambient`.
    pub fn span<V: AsRef<[Scalar]>>(ambient: usize, vectors: &[V]) -> Result<Self, LinalgError> {
        let rows = vectors.iter().map(|v| v.as_ref().to_vec()).collect();
        Ok(canonicalize(&Matrix::from_rows_with_cols(rows, ambient)?))
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    /// Canonical basis, one vector per row.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[Scalar]> + '_ {
        self.basis.row_vectors()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.vectors()
            .map(|r| r.iter().position(|x| !x.is_zero()).expect("zero row in canonical basis"))
            .collect()
    }

    /// Coordinates of `v` in the canonical basis, or `None` if `v` is outside.
    /// For an echelon basis these are the entries of `v` at the pivot columns.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(v.len(), self.ambient_dim(), "vector length does not match ambient");
        let coords: Vec<Scalar> = self.pivots().into_iter().map(|p| v[p].clone()).collect();
        let mut rest = v.to_vec();
        for (c, row) in coords.iter().zip(self.vectors()) {
            if c.is_zero() {
                continue;
            }
            for (x, b) in rest.iter_mut().zip(row) {
                if !b.is_zero() {
                    *x -= c * b;
                }
            }
        }
        is_zero_vector(&rest).then_some(coords)
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.coordinates(v).is_some()
    }

    fn check_ambient(&self, other: &Subspace, context: &'static str) -> Result<(), LinalgError> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(LinalgError::DimensionMismatch {
                context,
                left: self.ambient_dim(),
                right: other.ambient_dim(),
            });
        }
        Ok(())
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool, LinalgError> {
        self.check_ambient(other, "subspace inclusion")?;
        Ok(self.dim() <= other.dim() && self.vectors().all(|v| other.contains(v)))
    }

    /// First basis vector of `self` that is not in `other`.
    pub fn first_outside(&self, other: &Subspace) -> Option<Vec<Scalar>> {
        self.vectors().find(|v| !other.contains(v)).map(<[Scalar]>::to_vec)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other, "subspace sum")?;
        Ok(canonicalize(&self.basis.vstack(&other.basis)?))
    }

    /// `self ∩ other`, via the left kernel of the stacked bases.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other, "subspace intersection")?;
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(self.ambient_dim()));
        }
        let stacked = self.basis.vstack(&other.basis)?;
        let relations = kernel(&stacked.transpose());
        let da = self.dim();
        let rows: Vec<Vec<Scalar>> = relations
            .vectors()
            .map(|rel| {
                let alpha = Matrix::from_rows_with_cols(vec![rel[..da].to_vec()], da).unwrap();
                (&alpha * &self.basis).row(0).to_vec()
            })
            .collect();
        Ok(canonicalize(&Matrix::from_rows_with_cols(rows, self.ambient_dim())?))
    }

    /// Rows spanning the annihilator `{y : y·x = 0 for all x in self}`.
    /// As a map `Q^n → Q^(n - dim)`, its kernel is exactly `self`.
    pub fn annihilator(&self) -> Matrix {
        kernel(&self.basis).basis.clone()
    }

    /// Vectors completing a basis of `self` to one of `larger`, picked greedily
    /// from the canonical basis of `larger`.
    pub fn complement_in(&self, larger: &Subspace) -> Result<Vec<Vec<Scalar>>, LinalgError> {
        self.check_ambient(larger, "complement")?;
        let mut span = self.clone();
        let mut out = Vec::new();
        for v in larger.vectors() {
            if span.dim() == larger.dim() {
                break;
            }
            if !span.contains(v) {
                span = span.sum(&Subspace::span(span.ambient_dim(), &[v])?)?;
                out.push(v.to_vec());
            }
        }
        Ok(out)
    }

    /// Maps every basis vector through `f`; the result is `f(self)`.
    pub fn map(&self, f: &Matrix) -> Result<Subspace, LinalgError> {
        image(f, self)
    }
}

/// Null space of `f` as a subspace of `Q^(f.ncols)`.
pub fn kernel(f: &Matrix) -> Subspace {
    let n = f.ncols();
    let (red, pivots) = f.rref();
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let rows: Vec<Vec<Scalar>> = (0..n)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Scalar::zero(); n];
            v[free] = Scalar::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -red[(r, free)].clone();
            }
            v
        })
        .collect();
    canonicalize(&Matrix::from_rows_with_cols(rows, n).unwrap())
}

/// `f(s)`, a subspace of `Q^(f.nrows)`.
pub fn image(f: &Matrix, s: &Subspace) -> Result<Subspace, LinalgError> {
    if f.ncols() != s.ambient_dim() {
        return Err(LinalgError::DimensionMismatch {
            context: "image",
            left: f.ncols(),
            right: s.ambient_dim(),
        });
    }
    if s.is_zero() {
        return Ok(Subspace::zero(f.nrows()));
    }
    Ok(canonicalize(&(s.basis() * &f.transpose())))
}

/// Image of the whole domain.
pub fn column_space(f: &Matrix) -> Subspace {
    canonicalize(&f.transpose())
}

/// `{v : f v ∈ s}`.
pub fn preimage(f: &Matrix, s: &Subspace) -> Result<Subspace, LinalgError> {
    if f.nrows() != s.ambient_dim() {
        return Err(LinalgError::DimensionMismatch {
            context: "preimage",
            left: f.nrows(),
            right: s.ambient_dim(),
        });
    }
    Ok(kernel(&(&s.annihilator() * f)))
}

/// Outcome of checking `im f = ker g` for `U --f--> V --g--> W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exactness {
    Exact,
    /// A vector of `im f` that `g` does not kill.
    ImageNotInKernel { witness: Vec<Scalar> },
    /// A vector of `ker g` outside `im f`.
    KernelNotInImage { witness: Vec<Scalar> },
}

impl Exactness {
    pub fn is_exact(&self) -> bool {
        matches!(self, Exactness::Exact)
    }

    pub fn witness(&self) -> Option<&[Scalar]> {
        match self {
            Exactness::Exact => None,
            Exactness::ImageNotInKernel { witness } | Exactness::KernelNotInImage { witness } => {
                Some(witness)
            }
        }
    }

    pub fn describe(&self) -> Option<&'static str> {
        match self {
            Exactness::Exact => None,
            Exactness::ImageNotInKernel { .. } => Some("image not contained in kernel"),
            Exactness::KernelNotInImage { .. } => Some("kernel not contained in image"),
        }
    }
}

pub fn exactness(f: &Matrix, g: &Matrix) -> Result<Exactness, LinalgError> {
    if f.nrows() != g.ncols() {
        return Err(LinalgError::DimensionMismatch {
            context: "exactness (f target vs g source)",
            left: f.nrows(),
            right: g.ncols(),
        });
    }
    let im = column_space(f);
    if let Some(v) = im.vectors().find(|v| !is_zero_vector(&g.apply(v))) {
        return Ok(Exactness::ImageNotInKernel { witness: v.to_vec() });
    }
    let ker = kernel(g);
    if ker.dim() != im.dim() {
        let witness = ker.first_outside(&im).expect("kernel strictly larger than image");
        return Ok(Exactness::KernelNotInImage { witness });
    }
    Ok(Exactness::Exact)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn span_i64(ambient: usize, vs: &[&[i64]]) -> Subspace {
        canonicalize(&Matrix::from_rows_with_cols(
            vs.iter().map(|v| v.iter().map(|&x| int(x)).collect()).collect(),
            ambient,
        )
        .unwrap())
    }

    #[test]
    fn canonicalize_examples() {
        let id = canonicalize(&Matrix::identity(2));
        assert_eq!(id.dim(), 2);
        assert_eq!(id.basis(), &Matrix::identity(2));

        let line = canonicalize(&Matrix::from_i64(&[[1, 2], [2, 4]]));
        assert_eq!(line.dim(), 1);
        assert_eq!(line.basis(), &Matrix::from_i64(&[[1, 2]]));

        let z = canonicalize(&Matrix::zeros(3, 3));
        assert_eq!(z.dim(), 0);
        assert_eq!(z, Subspace::zero(3));
    }

    #[test]
    fn sum_examples() {
        let v = span_i64(3, &[&[1, 1, 0], &[0, 0, 5]]);
        assert_eq!(v.sum(&v).unwrap(), v);
        let e1 = span_i64(2, &[&[1, 0]]);
        let e2 = span_i64(2, &[&[0, 1]]);
        assert_eq!(e1.sum(&e2).unwrap(), Subspace::full(2));
        let a = span_i64(3, &[&[1, 1, 0]]);
        let b = span_i64(3, &[&[1, -1, 0]]);
        assert_eq!(a.sum(&b).unwrap(), span_i64(3, &[&[1, 0, 0], &[0, 1, 0]]));
        assert!(matches!(
            a.sum(&e1),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn intersect_examples() {
        let e1 = span_i64(2, &[&[1, 0]]);
        let e2 = span_i64(2, &[&[0, 1]]);
        assert_eq!(e1.intersect(&e2).unwrap(), Subspace::zero(2));
        let a = span_i64(3, &[&[1, 0, 0], &[0, 1, 0]]);
        let b = span_i64(3, &[&[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(a.intersect(&b).unwrap(), span_i64(3, &[&[0, 1, 0]]));
        assert_eq!(a.intersect(&a).unwrap(), a);
        assert!(a.intersect(&e1).is_err());
    }

    #[test]
    fn image_kernel_preimage_examples() {
        assert_eq!(kernel(&Matrix::identity(3)), Subspace::zero(3));

        let proj = Matrix::from_i64(&[[1, 0], [0, 0]]);
        assert_eq!(image(&proj, &Subspace::full(2)).unwrap(), span_i64(2, &[&[1, 0]]));
        assert_eq!(kernel(&proj), span_i64(2, &[&[0, 1]]));

        let ones = Matrix::from_i64(&[[1, 1], [1, 1]]);
        let diag = span_i64(2, &[&[1, 1]]);
        assert_eq!(preimage(&ones, &diag).unwrap(), Subspace::full(2));
        assert_eq!(kernel(&ones), span_i64(2, &[&[1, -1]]));
        assert!(image(&ones, &Subspace::full(3)).is_err());
        assert!(preimage(&ones, &Subspace::full(3)).is_err());
    }

    #[test]
    fn inverse_and_rank() {
        let m = Matrix::from_i64(&[[2, 1], [1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, Matrix::identity(2));
        assert!(Matrix::from_i64(&[[1, 2], [2, 4]]).inverse().is_none());
        assert_eq!(Matrix::from_i64(&[[1, 2], [2, 4]]).rank(), 1);
        assert_eq!(Matrix::identity(0).inverse(), Some(Matrix::identity(0)));
    }

    #[test]
    fn scalar_text_format() {
        assert_eq!(format_scalar(&ratio(-6, 4)), "-3/2");
        assert_eq!(format_scalar(&int(5)), "5");
        assert_eq!(parse_scalar("4/-6").unwrap(), ratio(-2, 3));
        assert_eq!(parse_scalar(" 7 ").unwrap(), int(7));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
        let x = parse_scalar("-10/4").unwrap();
        assert!(x.denom() > BigInt::zero());
        assert_eq!(format_scalar(&x), "-5/2");
    }

    #[test]
    fn exactness_split_sequence() {
        let f = Matrix::from_i64(&[[1], [0]]);
        let g_good = Matrix::from_i64(&[[0, 1]]);
        let g_bad = Matrix::from_i64(&[[1, 0]]);
        assert_eq!(exactness(&f, &g_good).unwrap(), Exactness::Exact);
        assert_eq!(
            exactness(&f, &g_bad).unwrap(),
            Exactness::ImageNotInKernel { witness: vec![int(1), int(0)] }
        );
        let zero_in = Matrix::zeros(2, 0);
        assert_eq!(
            exactness(&zero_in, &g_good).unwrap(),
            Exactness::KernelNotInImage { witness: vec![int(1), int(0)] }
        );
        assert!(exactness(&f, &Matrix::identity(3)).is_err());
    }

    #[test]
    fn conform_accepts_empty_zero_row_maps() {
        let parsed: Matrix = serde_json::from_str("[]").unwrap();
        assert_eq!(parsed.clone().conform(0, 4).unwrap(), Matrix::zeros(0, 4));
        assert!(parsed.conform(2, 0).is_err());
        let tall: Matrix = serde_json::from_str("[[],[]]").unwrap();
        assert_eq!(tall.conform(2, 0).unwrap(), Matrix::zeros(2, 0));
    }
}
