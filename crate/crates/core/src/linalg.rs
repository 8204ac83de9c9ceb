//! Small dense matrices and tensors over a [`Scalar`].
//!
//! Sizes in this crate are tiny (N, L ≤ 10 in practice), so everything is a
//! flat row-major `Vec` with straightforward loops.

use std::ops::{Index, IndexMut};

use crate::error::{check_dim, GeomError, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        for row in &rows {
            check_dim("matrix row", m, row.len())?;
        }
        Ok(Self {
            rows: n,
            cols: m,
            data: rows.into_iter().flatten().collect(),
        })
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

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(Scalar::to_f64)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_dim("matrix product", self.cols, other.rows)?;
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(S::zero(), |acc, k| {
                acc + self[(i, k)].clone() * other[(k, j)].clone()
            })
        }))
    }

    pub fn mul_vec(&self, v: &[S]) -> Result<Vec<S>> {
        check_dim("matrix-vector product", self.cols, v.len())?;
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim("matrix sum (rows)", self.rows, other.rows)?;
        check_dim("matrix sum (cols)", self.cols, other.cols)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dim("matrix difference (rows)", self.rows, other.rows)?;
        check_dim("matrix difference (cols)", self.cols, other.cols)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        })
    }

    pub fn max_abs(&self) -> S {
        self.data
            .iter()
            .map(|x| x.abs())
            .fold(S::zero(), |m, x| if x > m { x } else { m })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Determinant by partial-pivoting elimination (pivot = largest magnitude).
    pub fn determinant(&self) -> Result<S> {
        check_dim("determinant", self.rows, self.cols)?;
        let n = self.rows;
        let mut a = self.clone();
        let mut det = S::one();
        for col in 0..n {
            let Some(p) = a.pivot_row(col) else {
                return Ok(S::zero());
            };
            if p != col {
                a.swap_rows(p, col);
                det = -det;
            }
            let pivot = a[(col, col)].clone();
            det = det * pivot.clone();
            for r in col + 1..n {
                let f = a[(r, col)].clone() / pivot.clone();
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = a[(col, c)].clone() * f.clone();
                    a[(r, c)] = a[(r, c)].clone() - v;
                }
            }
        }
        Ok(det)
    }

    /// Gauss-Jordan inverse; fails with [`GeomError::Degenerate`] on a zero pivot.
    pub fn inverse(&self) -> Result<Self> {
        check_dim("inverse", self.rows, self.cols)?;
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let p = a.pivot_row(col).ok_or_else(|| GeomError::Degenerate {
                what: "matrix".into(),
                detail: format!("zero pivot in column {col}"),
            })?;
            a.swap_rows(p, col);
            inv.swap_rows(p, col);
            let pivot = a[(col, col)].clone();
            for c in 0..n {
                a[(col, c)] = a[(col, c)].clone() / pivot.clone();
                inv[(col, c)] = inv[(col, c)].clone() / pivot.clone();
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)].clone();
                if f.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let va = a[(col, c)].clone() * f.clone();
                    a[(r, c)] = a[(r, c)].clone() - va;
                    let vi = inv[(col, c)].clone() * f.clone();
                    inv[(r, c)] = inv[(r, c)].clone() - vi;
                }
            }
        }
        Ok(inv)
    }

    /// Inertia `(positive, negative, zero)` of a symmetric matrix via symmetric
    /// congruence elimination (Sylvester's law of inertia).
    pub fn inertia(&self) -> Result<(usize, usize, usize)> {
        if !self.is_symmetric() {
            return Err(GeomError::NotSymmetric {
                what: "inertia input".into(),
            });
        }
        let mut a = self.clone();
        let n = self.rows;
        let (mut pos, mut neg, mut zero) = (0, 0, 0);
        for k in 0..n {
            if a[(k, k)].is_zero() {
                if let Some(j) = (k + 1..n).find(|&j| !a[(j, j)].is_zero()) {
                    a.swap_rows(j, k);
                    a.swap_cols(j, k);
                } else if let Some(j) = (k + 1..n).find(|&j| !a[(k, j)].is_zero()) {
                    // a_kk <- a_kk + 2 a_kj + a_jj = 2 a_kj != 0
                    for c in 0..n {
                        let v = a[(j, c)].clone();
                        a[(k, c)] = a[(k, c)].clone() + v;
                    }
                    for r in 0..n {
                        let v = a[(r, j)].clone();
                        a[(r, k)] = a[(r, k)].clone() + v;
                    }
                }
            }
            let d = a[(k, k)].clone();
            if d.is_zero() {
                zero += 1;
                continue;
            }
            if d.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            for r in k + 1..n {
                let f = a[(r, k)].clone() / d.clone();
                if f.is_zero() {
                    continue;
                }
                for c in k..n {
                    let v = a[(k, c)].clone() * f.clone();
                    a[(r, c)] = a[(r, c)].clone() - v;
                }
                for rr in k..n {
                    let v = a[(rr, k)].clone() * f.clone();
                    a[(rr, r)] = a[(rr, r)].clone() - v;
                }
            }
        }
        Ok((pos, neg, zero))
    }

    fn pivot_row(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, S)> = None;
        for r in col..self.rows {
            let v = self[(r, col)].abs();
            if v.is_zero() {
                continue;
            }
            if best.as_ref().is_none_or(|(_, b)| v > *b) {
                best = Some((r, v));
            }
        }
        best.map(|(r, _)| r)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

/// Dense tensor of arbitrary rank, row-major (last index fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<S> {
    shape: Vec<usize>,
    data: Vec<S>,
}

impl<S: Scalar> Tensor<S> {
    pub fn zeros(shape: &[usize]) -> Self {
        Self {
            shape: shape.to_vec(),
            data: vec![S::zero(); shape.iter().product()],
        }
    }

    pub fn from_fn(shape: &[usize], mut f: impl FnMut(&[usize]) -> S) -> Self {
        let mut data = Vec::with_capacity(shape.iter().product());
        for idx in MultiIndexIter::new(shape) {
            data.push(f(&idx));
        }
        Self {
            shape: shape.to_vec(),
            data,
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn get(&self, idx: &[usize]) -> &S {
        &self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: S) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn iter_indexed(&self) -> impl Iterator<Item = (Vec<usize>, &S)> {
        MultiIndexIter::new(&self.shape).zip(self.data.iter())
    }

    /// Largest absolute entry with the first index tuple attaining it.
    pub fn max_abs_with_index(&self) -> (S, Vec<usize>) {
        let mut best = S::zero();
        let mut at = vec![0; self.shape.len()];
        for (idx, v) in self.iter_indexed() {
            let a = v.abs();
            if a > best {
                best = a;
                at = idx;
            }
        }
        (best, at)
    }

    pub fn max_abs(&self) -> S {
        self.max_abs_with_index().0
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        idx.iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &n)| {
                debug_assert!(i < n);
                acc * n + i
            })
    }
}

/// Row-major enumeration of all index tuples of a given shape.
#[derive(Clone, Debug)]
pub struct MultiIndexIter {
    shape: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl MultiIndexIter {
    pub fn new(shape: &[usize]) -> Self {
        let empty = shape.contains(&0);
        Self {
            shape: shape.to_vec(),
            next: if empty { None } else { Some(vec![0; shape.len()]) },
        }
    }
}

impl Iterator for MultiIndexIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut axis = succ.len();
        loop {
            if axis == 0 {
                break;
            }
            axis -= 1;
            succ[axis] += 1;
            if succ[axis] < self.shape[axis] {
                self.next = Some(succ);
                break;
            }
            succ[axis] = 0;
        }
        Some(current)
    }
}

/// Maximum absolute entry-wise difference between two equally sized slices.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, Rational};

    fn q(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| rational(v, 1)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn inverse_is_exact() {
        let m = q(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(3));
        assert_eq!(m.determinant().unwrap(), rational(18, 1));
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = q(&[&[1, 2], &[2, 4]]);
        assert!(matches!(m.inverse(), Err(GeomError::Degenerate { .. })));
        assert_eq!(m.determinant().unwrap(), rational(0, 1));
    }

    #[test]
    fn inertia_of_split_forms() {
        let anti = q(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]);
        assert_eq!(anti.inertia().unwrap(), (2, 1, 0));
        let hyperbolic = q(&[&[0, 1], &[1, 0]]);
        assert_eq!(hyperbolic.inertia().unwrap(), (1, 1, 0));
        let degenerate = q(&[&[1, 1], &[1, 1]]);
        assert_eq!(degenerate.inertia().unwrap(), (1, 0, 1));
        let neg = q(&[&[-2, 0], &[0, -1]]);
        assert_eq!(neg.inertia().unwrap(), (0, 2, 0));
    }

    #[test]
    fn multi_index_iteration_is_row_major() {
        let all: Vec<_> = MultiIndexIter::new(&[2, 3]).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[1], vec![0, 1]);
        assert_eq!(all[3], vec![1, 0]);
        assert_eq!(MultiIndexIter::new(&[]).count(), 1);
        assert_eq!(MultiIndexIter::new(&[3, 0]).count(), 0);
    }

    #[test]
    fn tensor_argmax_reports_first_maximum() {
        let t = Tensor::<f64>::from_fn(&[2, 2], |i| if i == [1, 0] || i == [1, 1] { -3.0 } else { 1.0 });
        let (v, at) = t.max_abs_with_index();
        assert_eq!(v, 3.0);
        assert_eq!(at, vec![1, 0]);
    }
}
