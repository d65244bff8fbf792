//! Dense matrices over a [`Scalar`].

use std::ops::{Index, IndexMut};

use crate::scalar::{dot, Scalar};

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

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().cloned().collect(),
        }
    }

    pub fn from_cols(cols: &[Vec<S>]) -> Self {
        Self::from_rows(cols).transpose()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
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

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "shape mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `vᵀ M`, i.e. the covector `x ↦ v·(M x)`.
    pub fn vec_mul(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.rows, v.len(), "shape mismatch");
        (0..self.cols)
            .map(|j| {
                (0..self.rows).fold(S::zero(), |acc, i| {
                    acc + v[i].clone() * self[(i, j)].clone()
                })
            })
            .collect()
    }

    pub fn scale(&self, s: &S) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.clone() * s.clone()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    /// Symmetric bilinear evaluation `xᵀ M y`.
    pub fn bilinear(&self, x: &[S], y: &[S]) -> S {
        dot(x, &self.mul_vec(y))
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.approx_eq(b))
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && self.approx_eq(&self.transpose())
    }

    /// Reduced row echelon form; returns the pivot columns.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let best = (r..self.rows)
                .filter(|&i| !self[(i, c)].is_negligible())
                .max_by(|&a, &b| {
                    self[(a, c)]
                        .abs()
                        .partial_cmp(&self[(b, c)].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then(b.cmp(&a))
                });
            let Some(p) = best else { continue };
            self.swap_rows(r, p);
            let inv = S::one() / self[(r, c)].clone();
            for j in 0..self.cols {
                let v = self[(r, j)].clone() * inv.clone();
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for j in 0..self.cols {
                    let v = self[(i, j)].clone() - f.clone() * self[(r, j)].clone();
                    self[(i, j)] = v;
                }
                self[(i, c)] = S::zero();
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = S::one();
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Basis of `{x : M x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<S>> {
        let mut r = self.clone();
        let pivots = r.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![S::zero(); self.cols];
                v[f] = S::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r[(row, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Determinants of the leading principal submatrices.
    pub fn leading_minors(&self) -> Vec<S> {
        (1..=self.rows.min(self.cols))
            .map(|k| {
                let sub: Vec<Vec<S>> = (0..k).map(|i| self.row(i)[..k].to_vec()).collect();
                determinant(Self::from_rows(&sub))
            })
            .collect()
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(Scalar::to_f64).collect())
            .collect()
    }

    fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_f64())
    }

    /// Eigenvalues of the symmetric part, ascending, in double precision.
    pub fn symmetric_eigenvalues_f64(&self) -> Vec<f64> {
        let m = self.to_nalgebra();
        let sym = (&m + m.transpose()) * 0.5;
        let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Singular values, descending, in double precision.
    pub fn singular_values_f64(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self
            .to_nalgebra()
            .singular_values()
            .iter()
            .copied()
            .collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }
}

fn determinant<S: Scalar>(mut m: Matrix<S>) -> S {
    let n = m.rows;
    let mut det = S::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
            return S::zero();
        };
        if p != c {
            m.swap_rows(p, c);
            det = -det;
        }
        let piv = m[(c, c)].clone();
        det *= piv.clone();
        for i in c + 1..n {
            if m[(i, c)].is_zero() {
                continue;
            }
            let f = m[(i, c)].clone() / piv.clone();
            for j in c..n {
                let v = m[(i, j)].clone() - f.clone() * m[(c, j)].clone();
                m[(i, j)] = v;
            }
        }
    }
    det
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

/// Rank of a list of vectors.
pub fn rank_of<S: Scalar>(vectors: &[Vec<S>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_rows(vectors).rank()
}

/// Greedy choice of linearly independent vectors, in input order.
pub fn independent_subset<S: Scalar>(vectors: &[Vec<S>]) -> Vec<usize> {
    let Some(dim) = vectors.first().map(Vec::len) else {
        return Vec::new();
    };
    // Incremental elimination against the reduced rows picked so far.
    let mut basis: Vec<(usize, Vec<S>)> = Vec::new();
    let mut chosen = Vec::new();
    for (idx, v) in vectors.iter().enumerate() {
        if chosen.len() == dim {
            break;
        }
        let mut w = v.clone();
        for (pc, b) in &basis {
            if w[*pc].is_zero() {
                continue;
            }
            let f = w[*pc].clone();
            for (x, y) in w.iter_mut().zip(b) {
                *x -= f.clone() * y.clone();
            }
        }
        let pivot = (0..dim)
            .filter(|&j| !w[j].is_negligible())
            .max_by(|&a, &b| {
                w[a].abs()
                    .partial_cmp(&w[b].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(b.cmp(&a))
            });
        if let Some(pc) = pivot {
            let inv = S::one() / w[pc].clone();
            for x in w.iter_mut() {
                *x *= inv.clone();
            }
            // Keep the stored basis reduced in the new pivot column.
            for (_, b) in basis.iter_mut() {
                if b[pc].is_zero() {
                    continue;
                }
                let f = b[pc].clone();
                for (x, y) in b.iter_mut().zip(&w) {
                    *x -= f.clone() * y.clone();
                }
            }
            basis.push((pc, w));
            chosen.push(idx);
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::Zero;

    fn q(n: i64) -> Rational {
        Rational::int(n)
    }

    fn mat(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(
            &rows
                .iter()
                .map(|r| r.iter().map(|&x| q(x)).collect())
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn inverse_round_trip() {
        let m = mat(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(3));
        assert!(mat(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn nullspace_of_unit_functional() {
        let u = mat(&[&[0, 0, 1]]);
        let ns = u.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(u.mul_vec(v)[0].is_zero());
        }
        assert_eq!(rank_of(&ns), 2);
    }

    #[test]
    fn leading_minors_and_rank() {
        let m = mat(&[&[2, 1], &[1, 2]]);
        assert_eq!(m.leading_minors(), vec![q(2), q(3)]);
        assert_eq!(mat(&[&[1, 2, 3], &[2, 4, 6], &[0, 0, 1]]).rank(), 2);
    }

    #[test]
    fn independent_subset_skips_dependent_vectors() {
        let vs: Vec<Vec<Rational>> = vec![
            vec![q(1), q(1), q(0)],
            vec![q(2), q(2), q(0)],
            vec![q(0), q(1), q(0)],
            vec![q(1), q(0), q(0)],
            vec![q(0), q(0), q(5)],
        ];
        assert_eq!(independent_subset(&vs), vec![0, 2, 4]);
    }

    #[test]
    fn float_eigen_and_singular_values() {
        let m: Matrix<f64> = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let ev = m.symmetric_eigenvalues_f64();
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
        let r1: Matrix<f64> = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(r1.singular_values_f64()[1] < 1e-12);
    }
}
