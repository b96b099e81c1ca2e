//! Compressed sparse column storage.

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix<T> {
    pub nrows: usize,
    pub ncols: usize,
    pub colptr: Vec<usize>,
    pub rowval: Vec<usize>,
    pub nzval: Vec<T>,
}

impl<T: Scalar> CscMatrix<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            colptr: vec![0; ncols + 1],
            rowval: Vec::new(),
            nzval: Vec::new(),
        }
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// explicit zeros dropped. Row indices within a column come out sorted.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, T)]) -> Self {
        let mut counts = vec![0usize; ncols + 1];
        for &(r, c, _) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            counts[c + 1] += 1;
        }
        for j in 0..ncols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut rows = vec![0usize; triplets.len()];
        let mut vals = vec![T::zero(); triplets.len()];
        for &(r, c, v) in triplets {
            let k = next[c];
            rows[k] = r;
            vals[k] = v;
            next[c] += 1;
        }

        let mut colptr = Vec::with_capacity(ncols + 1);
        let mut rowval = Vec::with_capacity(triplets.len());
        let mut nzval = Vec::with_capacity(triplets.len());
        colptr.push(0);
        let mut order: Vec<usize> = Vec::new();
        for j in 0..ncols {
            order.clear();
            order.extend(counts[j]..counts[j + 1]);
            order.sort_by_key(|&k| rows[k]);
            let mut last: Option<usize> = None;
            for &k in &order {
                if last == Some(rows[k]) {
                    *nzval.last_mut().unwrap() += vals[k];
                } else {
                    rowval.push(rows[k]);
                    nzval.push(vals[k]);
                    last = Some(rows[k]);
                }
            }
            colptr.push(rowval.len());
        }
        let mut m = Self {
            nrows,
            ncols,
            colptr,
            rowval,
            nzval,
        };
        m.drop_zeros();
        m
    }

    fn drop_zeros(&mut self) {
        let mut w = 0;
        let mut start = 0;
        for j in 0..self.ncols {
            let end = self.colptr[j + 1];
            for k in start..end {
                if self.nzval[k] != T::zero() {
                    self.rowval[w] = self.rowval[k];
                    self.nzval[w] = self.nzval[k];
                    w += 1;
                }
            }
            start = end;
            self.colptr[j + 1] = w;
        }
        self.rowval.truncate(w);
        self.nzval.truncate(w);
    }

    pub fn nnz(&self) -> usize {
        self.nzval.len()
    }

    pub fn col(&self, j: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let r = self.colptr[j]..self.colptr[j + 1];
        self.rowval[r.clone()].iter().copied().zip(self.nzval[r].iter().copied())
    }

    /// `y = alpha * A x + beta * y`
    pub fn gemv(&self, alpha: T, x: &[T], beta: T, y: &mut [T]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        if beta != T::one() {
            y.iter_mut().for_each(|v| *v *= beta);
        }
        for (j, &xj) in x.iter().enumerate() {
            if xj == T::zero() {
                continue;
            }
            let axj = alpha * xj;
            for (i, a) in self.col(j) {
                y[i] += a * axj;
            }
        }
    }

    /// `y = alpha * Aᵀ x + beta * y`
    pub fn gemv_t(&self, alpha: T, x: &[T], beta: T, y: &mut [T]) {
        assert_eq!(x.len(), self.nrows);
        assert_eq!(y.len(), self.ncols);
        for (j, yj) in y.iter_mut().enumerate() {
            let s: T = self.col(j).map(|(i, a)| a * x[i]).sum();
            *yj = alpha * s + beta * *yj;
        }
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.nrows + 1];
        for &r in &self.rowval {
            counts[r + 1] += 1;
        }
        for i in 0..self.nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut rowval = vec![0; self.nnz()];
        let mut nzval = vec![T::zero(); self.nnz()];
        for j in 0..self.ncols {
            for (i, v) in self.col(j) {
                let k = next[i];
                rowval[k] = j;
                nzval[k] = v;
                next[i] += 1;
            }
        }
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
            colptr: counts,
            rowval,
            nzval,
        }
    }

    /// Stacks `self` on top of `below`.
    pub fn vstack(&self, below: &Self) -> Self {
        assert_eq!(self.ncols, below.ncols);
        let mut colptr = Vec::with_capacity(self.ncols + 1);
        let mut rowval = Vec::with_capacity(self.nnz() + below.nnz());
        let mut nzval = Vec::with_capacity(self.nnz() + below.nnz());
        colptr.push(0);
        for j in 0..self.ncols {
            for (i, v) in self.col(j) {
                rowval.push(i);
                nzval.push(v);
            }
            for (i, v) in below.col(j) {
                rowval.push(i + self.nrows);
                nzval.push(v);
            }
            colptr.push(rowval.len());
        }
        Self {
            nrows: self.nrows + below.nrows,
            ncols: self.ncols,
            colptr,
            rowval,
            nzval,
        }
    }

    pub fn col_norms_inf(&self) -> Vec<T> {
        (0..self.ncols)
            .map(|j| self.col(j).fold(T::zero(), |m, (_, v)| m.max(v.abs())))
            .collect()
    }

    pub fn row_norms_inf(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.nrows];
        for (&i, &v) in self.rowval.iter().zip(&self.nzval) {
            out[i] = out[i].max(v.abs());
        }
        out
    }

    /// `A <- diag(left) * A * diag(right)`
    pub fn scale(&mut self, left: &[T], right: &[T]) {
        for j in 0..self.ncols {
            for k in self.colptr[j]..self.colptr[j + 1] {
                self.nzval[k] = self.nzval[k] * left[self.rowval[k]] * right[j];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates_and_sort() {
        let m = CscMatrix::from_triplets(
            3,
            2,
            &[(2, 0, 1.0), (0, 0, 2.0), (2, 0, 3.0), (1, 1, 0.0), (1, 1, 5.0)],
        );
        assert_eq!(m.colptr, vec![0, 2, 3]);
        assert_eq!(m.rowval, vec![0, 2, 1]);
        assert_eq!(m.nzval, vec![2.0, 4.0, 5.0]);
    }

    #[test]
    fn products_agree_with_transpose() {
        let m = CscMatrix::from_triplets(
            3,
            3,
            &[(0, 0, 1.0), (1, 0, -2.0), (2, 1, 3.0), (0, 2, 4.0), (2, 2, 0.5)],
        );
        let x = [1.0, 2.0, 3.0];
        let mut y1 = vec![0.0; 3];
        m.gemv_t(1.0, &x, 0.0, &mut y1);
        let mut y2 = vec![0.0; 3];
        m.transpose().gemv(1.0, &x, 0.0, &mut y2);
        assert_eq!(y1, y2);
        let stacked = m.vstack(&m);
        assert_eq!(stacked.nrows, 6);
        assert_eq!(stacked.nnz(), 10);
    }
}
