//! Sparse LDLᵀ factorization of quasi-definite matrices.
//!
//! Up-looking factorization over the elimination tree of a fill-reducing
//! (AMD) permutation. Pivots whose sign disagrees with the expected inertia,
//! or that are too small, are replaced by a signed regularization constant.

use super::csc::CscMatrix;
use crate::scalar::Scalar;

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LdlError {
    #[error("matrix is not square upper triangular")]
    NotUpperTriangular,
    #[error("missing diagonal entry in column {0}")]
    MissingDiagonal(usize),
    #[error("fill-reducing ordering failed: {0}")]
    Ordering(String),
    #[error("non-finite pivot at column {0}")]
    NonFinitePivot(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct DynamicRegularization<T> {
    pub eps: T,
    pub delta: T,
}

#[derive(Debug, Clone)]
pub struct LdlFactorization<T> {
    n: usize,
    perm: Vec<usize>,
    /// permuted upper triangle; values refreshed by `update_values`
    colptr: Vec<usize>,
    rowval: Vec<usize>,
    nzval: Vec<T>,
    /// original nz index -> permuted nz index
    nz_map: Vec<usize>,
    signs: Vec<i8>,
    etree: Vec<usize>,
    lnz: Vec<usize>,
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<T>,
    d: Vec<T>,
    dinv: Vec<T>,
    reg: DynamicRegularization<T>,
    regularized_pivots: usize,
    work: Vec<T>,
}

impl<T: Scalar> LdlFactorization<T> {
    /// Symbolic analysis of the upper triangle `k`. `signs[i]` is the expected
    /// sign (+1/-1) of pivot `i` in the original ordering.
    pub fn new(
        k: &CscMatrix<T>,
        signs: &[i8],
        reg: DynamicRegularization<T>,
    ) -> Result<Self, LdlError> {
        let n = k.ncols;
        if k.nrows != n || signs.len() != n {
            return Err(LdlError::NotUpperTriangular);
        }
        for j in 0..n {
            let mut diag = false;
            for (i, _) in k.col(j) {
                if i > j {
                    return Err(LdlError::NotUpperTriangular);
                }
                diag |= i == j;
            }
            if !diag {
                return Err(LdlError::MissingDiagonal(j));
            }
        }

        let perm = if n == 0 {
            Vec::new()
        } else {
            let (p, _, _) = amd::order(n, &k.colptr, &k.rowval, &amd::Control::default())
                .map_err(|s| LdlError::Ordering(format!("{s:?}")))?;
            p
        };
        let mut iperm = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            iperm[old] = new;
        }

        // symmetric permutation of the upper triangle
        let mut counts = vec![0usize; n + 1];
        for j in 0..n {
            for (i, _) in k.col(j) {
                let c = iperm[i].max(iperm[j]);
                counts[c + 1] += 1;
            }
        }
        for j in 0..n {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut rowval = vec![0; k.nnz()];
        let mut nz_map = vec![0; k.nnz()];
        for j in 0..n {
            for idx in k.colptr[j]..k.colptr[j + 1] {
                let (pi, pj) = (iperm[k.rowval[idx]], iperm[j]);
                let c = pi.max(pj);
                let dst = next[c];
                rowval[dst] = pi.min(pj);
                nz_map[idx] = dst;
                next[c] += 1;
            }
        }
        let colptr = counts;
        let psigns: Vec<i8> = perm.iter().map(|&old| signs[old]).collect();

        // elimination tree and column counts
        let mut etree = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        let mut flag = vec![NONE; n];
        for j in 0..n {
            flag[j] = j;
            for &r in &rowval[colptr[j]..colptr[j + 1]] {
                let mut i = r;
                while flag[i] != j {
                    if etree[i] == NONE {
                        etree[i] = j;
                    }
                    lnz[i] += 1;
                    flag[i] = j;
                    i = etree[i];
                }
            }
        }
        let mut lp = vec![0usize; n + 1];
        for i in 0..n {
            lp[i + 1] = lp[i] + lnz[i];
        }
        let total = lp[n];

        let mut f = Self {
            n,
            perm,
            colptr,
            rowval,
            nzval: vec![T::zero(); k.nnz()],
            nz_map,
            signs: psigns,
            etree,
            lnz,
            lp,
            li: vec![0; total],
            lx: vec![T::zero(); total],
            d: vec![T::zero(); n],
            dinv: vec![T::zero(); n],
            reg,
            regularized_pivots: 0,
            work: vec![T::zero(); n],
        };
        f.update_values(&k.nzval);
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz_l(&self) -> usize {
        self.lp[self.n]
    }

    pub fn regularized_pivots(&self) -> usize {
        self.regularized_pivots
    }

    /// Replaces matrix values; `values` is indexed like the original `nzval`.
    pub fn update_values(&mut self, values: &[T]) {
        for (idx, &v) in values.iter().enumerate() {
            self.nzval[self.nz_map[idx]] = v;
        }
    }

    /// Numeric factorization of the current values.
    pub fn factor(&mut self) -> Result<(), LdlError> {
        let n = self.n;
        let mut y_vals = vec![T::zero(); n];
        let mut y_marked = vec![false; n];
        let mut y_idx = vec![0usize; n];
        let mut elim = vec![0usize; n];
        let mut next_space: Vec<usize> = self.lp[..n].to_vec();
        self.regularized_pivots = 0;

        for k in 0..n {
            let mut n_y = 0;
            self.d[k] = T::zero();
            for idx in self.colptr[k]..self.colptr[k + 1] {
                let b = self.rowval[idx];
                let v = self.nzval[idx];
                if b == k {
                    self.d[k] += v;
                    continue;
                }
                y_vals[b] += v;
                if !y_marked[b] {
                    y_marked[b] = true;
                    elim[0] = b;
                    let mut n_e = 1;
                    let mut next = self.etree[b];
                    while next != NONE && next < k {
                        if y_marked[next] {
                            break;
                        }
                        y_marked[next] = true;
                        elim[n_e] = next;
                        n_e += 1;
                        next = self.etree[next];
                    }
                    while n_e > 0 {
                        n_e -= 1;
                        y_idx[n_y] = elim[n_e];
                        n_y += 1;
                    }
                }
            }

            for i in (0..n_y).rev() {
                let c = y_idx[i];
                let end = next_space[c];
                let yc = y_vals[c];
                for j in self.lp[c]..end {
                    y_vals[self.li[j]] -= self.lx[j] * yc;
                }
                self.li[end] = k;
                let l = yc * self.dinv[c];
                self.lx[end] = l;
                self.d[k] -= yc * l;
                next_space[c] += 1;
                y_vals[c] = T::zero();
                y_marked[c] = false;
            }

            let sign = if self.signs[k] >= 0 { T::one() } else { -T::one() };
            if !(self.d[k] * sign > self.reg.eps) {
                if !self.d[k].is_finite() {
                    return Err(LdlError::NonFinitePivot(k));
                }
                self.d[k] = sign * self.reg.delta;
                self.regularized_pivots += 1;
            }
            self.dinv[k] = T::one() / self.d[k];
        }
        debug_assert!((0..n).all(|c| next_space[c] == self.lp[c] + self.lnz[c]));
        Ok(())
    }

    /// Solves `K x = b` in place (original ordering).
    pub fn solve(&mut self, b: &mut [T]) {
        assert_eq!(b.len(), self.n);
        let x = &mut self.work;
        for (k, &old) in self.perm.iter().enumerate() {
            x[k] = b[old];
        }
        for i in 0..self.n {
            let xi = x[i];
            if xi != T::zero() {
                for j in self.lp[i]..self.lp[i + 1] {
                    x[self.li[j]] -= self.lx[j] * xi;
                }
            }
        }
        for i in 0..self.n {
            x[i] *= self.dinv[i];
        }
        for i in (0..self.n).rev() {
            let mut xi = x[i];
            for j in self.lp[i]..self.lp[i + 1] {
                xi -= self.lx[j] * x[self.li[j]];
            }
            x[i] = xi;
        }
        for (k, &old) in self.perm.iter().enumerate() {
            b[old] = x[k];
        }
    }
}

/// `y = K x` for a symmetric matrix stored as its upper triangle.
pub fn sym_upper_matvec<T: Scalar>(k: &CscMatrix<T>, x: &[T], y: &mut [T]) {
    y.iter_mut().for_each(|v| *v = T::zero());
    for j in 0..k.ncols {
        for (i, v) in k.col(j) {
            y[i] += v * x[j];
            if i != j {
                y[j] += v * x[i];
            }
        }
    }
}
