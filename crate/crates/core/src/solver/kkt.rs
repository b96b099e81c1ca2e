//! Assembly and solution of the reduced Newton system
//!
//! ```text
//! [ εI    Aᵀ       ] [dx]   [rx]
//! [ A   -(W² + εI) ] [dz] = [rz]
//! ```
//!
//! The factorization uses the regularized matrix; iterative refinement
//! corrects against the unregularized one.

use super::cones::ConeSet;
use super::csc::CscMatrix;
use super::ldl::{sym_upper_matvec, DynamicRegularization, LdlError, LdlFactorization};
use crate::scalar::{lit, norm_inf, Scalar};

const BLOCK_REG: f64 = 10.0;

pub(crate) struct KktSystem<T> {
    n: usize,
    m: usize,
    /// upper triangle, regularized values
    k: CscMatrix<T>,
    x_diag: Vec<usize>,
    /// nz position of each `W²` pattern entry
    h_pos: Vec<usize>,
    /// nz position of the diagonal of each slack row
    z_diag: Vec<usize>,
    h_vals: Vec<T>,
    eps: T,
    /// regularization currently on each slack diagonal
    z_reg: Vec<T>,
    ldl: LdlFactorization<T>,
    max_refine: usize,
    work_r: Vec<T>,
    work_d: Vec<T>,
    work_k: Vec<T>,
    /// ∞-norm of the refinement residual after the latest solve
    pub last_residual: T,
}

impl<T: Scalar> KktSystem<T> {
    pub fn new(
        a: &CscMatrix<T>,
        cones: &ConeSet<T>,
        static_reg: T,
        max_refine: usize,
    ) -> Result<Self, LdlError> {
        let (m, n) = (a.nrows, a.ncols);
        let at = a.transpose();
        let pattern = cones.hessian_pattern();

        // column-wise pattern of the slack block, upper triangle
        let mut h_cols: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m];
        for (k, &(i, j)) in pattern.iter().enumerate() {
            h_cols[j].push((i, k));
        }

        let max_a = a.nzval.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()));
        let eps = static_reg + T::epsilon() * max_a.max(T::one());

        let mut colptr = Vec::with_capacity(n + m + 1);
        let mut rowval = Vec::new();
        let mut nzval = Vec::new();
        let mut x_diag = Vec::with_capacity(n);
        let mut h_pos = vec![0usize; pattern.len()];
        let mut z_diag = vec![usize::MAX; m];
        colptr.push(0);
        for j in 0..n {
            x_diag.push(rowval.len());
            rowval.push(j);
            nzval.push(eps);
            colptr.push(rowval.len());
        }
        for i in 0..m {
            for (j, v) in at.col(i) {
                rowval.push(j);
                nzval.push(v);
            }
            for &(r, k) in &h_cols[i] {
                h_pos[k] = rowval.len();
                if r == i {
                    z_diag[i] = rowval.len();
                }
                rowval.push(n + r);
                nzval.push(T::zero());
            }
            colptr.push(rowval.len());
        }
        debug_assert!(z_diag.iter().all(|&p| p != usize::MAX));
        let k = CscMatrix {
            nrows: n + m,
            ncols: n + m,
            colptr,
            rowval,
            nzval,
        };
        let signs: Vec<i8> = (0..n + m).map(|i| if i < n { 1 } else { -1 }).collect();
        let reg = DynamicRegularization {
            eps: lit(1e-13),
            delta: lit(2e-7),
        };
        let ldl = LdlFactorization::new(&k, &signs, reg)?;
        Ok(Self {
            n,
            m,
            k,
            x_diag,
            h_pos,
            z_diag,
            h_vals: Vec::new(),
            eps,
            z_reg: vec![eps; m],
            ldl,
            max_refine,
            work_r: vec![T::zero(); n + m],
            work_d: vec![T::zero(); n + m],
            work_k: vec![T::zero(); n + m],
            last_residual: T::zero(),
        })
    }

    /// Loads `W²` from the cones (identity scaling before the first
    /// iteration) and refactors.
    pub fn update(&mut self, cones: &ConeSet<T>) -> Result<(), LdlError> {
        cones.hessian_values(&mut self.h_vals);
        for (&pos, &v) in self.h_pos.iter().zip(&self.h_vals) {
            self.k.nzval[pos] = -v;
        }
        // rounding in a badly conditioned W² block is of order ε_mach·‖W²‖;
        // regularize above that so the block stays negative definite
        cones.hessian_block_scale(&mut self.z_reg);
        let rel = lit::<T>(BLOCK_REG) * T::epsilon();
        for (r, &pos) in self.z_reg.iter_mut().zip(&self.z_diag) {
            *r = self.eps + rel * *r;
            self.k.nzval[pos] -= *r;
        }
        for &pos in &self.x_diag {
            self.k.nzval[pos] = self.eps;
        }
        self.ldl.update_values(&self.k.nzval);
        self.ldl.factor()
    }

    /// `out = K₀ v` with the unregularized matrix.
    fn true_matvec(&mut self, v: &[T], out: &mut [T]) {
        sym_upper_matvec(&self.k, v, out);
        for i in 0..self.n {
            out[i] -= self.eps * v[i];
        }
        for i in 0..self.m {
            out[self.n + i] += self.z_reg[i] * v[self.n + i];
        }
    }

    pub fn regularized_pivots(&self) -> usize {
        self.ldl.regularized_pivots()
    }

    /// Solves for `sol = [dx; dz]` given `rhs = [rx; rz]`.
    pub fn solve(&mut self, rhs: &[T], sol: &mut [T]) {
        sol.copy_from_slice(rhs);
        self.ldl.solve(sol);
        let bnorm = norm_inf(rhs);
        let tol = lit::<T>(1e-12) + lit::<T>(1e-13) * bnorm;
        let mut r = std::mem::take(&mut self.work_r);
        let mut d = std::mem::take(&mut self.work_d);
        let mut kv = std::mem::take(&mut self.work_k);

        self.true_matvec(sol, &mut kv);
        for i in 0..rhs.len() {
            r[i] = rhs[i] - kv[i];
        }
        let mut rnorm = norm_inf(&r);
        for _ in 0..self.max_refine {
            if rnorm <= tol {
                break;
            }
            d.copy_from_slice(&r);
            self.ldl.solve(&mut d);
            for i in 0..sol.len() {
                d[i] += sol[i];
            }
            self.true_matvec(&d, &mut kv);
            for i in 0..rhs.len() {
                kv[i] = rhs[i] - kv[i];
            }
            let new_norm = norm_inf(&kv);
            if !(new_norm < rnorm) {
                break;
            }
            std::mem::swap(&mut r, &mut kv);
            sol.copy_from_slice(&d);
            let improved = rnorm / new_norm;
            rnorm = new_norm;
            if improved < lit(2.0) {
                break;
            }
        }
        self.last_residual = rnorm;
        self.work_r = r;
        self.work_d = d;
        self.work_k = kv;
    }
}
