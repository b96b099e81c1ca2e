//! Ruiz equilibration of `(A, b, c)`.
//!
//! Solves the scaled problem `Â = E A D`, `b̂ = E b`, `ĉ = σ D c`; the
//! original variables are recovered as `x = D x̂`, `s = E⁻¹ ŝ`,
//! `z = E ẑ / σ`. Row factors are uniform on each second-order cone so cone
//! membership is preserved.

use super::cones::{ConeSet, Kind};
use super::csc::CscMatrix;
use crate::scalar::{lit, norm_inf, Scalar};

const PASSES: usize = 25;
const STEP_MIN: f64 = 1e-4;
const STEP_MAX: f64 = 1e4;
const TOTAL_MIN: f64 = 1e-6;
const TOTAL_MAX: f64 = 1e6;

#[derive(Debug, Clone)]
pub(crate) struct Scaling<T> {
    pub d: Vec<T>,
    pub e: Vec<T>,
    pub cost: T,
}

impl<T: Scalar> Scaling<T> {
    pub fn identity(n: usize, m: usize) -> Self {
        Self {
            d: vec![T::one(); n],
            e: vec![T::one(); m],
            cost: T::one(),
        }
    }
}

fn factor<T: Scalar>(norm: T) -> T {
    if norm > T::zero() && norm.is_finite() {
        (T::one() / norm.sqrt()).max(lit(STEP_MIN)).min(lit(STEP_MAX))
    } else {
        T::one()
    }
}

pub(crate) fn equilibrate<T: Scalar>(
    a: &mut CscMatrix<T>,
    b: &mut [T],
    c: &mut [T],
    cones: &ConeSet<T>,
) -> Scaling<T> {
    let (m, n) = (a.nrows, a.ncols);
    let mut sc = Scaling::<T>::identity(n, m);
    let (lo, hi) = (lit::<T>(TOTAL_MIN), lit::<T>(TOTAL_MAX));

    for _ in 0..PASSES {
        let mut dc: Vec<T> = a.col_norms_inf().into_iter().map(factor).collect();
        let mut er: Vec<T> = a.row_norms_inf().into_iter().map(factor).collect();
        for b in &cones.blocks {
            if b.kind == Kind::SecondOrder {
                let r = b.offset..b.offset + b.dim;
                let mean = er[r.clone()].iter().copied().sum::<T>() / lit(b.dim as f64);
                er[r].iter_mut().for_each(|v| *v = mean);
            }
        }
        for j in 0..n {
            let t = (sc.d[j] * dc[j]).max(lo).min(hi);
            dc[j] = t / sc.d[j];
            sc.d[j] = t;
        }
        for i in 0..m {
            let t = (sc.e[i] * er[i]).max(lo).min(hi);
            er[i] = t / sc.e[i];
            sc.e[i] = t;
        }
        a.scale(&er, &dc);
    }

    for (bi, &ei) in b.iter_mut().zip(&sc.e) {
        *bi *= ei;
    }
    for (cj, &dj) in c.iter_mut().zip(&sc.d) {
        *cj *= dj;
    }
    let cn = norm_inf(c);
    let mean_col = {
        let norms = a.col_norms_inf();
        norms.iter().copied().sum::<T>() / lit(norms.len().max(1) as f64)
    };
    let scale = cn.max(mean_col);
    sc.cost = if scale > T::zero() {
        (T::one() / scale).max(lo).min(hi)
    } else {
        T::one()
    };
    c.iter_mut().for_each(|v| *v *= sc.cost);
    sc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balances_badly_scaled_rows_and_keeps_soc_uniform() {
        let mut a = CscMatrix::from_triplets(
            4,
            2,
            &[(0, 0, 1e6), (1, 1, 1e-3), (2, 0, 5.0), (3, 1, 2e2)],
        );
        let original = a.clone();
        let mut b = vec![1.0, 2.0, 3.0, 4.0];
        let mut c = vec![1e3, 1.0];
        let cones = ConeSet::new(&[(Kind::Nonnegative, 2), (Kind::SecondOrder, 2)]);
        let sc = equilibrate(&mut a, &mut b, &mut c, &cones);
        assert_eq!(sc.e[2], sc.e[3]);
        let spread = |v: Vec<f64>| {
            let nz: Vec<f64> = v.into_iter().filter(|&x| x > 0.0).collect();
            nz.iter().cloned().fold(0.0, f64::max) / nz.iter().cloned().fold(f64::INFINITY, f64::min)
        };
        assert!(spread(a.row_norms_inf()) < spread(original.row_norms_inf()));
        // Â = E A D entrywise
        for j in 0..2 {
            for ((i, v), (_, v0)) in a.col(j).zip(original.col(j)) {
                assert!((v - sc.e[i] * v0 * sc.d[j]).abs() <= 1e-12 * v.abs());
            }
        }
    }
}
