use crate::scalar::{lit, norm2, Scalar};
use crate::solver::CscMatrix;

use super::ProgramError;

/// One block of the product cone that the slack `s = h - G x` must lie in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cone {
    /// `s_i >= 0` for every coordinate.
    Nonnegative(usize),
    /// `s_0 >= ||s_1..||₂`.
    SecondOrder(usize),
    /// `2 u w >= ||z||₂²` with `u, w >= 0`, for `s = (u, w, z..)`.
    ///
    /// Self-dual, and an orthogonal map of [`Cone::SecondOrder`].
    RotatedSecondOrder(usize),
}

impl Cone {
    pub fn dim(&self) -> usize {
        match *self {
            Cone::Nonnegative(d) | Cone::SecondOrder(d) | Cone::RotatedSecondOrder(d) => d,
        }
    }

    /// Signed distance-like membership measure: `>= 0` inside the cone.
    ///
    /// Orthant: smallest coordinate. SOC: `s_0 - ||s_1..||`. Rotated: the
    /// same quantity after the orthogonal map to a standard SOC.
    pub fn margin<T: Scalar>(&self, v: &[T]) -> T {
        match self {
            Cone::Nonnegative(_) => v.iter().fold(T::infinity(), |m, &x| m.min(x)),
            Cone::SecondOrder(_) => v[0] - norm2(&v[1..]),
            Cone::RotatedSecondOrder(_) => {
                let r = lit::<T>(std::f64::consts::FRAC_1_SQRT_2);
                let t = (v[0] + v[1]) * r;
                let d = (v[0] - v[1]) * r;
                let rest = norm2(&v[2..]);
                t - (d * d + rest * rest).sqrt()
            }
        }
    }

    pub fn contains<T: Scalar>(&self, v: &[T], tol: T) -> bool {
        self.margin(v) >= -tol
    }

    fn degree(&self) -> usize {
        match *self {
            Cone::Nonnegative(d) => d,
            Cone::SecondOrder(_) | Cone::RotatedSecondOrder(_) => 1,
        }
    }
}

/// `min cᵀx  s.t.  A_eq x = b_eq,  G x + s = h,  s ∈ K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicProgram<T> {
    pub c: Vec<T>,
    pub a_eq: CscMatrix<T>,
    pub b_eq: Vec<T>,
    pub g: CscMatrix<T>,
    pub h: Vec<T>,
    pub cones: Vec<Cone>,
}

impl<T: Scalar> ConicProgram<T> {
    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn num_equalities(&self) -> usize {
        self.b_eq.len()
    }

    pub fn num_cone_rows(&self) -> usize {
        self.h.len()
    }

    pub fn cone_degree(&self) -> usize {
        self.cones.iter().map(Cone::degree).sum()
    }

    pub fn validate(&self) -> Result<(), ProgramError> {
        let n = self.c.len();
        let dim_err = |what: &str| Err(ProgramError::Dimension(what.to_string()));
        if self.a_eq.ncols != n || self.g.ncols != n {
            return dim_err("constraint matrices must have one column per variable");
        }
        if self.a_eq.nrows != self.b_eq.len() {
            return dim_err("A_eq rows must match b_eq");
        }
        if self.g.nrows != self.h.len() {
            return dim_err("G rows must match h");
        }
        if self.cones.iter().map(Cone::dim).sum::<usize>() != self.h.len() {
            return dim_err("cone dimensions must cover every slack exactly once");
        }
        for cone in &self.cones {
            let ok = match *cone {
                Cone::Nonnegative(d) => d >= 1,
                Cone::SecondOrder(d) => d >= 1,
                Cone::RotatedSecondOrder(d) => d >= 2,
            };
            if !ok {
                return dim_err("cone block too small");
            }
        }
        Ok(())
    }

    /// Iterates `(cone, slack range)` pairs.
    pub fn cone_ranges(&self) -> impl Iterator<Item = (Cone, std::ops::Range<usize>)> + '_ {
        let mut off = 0;
        self.cones.iter().map(move |&c| {
            let r = off..off + c.dim();
            off += c.dim();
            (c, r)
        })
    }

    /// `h - G x`, the slack implied by `x`.
    pub fn slack_at(&self, x: &[T]) -> Vec<T> {
        let mut s = self.h.clone();
        self.g.gemv(-T::one(), x, T::one(), &mut s);
        s
    }
}

/// `constant + Σ coef · x[index]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AffineExpr<T> {
    pub terms: Vec<(usize, T)>,
    pub constant: T,
}

impl<T: Scalar> AffineExpr<T> {
    pub fn constant(c: T) -> Self {
        Self {
            terms: Vec::new(),
            constant: c,
        }
    }

    pub fn var(index: usize) -> Self {
        Self {
            terms: vec![(index, T::one())],
            constant: T::zero(),
        }
    }

    pub fn term(mut self, index: usize, coef: T) -> Self {
        self.terms.push((index, coef));
        self
    }

    pub fn plus(mut self, c: T) -> Self {
        self.constant += c;
        self
    }

    pub fn add_expr(mut self, other: &Self) -> Self {
        self.terms.extend_from_slice(&other.terms);
        self.constant += other.constant;
        self
    }

    pub fn scale(mut self, k: T) -> Self {
        self.terms.iter_mut().for_each(|t| t.1 *= k);
        self.constant *= k;
        self
    }

    pub fn sub_expr(self, other: &Self) -> Self {
        self.add_expr(&other.clone().scale(-T::one()))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|&(_, c)| c == T::zero())
    }

    pub fn eval(&self, x: &[T]) -> T {
        self.terms
            .iter()
            .fold(self.constant, |acc, &(i, c)| acc + c * x[i])
    }
}

/// Incremental construction of a [`ConicProgram`].
#[derive(Debug, Clone)]
pub struct ConicBuilder<T> {
    n: usize,
    c: Vec<T>,
    eq: Vec<(usize, usize, T)>,
    b_eq: Vec<T>,
    g: Vec<(usize, usize, T)>,
    h: Vec<T>,
    cones: Vec<Cone>,
}

impl<T: Scalar> ConicBuilder<T> {
    pub fn new(num_vars: usize) -> Self {
        Self {
            n: num_vars,
            c: vec![T::zero(); num_vars],
            eq: Vec::new(),
            b_eq: Vec::new(),
            g: Vec::new(),
            h: Vec::new(),
            cones: Vec::new(),
        }
    }

    pub fn set_objective(&mut self, index: usize, coef: T) {
        self.c[index] = coef;
    }

    /// Adds `expr == 0`; returns the row index.
    pub fn add_equality(&mut self, expr: &AffineExpr<T>) -> usize {
        let row = self.b_eq.len();
        for &(j, v) in &expr.terms {
            self.eq.push((row, j, v));
        }
        self.b_eq.push(-expr.constant);
        row
    }

    /// Adds `expr >= 0`.
    pub fn add_nonnegative(&mut self, expr: &AffineExpr<T>) {
        self.add_cone(Cone::Nonnegative(1), std::slice::from_ref(expr));
    }

    /// Requires `(rows[0](x), rows[1](x), ..) ∈ cone`. Consecutive orthant
    /// blocks are merged.
    pub fn add_cone(&mut self, cone: Cone, rows: &[AffineExpr<T>]) {
        assert_eq!(cone.dim(), rows.len(), "cone dimension must match row count");
        for expr in rows {
            let row = self.h.len();
            for &(j, v) in &expr.terms {
                self.g.push((row, j, -v));
            }
            self.h.push(expr.constant);
        }
        match (self.cones.last_mut(), cone) {
            (Some(Cone::Nonnegative(d)), Cone::Nonnegative(k)) => *d += k,
            _ => self.cones.push(cone),
        }
    }

    pub fn num_equalities(&self) -> usize {
        self.b_eq.len()
    }

    pub fn build(self) -> ConicProgram<T> {
        ConicProgram {
            a_eq: CscMatrix::from_triplets(self.b_eq.len(), self.n, &self.eq),
            g: CscMatrix::from_triplets(self.h.len(), self.n, &self.g),
            c: self.c,
            b_eq: self.b_eq,
            h: self.h,
            cones: self.cones,
        }
    }
}
