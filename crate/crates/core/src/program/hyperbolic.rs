use super::conic::{AffineExpr, Cone, ConicBuilder};
use super::ProgramError;
use crate::scalar::{lit, to_f64, Scalar};

/// A cone together with the affine rows that must lie in it.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeBlock<T> {
    pub cone: Cone,
    pub rows: Vec<AffineExpr<T>>,
}

impl<T: Scalar> ConeBlock<T> {
    /// Evaluates the rows at `x` and tests membership.
    pub fn contains(&self, x: &[T], tol: T) -> bool {
        let v: Vec<T> = self.rows.iter().map(|r| r.eval(x)).collect();
        self.cone.contains(&v, tol)
    }

    pub fn add_to(&self, builder: &mut ConicBuilder<T>) {
        builder.add_cone(self.cone, &self.rows);
    }

    /// The equivalent standard second-order form `‖(2c, u−w)‖₂ ≤ u+w` of a
    /// three-row rotated block `(u, w, √2·c)`.
    pub fn to_second_order(&self) -> Self {
        assert_eq!(self.cone, Cone::RotatedSecondOrder(3));
        let (u, w, z) = (&self.rows[0], &self.rows[1], &self.rows[2]);
        let two_c = z.clone().scale(lit(std::f64::consts::SQRT_2));
        Self {
            cone: Cone::SecondOrder(3),
            rows: vec![u.clone().add_expr(w), two_c, u.clone().sub_expr(w)],
        }
    }
}

/// Encodes `u·w ≥ c²`, `u, w ≥ 0` as a rotated cone block `(u, w, √2·c)`.
///
/// `c` may be an affine expression (the sign is then irrelevant); a constant
/// `c` must be strictly positive.
pub fn hyperbolic_cone_rows<T: Scalar>(
    u: AffineExpr<T>,
    w: AffineExpr<T>,
    c: AffineExpr<T>,
) -> Result<ConeBlock<T>, ProgramError> {
    if c.is_constant() && !(c.constant > T::zero()) {
        return Err(ProgramError::HyperbolicConstant(to_f64(c.constant)));
    }
    Ok(ConeBlock {
        cone: Cone::RotatedSecondOrder(3),
        rows: vec![u, w, c.scale(lit(std::f64::consts::SQRT_2))],
    })
}
