//! Symmetric cones used inside the interior-point iteration, with
//! Nesterov–Todd scaling.
//!
//! Rotated cones never reach this module: the solver maps them onto standard
//! second-order cones before iterating.

use crate::scalar::{dot, lit, norm2, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kind {
    /// `s = 0`, dual free. Holds the linear equalities.
    Zero,
    Nonnegative,
    SecondOrder,
}

#[derive(Debug, Clone)]
pub(crate) struct Block<T> {
    pub kind: Kind,
    pub offset: usize,
    pub dim: usize,
    /// NT scaling: elementwise `sqrt(s/z)` for the orthant, `w̄` for an SOC.
    pub w: Vec<T>,
    /// SOC only: `(det s / det z)^(1/4)`.
    pub eta: T,
}

impl<T: Scalar> Block<T> {
    fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.dim
    }
}

#[derive(Debug, Clone)]
pub(crate) struct ConeSet<T> {
    pub blocks: Vec<Block<T>>,
}

/// `(u0 - |u1|)(u0 + |u1|)`, factored to limit cancellation.
fn soc_det<T: Scalar>(u: &[T]) -> T {
    let n1 = norm2(&u[1..]);
    (u[0] - n1) * (u[0] + n1)
}

impl<T: Scalar> ConeSet<T> {
    pub fn new(kinds: &[(Kind, usize)]) -> Self {
        let mut offset = 0;
        let blocks = kinds
            .iter()
            .map(|&(kind, dim)| {
                let b = Block {
                    kind,
                    offset,
                    dim,
                    w: vec![T::one(); dim],
                    eta: T::one(),
                };
                offset += dim;
                b
            })
            .collect();
        let mut set = Self { blocks };
        set.set_identity_scaling();
        set
    }

    fn set_identity_scaling(&mut self) {
        for b in &mut self.blocks {
            b.eta = T::one();
            match b.kind {
                Kind::SecondOrder => {
                    b.w.iter_mut().for_each(|v| *v = T::zero());
                    b.w[0] = T::one();
                }
                _ => b.w.iter_mut().for_each(|v| *v = T::one()),
            }
        }
    }

    /// Barrier degree: one per orthant coordinate and per SOC.
    pub fn degree(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| match b.kind {
                Kind::Zero => 0,
                Kind::Nonnegative => b.dim,
                Kind::SecondOrder => 1,
            })
            .sum()
    }

    /// Computes NT scaling at `(s, z)` and returns `λ = W z`. Returns `false`
    /// if either point has left the interior.
    pub fn update_scaling(&mut self, s: &[T], z: &[T], lambda: &mut [T]) -> bool {
        let two = lit::<T>(2.0);
        for b in &mut self.blocks {
            let r = b.range();
            let (sb, zb) = (&s[r.clone()], &z[r.clone()]);
            match b.kind {
                Kind::Zero => lambda[r].iter_mut().for_each(|v| *v = T::zero()),
                Kind::Nonnegative => {
                    for i in 0..b.dim {
                        if !(sb[i] > T::zero() && zb[i] > T::zero()) {
                            return false;
                        }
                        b.w[i] = (sb[i] / zb[i]).sqrt();
                        lambda[b.offset + i] = (sb[i] * zb[i]).sqrt();
                    }
                }
                Kind::SecondOrder => {
                    let (ds, dz) = (soc_det(sb), soc_det(zb));
                    if !(ds > T::zero() && dz > T::zero() && sb[0] > T::zero() && zb[0] > T::zero())
                    {
                        return false;
                    }
                    let (rs, rz) = (ds.sqrt(), dz.sqrt());
                    let sz: T = sb.iter().zip(zb).map(|(&a, &c)| a * c).sum::<T>() / (rs * rz);
                    let gamma = ((T::one() + sz) / two).sqrt();
                    b.w[0] = (sb[0] / rs + zb[0] / rz) / (two * gamma);
                    for i in 1..b.dim {
                        b.w[i] = (sb[i] / rs - zb[i] / rz) / (two * gamma);
                    }
                    b.eta = (rs / rz).sqrt();
                    let mut out = vec![T::zero(); b.dim];
                    soc_w_mul(b, zb, &mut out, false);
                    lambda[r].copy_from_slice(&out);
                }
            }
        }
        true
    }

    /// `out = W v` (or `W⁻¹ v` when `inverse`).
    pub fn w_mul(&self, v: &[T], out: &mut [T], inverse: bool) {
        for b in &self.blocks {
            let r = b.range();
            match b.kind {
                Kind::Zero => out[r].iter_mut().for_each(|x| *x = T::zero()),
                Kind::Nonnegative => {
                    for i in r {
                        let w = b.w[i - b.offset];
                        out[i] = if inverse { v[i] / w } else { v[i] * w };
                    }
                }
                Kind::SecondOrder => soc_w_mul(b, &v[r.clone()], &mut out[r], inverse),
            }
        }
    }

    /// Upper triangles of the `W²` blocks in the order `kkt_pattern` lists them.
    pub fn hessian_values(&self, out: &mut Vec<T>) {
        out.clear();
        let two = lit::<T>(2.0);
        for b in &self.blocks {
            match b.kind {
                Kind::Zero => out.extend(std::iter::repeat_n(T::zero(), b.dim)),
                Kind::Nonnegative => out.extend(b.w.iter().map(|&w| w * w)),
                Kind::SecondOrder => {
                    let e2 = b.eta * b.eta;
                    for j in 0..b.dim {
                        for i in 0..=j {
                            let mut v = two * b.w[i] * b.w[j];
                            if i == j {
                                v -= if i == 0 { T::one() } else { -T::one() };
                            }
                            out.push(e2 * v);
                        }
                    }
                }
            }
        }
    }

    /// Per slack row, the largest diagonal entry of `W²` in its cone block.
    pub fn hessian_block_scale(&self, out: &mut [T]) {
        for b in &self.blocks {
            let r = b.range();
            match b.kind {
                Kind::Zero => out[r].iter_mut().for_each(|v| *v = T::zero()),
                Kind::Nonnegative => {
                    for i in r {
                        let w = b.w[i - b.offset];
                        out[i] = w * w;
                    }
                }
                Kind::SecondOrder => {
                    let e2 = b.eta * b.eta;
                    let top = e2 * (lit::<T>(2.0) * b.w[0] * b.w[0] - T::one());
                    out[r].iter_mut().for_each(|v| *v = top);
                }
            }
        }
    }

    /// `(row, col)` offsets within the slack block of every `W²` entry, upper
    /// triangle, in the order `hessian_values` emits them.
    pub fn hessian_pattern(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for b in &self.blocks {
            match b.kind {
                Kind::Zero | Kind::Nonnegative => out.extend(b.range().map(|i| (i, i))),
                Kind::SecondOrder => {
                    for j in 0..b.dim {
                        for i in 0..=j {
                            out.push((b.offset + i, b.offset + j));
                        }
                    }
                }
            }
        }
        out
    }

    /// Jordan product `out = u ∘ v`.
    pub fn jordan_mul(&self, u: &[T], v: &[T], out: &mut [T]) {
        for b in &self.blocks {
            let r = b.range();
            match b.kind {
                Kind::Zero => out[r].iter_mut().for_each(|x| *x = T::zero()),
                Kind::Nonnegative => {
                    for i in r {
                        out[i] = u[i] * v[i];
                    }
                }
                Kind::SecondOrder => {
                    let (ub, vb) = (&u[r.clone()], &v[r.clone()]);
                    let o = b.offset;
                    out[o] = dot(ub, vb);
                    for i in 1..b.dim {
                        out[o + i] = ub[0] * vb[i] + vb[0] * ub[i];
                    }
                }
            }
        }
    }

    /// Solves `λ ∘ out = d` for `out`.
    pub fn jordan_div(&self, lambda: &[T], d: &[T], out: &mut [T]) {
        for b in &self.blocks {
            let r = b.range();
            match b.kind {
                Kind::Zero => out[r].iter_mut().for_each(|x| *x = T::zero()),
                Kind::Nonnegative => {
                    for i in r {
                        out[i] = d[i] / lambda[i];
                    }
                }
                Kind::SecondOrder => {
                    let (l, db) = (&lambda[r.clone()], &d[r.clone()]);
                    let o = b.offset;
                    let l1d1 = dot(&l[1..], &db[1..]);
                    let u0 = (l[0] * db[0] - l1d1) / soc_det(l);
                    out[o] = u0;
                    for i in 1..b.dim {
                        out[o + i] = (db[i] - u0 * l[i]) / l[0];
                    }
                }
            }
        }
    }

    /// `v += alpha * e` on every non-zero cone.
    pub fn add_identity(&self, v: &mut [T], alpha: T) {
        for b in &self.blocks {
            match b.kind {
                Kind::Zero => {}
                Kind::Nonnegative => v[b.range()].iter_mut().for_each(|x| *x += alpha),
                Kind::SecondOrder => v[b.offset] += alpha,
            }
        }
    }

    /// Smallest "eigenvalue" over all non-zero cones (`+inf` if there are none).
    pub fn min_eigenvalue(&self, v: &[T]) -> T {
        let mut m = T::infinity();
        for b in &self.blocks {
            let vb = &v[b.range()];
            match b.kind {
                Kind::Zero => {}
                Kind::Nonnegative => m = vb.iter().fold(m, |a, &x| a.min(x)),
                Kind::SecondOrder => m = m.min(vb[0] - norm2(&vb[1..])),
            }
        }
        m
    }

    /// Moves `v` into the interior by a uniform shift along `e` when needed.
    pub fn shift_to_interior(&self, v: &mut [T]) {
        let m = self.min_eigenvalue(v);
        if m.is_finite() && m < lit(1e-8) {
            self.add_identity(v, T::one() - m);
        }
        for b in &self.blocks {
            if b.kind == Kind::Zero {
                v[b.range()].iter_mut().for_each(|x| *x = T::zero());
            }
        }
    }

    /// Largest step in `[0, amax]` keeping `u + α du` in the cone.
    pub fn max_step(&self, u: &[T], du: &[T], amax: T) -> T {
        let mut alpha = amax;
        for b in &self.blocks {
            let r = b.range();
            match b.kind {
                Kind::Zero => {}
                Kind::Nonnegative => {
                    for i in r {
                        if du[i] < T::zero() {
                            alpha = alpha.min(-u[i] / du[i]);
                        }
                    }
                }
                Kind::SecondOrder => {
                    alpha = alpha.min(soc_max_step(&u[r.clone()], &du[r]));
                }
            }
        }
        alpha.max(T::zero())
    }
}

fn soc_w_mul<T: Scalar>(b: &Block<T>, v: &[T], out: &mut [T], inverse: bool) {
    let w = &b.w;
    let w1v1 = dot(&w[1..], &v[1..]);
    let (sign, scale) = if inverse {
        (-T::one(), T::one() / b.eta)
    } else {
        (T::one(), b.eta)
    };
    out[0] = scale * (w[0] * v[0] + sign * w1v1);
    let c = sign * v[0] + w1v1 / (T::one() + w[0]);
    for i in 1..b.dim {
        out[i] = scale * (v[i] + c * w[i]);
    }
}

/// First α > 0 where `u + α d` reaches the SOC boundary (`+inf` if never).
fn soc_max_step<T: Scalar>(u: &[T], d: &[T]) -> T {
    let two = lit::<T>(2.0);
    let a = soc_det(d);
    let b = two * (u[0] * d[0] - dot(&u[1..], &d[1..]));
    let c = soc_det(u).max(T::zero());
    let disc = b * b - lit::<T>(4.0) * a * c;
    if (a > T::zero() && b > T::zero()) || disc < T::zero() {
        return T::infinity();
    }
    if a == T::zero() {
        return if b < T::zero() { -c / b } else { T::infinity() };
    }
    let sq = disc.sqrt();
    // numerically stable roots
    let q = -(b + b.signum() * sq) / two;
    let r1 = q / a;
    let r2 = if q != T::zero() { c / q } else { r1 };
    let mut best = T::infinity();
    for r in [r1, r2] {
        if r > T::zero() {
            best = best.min(r);
        }
    }
    best
}
