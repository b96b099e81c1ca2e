use std::time::Instant;

use super::cones::{ConeSet, Kind};
use super::csc::CscMatrix;
use super::equilibrate::{equilibrate, Scaling};
use super::kkt::KktSystem;
use super::residuals::{residuals_at, ResidualReport};
use super::{ConicSolution, SolveStatus, SolverSettings};
use crate::program::{Cone, ConicProgram};
use crate::scalar::{axpy, dot, lit, norm_inf, to_f64, Scalar};

const STEP_FRACTION: f64 = 0.99;
const MIN_STEP: f64 = 1e-10;
const MAX_TINY_STEPS: usize = 5;

/// Unscaled primal-dual point in the coordinates of the user's program.
struct Point<T> {
    x: Vec<T>,
    y: Vec<T>,
    z: Vec<T>,
    s: Vec<T>,
}

pub(crate) struct Solver<'a, T> {
    program: &'a ConicProgram<T>,
    settings: SolverSettings<T>,
    a: CscMatrix<T>,
    b: Vec<T>,
    c: Vec<T>,
    cones: ConeSet<T>,
    scaling: Scaling<T>,
    /// internal row index of the first coordinate of every rotated block
    rotated_rows: Vec<usize>,
    n_eq: usize,
}

impl<'a, T: Scalar> Solver<'a, T> {
    pub fn new(program: &'a ConicProgram<T>, settings: &SolverSettings<T>) -> Self {
        let n_eq = program.num_equalities();
        let r = lit::<T>(std::f64::consts::FRAC_1_SQRT_2);

        // map rotated cones onto standard SOCs: (u, w) -> ((u+w)/√2, (u-w)/√2)
        let mut pair_of: Vec<Option<(usize, bool)>> = vec![None; program.num_cone_rows()];
        let mut rotated_rows = Vec::new();
        let mut kinds = vec![(Kind::Zero, n_eq)];
        for (cone, range) in program.cone_ranges() {
            match cone {
                Cone::Nonnegative(d) => kinds.push((Kind::Nonnegative, d)),
                Cone::SecondOrder(d) => kinds.push((Kind::SecondOrder, d)),
                Cone::RotatedSecondOrder(d) => {
                    kinds.push((Kind::SecondOrder, d));
                    pair_of[range.start] = Some((range.start, true));
                    pair_of[range.start + 1] = Some((range.start, false));
                    rotated_rows.push(n_eq + range.start);
                }
            }
        }
        kinds.retain(|&(_, d)| d > 0);

        let mut g_trip = Vec::with_capacity(program.g.nnz() * 2);
        for j in 0..program.g.ncols {
            for (i, v) in program.g.col(j) {
                match pair_of[i] {
                    None => g_trip.push((i, j, v)),
                    Some((u, true)) => {
                        g_trip.push((u, j, v * r));
                        g_trip.push((u + 1, j, v * r));
                    }
                    Some((u, false)) => {
                        g_trip.push((u, j, v * r));
                        g_trip.push((u + 1, j, -v * r));
                    }
                }
            }
        }
        let g = CscMatrix::from_triplets(program.g.nrows, program.g.ncols, &g_trip);
        let mut h = program.h.clone();
        for &row in &rotated_rows {
            let u = row - n_eq;
            let (hu, hw) = (h[u], h[u + 1]);
            h[u] = (hu + hw) * r;
            h[u + 1] = (hu - hw) * r;
        }

        let mut a = program.a_eq.vstack(&g);
        let mut b: Vec<T> = program.b_eq.iter().chain(&h).copied().collect();
        let mut c = program.c.clone();
        let cones = ConeSet::new(&kinds);
        let scaling = if settings.equilibrate {
            equilibrate(&mut a, &mut b, &mut c, &cones)
        } else {
            Scaling::identity(a.ncols, a.nrows)
        };

        Self {
            program,
            settings: *settings,
            a,
            b,
            c,
            cones,
            scaling,
            rotated_rows,
            n_eq,
        }
    }

    /// Maps internal iterates back to the user's coordinates, dividing by `tau`.
    fn unscale(&self, x: &[T], z: &[T], s: &[T], tau: T) -> Point<T> {
        let sc = &self.scaling;
        let xo: Vec<T> = x.iter().zip(&sc.d).map(|(&v, &d)| v * d / tau).collect();
        let mut zo: Vec<T> = z
            .iter()
            .zip(&sc.e)
            .map(|(&v, &e)| v * e / (sc.cost * tau))
            .collect();
        let mut so: Vec<T> = s.iter().zip(&sc.e).map(|(&v, &e)| v / (e * tau)).collect();
        let r = lit::<T>(std::f64::consts::FRAC_1_SQRT_2);
        for &u in &self.rotated_rows {
            for v in [&mut zo, &mut so] {
                let (a, b) = (v[u], v[u + 1]);
                v[u] = (a + b) * r;
                v[u + 1] = (a - b) * r;
            }
        }
        let y = zo[..self.n_eq].to_vec();
        let z = zo.split_off(self.n_eq);
        let s = so.split_off(self.n_eq);
        Point { x: xo, y, z, s }
    }

    fn report(&self, pt: &Point<T>) -> ResidualReport<T> {
        residuals_at(self.program, &pt.x, &pt.y, &pt.z, &pt.s)
            .expect("internal point has program dimensions")
    }

    fn finish(
        &self,
        status: SolveStatus,
        pt: Point<T>,
        iterations: usize,
        start: Instant,
    ) -> ConicSolution<T> {
        let rep = self.report(&pt);
        ConicSolution {
            status,
            primal_objective: rep.primal_objective,
            gap: rep.gap,
            eq_residual: rep.eq_residual,
            cone_residual: rep.cone_residual,
            dual_residual: rep.dual_residual,
            x: pt.x,
            y: pt.y,
            z: pt.z,
            s: pt.s,
            iterations,
            solve_time_s: start.elapsed().as_secs_f64(),
        }
    }

    /// Checks the infeasibility certificates on the unnormalized iterate.
    fn certificate(&self, x: &[T], z: &[T], s: &[T]) -> Option<(SolveStatus, Point<T>)> {
        let p = self.program;
        let tol = self.settings.feas_tol;
        let mut pt = self.unscale(x, z, s, T::one());

        let bz = dot(&p.b_eq, &pt.y) + dot(&p.h, &pt.z);
        if bz < T::zero() {
            let mut r = vec![T::zero(); p.num_vars()];
            p.a_eq.gemv_t(T::one(), &pt.y, T::zero(), &mut r);
            p.g.gemv_t(T::one(), &pt.z, T::one(), &mut r);
            if norm_inf(&r) <= tol * -bz {
                let k = -T::one() / bz;
                pt.y.iter_mut().chain(pt.z.iter_mut()).for_each(|v| *v *= k);
                pt.x.iter_mut().chain(pt.s.iter_mut()).for_each(|v| *v = T::zero());
                return Some((SolveStatus::PrimalInfeasible, pt));
            }
        }

        let cx = dot(&p.c, &pt.x);
        if cx < T::zero() {
            let mut re = vec![T::zero(); p.num_equalities()];
            p.a_eq.gemv(T::one(), &pt.x, T::zero(), &mut re);
            let mut rc = pt.s.clone();
            p.g.gemv(T::one(), &pt.x, T::one(), &mut rc);
            if norm_inf(&re).max(norm_inf(&rc)) <= tol * -cx {
                let k = -T::one() / cx;
                pt.x.iter_mut().chain(pt.s.iter_mut()).for_each(|v| *v *= k);
                pt.y.iter_mut().chain(pt.z.iter_mut()).for_each(|v| *v = T::zero());
                return Some((SolveStatus::DualInfeasible, pt));
            }
        }
        None
    }

    pub fn run(self) -> ConicSolution<T> {
        let start = Instant::now();
        let (m, n) = (self.a.nrows, self.a.ncols);
        let one = T::one();
        let mut x = vec![T::zero(); n];
        let mut z = vec![T::zero(); m];
        let mut s = vec![T::zero(); m];
        let (mut tau, mut kappa) = (one, one);

        let numerical = |this: &Self, x: &[T], z: &[T], s: &[T], tau: T, it| {
            let pt = this.unscale(x, z, s, tau);
            this.finish(SolveStatus::NumericalError, pt, it, start)
        };

        let mut kkt = match KktSystem::new(
            &self.a,
            &self.cones,
            self.settings.static_regularization,
            self.settings.max_refinement_steps,
        ) {
            Ok(k) => k,
            Err(_) => return numerical(&self, &x, &z, &s, tau, 0),
        };

        // initial point from two least-squares style solves with W = I
        let mut rhs = vec![T::zero(); n + m];
        let mut sol = vec![T::zero(); n + m];
        if kkt.update(&self.cones).is_err() {
            return numerical(&self, &x, &z, &s, tau, 0);
        }
        rhs[n..].copy_from_slice(&self.b);
        kkt.solve(&rhs, &mut sol);
        x.copy_from_slice(&sol[..n]);
        for i in 0..m {
            s[i] = -sol[n + i];
        }
        rhs.iter_mut().for_each(|v| *v = T::zero());
        for j in 0..n {
            rhs[j] = -self.c[j];
        }
        kkt.solve(&rhs, &mut sol);
        z.copy_from_slice(&sol[n..]);
        self.cones.shift_to_interior(&mut s);
        self.cones.shift_to_interior(&mut z);
        // equality duals are free; the zero-cone shift only touches s
        for (i, zi) in z.iter_mut().enumerate().take(self.n_eq) {
            *zi = sol[n + i];
        }

        let mut cones = self.cones.clone();
        let degree = lit::<T>((cones.degree() + 1) as f64);
        let mut lambda = vec![T::zero(); m];
        let mut rx = vec![T::zero(); n];
        let mut rz = vec![T::zero(); m];
        let mut x1 = vec![T::zero(); n + m];
        let mut x2 = vec![T::zero(); n + m];
        let mut ds = vec![T::zero(); m];
        let mut xi = vec![T::zero(); m];
        let mut tmp = vec![T::zero(); m];
        let mut tmp2 = vec![T::zero(); m];
        let mut dx = vec![T::zero(); n];
        let mut dz = vec![T::zero(); m];
        let mut dss = vec![T::zero(); m];
        let mut tiny_steps = 0;

        for iter in 0..=self.settings.max_iterations {
            // residuals of the embedding
            self.a.gemv_t(one, &z, T::zero(), &mut rx);
            axpy(tau, &self.c, &mut rx);
            rz.copy_from_slice(&s);
            self.a.gemv(one, &x, one, &mut rz);
            axpy(-tau, &self.b, &mut rz);
            let rtau = dot(&self.c, &x) + dot(&self.b, &z) + kappa;
            let mu = (dot(&s, &z) + tau * kappa) / degree;

            let pt = self.unscale(&x, &z, &s, tau);
            let rep = self.report(&pt);
            if self.settings.verbose {
                log::info!(
                    "iter {iter:3}  pobj {:+.6e}  dobj {:+.6e}  pres {:.2e}  dres {:.2e}  gap {:.2e}  mu {:.2e}  tau {:.2e}  kappa {:.2e}",
                    to_f64(rep.primal_objective),
                    to_f64(rep.dual_objective),
                    to_f64(rep.primal_residual()),
                    to_f64(rep.dual_residual),
                    to_f64(rep.gap),
                    to_f64(mu),
                    to_f64(tau),
                    to_f64(kappa),
                );
            }
            if rep.primal_residual() <= self.settings.feas_tol
                && rep.dual_residual <= self.settings.feas_tol
                && rep.gap <= self.settings.gap_tol
            {
                return self.finish(SolveStatus::Optimal, pt, iter, start);
            }
            if let Some((status, cert)) = self.certificate(&x, &z, &s) {
                return self.finish(status, cert, iter, start);
            }
            if iter == self.settings.max_iterations {
                return self.finish(SolveStatus::IterationLimit, pt, iter, start);
            }
            if let Some(limit) = self.settings.time_limit_s {
                if start.elapsed().as_secs_f64() > limit {
                    return self.finish(SolveStatus::TimeLimit, pt, iter, start);
                }
            }

            if !cones.update_scaling(&s, &z, &mut lambda) || kkt.update(&cones).is_err() {
                return numerical(&self, &x, &z, &s, tau, iter);
            }

            // constant part: K [x1; z1] = [-c; b]
            for j in 0..n {
                rhs[j] = -self.c[j];
            }
            rhs[n..].copy_from_slice(&self.b);
            kkt.solve(&rhs, &mut x1);
            let denom = dot(&self.c, &x1[..n]) + dot(&self.b, &x1[n..]) - kappa / tau;

            // predictor, then corrector
            let mut sigma = T::zero();
            let mut dtau_aff = T::zero();
            let mut dkappa_aff = T::zero();
            let mut step = T::zero();
            let mut dtau = T::zero();
            let mut dkappa = T::zero();
            for phase in 0..2 {
                let eta = one - sigma;
                let dkap_rhs = if phase == 0 {
                    cones.jordan_mul(&lambda, &lambda, &mut ds);
                    tau * kappa
                } else {
                    // second-order term (W⁻¹ Δs_a) ∘ (W Δz_a)
                    cones.w_mul(&dss, &mut tmp, true);
                    cones.w_mul(&dz, &mut tmp2, false);
                    let mut corr = vec![T::zero(); m];
                    cones.jordan_mul(&tmp, &tmp2, &mut corr);
                    cones.jordan_mul(&lambda, &lambda, &mut ds);
                    axpy(one, &corr, &mut ds);
                    cones.add_identity(&mut ds, -sigma * mu);
                    tau * kappa + dtau_aff * dkappa_aff - sigma * mu
                };
                // ξ = W (λ \ d_s)
                cones.jordan_div(&lambda, &ds, &mut tmp);
                cones.w_mul(&tmp, &mut xi, false);

                for j in 0..n {
                    rhs[j] = -eta * rx[j];
                }
                for i in 0..m {
                    rhs[n + i] = -eta * rz[i] + xi[i];
                }
                kkt.solve(&rhs, &mut x2);
                if self.settings.verbose {
                    log::debug!(
                        "phase {phase}: kkt residual {:.2e} (rhs {:.2e}), regularized pivots {}",
                        to_f64(kkt.last_residual),
                        to_f64(norm_inf(&rhs)),
                        kkt.regularized_pivots()
                    );
                }
                let dt = (-eta * rtau - dot(&self.c, &x2[..n]) - dot(&self.b, &x2[n..])
                    + dkap_rhs / tau)
                    / denom;
                for j in 0..n {
                    dx[j] = x2[j] + dt * x1[j];
                }
                for i in 0..m {
                    dz[i] = x2[n + i] + dt * x1[n + i];
                }
                // Δs = -ξ - W² Δz
                cones.w_mul(&dz, &mut tmp, false);
                cones.w_mul(&tmp, &mut tmp2, false);
                for i in 0..m {
                    dss[i] = -xi[i] - tmp2[i];
                }
                let dk = -(dkap_rhs + kappa * dt) / tau;

                let mut amax = cones.max_step(&s, &dss, one).min(cones.max_step(&z, &dz, one));
                if dt < T::zero() {
                    amax = amax.min(-tau / dt);
                }
                if dk < T::zero() {
                    amax = amax.min(-kappa / dk);
                }
                if phase == 0 {
                    dtau_aff = dt;
                    dkappa_aff = dk;
                    let a = amax.min(one);
                    sigma = (one - a).powi(3);
                } else {
                    step = (lit::<T>(STEP_FRACTION) * amax).min(one);
                    dtau = dt;
                    dkappa = dk;
                }
            }

            if !(step > lit(MIN_STEP)) || !step.is_finite() {
                tiny_steps += 1;
                if tiny_steps >= MAX_TINY_STEPS || !step.is_finite() {
                    return numerical(&self, &x, &z, &s, tau, iter);
                }
            } else {
                tiny_steps = 0;
            }
            axpy(step, &dx, &mut x);
            axpy(step, &dz, &mut z);
            axpy(step, &dss, &mut s);
            tau += step * dtau;
            kappa += step * dkappa;
            if !(tau > T::zero() && kappa > T::zero()) || x.iter().any(|v| !v.is_finite()) {
                return numerical(&self, &x, &z, &s, tau.max(T::min_positive_value()), iter);
            }
        }
        unreachable!("loop returns at max_iterations")
    }
}
