use super::AnalysisError;
use crate::program::{TimeMode, Trajectory};
use crate::scalar::{lit, Scalar};

/// How far the relaxed auxiliaries sit from their nonconvex definitions.
///
/// Arrays are indexed by segment; entry `i − 1` belongs to point/segment `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactnessReport<T> {
    /// `max_i |α_i − τ_i|/τ_i` with `τ_i = 1/v_i` (endpoint) or
    /// `2/(v_{i−1} + v_i)` (trapezoidal).
    pub max_alpha_dev_rel: T,
    /// `max_i |β_i − v_i²| / v_i²`.
    pub max_beta_dev_rel: T,
    /// Segment index `i` (1-based) attaining the α maximum.
    pub alpha_argmax: usize,
    pub beta_argmax: usize,
    pub alpha_dev: Vec<T>,
    pub beta_dev: Vec<T>,
}

/// Compares `α_i` with the segment's tight time per metre and `β_i` with
/// `v_i²`.
///
/// A terminal speed of exactly zero can only come from a pinned boundary
/// (free speeds are bounded away from zero); there the β deviation is taken
/// relative to the peak squared speed instead.
pub fn check_exactness<T: Scalar>(traj: &Trajectory<T>) -> Result<ExactnessReport<T>, AnalysisError> {
    let n = traj.n_segments();
    let v = &traj.speeds_mps;
    let peak = v.iter().fold(T::zero(), |m, &x| m.max(x));
    let mut alpha_dev = Vec::with_capacity(n);
    let mut beta_dev = Vec::with_capacity(n);
    for i in 1..=n {
        let pace = match traj.mode {
            TimeMode::Endpoint => v[i],
            TimeMode::Trapezoidal => (v[i - 1] + v[i]) / lit(2.0),
        };
        if !(pace > T::zero()) {
            return Err(AnalysisError::ZeroSpeed(i));
        }
        alpha_dev.push((traj.alphas_s_per_m[i - 1] - T::one() / pace).abs() * pace);

        let sq = v[i] * v[i];
        let beta = traj.betas_m2_per_s2[i];
        if sq > T::zero() {
            beta_dev.push((beta - sq).abs() / sq);
        } else if i == n && traj.mode == TimeMode::Trapezoidal && peak > T::zero() {
            beta_dev.push(beta.abs() / (peak * peak));
        } else {
            return Err(AnalysisError::ZeroSpeed(i));
        }
    }
    let argmax = |d: &[T]| {
        d.iter()
            .enumerate()
            .fold((0, T::zero()), |(bi, bv), (i, &x)| if x > bv { (i, x) } else { (bi, bv) })
    };
    let (ai, am) = argmax(&alpha_dev);
    let (bi, bm) = argmax(&beta_dev);
    Ok(ExactnessReport {
        max_alpha_dev_rel: am,
        max_beta_dev_rel: bm,
        alpha_argmax: ai + 1,
        beta_argmax: bi + 1,
        alpha_dev,
        beta_dev,
    })
}
