//! Two limiting regimes of the adaptive schedule.
//!
//! **Saturation at `Δλ = π`.** The schedule then moves the state by the fixed
//! Grover angle `Δγ = 2(π − γ)` until it enters the band `[0, Δγ)` at step
//! `j_sat`, after which it bounces between `±Γ` forever, with
//! `Γ = min(γ_{j_sat}, Δγ − γ_{j_sat})`.
//!
//! **Continuum limit.** Replacing `j` by a real `t` and `γ_j` by `g(t)` turns the
//! decrement recursion into
//!
//! ```text
//! −dg/dt = −γ + g + μ(g),    cos μ = cos γ cos g + sin γ sin g cos Δλ
//! ```
//!
//! which is integrated here with classical RK4. Near the target `g` decays as
//! `exp(−t(1 − cos Δλ))`.
//!
//! `μ` is taken on the `arccos` branch `[0, π]`, where `min(μ, 2π − μ) = μ`.

use std::f64::consts::PI;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::schedule::{AfgaParams, ScheduleError, ScheduleIter};

/// Largest allowed step-doubling error estimate per accepted RK4 step.
pub const LOCAL_ERROR_TOL: f64 = 1e-8;

/// Default RK4 step.
pub const DEFAULT_H: f64 = 0.01;

const MAX_HALVINGS: u32 = 30;

// Slack on the sign of dg/dt; at g = 0 the right-hand side is 0 up to rounding.
const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticsError {
    #[error("gamma = {0} rad is outside the saturation range (pi/2, pi)")]
    SaturationRange(f64),
    #[error("mu(g) needs 0 <= g <= gamma <= pi, got g = {g}, gamma = {gamma}")]
    MuDomain { g: f64, gamma: f64 },
    #[error("continuum start gamma = {0} rad is outside (0, pi)")]
    ContinuumGamma(f64),
    #[error("del_lam = {0} rad is outside [0, pi]")]
    DelLam(f64),
    #[error("step size h = {0} must be positive and finite")]
    StepSize(f64),
    #[error("t_max = {0} must be non-negative and finite")]
    Horizon(f64),
    #[error("RK4 step at t = {t} rejected: error estimate stayed above {tol:e} after {halvings} halvings")]
    StepRejected { t: f64, tol: f64, halvings: u32 },
    #[error("g increased at t = {t} (dg/dt = {rate:e})")]
    NotMonotone { t: f64, rate: f64 },
    #[error("saturated tail does not alternate in sign at j = {j}")]
    NoAlternation { j: usize },
    #[error("window g in ({lo:e}, {hi:e}) holds {n} samples, need at least 3")]
    FitWindow { lo: f64, hi: f64, n: usize },
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// `Δλ = π` saturation data, angles in radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaturationReport {
    pub j_sat: usize,
    pub gamma_jsat: f64,
    pub del_gamma: f64,
    pub big_gamma: f64,
}

/// `Δλ = π` saturation data computed exactly, angles in degrees.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactSaturation {
    pub j_sat: u64,
    pub gamma_jsat: Ratio<i64>,
    pub del_gamma: Ratio<i64>,
    pub big_gamma: Ratio<i64>,
}

impl ExactSaturation {
    pub fn is_exact_landing(&self) -> bool {
        self.gamma_jsat.is_zero()
    }
}

/// Saturation step and trapped amplitude from uniform stepping by `Δγ`.
///
/// Requires `γ ∈ (π/2, π)` so that `0 < Δγ < π`. When `γ/Δγ` is within `1e-9`
/// of an integer the exact landing on the target is kept (`γ_{j_sat} = 0`).
pub fn saturation_analysis(gamma: f64) -> Result<SaturationReport, AsymptoticsError> {
    if !(gamma > PI / 2.0 && gamma < PI) {
        return Err(AsymptoticsError::SaturationRange(gamma));
    }
    let del_gamma = 2.0 * (PI - gamma);
    let q = gamma / del_gamma;
    let mut j_sat = q.floor();
    if (q - q.round()).abs() < 1e-9 {
        j_sat = q.round();
    }
    let gamma_jsat = (gamma - j_sat * del_gamma).max(0.0);
    Ok(SaturationReport {
        j_sat: j_sat as usize,
        gamma_jsat,
        del_gamma,
        big_gamma: gamma_jsat.min(del_gamma - gamma_jsat),
    })
}

/// [`saturation_analysis`] in exact rational degrees, `γ ∈ (90, 180)`.
pub fn saturation_analysis_degs(
    gamma_degs: Ratio<i64>,
) -> Result<ExactSaturation, AsymptoticsError> {
    let (ninety, one_eighty) = (Ratio::from_integer(90), Ratio::from_integer(180));
    if !(gamma_degs > ninety && gamma_degs < one_eighty) {
        return Err(AsymptoticsError::SaturationRange(
            gamma_degs.to_f64().unwrap_or(f64::NAN).to_radians(),
        ));
    }
    let del_gamma = (one_eighty - gamma_degs) * 2;
    let j_sat = (gamma_degs / del_gamma).floor();
    let gamma_jsat = gamma_degs - j_sat * del_gamma;
    let big_gamma = gamma_jsat.min(del_gamma - gamma_jsat);
    Ok(ExactSaturation {
        j_sat: j_sat.to_integer() as u64,
        gamma_jsat,
        del_gamma,
        big_gamma,
    })
}

/// Runs the `Δλ = π` schedule for `10·j_sat` steps (at least `j_sat + n_tail + 2`)
/// and returns `max ||γ_j| − Γ|` over the last `n_tail` rows.
///
/// Fails with [`AsymptoticsError::NoAlternation`] if, past `j_sat`, the sign of
/// `γ_j` does not flip at every step (checked only when `Γ > 1e-9`).
pub fn verify_saturation(gamma: f64, n_tail: usize) -> Result<f64, AsymptoticsError> {
    let report = saturation_analysis(gamma)?;
    let len = (10 * report.j_sat).max(report.j_sat + n_tail + 2);
    let rows: Vec<_> = ScheduleIter::new(gamma, PI).take(len + 1).collect();

    if report.big_gamma > 1e-9 {
        let trapped = &rows[report.j_sat + 1..];
        if let Some(first) = trapped.first() {
            log::debug!("first trapped gamma_j has sign {}", first.gamma_j.signum());
        }
        for w in trapped.windows(2) {
            if w[0].gamma_j.signum() == w[1].gamma_j.signum() {
                return Err(AsymptoticsError::NoAlternation { j: w[1].j });
            }
        }
    }

    Ok(rows[rows.len() - n_tail.min(rows.len())..]
        .iter()
        .map(|r| (r.gamma_j.abs() - report.big_gamma).abs())
        .fold(0.0, f64::max))
}

/// Side `μ ∈ [0, π]` of the spherical triangle with sides `γ`, `g` and included
/// angle `Δλ`.
pub fn mu_of_g(g: f64, gamma: f64, del_lam: f64) -> Result<f64, AsymptoticsError> {
    if !(0.0 <= g && g <= gamma && gamma <= PI) {
        return Err(AsymptoticsError::MuDomain { g, gamma });
    }
    Ok(mu_unchecked(g, gamma, del_lam))
}

fn mu_unchecked(g: f64, gamma: f64, del_lam: f64) -> f64 {
    (gamma.cos() * g.cos() + gamma.sin() * g.sin() * del_lam.cos())
        .clamp(-1.0, 1.0)
        .acos()
}

/// `dg/dt = γ − g − μ(g)`, never positive on `[0, γ]`.
pub fn continuum_rate(g: f64, gamma: f64, del_lam: f64) -> f64 {
    let g = g.clamp(0.0, gamma);
    gamma - g - mu_unchecked(g, gamma, del_lam)
}

/// `g(t)` sampled at `t = 0, h, 2h, …, t_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuumTrace {
    pub gamma: f64,
    pub del_lam: f64,
    pub h: f64,
    pub samples: Vec<(f64, f64)>,
}

impl ContinuumTrace {
    /// `g(t)`, linearly interpolated between samples and clamped to the horizon.
    pub fn value_at(&self, t: f64) -> f64 {
        let last = self.samples.len() - 1;
        let x = (t / self.h).max(0.0);
        let k = (x.floor() as usize).min(last);
        if k == last {
            return self.samples[last].1;
        }
        let frac = x - k as f64;
        self.samples[k].1 * (1.0 - frac) + self.samples[k + 1].1 * frac
    }

    /// `−dg/dt` at `t = 0` from the first sample pair.
    pub fn initial_slope(&self) -> f64 {
        match self.samples.as_slice() {
            [(t0, g0), (t1, g1), ..] => (g0 - g1) / (t1 - t0),
            _ => 0.0,
        }
    }
}

/// Integrates `−dg/dt = −γ + g + μ(g)` from `g(0) = γ` with RK4.
///
/// Every nominal step of size `h` is checked by step doubling; a step whose
/// error estimate exceeds [`LOCAL_ERROR_TOL`] is split in half (recursively, up
/// to 30 times) so the output grid stays at multiples of `h`. `g` is clamped
/// at 0.
pub fn integrate_continuum(
    gamma: f64,
    del_lam: f64,
    t_max: f64,
    h: f64,
) -> Result<ContinuumTrace, AsymptoticsError> {
    if !(gamma > 0.0 && gamma < PI) {
        return Err(AsymptoticsError::ContinuumGamma(gamma));
    }
    if !(0.0..=PI).contains(&del_lam) {
        return Err(AsymptoticsError::DelLam(del_lam));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(AsymptoticsError::StepSize(h));
    }
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(AsymptoticsError::Horizon(t_max));
    }

    let f = |g: f64| continuum_rate(g, gamma, del_lam);
    let n = (t_max / h).round() as usize;
    let mut samples = Vec::with_capacity(n + 1);
    let mut g = gamma;
    samples.push((0.0, g));
    for k in 0..n {
        let t = k as f64 * h;
        let rate = f(g);
        if rate > MONOTONE_SLACK {
            return Err(AsymptoticsError::NotMonotone { t, rate });
        }
        g = advance(&f, g, t, h, 0)?.max(0.0);
        samples.push(((k + 1) as f64 * h, g));
    }
    Ok(ContinuumTrace {
        gamma,
        del_lam,
        h,
        samples,
    })
}

fn rk4(f: &impl Fn(f64) -> f64, g: f64, h: f64) -> f64 {
    let k1 = f(g);
    let k2 = f(g + 0.5 * h * k1);
    let k3 = f(g + 0.5 * h * k2);
    let k4 = f(g + h * k3);
    g + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

fn advance(
    f: &impl Fn(f64) -> f64,
    g: f64,
    t: f64,
    h: f64,
    depth: u32,
) -> Result<f64, AsymptoticsError> {
    let full = rk4(f, g, h);
    let mid = rk4(f, g, 0.5 * h);
    let halves = rk4(f, mid, 0.5 * h);
    if (full - halves).abs() <= LOCAL_ERROR_TOL {
        return Ok(halves);
    }
    if depth >= MAX_HALVINGS {
        return Err(AsymptoticsError::StepRejected {
            t,
            tol: LOCAL_ERROR_TOL,
            halvings: depth,
        });
    }
    let mid = advance(f, g, t, 0.5 * h, depth + 1)?;
    advance(f, mid, t + 0.5 * h, 0.5 * h, depth + 1)
}

/// Least-squares slope of `−ln g` against `t` over samples with `lo < g < hi`.
pub fn fit_decay_rate(trace: &ContinuumTrace, lo: f64, hi: f64) -> Result<f64, AsymptoticsError> {
    let pts: Vec<(f64, f64)> = trace
        .samples
        .iter()
        .filter(|&&(_, g)| g > lo && g < hi)
        .map(|&(t, g)| (t, g.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(AsymptoticsError::FitWindow {
            lo,
            hi,
            n: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let (mt, my) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), &(t, y)| (a + t / n, b + y / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(sxy, sxx), &(t, y)| {
        (sxy + (t - mt) * (y - my), sxx + (t - mt) * (t - mt))
    });
    Ok(-sxy / sxx)
}

/// Small-`g` decay rate `1 − cos Δλ`.
pub fn tail_decay_rate(del_lam: f64) -> f64 {
    1.0 - del_lam.cos()
}

/// `−dg/dt` at `g = γ`, i.e. `μ(γ)`.
pub fn initial_slope(gamma: f64, del_lam: f64) -> f64 {
    let mu = mu_unchecked(gamma, gamma, del_lam);
    mu.min(2.0 * PI - mu)
}

/// `max over Δλ of |dg/dt|` at `g = γ`, attained at `Δλ = π`: `min(2γ, 2π − 2γ)`.
pub fn max_initial_slope(gamma: f64) -> f64 {
    (2.0 * gamma).min(2.0 * PI - 2.0 * gamma)
}

/// Discrete `γ_j` against `g(j)` for `j` up to the first `|γ_j| < stop`.
/// Returns `(j, γ_j, g(j))` triples.
pub fn discrete_vs_continuum(
    gamma: f64,
    del_lam: f64,
    stop: f64,
    h: f64,
) -> Result<Vec<(usize, f64, f64)>, AsymptoticsError> {
    AfgaParams::new(gamma, del_lam, 0)?;
    let rows: Vec<_> = {
        let mut out = Vec::new();
        for row in ScheduleIter::new(gamma, del_lam).take(crate::schedule::MAX_SCAN_STEPS) {
            let done = row.gamma_j.abs() < stop;
            out.push(row);
            if done {
                break;
            }
        }
        out
    };
    let t_max = rows.last().map_or(0, |r| r.j) as f64;
    let trace = integrate_continuum(gamma, del_lam, t_max, h)?;
    Ok(rows
        .iter()
        .map(|r| (r.j, r.gamma_j, trace.value_at(r.j as f64)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(x: f64) -> f64 {
        x.to_radians()
    }

    fn r(n: i64) -> Ratio<i64> {
        Ratio::from_integer(n)
    }

    #[test]
    fn exact_saturation_table() {
        for (g, dg, gj, big) in [(160, 40, 0, 0), (164, 32, 4, 4), (166, 28, 26, 2)] {
            let rep = saturation_analysis_degs(r(g)).unwrap();
            assert_eq!(rep.del_gamma, r(dg));
            assert_eq!(rep.gamma_jsat, r(gj));
            assert_eq!(rep.big_gamma, r(big));
        }
        assert!(saturation_analysis_degs(r(160)).unwrap().is_exact_landing());
        assert_eq!(saturation_analysis_degs(r(166)).unwrap().j_sat, 5);
        assert!(saturation_analysis_degs(r(90)).is_err());
        assert!(saturation_analysis_degs(r(180)).is_err());
    }

    #[test]
    fn float_saturation_table() {
        for (g, gj, big) in [(160.0, 0.0, 0.0), (164.0, 4.0, 4.0), (166.0, 26.0, 2.0)] {
            let rep = saturation_analysis(deg(g)).unwrap();
            assert!((rep.gamma_jsat.to_degrees() - gj).abs() < 1e-9);
            assert!((rep.big_gamma.to_degrees() - big).abs() < 1e-9);
            // band membership, with equality when the last step lands exactly
            let before = rep.gamma_jsat + rep.del_gamma;
            assert!(
                before >= rep.del_gamma && rep.gamma_jsat >= 0.0 && rep.gamma_jsat < rep.del_gamma
            );
        }
        assert!(saturation_analysis(deg(90.0)).is_err());
        assert!(saturation_analysis(PI).is_err());
    }

    #[test]
    fn simulated_tail_matches_gamma() {
        assert!(verify_saturation(deg(164.0), 10).unwrap() < 1e-6);
        assert!(verify_saturation(deg(166.0), 10).unwrap() < 1e-6);
        assert!(verify_saturation(deg(160.0), 10).unwrap() < 1e-6);
    }

    #[test]
    fn mu_special_values() {
        let g = deg(50.0);
        assert!((mu_of_g(g, g, PI).unwrap() - 2.0 * g).abs() < 1e-12);
        assert!((mu_of_g(0.0, g, 0.4).unwrap() - g).abs() < 1e-12);
        let small = 1e-4;
        let gamma = deg(70.0);
        let mu = mu_of_g(gamma, gamma, small).unwrap();
        assert!((mu / (gamma.sin() * small) - 1.0).abs() < 1e-6);
        assert!(mu_of_g(1.0, 0.5, 0.1).is_err());
        assert!(mu_of_g(-0.1, 0.5, 0.1).is_err());
    }

    #[test]
    fn rate_is_never_positive() {
        for gamma in [0.3, 1.2, 2.0, 3.0] {
            for dl in [0.0, 0.5, 1.5, PI] {
                for k in 0..=100 {
                    let g = gamma * k as f64 / 100.0;
                    assert!(continuum_rate(g, gamma, dl) <= MONOTONE_SLACK);
                }
            }
        }
    }

    #[test]
    fn rk4_solves_linear_decay() {
        // f(g) = -g through the same stepping code
        let f = |g: f64| -g;
        let mut g = 1.0;
        for k in 0..100 {
            g = advance(&f, g, k as f64 * 0.01, 0.01, 0).unwrap();
        }
        let err = (g - (-1.0f64).exp()).abs();
        assert!(err < 1e-10, "err = {err:e}");
    }

    #[test]
    fn initial_slopes() {
        assert!((initial_slope(deg(160.0), PI).to_degrees() - 40.0).abs() < 1e-9);
        assert!((initial_slope(deg(90.0), 1e-4) - 1e-4).abs() < 1e-10);
        assert!((max_initial_slope(PI / 2.0) - PI).abs() < 1e-15);
        assert!((max_initial_slope(deg(160.0)) - deg(40.0)).abs() < 1e-12);
        let trace = integrate_continuum(deg(160.0), PI, 0.01, 1e-4).unwrap();
        assert!((trace.initial_slope() - deg(40.0)).abs() < 1e-3);
    }

    #[test]
    fn integrator_rejects_bad_input() {
        assert!(integrate_continuum(0.0, 1.0, 1.0, 0.01).is_err());
        assert!(integrate_continuum(1.0, 4.0, 1.0, 0.01).is_err());
        assert!(integrate_continuum(1.0, 1.0, 1.0, 0.0).is_err());
        assert!(integrate_continuum(1.0, 1.0, -1.0, 0.01).is_err());
    }

    #[test]
    fn trace_is_monotone_and_starts_at_gamma() {
        let t = integrate_continuum(deg(120.0), deg(90.0), 30.0, DEFAULT_H).unwrap();
        assert_eq!(t.samples[0].1, deg(120.0));
        assert!(t.samples.windows(2).all(|w| w[1].1 <= w[0].1));
        assert!(t.samples.iter().all(|&(_, g)| g >= 0.0));
    }

    #[test]
    fn decay_rate_matches_small_angle_law() {
        let t = integrate_continuum(deg(120.0), deg(90.0), 40.0, DEFAULT_H).unwrap();
        let rate = fit_decay_rate(&t, 1e-8, 0.01).unwrap();
        assert!((rate / tail_decay_rate(deg(90.0)) - 1.0).abs() < 0.02);
        assert!(fit_decay_rate(&t, 10.0, 11.0).is_err());
    }
}
