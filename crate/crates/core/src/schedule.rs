//! The adaptive phase schedule.
//!
//! Starting from `ŝ₀ = ŝ' = sin γ x̂ + cos γ ẑ`, each step rotates the state about ẑ
//! by `−Δλ` (onto the second longitude, giving `r̂_j`) and then about `ŝ'` by `−α_j`,
//! with `α_j` chosen so that the composite lands back on the x–z longitude:
//!
//! ```text
//! r̂_j     = R_z(−Δλ) ŝ_j
//! ŝ_{j+1} = R_s'(−α_j) r̂_j = R_y(−Δ̄γ_j) ŝ_j
//! γ_{j+1} = γ_j − Δ̄γ_j
//! ```
//!
//! `γ_j` is signed: in the tail it alternates sign when `Δλ > π/2`.

use std::f64::consts::PI;

use thiserror::Error;

use crate::bloch::{rotate, UnitVec3};

/// Hard cap on the number of steps scanned by [`steps_to_converge`].
pub const MAX_SCAN_STEPS: usize = 1_000_000;

/// Default convergence tolerance on `|γ_j|`, radians.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Below this value of `L⁴ = (L² sin α)² + (L² cos α)²` the α rotation axis is
/// parallel to `r̂_j` and α is returned as zero.
const DEGENERATE_L4: f64 = 1e-24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("gamma = {0} rad is outside [0, pi]")]
    GammaOutOfRange(f64),
    #[error("del_lam = {0} rad is outside [0, pi]")]
    DelLamOutOfRange(f64),
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("|gamma_j| did not fall below {tol} within {cap} steps")]
    NoConvergence { tol: f64, cap: usize },
}

/// The two algorithm inputs plus the number of steps to materialize.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AfgaParams {
    gamma: f64,
    del_lam: f64,
    num_steps: usize,
}

impl AfgaParams {
    /// `gamma` is the angle between `ŝ'` and the target ẑ, `del_lam` the fixed
    /// target phase. Both in radians, both in `[0, π]`.
    pub fn new(gamma: f64, del_lam: f64, num_steps: usize) -> Result<Self, ScheduleError> {
        if !(0.0..=PI).contains(&gamma) {
            return Err(ScheduleError::GammaOutOfRange(gamma));
        }
        if !(0.0..=PI).contains(&del_lam) {
            return Err(ScheduleError::DelLamOutOfRange(del_lam));
        }
        Ok(AfgaParams {
            gamma,
            del_lam,
            num_steps,
        })
    }

    /// Same as [`AfgaParams::new`] with angles in degrees. Values within `1e-9°`
    /// of 180° are snapped to π so that `180` is accepted.
    pub fn from_degrees(
        gamma_degs: f64,
        del_lam_degs: f64,
        num_steps: usize,
    ) -> Result<Self, ScheduleError> {
        Self::new(
            degs_to_rads(gamma_degs),
            degs_to_rads(del_lam_degs),
            num_steps,
        )
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn del_lam(&self) -> f64 {
        self.del_lam
    }

    pub fn num_steps(&self) -> usize {
        self.num_steps
    }

    pub fn with_num_steps(self, num_steps: usize) -> Self {
        AfgaParams { num_steps, ..self }
    }

    /// The start vector `ŝ' = sin γ x̂ + cos γ ẑ`.
    pub fn s_prime(&self) -> UnitVec3 {
        UnitVec3::in_xz_plane(self.gamma)
    }
}

pub(crate) fn degs_to_rads(degs: f64) -> f64 {
    if (degs - 180.0).abs() < 1e-9 {
        PI
    } else {
        degs.to_radians()
    }
}

/// One step of the schedule.
///
/// `gamma_j` and `s_j` describe the state before step `j`; `alpha_j`,
/// `dbar_gamma_j` and `r_j` describe step `j` itself.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScheduleRow {
    pub j: usize,
    pub gamma_j: f64,
    pub dbar_gamma_j: f64,
    pub alpha_j: f64,
    pub r_j: UnitVec3,
    pub s_j: UnitVec3,
}

/// `r̂_j·ŝ' = cos γ cos γ_j + sin γ sin γ_j cos Δλ`, clamped to `[−1, 1]`.
pub fn dot_rj_sprime(gamma: f64, gamma_j: f64, del_lam: f64) -> f64 {
    (gamma.cos() * gamma_j.cos() + gamma.sin() * gamma_j.sin() * del_lam.cos()).clamp(-1.0, 1.0)
}

/// The decrement `Δ̄γ_j = −γ + γ_j + ∠(r̂_j, ŝ')`, taking the angle in `[0, π]`.
pub fn dbar_gamma(gamma: f64, gamma_j: f64, del_lam: f64) -> f64 {
    let d = dot_rj_sprime(gamma, gamma_j, del_lam);
    let l = ((1.0 - d) * (1.0 + d)).max(0.0).sqrt();
    -gamma + gamma_j + l.atan2(d)
}

/// The phase `α_j` of the `ŝ'` rotation, from the `L² sin α_j` and `L² cos α_j`
/// closed forms. Returns a value in `(−π, π]`, or 0 when `r̂_j ∥ ŝ'`.
pub fn alpha(gamma: f64, gamma_j: f64, dbar_gamma_j: f64, del_lam: f64) -> f64 {
    let d = dot_rj_sprime(gamma, gamma_j, del_lam);
    let (s_gj, c_gj) = gamma_j.sin_cos();
    let (s_dl, c_dl) = del_lam.sin_cos();
    let (s_db, c_db) = dbar_gamma_j.sin_cos();
    let (s_diff, c_diff) = (gamma - gamma_j).sin_cos();

    let l2_sin = (gamma - gamma_j + dbar_gamma_j).sin() * s_gj * s_dl;
    let l2_cos = s_db * (c_gj * s_gj * (1.0 - c_dl) + s_diff * d)
        + c_db * (c_gj * c_gj + s_gj * s_gj * c_dl - c_diff * d);

    if l2_sin * l2_sin + l2_cos * l2_cos < DEGENERATE_L4 {
        0.0
    } else {
        l2_sin.atan2(l2_cos)
    }
}

/// Lazily generates the (infinite) schedule.
#[derive(Clone, Debug)]
pub struct ScheduleIter {
    gamma: f64,
    del_lam: f64,
    j: usize,
    gamma_j: f64,
    s_j: UnitVec3,
}

impl ScheduleIter {
    pub fn new(gamma: f64, del_lam: f64) -> Self {
        ScheduleIter {
            gamma,
            del_lam,
            j: 0,
            gamma_j: gamma,
            s_j: UnitVec3::in_xz_plane(gamma),
        }
    }
}

impl Iterator for ScheduleIter {
    type Item = ScheduleRow;

    fn next(&mut self) -> Option<ScheduleRow> {
        let dbar = dbar_gamma(self.gamma, self.gamma_j, self.del_lam);
        let row = ScheduleRow {
            j: self.j,
            gamma_j: self.gamma_j,
            dbar_gamma_j: dbar,
            alpha_j: alpha(self.gamma, self.gamma_j, dbar, self.del_lam),
            r_j: rotate(self.s_j, UnitVec3::Z, -self.del_lam),
            s_j: self.s_j,
        };
        self.j += 1;
        self.gamma_j -= dbar;
        self.s_j = rotate(self.s_j, UnitVec3::Y, -dbar);
        Some(row)
    }
}

/// Rows `j = 0..=num_steps`. The last row carries the final state together with
/// the α, Δ̄γ and r̂ of the step that would follow it.
pub fn build_schedule(params: &AfgaParams) -> Vec<ScheduleRow> {
    ScheduleIter::new(params.gamma, params.del_lam)
        .take(params.num_steps + 1)
        .collect()
}

/// First `j` with `|γ_j| < tol`, scanning at most [`MAX_SCAN_STEPS`] steps.
pub fn steps_to_converge(gamma: f64, del_lam: f64, tol: f64) -> Result<usize, ScheduleError> {
    first_step_where(gamma, del_lam, |g| g.abs() < tol, tol)
}

/// First `j` at which the success probability `cos²(γ_j/2)` reaches `1 − tol`.
pub fn steps_to_success(gamma: f64, del_lam: f64, tol: f64) -> Result<usize, ScheduleError> {
    first_step_where(
        gamma,
        del_lam,
        |g| 1.0 - (0.5 * g).sin().powi(2) >= 1.0 - tol,
        tol,
    )
}

fn first_step_where(
    gamma: f64,
    del_lam: f64,
    done: impl Fn(f64) -> bool,
    tol: f64,
) -> Result<usize, ScheduleError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(ScheduleError::BadTolerance(tol));
    }
    AfgaParams::new(gamma, del_lam, 0)?;
    ScheduleIter::new(gamma, del_lam)
        .take(MAX_SCAN_STEPS + 1)
        .find(|row| done(row.gamma_j))
        .map(|row| row.j)
        .ok_or(ScheduleError::NoConvergence {
            tol,
            cap: MAX_SCAN_STEPS,
        })
}

/// Residual of the defining identity `R_s'(−α_j) R_z(−Δλ) ŝ_j = R_y(−Δ̄γ_j) ŝ_j`.
pub fn recursion_residual(params: &AfgaParams, row: &ScheduleRow) -> f64 {
    let via_sprime = rotate(row.r_j, params.s_prime(), -row.alpha_j);
    let via_y = rotate(row.s_j, UnitVec3::Y, -row.dbar_gamma_j);
    via_sprime.max_abs_diff(&via_y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(x: f64) -> f64 {
        x.to_radians()
    }

    #[test]
    fn params_validate_range() {
        assert!(AfgaParams::new(-0.1, 1.0, 3).is_err());
        assert!(AfgaParams::new(1.0, 3.5, 3).is_err());
        assert!(AfgaParams::new(f64::NAN, 1.0, 3).is_err());
        assert!(AfgaParams::from_degrees(180.0, 180.0, 1).is_ok());
        assert!(AfgaParams::from_degrees(180.1, 90.0, 1).is_err());
    }

    #[test]
    fn dot_trivial_cases() {
        assert_eq!(dot_rj_sprime(0.0, 0.0, 1.234), 1.0);
        let g = 0.77;
        assert!((dot_rj_sprime(g, g, 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dot_matches_explicit_vectors_on_reference_row() {
        let (g, dl) = (deg(173.15), deg(135.0));
        let s_prime = UnitVec3::in_xz_plane(g);
        let r0 = rotate(s_prime, UnitVec3::Z, -dl);
        assert!((r0.dot(&s_prime) - dot_rj_sprime(g, g, dl)).abs() < 1e-10);
        // printed row 0 of the reference table
        let r_printed = UnitVec3::new(-0.084337, -0.084337, -0.99286).unwrap();
        let s_printed = UnitVec3::new(0.11927, 0.0, -0.99286).unwrap();
        assert!((r_printed.dot(&s_printed) - dot_rj_sprime(g, g, dl)).abs() < 1e-5);
    }

    #[test]
    fn dbar_gamma_cases() {
        assert_eq!(dbar_gamma(0.0, 0.0, 0.3), 0.0);
        let d = dbar_gamma(deg(173.15), deg(173.15), deg(135.0));
        assert!((d.to_degrees() - 12.65).abs() < 0.02, "{}", d.to_degrees());
        // antipodal start does not move
        assert_eq!(dbar_gamma(PI, PI, PI), 0.0);
    }

    #[test]
    fn alpha_reference_values() {
        let (g, dl) = (deg(173.15), deg(135.0));
        let d0 = dbar_gamma(g, g, dl);
        assert!((alpha(g, g, d0, dl).to_degrees() - 157.35).abs() < 0.02);
        let row14 = &build_schedule(&AfgaParams::new(g, dl, 14).unwrap())[14];
        assert!((row14.alpha_j.to_degrees() - 85.904).abs() < 0.02);
    }

    #[test]
    fn alpha_at_target_is_noop_and_consistent() {
        let p = AfgaParams::new(1.1, 0.7, 0).unwrap();
        let db = dbar_gamma(p.gamma(), 0.0, p.del_lam());
        assert!(db.abs() < 1e-15);
        let a = alpha(p.gamma(), 0.0, db, p.del_lam());
        let row = ScheduleRow {
            j: 0,
            gamma_j: 0.0,
            dbar_gamma_j: db,
            alpha_j: a,
            r_j: rotate(UnitVec3::Z, UnitVec3::Z, -p.del_lam()),
            s_j: UnitVec3::Z,
        };
        assert!(recursion_residual(&p, &row) < 1e-9);
    }

    #[test]
    fn start_equals_target() {
        let rows = build_schedule(&AfgaParams::new(0.0, 1.3, 5).unwrap());
        assert_eq!(rows.len(), 6);
        for r in rows {
            assert_eq!(r.gamma_j, 0.0);
            assert_eq!(r.alpha_j, 0.0);
            assert!(r.s_j.max_abs_diff(&UnitVec3::Z) < 1e-15);
        }
    }

    #[test]
    fn reference_run_final_gamma() {
        let rows = build_schedule(&AfgaParams::from_degrees(173.15, 135.0, 20).unwrap());
        assert_eq!(rows.len(), 21);
        assert!((rows[20].gamma_j.to_degrees() - 0.086014).abs() < 1e-3);
        assert!((rows[15].gamma_j.to_degrees() + 0.48).abs() < 1e-3);
    }

    #[test]
    fn rows_satisfy_invariants() {
        for &(g, dl) in &[
            (21.15, 45.0),
            (90.0, 90.0),
            (169.15, 135.0),
            (120.0, 10.0),
            (60.0, 180.0),
        ] {
            let p = AfgaParams::from_degrees(g, dl, 60).unwrap();
            let rows = build_schedule(&p);
            for w in rows.windows(2) {
                let (a, b) = (&w[0], &w[1]);
                assert!(a.s_j.y().abs() < 1e-10);
                assert!(
                    a.r_j
                        .max_abs_diff(&rotate(a.s_j, UnitVec3::Z, -p.del_lam()))
                        < 1e-10
                );
                assert!(
                    b.s_j
                        .max_abs_diff(&rotate(a.s_j, UnitVec3::Y, -a.dbar_gamma_j))
                        < 1e-10
                );
                assert!(b.s_j.max_abs_diff(&UnitVec3::in_xz_plane(b.gamma_j)) < 1e-10);
                assert!((b.gamma_j - (a.gamma_j - a.dbar_gamma_j)).abs() < 1e-15);
                assert!(recursion_residual(&p, a) < 1e-9, "{g} {dl} j={}", a.j);
            }
        }
    }

    #[test]
    fn antipodal_start_is_stuck() {
        let rows = build_schedule(&AfgaParams::new(PI, PI, 10).unwrap());
        assert!(rows
            .iter()
            .all(|r| r.dbar_gamma_j == 0.0 && r.gamma_j == PI));
    }

    #[test]
    fn convergence_query() {
        let n = steps_to_converge(deg(173.15), deg(135.0), deg(0.1)).unwrap();
        // |γ_19| = 0.1209°, |γ_20| = 0.0860°
        assert_eq!(n, 20);
        assert_eq!(steps_to_converge(0.0, 1.0, 1e-9).unwrap(), 0);
        assert!(matches!(
            steps_to_converge(1.0, 1.0, 0.0),
            Err(ScheduleError::BadTolerance(_))
        ));
        assert!(matches!(
            steps_to_converge(PI, PI, 1e-9),
            Err(ScheduleError::NoConvergence { .. })
        ));
    }
}
