//! Single-qubit simulation of the adaptive schedule and of the original Grover
//! iteration, in the SU(2) picture.
//!
//! The target is `|t⟩ = |0⟩` and the start is `|s'⟩ = |ŝ'⟩` with
//! `ŝ' = sin γ x̂ + cos γ ẑ`. Step `j` of the adaptive algorithm is
//!
//! ```text
//! E_j = exp(i α_j |s'⟩⟨s'|) · exp(i Δλ |t⟩⟨t|)
//! ```
//!
//! and `ERR = 1 − |⟨0|ψ⟩|² = (1 − ŝ_z)/2` after every completed step.

use num_complex::Complex64;

use crate::bloch::{
    bloch_vec_of, exp_i_paulion, ket_from_unit_vec, paulion, Mat2c, QubitState, UnitVec3,
};
use crate::schedule::{AfgaParams, ScheduleIter};

/// `I + (e^{i·phase} − 1)|r⟩⟨r|`, the rank-one phase `exp(i·phase·|r⟩⟨r|)`.
pub fn phase_op(r: &QubitState, phase: f64) -> Mat2c {
    let k = Complex64::from_polar(1.0, phase) - 1.0;
    Mat2c::identity() + r.projector().scale(k)
}

/// One adaptive step `E_j`.
#[derive(Clone, Copy, Debug)]
pub struct StepOperator {
    pub alpha_j: f64,
    pub del_lam: f64,
    pub s_prime: QubitState,
    pub t: QubitState,
}

impl StepOperator {
    pub fn new(alpha_j: f64, del_lam: f64, s_prime: QubitState) -> Self {
        StepOperator {
            alpha_j,
            del_lam,
            s_prime,
            t: QubitState::ZERO,
        }
    }

    /// `exp(i α_j |s'⟩⟨s'|) exp(i Δλ |t⟩⟨t|)` built from rank-one phases.
    pub fn matrix(&self) -> Mat2c {
        phase_op(&self.s_prime, self.alpha_j) * phase_op(&self.t, self.del_lam)
    }

    /// The same operator as `e^{i(α+Δλ)/2} exp(i α/2 σ_s') exp(i Δλ/2 σ_z)`.
    ///
    /// Requires `t = |0⟩`; `s_prime` must be the ket of `s_prime_vec`.
    pub fn factored_matrix(&self, s_prime_vec: UnitVec3) -> Mat2c {
        let phase = Complex64::from_polar(1.0, 0.5 * (self.alpha_j + self.del_lam));
        (exp_i_paulion(0.5 * self.alpha_j, s_prime_vec)
            * exp_i_paulion(0.5 * self.del_lam, UnitVec3::Z))
        .scale(phase)
    }
}

/// Which realization of `E_j` to multiply by.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StepForm {
    #[default]
    RankOne,
    Factored,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrSample {
    /// Number of operators applied so far.
    pub j: usize,
    pub err: f64,
    pub s_fin_z: f64,
}

/// ERR after `0, 1, …, n` steps.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ErrTrace {
    pub samples: Vec<ErrSample>,
}

impl ErrTrace {
    fn from_states(states: &[QubitState]) -> Self {
        let samples = states
            .iter()
            .enumerate()
            .map(|(j, psi)| ErrSample {
                j,
                err: 1.0 - psi.a0().norm_sqr(),
                s_fin_z: bloch_vec_of(*psi).z(),
            })
            .collect();
        ErrTrace { samples }
    }

    pub fn errs(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.err)
    }

    pub fn last(&self) -> Option<&ErrSample> {
        self.samples.last()
    }

    /// `max_j |ERR_j − (1 − z_j)/2|`.
    pub fn err_identity_residual(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.err - 0.5 * (1.0 - s.s_fin_z)).abs())
            .fold(0.0, f64::max)
    }
}

/// Statevector trajectory `ψ_0 = |s'⟩, ψ_{k+1} = E_k ψ_k` for `k < num_steps`.
pub fn evolve_afga_qubit(params: &AfgaParams, form: StepForm) -> Vec<QubitState> {
    let s_vec = params.s_prime();
    let s_prime = ket_from_unit_vec(s_vec);
    let mut psi = s_prime;
    let mut out = Vec::with_capacity(params.num_steps() + 1);
    out.push(psi);
    for row in ScheduleIter::new(params.gamma(), params.del_lam()).take(params.num_steps()) {
        let op = StepOperator::new(row.alpha_j, params.del_lam(), s_prime);
        let m = match form {
            StepForm::RankOne => op.matrix(),
            StepForm::Factored => op.factored_matrix(s_vec),
        };
        psi = psi.evolve(&m);
        out.push(psi);
    }
    out
}

/// ERR trace of the adaptive algorithm, `num_steps + 1` samples.
pub fn run_afga_qubit(params: &AfgaParams) -> ErrTrace {
    ErrTrace::from_states(&evolve_afga_qubit(params, StepForm::RankOne))
}

pub fn run_afga_qubit_with(params: &AfgaParams, form: StepForm) -> ErrTrace {
    ErrTrace::from_states(&evolve_afga_qubit(params, form))
}

/// Grover's iterate `G = −σ_s' σ_z` for the start at angle `gamma`.
pub fn grover_operator(gamma: f64) -> Mat2c {
    (paulion(UnitVec3::in_xz_plane(gamma)) * Mat2c::sigma_z()).scale(Complex64::new(-1.0, 0.0))
}

/// `Δγ = 2(π − γ)`, the fixed angle Grover's iterate moves the state by.
pub fn grover_step_angle(gamma: f64) -> f64 {
    2.0 * (std::f64::consts::PI - gamma)
}

/// ERR after `0..=n_steps` applications of `G` to `|s'⟩`.
pub fn run_grover_qubit(gamma: f64, n_steps: usize) -> ErrTrace {
    let g = grover_operator(gamma);
    let mut psi = ket_from_unit_vec(UnitVec3::in_xz_plane(gamma));
    let mut states = Vec::with_capacity(n_steps + 1);
    states.push(psi);
    for _ in 0..n_steps {
        psi = psi.evolve(&g);
        states.push(psi);
    }
    ErrTrace::from_states(&states)
}

/// Entrywise distance between `−σ_s' σ_z` and `cos(π−γ) I + i sin(π−γ) σ_y`.
pub fn check_g_factorization(gamma: f64) -> f64 {
    let half = std::f64::consts::PI - gamma;
    grover_operator(gamma).max_abs_diff(&exp_i_paulion(half, UnitVec3::Y))
}
