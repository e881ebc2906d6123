//! Statevector simulation of the adaptive schedule as an `nb`-qubit search.
//!
//! Both phase operators are rank-one, so every step costs `O(2^nb)`:
//! the target phase touches one amplitude and the `|s'⟩` phase is a
//! projection onto the start vector followed by an axpy.
//!
//! The start vector defaults to the uniform superposition `H^{⊗nb}|0…0⟩`,
//! whose angle to the target is `γ = 2 arccos(2^{−nb/2})`. A start at an
//! arbitrary angle is also available: `cos(γ/2)` on the target and the
//! remaining weight spread evenly over the other basis states.

use num_complex::Complex64;
use thiserror::Error;

use crate::bloch::QubitState;
use crate::schedule::{steps_to_success, AfgaParams, ScheduleError, ScheduleIter};

pub const MAX_QUBITS: usize = 24;

/// Default success tolerance for [`run_afga_search`].
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("qubit count {0} is outside 1..={max}", max = MAX_QUBITS)]
    QubitCount(usize),
    #[error("target index {index} is outside 0..{size}")]
    TargetIndex { index: usize, size: usize },
    #[error("tolerance must lie in (0, 1), got {0}")]
    Tolerance(f64),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("success probability {best:.3e} short of 1 - {tol:e} after {steps} steps")]
    NotConverged {
        steps: usize,
        best: f64,
        tol: f64,
        trace: SearchTrace,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchState {
    nb: usize,
    target_index: usize,
    amps: Vec<Complex64>,
    // amplitudes of |s'⟩: one value on the target, one on every other index
    start_target: f64,
    start_other: f64,
}

impl SearchState {
    /// Uniform superposition over `2^nb` basis states with a single marked index.
    pub fn init_uniform(nb: usize, target_index: usize) -> Result<Self, SearchError> {
        let size = check_size(nb, target_index)?;
        let a = (size as f64).sqrt().recip();
        Ok(Self::from_start(nb, target_index, a, a))
    }

    /// Start vector at angle `gamma ∈ [0, π]` from the target on the Bloch sphere.
    pub fn init_with_angle(
        nb: usize,
        target_index: usize,
        gamma: f64,
    ) -> Result<Self, SearchError> {
        let size = check_size(nb, target_index)?;
        AfgaParams::new(gamma, 0.0, 0)?;
        let (s, c) = (0.5 * gamma).sin_cos();
        Ok(Self::from_start(
            nb,
            target_index,
            c,
            s / ((size - 1) as f64).sqrt(),
        ))
    }

    fn from_start(nb: usize, target_index: usize, start_target: f64, start_other: f64) -> Self {
        let size = 1usize << nb;
        let mut amps = vec![Complex64::new(start_other, 0.0); size];
        amps[target_index] = Complex64::new(start_target, 0.0);
        SearchState {
            nb,
            target_index,
            amps,
            start_target,
            start_other,
        }
    }

    pub fn nb(&self) -> usize {
        self.nb
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn target_index(&self) -> usize {
        self.target_index
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// Angle between the start vector and the target on the Bloch sphere.
    pub fn gamma(&self) -> f64 {
        2.0 * self.start_target.clamp(-1.0, 1.0).acos()
    }

    /// `|⟨t|ψ⟩|²`.
    pub fn success_probability(&self) -> f64 {
        self.amps[self.target_index].norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Multiplies the target amplitude by `e^{i·phase}`.
    pub fn apply_target_phase(&mut self, phase: f64) {
        self.amps[self.target_index] *= Complex64::from_polar(1.0, phase);
    }

    /// `ψ ← ψ + (e^{i·phase} − 1) ⟨s'|ψ⟩ |s'⟩`.
    pub fn apply_sprime_phase(&mut self, phase: f64) {
        let t = self.target_index;
        let rest: Complex64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != t)
            .map(|(_, a)| *a)
            .sum();
        let overlap = self.amps[t] * self.start_target + rest * self.start_other;
        let k = (Complex64::from_polar(1.0, phase) - 1.0) * overlap;
        let (kt, ko) = (k * self.start_target, k * self.start_other);
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a += if i == t { kt } else { ko };
        }
    }

    /// The start vector `|s'⟩` as a dense amplitude vector.
    pub fn start_vector(&self) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(self.start_other, 0.0); self.len()];
        v[self.target_index] = Complex64::new(self.start_target, 0.0);
        v
    }

    /// Components along `|t⟩` and along the normalized uniform superposition of
    /// the non-target states. This is the single-qubit state `a0|0⟩ + a1|1⟩`.
    pub fn reduced(&self) -> [Complex64; 2] {
        let t = self.target_index;
        let rest: Complex64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != t)
            .map(|(_, a)| *a)
            .sum();
        [self.amps[t], rest / ((self.len() - 1) as f64).sqrt()]
    }

    pub fn reduced_state(&self) -> Option<QubitState> {
        let [a0, a1] = self.reduced();
        QubitState::new(a0, a1)
    }

    /// Norm of the component orthogonal to the span of `|t⟩` and `|s'⟩`.
    pub fn subspace_residual(&self) -> f64 {
        let [_, r] = self.reduced();
        let other = r / ((self.len() - 1) as f64).sqrt();
        let t = self.target_index;
        self.amps
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != t)
            .map(|(_, a)| (a - other).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest distance between any non-target amplitude and the first one.
    pub fn non_target_spread(&self) -> f64 {
        let t = self.target_index;
        let mut others = self
            .amps
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != t)
            .map(|(_, a)| *a);
        let Some(first) = others.next() else {
            return 0.0;
        };
        others.map(|a| (a - first).norm()).fold(0.0, f64::max)
    }
}

fn check_size(nb: usize, target_index: usize) -> Result<usize, SearchError> {
    if !(1..=MAX_QUBITS).contains(&nb) {
        return Err(SearchError::QubitCount(nb));
    }
    let size = 1usize << nb;
    if target_index >= size {
        return Err(SearchError::TargetIndex {
            index: target_index,
            size,
        });
    }
    Ok(size)
}

/// Success probabilities after `0, 1, …, steps` operator applications.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchTrace {
    pub success: Vec<f64>,
    pub final_state: SearchState,
}

impl SearchTrace {
    /// Number of steps taken.
    pub fn steps(&self) -> usize {
        self.success.len() - 1
    }

    pub fn final_success(&self) -> f64 {
        *self
            .success
            .last()
            .expect("trace always holds the initial sample")
    }
}

/// Per-step observer for [`evolve_search`].
pub trait StepObserver {
    fn observe(&mut self, step: usize, state: &SearchState);
}

impl StepObserver for () {
    fn observe(&mut self, _: usize, _: &SearchState) {}
}

impl<F: FnMut(usize, &SearchState)> StepObserver for F {
    fn observe(&mut self, step: usize, state: &SearchState) {
        self(step, state)
    }
}

/// Runs the adaptive schedule from `state` until `success ≥ 1 − tol` or
/// `max_steps` steps have been applied. Returns the trace either way;
/// the boolean says whether the tolerance was met.
pub fn evolve_search(
    mut state: SearchState,
    del_lam: f64,
    max_steps: usize,
    tol: f64,
    observer: &mut impl StepObserver,
) -> Result<(SearchTrace, bool), SearchError> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(SearchError::Tolerance(tol));
    }
    let gamma = state.gamma();
    AfgaParams::new(gamma, del_lam, 0)?;

    let mut success = vec![state.success_probability()];
    observer.observe(0, &state);
    let mut schedule = ScheduleIter::new(gamma, del_lam);
    while success.last().is_some_and(|&p| p < 1.0 - tol) && success.len() <= max_steps {
        let row = schedule.next().expect("schedule is infinite");
        state.apply_target_phase(del_lam);
        state.apply_sprime_phase(row.alpha_j);
        success.push(state.success_probability());
        observer.observe(success.len() - 1, &state);
    }
    let converged = success.last().is_some_and(|&p| p >= 1.0 - tol);
    Ok((
        SearchTrace {
            success,
            final_state: state,
        },
        converged,
    ))
}

/// Steps the single-qubit schedule needs to reach `success ≥ 1 − tol`,
/// times ten. Used as the default step budget.
pub fn default_max_steps(gamma: f64, del_lam: f64, tol: f64) -> Result<usize, SearchError> {
    Ok(10 * steps_to_success(gamma, del_lam, tol)?.max(1))
}

/// Adaptive search for one marked item among `2^nb`, starting from the
/// uniform superposition. `max_steps = None` uses [`default_max_steps`].
pub fn run_afga_search(
    nb: usize,
    target_index: usize,
    del_lam: f64,
    max_steps: Option<usize>,
    tol: f64,
) -> Result<SearchTrace, SearchError> {
    let state = SearchState::init_uniform(nb, target_index)?;
    run_from(state, del_lam, max_steps, tol)
}

/// As [`run_afga_search`] but from an arbitrary start angle.
pub fn run_afga_search_from_angle(
    nb: usize,
    target_index: usize,
    gamma: f64,
    del_lam: f64,
    max_steps: Option<usize>,
    tol: f64,
) -> Result<SearchTrace, SearchError> {
    let state = SearchState::init_with_angle(nb, target_index, gamma)?;
    run_from(state, del_lam, max_steps, tol)
}

fn run_from(
    state: SearchState,
    del_lam: f64,
    max_steps: Option<usize>,
    tol: f64,
) -> Result<SearchTrace, SearchError> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(SearchError::Tolerance(tol));
    }
    let max_steps = match max_steps {
        Some(n) => n,
        None => default_max_steps(state.gamma(), del_lam, tol)?,
    };
    let (trace, converged) = evolve_search(state, del_lam, max_steps, tol, &mut ())?;
    if converged {
        Ok(trace)
    } else {
        Err(SearchError::NotConverged {
            steps: trace.steps(),
            best: trace.success.iter().copied().fold(0.0, f64::max),
            tol,
            trace,
        })
    }
}

/// `ψ ← H^{⊗nb} ψ` by the in-place butterfly.
pub fn apply_hadamard_all(amps: &mut [Complex64]) {
    let n = amps.len();
    debug_assert!(n.is_power_of_two());
    let norm = std::f64::consts::FRAC_1_SQRT_2;
    let mut half = 1;
    while half < n {
        for block in (0..n).step_by(2 * half) {
            for i in block..block + half {
                let (a, b) = (amps[i], amps[i + half]);
                amps[i] = (a + b) * norm;
                amps[i + half] = (a - b) * norm;
            }
        }
        half *= 2;
    }
}
