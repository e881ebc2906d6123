//! Adaptive fixed-point Grover search on the Bloch sphere.
//!
//! The algorithm drives a start state `ŝ'` toward the target `t̂ = ẑ` with a
//! sequence of phase pairs `(Δλ, α_j)`. Each step rotates `ŝ_j` about `ŷ` by
//! `-Δ̄γ_j`, so the angle `γ_j` between `ŝ_j` and `ẑ` falls monotonically to
//! zero for every `Δλ` in `(0, π)`.
//!
//! - [`bloch`]: unit vectors, kets, Pauli matrices and the SU(2)/SO(3) link.
//! - [`schedule`]: the closed-form recursion for `γ_j`, `Δ̄γ_j` and `α_j`.
//! - [`qubit`]: single-qubit statevector evolution and the ERR trace.
//! - [`search`]: the same schedule applied to `2^nb` amplitudes.
//! - [`asymptotics`]: the `Δλ = π` trap and the continuum limit `g(t)`.
//! - [`cli`]: the `afga` command-line tool.
//!
//! ```
//! use afga::schedule::{build_schedule, AfgaParams};
//!
//! let p = AfgaParams::from_degrees(173.15, 135.0, 20).unwrap();
//! let rows = build_schedule(&p);
//! assert!(rows[20].gamma_j.to_degrees().abs() < 0.1);
//! ```

pub mod asymptotics;
pub mod bloch;
pub mod cli;
pub mod qubit;
pub mod schedule;
pub mod search;

pub use bloch::{Mat2c, QubitState, UnitVec3};
pub use schedule::{build_schedule, AfgaParams, ScheduleRow};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/bloch.md")]
    mod bloch {}
    #[doc = include_str!("../../../book/src/schedule.md")]
    mod schedule {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
    #[doc = include_str!("../../../book/src/asymptotics.md")]
    mod asymptotics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
