//! Bi-objective power allocation for multi-cell OFDMA networks.
//!
//! This crate computes the full efficient frontier (throughput contribution
//! versus power consumption) of each base station in an interference-coupled
//! OFDMA network. The frontier is traced by reference-point scalarization
//! with adaptive parameter control: each scalar subproblem is solved on a
//! hyperplane segment in objective space, and first-order sensitivity of the
//! solution with respect to the reference point drives both the step-size
//! rule (equal spacing of frontier points) and warm starts.
//!
//! Modules:
//! - [`moo`]: objective pairs, cone dominance, nondominated filtering, the
//!   problem abstraction and frontier container.
//! - [`solver`]: scalarized-subproblem solver over the power simplex-box
//!   with Lagrange multiplier recovery.
//! - [`sensitivity`]: active-set classification and directional derivatives
//!   of the solution in the reference point.
//! - [`apc`]: the adaptive parameter control loop assembling the frontier.
//! - [`cellnet`]: the multi-cell OFDMA instance — scenario generation,
//!   rate/pricing model, per-BS problem builder and baseline allocators.
//! - [`problems`]: small analytic problems used in tests and examples.
//!
//! The crate is `no_std`-compatible (with `alloc`): disable the default
//! `std` feature and enable `libm` for the float math backend.

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("pareto-apc-core requires either the `std` or the `libm` feature");

extern crate alloc;

pub(crate) mod math;

pub mod apc;
pub mod cellnet;
pub mod linalg;
pub mod moo;
pub mod problems;
pub mod sensitivity;
pub mod solver;

pub use moo::{dominates, filter_nondominated, BiObjectiveProblem, ObjectivePair, ParetoFront};
pub use solver::{SolverConfig, SpParameters, SpSolution};
