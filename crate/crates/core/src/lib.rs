//! Stochastic-geometry simulator and channel-allocation solvers for D2D
//! multicast groups (MGs) that reuse cellular uplink channels, with exclusion
//! zones around the cellular users (CUs).
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: random network scenarios (uniform/PPP placement, exclusion
//!   filtering, max-power association of receivers to MG transmitters).
//! - [`radio`]: path loss, Rayleigh fading, SIR at MG receivers and at the BS,
//!   link rates and sum throughput.
//! - [`outage`]: closed-form outage probabilities for the Poisson hole model and
//!   a Monte Carlo oracle that checks them.
//! - [`power`]: feasible MG transmit-power intervals and power policies.
//! - [`combinatorics`]: subset-size vectors and disjoint subset families, with
//!   both the multiplicity-divided counting formula and the deduplicated count.
//! - [`allocation`]: exhaustive search, the MUSCA channel assignment heuristic
//!   and the fixed-MUSCA pipeline.
//! - [`harness`]: Monte Carlo sweeps, config parsing and CSV output.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix it to `f64`, which is what the harness uses.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocation;
pub mod combinatorics;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod outage;
pub mod power;
pub mod radio;
pub mod scalar;
pub mod seed;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Point = geometry::Point<f64>;
pub type SimParams = geometry::SimParams<f64>;
pub type NetworkScenario = geometry::NetworkScenario<f64>;
pub type FadingRealization = radio::FadingRealization<f64>;
pub type PowerVector = radio::PowerVector<f64>;
pub type PowerBounds = power::PowerBounds<f64>;
pub type OutageInputs = outage::OutageInputs<f64>;
pub type Allocation = allocation::Allocation<f64>;
