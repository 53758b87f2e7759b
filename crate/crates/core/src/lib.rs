//! Natural-radiation background in superconducting-device substrates: a
//! closed-form rate model for the event rate R, the rate M of events above
//! 1 MeV and the deposited power P, and a two-stage Monte Carlo that checks
//! it.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod deposition;
pub mod error;
pub mod geometry;
pub mod histogram;
pub mod materials;
pub mod parallel;
pub mod phase_space;
pub mod pipeline;
pub mod rate_model;
pub mod reaiming;
pub mod sources;
pub mod species;
pub mod transport;
