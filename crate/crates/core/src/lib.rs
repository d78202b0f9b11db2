//! Optimal jamming for a full-duplex legitimate monitor that eavesdrops a
//! Rayleigh-fading suspicious link.
//!
//! The suspicious transmitter adapts its rate so that its receiver's outage
//! stays at a target `delta`; jamming lowers that rate and makes it easier
//! to overhear. [`closed_form`] gives the optimal jamming power in closed
//! form, [`monte_carlo`] checks every formula by simulation, and
//! [`experiments`] produces the sweep tables.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`.

// `!(x > 0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod closed_form;
pub mod error;
pub mod experiments;
pub mod lambert;
pub mod monte_carlo;
pub mod params;
pub mod scalar;
pub mod validation;

pub use closed_form::{
    avg_rate, avg_rate_derivative, instantaneous_rates, p0_outage, p1_outage, psi, psi_inv, r_star,
    solve_optimal, Regime,
};
pub use error::{Error, Result};
pub use experiments::Scheme;
pub use lambert::{lambert_w0, lambert_w0_of_exp};
pub use params::{db_to_linear, linear_to_db, ParamsBuilder};
pub use scalar::Scalar;

pub type SystemParams = params::SystemParams<f64>;
pub type SystemParamsF32 = params::SystemParams<f32>;
pub type ClosedFormSolution = closed_form::ClosedFormSolution<f64>;
pub type ChannelRealizationRates = closed_form::ChannelRealizationRates<f64>;
pub type ChannelDraw = monte_carlo::ChannelDraw<f64>;
pub type MonteCarloEstimate = monte_carlo::MonteCarloEstimate<f64>;
pub type Probability = params::Probability<f64>;
pub type RateBpsHz = params::RateBpsHz<f64>;
pub type PowerLinear = params::PowerLinear<f64>;
pub type PowerDb = params::PowerDb<f64>;
pub type QSweep = experiments::SweepTable<experiments::QRow<f64>>;
pub type GainSweep = experiments::SweepTable<experiments::GainRow<f64>>;
