//! Stochastic-geometry models of a primary mmWave operator sharing its band
//! with a secondary operator whose base stations cap the average
//! interference they cause at their nearest (radio-distance) primary user.
//!
//! The crate provides
//! - [`geometry`]: channel, antenna and home-link primitives,
//! - [`montecarlo`]: network realizations and empirical SINR coverage,
//! - [`analytic`]: Laplace-functional coverage expressions evaluated by quadrature,
//! - [`economics`]: rate coverage, median rates, utilities and threshold sweeps.

pub mod analytic;
pub mod economics;
pub mod geometry;
pub mod montecarlo;
pub mod quadrature;
pub mod rng;
pub mod units;

pub use geometry::{
    AntennaPattern, Blockage, ChannelModel, GeometryError, HomeLinkDistribution, LinkType,
    OperatorConfig, PowerRule,
};
pub use quadrature::{Estimate, QuadError, QuadratureSpec};
