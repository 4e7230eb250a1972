//! Simulation and inversion of random elastic sources in two dimensions.
//!
//! A source `f = g + h·Ẇ` (deterministic mean `g`, diagonal standard
//! deviation `h`, white noise `Ẇ`) radiates into a homogeneous isotropic
//! medium. This crate evaluates the elastic Green tensor, simulates the
//! mild solution by Monte Carlo, assembles the first-kind integral operators
//! that relate boundary statistics to `g` and `h²`, and inverts them with a
//! regularized multi-frequency Kaczmarz sweep.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. File formats, configuration parsing and the command line live in
//! the companion `elasto` crate.
#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod experiment;
pub mod fredholm;
pub mod geometry;
pub mod green;
pub mod kaczmarz;
pub mod sources;
pub mod specfun;
pub mod stats;
pub mod stochastic;

pub use error::{Error, Result};
pub use geometry::{CellGrid, Point, Rect};
pub use green::{ElasticMedium, GreenTensor, KernelComponents, Wavenumbers};
pub use specfun::{BesselQuad, ComplexValue};
