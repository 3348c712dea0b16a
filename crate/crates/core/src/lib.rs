//! Analysis and simulation of two coupled Wilson-Cowan excitatory/inhibitory
//! pairs with distributed delays.
//!
//! The pipeline runs circuit ([`model`]) -> fixed point and reduced
//! coefficients ([`equilibrium`]) -> characteristic function ([`chareq`]) ->
//! regions and critical delays ([`stability`]), with time-domain checks in
//! [`simulate`] and [`spectrum`] and parameter-plane maps in [`sweep`].

pub mod chareq;
pub mod equilibrium;
pub mod error;
pub mod format;
pub mod model;
pub mod simulate;
pub mod spectrum;
pub mod stability;
pub mod sweep;

pub use error::{Error, Result};
