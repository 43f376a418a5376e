//! Minimal sufficient filters for information-feedback policies over finite
//! external systems.
//!
//! A policy that acts on observation histories needs only enough memory to
//! tell apart histories it treats differently now or later. This crate builds
//! the restriction of the history filter to a policy, minimizes it by
//! partition refinement, checks which filters support which policies, decides
//! when a sensor makes memory unnecessary, and applies the same machinery to
//! gap navigation in simple polygons.

pub mod bundled;
pub mod cli;
pub mod coupling;
pub mod dot;
pub mod error;
pub mod geometry;
pub mod gnt;
pub mod machine;
pub mod minimize;
pub mod reactive;
pub mod restriction;
pub mod scenario;
pub mod system;
pub mod ts;

pub use error::{Error, Result};
