//! Deterministic simulator of a retro-reflective RIS terahertz SWIPT link.
//!
//! The library models a base station built around an actively amplified
//! reconfigurable intelligent surface (RIS) and a user equipment (UE) array,
//! both equipped with phase-conjugate circuits. Power bounces between the two
//! ends; each bounce conjugates the field, so the loop performs power
//! iteration on the channel Gram matrix and self-aligns onto the dominant
//! propagation mode. On top of the converged cycle the crate computes the
//! SWIPT link budget: transfer efficiency, charging power, SNR and capacity,
//! plus spatial field maps, beamwidths, field of view and maximum transfer
//! distance.
//!
//! Signals use the power-wave convention throughout: a complex amplitude `a`
//! carries `|a|^2` watts.

pub mod analysis;
pub mod channel;
pub mod cycle;
pub mod error;
pub mod geometry;
pub mod ris;
pub mod scenario;
pub mod swipt;

pub use error::{Result, SimError};
