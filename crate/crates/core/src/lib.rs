//! Exact scattering diagrams, broken lines and theta functions for log
//! Calabi-Yau surfaces, together with the del Pezzo mirror-family
//! assembly and Jacobian-ring dimension checks.

pub mod base;
pub mod broken;
pub mod dp2;
pub mod error;
pub mod fixtures;
pub mod jacobian;
pub mod lattice;
pub mod pipeline;
pub mod poly;
pub mod relations;
pub mod scatter;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
