//! Fulton–MacPherson operads, their Boardman–Vogt resolutions, and an
//! explicit equivariant equivalence between them.

mod error;

pub mod beta;
pub mod checks;
pub mod collar;
pub mod config;
pub mod dot;
pub mod fm;
pub mod group;
pub mod json;
pub mod tree;
pub mod w;

pub use error::{Error, Result};
