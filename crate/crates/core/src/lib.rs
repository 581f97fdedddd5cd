//! Finite p-groups of class three built from finite fields: constructions,
//! structural checks and an isoclinism search.

pub mod constructions;
pub mod error;
pub mod field;
pub mod group;
pub mod isoclinism;
pub mod structure;

pub use error::{Error, Result};
