//! Ultracoherent vectors on bosonic Fock space.
pub mod circuit;
pub mod error;
pub mod fock;
pub mod json;
pub mod linalg;
pub mod random;
pub mod representation;
pub mod siegel;
pub mod state;
pub mod symplectic;
pub mod verify;
pub use error::{Error, Result};
