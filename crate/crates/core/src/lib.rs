//! Partial isometries of wheel graphs.

pub mod closure;
pub mod error;
pub mod factor;
pub mod gens;
pub mod graphs;
pub mod isometry;
pub mod ptrans;
pub mod verify;
pub mod wheel;

pub use error::{Error, Result};
pub use ptrans::{Ambient, PartialInjection};
