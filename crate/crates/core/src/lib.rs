//! Strongly minimal reduction of linear system pencils, diagonal balancing of
//! rectangular pencils and the pole/zero/minimal-index structure of the
//! realized transfer function.

pub mod error;
pub mod exact;
pub mod fixtures;
pub mod io;
pub mod linalg;
pub mod matching;
pub mod mcmillan;
pub mod minreal;
pub mod pencil;
pub mod scaling;
pub mod staircase;

pub use error::{Error, Result};
