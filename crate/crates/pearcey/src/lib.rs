//! Exact WKB analysis of the Pearcey system.

pub mod algebra;
pub mod borel;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod quad;
pub mod stokes;
pub mod svg;
pub mod wkb;

pub use error::{Error, Result};
