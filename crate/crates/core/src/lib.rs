//! embedcheck: numerical verification of compact Sobolev embeddings on rough
//! planar domains.
//!
//! The crate builds rough-domain families (profile graphs with jumps, affine
//! images, finite unions, quasiisometric and 2-quasiconformal images),
//! checks the interior inequalities that drive the compactness argument with
//! their explicit constants, analyzes map dilatations, and computes discrete
//! Neumann-type embedding spectra as a desk-scale compactness proxy.

pub mod config;
pub mod domain;
pub mod error;
pub mod inequality;
pub mod map;
pub mod profile;
pub mod spectrum;
pub mod trig;

pub use error::{Error, Result};
