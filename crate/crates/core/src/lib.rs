//! Point-count censuses of graded surface families over small finite fields.

pub mod census;
pub mod claims;
pub mod error;
pub mod families;
pub mod gf;
pub mod io;
pub mod picard;
pub mod smooth;
pub mod wps;

pub use error::{Error, Result};
