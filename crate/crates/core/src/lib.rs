//! Measurement as coupling of a quantum system to a classical pointer over a
//! finite abelian group: Kac–Takesaki operators, instruments, amplification
//! cascades, crossed products and symmetry-breaking sector bookkeeping.

pub mod algebra;
pub mod amplifier;
pub mod crossed;
pub mod error;
pub mod group;
pub mod instrument;
pub mod kt;
pub mod linalg;
pub mod operator;
pub mod rep;
pub mod ssb;

pub use error::{Error, Result};
