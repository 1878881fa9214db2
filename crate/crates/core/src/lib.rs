//! Exact evaluation of intersection pairings on moduli spaces of rank r bundles over a curve,
//! by iterated residues of explicit rational integrands over root bases.

pub mod error;
pub mod exact;
pub mod grassmann;
pub mod iber;
pub mod pairing;
pub mod roots;
pub mod symfun;

pub use error::{Error, Result};
