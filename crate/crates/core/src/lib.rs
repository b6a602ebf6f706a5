pub mod arith;
pub mod ball;
pub mod bidual;
pub mod certificate;
pub mod characters;
pub mod commands;
pub mod cyclo;
pub mod error;
pub mod euler;
pub mod field;
pub mod finite_field;
pub mod group;
pub mod group_ring;
pub mod kolyvagin;
pub mod linalg;
pub mod lvalues;
pub mod par;
pub mod places;
pub mod valuation;

pub use error::{Error, Result};
