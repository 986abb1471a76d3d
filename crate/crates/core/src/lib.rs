pub mod arith;
pub mod characters;
pub mod counting;
pub mod diophantine;
pub mod dual;
pub mod error;
pub mod precise;
pub mod quad;
pub mod shortsum;
pub mod sums;
pub mod verify;
pub mod weight;

pub use error::{Error, Result};
