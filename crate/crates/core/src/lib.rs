pub mod arith;
pub mod collisions;
mod error;
pub mod farey;
pub mod fock;
pub mod markov;
pub mod norm;
pub mod ordering;
pub mod verify;

pub use error::{Error, Result};
