//! Edge contraction for quivers with loops and multiple edges, at the level of
//! Cartan data, Weyl groups, representation spaces and Hall algebras over finite fields.

pub mod cache;
pub mod cartan;
pub mod error;
pub mod ffalg;
pub mod hall;
pub mod heart;
pub mod quiver;
pub mod random;
pub mod report;
pub mod repspace;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
