//! Exact calculus of derivations, connections, Hasse derivations and truncated
//! jet algebras over weighted-graded presentations.

pub mod algebra;
pub mod connection;
pub mod error;
pub mod hasse;
pub mod io;
pub mod tensor;

pub use error::{Error, Result};
