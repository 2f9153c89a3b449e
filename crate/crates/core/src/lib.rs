//! Optimal precision bounds for estimating a scalar function of several
//! Hamiltonian parameters, together with a simulator for the protocol that
//! attains them.

pub mod adaptive;
pub mod bound;
pub mod error;
pub mod operator;
pub mod oracles;
pub mod protocol;
pub mod reshaping;
pub mod stream;

pub use error::{Error, Result};
