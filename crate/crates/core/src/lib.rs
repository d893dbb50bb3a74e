//! Spectral and transport analysis of Sturmian Hamiltonians.

pub mod cf;
pub mod estimate;
pub mod io;
pub mod spectrum;
pub mod trace;
pub mod transport;

extern crate lapack_src;
extern crate openblas_src;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
