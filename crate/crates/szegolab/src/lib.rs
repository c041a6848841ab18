//! szegolab — a pseudo-spectral laboratory for the half-wave Schrödinger
//! equation on the plane, its resonant cubic Szegő system, and the
//! Hankel/Lax-pair spectral diagnostics that govern its long-time behavior.

pub mod cli;
pub mod experiments;
pub mod grid;
pub mod halfwave;
pub mod hankel;
pub mod norms;
pub mod project;
pub mod resonant;
pub mod snapshot;
pub mod szego;
pub mod transform;

pub use cli::run_cli;
