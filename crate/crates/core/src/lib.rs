//! Bound states at lattice singularities.
//!
//! A particle hopping on `M` copies of a `D`-dimensional grid that share a
//! single site localizes around that site. This crate builds those spaces
//! ([`space`]), assembles the tight-binding operator ([`hamiltonian`]), finds
//! its lowest eigenpairs ([`eigen`]), and analyses the result: closed forms in
//! one dimension ([`analytic`]), radial Bessel fits ([`specfun`],
//! [`fitting`]), finite-size extrapolation and the mapping from a singularity
//! to an equivalent on-site potential ([`analysis`]). The [`cli`] module is the
//! command-line front end.

pub mod analysis;
pub mod analytic;
pub mod cli;
pub mod eigen;
pub mod error;
pub mod fitting;
pub mod hamiltonian;
pub mod io;
pub mod space;
pub mod specfun;
pub mod vecops;

pub use error::{Error, Result};
