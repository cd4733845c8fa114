//! Numerical microlocal analysis of quantum-field correlation functions on
//! 1+1-dimensional model spacetimes: wavefront-set estimation, quasifree
//! states, spectrum-condition cones, and asymptotic correlation spectra.

pub mod bump;
pub mod geometry;
pub mod kernels;
pub mod ladder;
pub mod microlocal;
pub mod states;
pub mod quad;
pub mod scalar;
pub mod testfn;

pub use scalar::{Cplx, Real};
