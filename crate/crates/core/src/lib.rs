//! Exact analysis and simulation of backward stochastic equations
//! `X_k = N_k X_{k-1}` driven by finite semigroup actions.

pub mod algebra;
pub mod chain;
pub mod error;
pub mod measures;
pub mod montecarlo;
pub mod rational;
pub mod report;
pub mod solver;
pub mod spec_file;

pub use error::{Error, Result};
pub use rational::Rational;
