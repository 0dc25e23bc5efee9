//! Gabor systems on the cosphere bundle of a Riemannian manifold.
//!
//! The crate lifts signals on a manifold `B` into the fibers of the pullback
//! bundle over `M = S(T*B)`, analyses them with phase-twisted Gaussian
//! windows on lattices built from contact covectors, and uses the resulting
//! output function to detect codimension-one boundaries.

pub mod bargmann;
pub mod cli;
pub mod contact;
pub mod error;
pub mod gabor;
pub mod lattice;
pub mod lift;
pub mod manifold;
pub mod quadrature;
pub mod report;
pub mod robotics;

pub use error::{Error, Result};
