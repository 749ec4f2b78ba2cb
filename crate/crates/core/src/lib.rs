//! Structure-preserving simulation of a rigid body hanging from an elastic
//! string.
//!
//! The string is discretized by linear finite elements; the body attitude
//! lives on SO(3). [`lgvi`] advances the system with a Lie group
//! variational integrator, [`refint`] with a conventional Runge–Kutta
//! scheme on the same spatial model, and [`diagnostics`] evaluates the
//! conserved quantities used to compare them.

pub mod diagnostics;
pub mod error;
pub mod lgvi;
pub mod model;
pub mod refint;
pub mod so3;

pub use error::{Error, Result};
