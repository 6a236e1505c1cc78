//! Certified homotopy continuation for dense homogeneous polynomial systems
//! in the Bombieri–Weyl geometry.

// Negated float comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod conditioning;
pub mod eigenpath;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod newton;
pub mod polyspace;
pub mod roundoff;
pub mod rng;
pub mod startsys;
pub mod tracker;

pub use error::{Error, Result};
