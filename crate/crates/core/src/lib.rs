//! Jet-based checks that catalogued (2,3,5)-distributions have conformally flat Nurowski metrics.
//!
//! The crate evaluates the sixth-order flatness ODE for `D_F(q)`, its dual
//! for `H(t)`, the generalised Chazy equations they reduce to, and the Weyl
//! tensor of the associated Nurowski conformal metrics.

#![allow(clippy::needless_range_loop)]

pub mod chazy;
pub mod cli;
pub mod dist;
pub mod error;
pub mod geometry;
pub mod jets;
pub mod par;
pub mod specialfn;
pub mod twistor;

pub use error::{Error, Result};
