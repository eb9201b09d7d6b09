//! Numerical toolkit for PT-symmetric matrix Hamiltonians: parity operators
//! and Hamiltonians built from rotation angles and block forms, phase
//! classification, the C operator and CPT inner product, time evolution and
//! closed-form two-level references.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod cli;
pub mod construction;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod spectral;

pub use error::{Error, Result};
