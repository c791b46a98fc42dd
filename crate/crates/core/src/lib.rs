//! Boundary chromatic polynomials of graphs embedded in the annulus.
//!
//! Vertices on the outer rim may take `Qs` colours while all other vertices
//! take `Q` colours. The crate computes the corresponding partition function
//! `Z_G(Q, Qs; v)` exactly with transfer matrices, analyses the winding
//! sectors of the transfer matrix numerically, evaluates the closed-form
//! predictions for the accumulation points of zeros, and finds the zeros of
//! the resulting polynomials at adaptive precision.

pub mod algebra;
pub mod bkw;
pub mod config;
pub mod connectivity;
pub mod error;
pub mod graphs;
pub mod oracle;
pub mod spectra;
pub mod theory;
pub mod transfer;
pub mod zeros;

pub use error::{Error, Result};
