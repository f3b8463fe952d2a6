//! Wrinkled-front contact isotopies in standard contact R^(2n+1): the
//! model family of fronts and Legendrian lifts, the patched contact
//! Hamiltonians driving the isotopy, escape paths that excise the core
//! disc, symplectization traces of the resulting exact Lagrangian
//! cobordism, and a verifier that certifies every defining condition to
//! quantified tolerances.

// Validation guards use the `!(x > 0.0)` form deliberately: it rejects
// NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod contact;
pub mod error;
pub mod flow;
pub mod patch;
pub mod pipeline;
pub mod push;
pub mod render;
pub mod symplectization;
pub mod util;
pub mod verifier;
pub mod wrinkle;

pub use error::{Result, WclError};
