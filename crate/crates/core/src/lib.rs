//! Multiprecision evaluation and cross-verification of theta-product L-values,
//! generalized and Kampé de Fériet hypergeometric series.

pub mod error;
pub mod numerics;
pub mod theta;
pub mod hyper;
pub mod lvalues;
pub mod harness;

pub use error::{Error, Result};
pub use numerics::{PrecisionContext, Real};
