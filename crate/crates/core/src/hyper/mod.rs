//! Generalized hypergeometric series p+1Fp and Kampé de Fériet double series.

pub mod kdf;
pub mod pfq;
pub mod spec;

pub use kdf::{kdf, KdfStrategy, KdfValue, DEFAULT_TRUNCATION};
pub use pfq::{elliptic_k, euler_2f1, pfq, pfq_at, Continuation};
pub use spec::{kdf_converges, parse_param, pfq_converges, pfq_excess, ConvergenceReport, KdfSpec, PfqClass, PfqSpec};
