//! Precision-parameterized scalar engines shared by every other module.

pub mod context;
pub mod linalg;
pub mod quad;
pub mod series;
pub mod special;

pub use context::{check_finite, rel_diff, PrecisionContext, Real};
pub use quad::{integrate01, integrate_half_line, integrate_interval, Endpoints, QuadResult};
pub use series::{extrapolate_powerlog, sum_series, sum_series_with, Extrapolation, SeriesSum, SumOptions, TailKind, TailModel};
pub use special::{alternating_sum, beta, eta, gamma, ln_gamma, pochhammer, zeta};
