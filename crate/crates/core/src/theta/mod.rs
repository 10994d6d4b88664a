//! Jacobi theta series on the real nome segment, the forms f and g, their
//! q-expansions, and the Lambert series used to rewrite them.

pub mod coeffs;
pub mod jacobi;
pub mod lambert;
pub mod nome;

pub use coeffs::{coeffs_convolution, coeffs_lambert, CoeffStream, FormId};
pub use jacobi::{
    alpha, alpha_complement, form_f, form_g, theta, theta2, theta3, theta4, theta_direct, theta_involution, ThetaKind,
};
pub use lambert::{eisenstein_m, lambert_series, LambertId};
pub use nome::Nome;

use crate::error::Result;
use crate::numerics::{PrecisionContext, Real};

/// f or g at nome q.
pub fn form_value(form: FormId, nome: &Nome, ctx: &PrecisionContext) -> Result<Real> {
    match form {
        FormId::F => form_f(nome, ctx),
        FormId::G => form_g(nome, ctx),
    }
}
