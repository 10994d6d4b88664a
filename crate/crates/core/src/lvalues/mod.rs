//! Dirichlet L-functions of ψ and χ₋₄, and L(f, n), L(g, n) for n = 3, 4 by
//! several independent routes.

pub mod closed;
pub mod dirichlet;
pub mod routes;
pub mod theorems;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use crate::theta::FormId;
pub use closed::{closed_form, lf4_variants, ClosedFormId};
pub use dirichlet::{dirichlet_sum, l_chi4, l_psi};
pub use routes::{alpha_integral, mellin, q_integral, QIntegralId};
pub use theorems::{kdf_theorem_rhs, theorem_specs, TheoremId};

use crate::error::{Error, Result};
use crate::hyper::KdfStrategy;
use crate::numerics::{PrecisionContext, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LValueMethod {
    DirichletSum,
    Factorized,
    Mellin,
    AlphaIntegral,
    QIntegral,
    KdfTheorem,
    ClosedForm,
}

impl LValueMethod {
    pub const ALL: [LValueMethod; 7] = [
        Self::DirichletSum,
        Self::Factorized,
        Self::Mellin,
        Self::AlphaIntegral,
        Self::QIntegral,
        Self::KdfTheorem,
        Self::ClosedForm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::DirichletSum => "dirichlet_sum",
            Self::Factorized => "factorized",
            Self::Mellin => "mellin",
            Self::AlphaIntegral => "alpha_integral",
            Self::QIntegral => "q_integral",
            Self::KdfTheorem => "kdf_theorem",
            Self::ClosedForm => "closed_form",
        }
    }

    /// Whether the method can produce L(form, n).
    pub fn applies(self, form: FormId, n: u32) -> bool {
        match self {
            Self::DirichletSum => form == FormId::G,
            Self::Factorized => form == FormId::F,
            Self::ClosedForm => closed_form_id(form, n).is_some(),
            Self::Mellin | Self::AlphaIntegral | Self::QIntegral | Self::KdfTheorem => true,
        }
    }
}

impl fmt::Display for LValueMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LValueMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone)]
pub struct LValueResult {
    pub value: Real,
    /// Relative.
    pub error_estimate: f64,
    pub method: LValueMethod,
    pub terms_or_levels_used: usize,
}

fn closed_form_id(form: FormId, n: u32) -> Option<ClosedFormId> {
    match (form, n) {
        (FormId::F, 3) => Some(ClosedFormId::Lf3),
        (FormId::F, 4) => Some(ClosedFormId::Lf4),
        (FormId::G, 3) => Some(ClosedFormId::Lg3),
        _ => None,
    }
}

/// L(ψ, n-2)·L(χ₋₄, n), valid for f only.
pub fn factorized(n: u32, ctx: &PrecisionContext) -> Result<LValueResult> {
    let value = l_psi(&ctx.real(n - 2), ctx)? * l_chi4(&ctx.real(n), ctx)?;
    Ok(LValueResult { value, error_estimate: ctx.floor(), method: LValueMethod::Factorized, terms_or_levels_used: 0 })
}

/// L(form, n) for n ∈ {3, 4} by the requested route. A result whose error
/// estimate misses the context tolerance is reported as budget exhaustion.
pub fn l_value(form: FormId, n: u32, method: LValueMethod, ctx: &PrecisionContext) -> Result<LValueResult> {
    if !(n == 3 || n == 4) {
        return Err(Error::Domain(format!("L-values are provided at n = 3, 4, got {n}")));
    }
    if !method.applies(form, n) {
        return Err(Error::Invalid(format!("method {method} does not apply to L({form}, {n})")));
    }
    let unreachable = || Error::Invalid(format!("no {method} route for L({form}, {n})"));
    let r = match method {
        LValueMethod::Factorized => factorized(n, ctx)?,
        LValueMethod::DirichletSum => dirichlet_sum(form, &ctx.real(n), None, ctx)?,
        LValueMethod::Mellin => mellin(form, n, &ctx.pi(), ctx)?,
        LValueMethod::AlphaIntegral => alpha_integral(TheoremId::for_value(form, n).ok_or_else(unreachable)?, ctx)?,
        LValueMethod::QIntegral => q_integral(QIntegralId::for_value(form, n).ok_or_else(unreachable)?, ctx)?,
        LValueMethod::KdfTheorem => {
            let id = TheoremId::for_value(form, n).ok_or_else(unreachable)?;
            kdf_theorem_rhs(id, KdfStrategy::IntegralReduction, ctx)?
        }
        LValueMethod::ClosedForm => closed_form(closed_form_id(form, n).ok_or_else(unreachable)?, ctx)?,
    };
    if !(r.error_estimate <= ctx.tolerance()) {
        return Err(Error::BudgetExhausted {
            best: r.value.to_f64(),
            estimate: r.error_estimate,
            used: r.terms_or_levels_used,
        });
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rel_diff;
    use rug::ops::Pow;

    #[test]
    fn method_names_round_trip() {
        for m in LValueMethod::ALL {
            assert_eq!(m.name().parse::<LValueMethod>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{m}\""));
        }
    }

    #[test]
    fn incompatible_methods_are_rejected() {
        let c = PrecisionContext::new(15).unwrap();
        assert!(matches!(l_value(FormId::G, 3, LValueMethod::Factorized, &c), Err(Error::Invalid(_))));
        assert!(matches!(l_value(FormId::F, 4, LValueMethod::DirichletSum, &c), Err(Error::Invalid(_))));
        assert!(matches!(l_value(FormId::G, 4, LValueMethod::ClosedForm, &c), Err(Error::Invalid(_))));
        assert!(matches!(l_value(FormId::F, 5, LValueMethod::Mellin, &c), Err(Error::Domain(_))));
    }

    #[test]
    fn factorized_lf3() {
        let c = PrecisionContext::new(30).unwrap();
        let v = l_value(FormId::F, 3, LValueMethod::Factorized, &c).unwrap();
        let expect = Real::with_val(c.prec(), c.pi().pow(3u32)) * c.ln2() / 32u32;
        assert!(rel_diff(&v.value, &expect) < 1e-29);
    }
}
