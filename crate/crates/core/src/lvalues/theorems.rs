use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;

use super::{LValueMethod, LValueResult};
use crate::error::{Error, Result};
use crate::hyper::{kdf, KdfSpec, KdfStrategy};
use crate::numerics::{check_finite, PrecisionContext, Real};
use crate::theta::FormId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TheoremId {
    Thm11_1,
    Thm11_2,
    Thm12_1,
    Thm12_2,
}

impl TheoremId {
    pub const ALL: [TheoremId; 4] = [Self::Thm11_1, Self::Thm11_2, Self::Thm12_1, Self::Thm12_2];

    pub fn name(self) -> &'static str {
        match self {
            Self::Thm11_1 => "thm11_1",
            Self::Thm11_2 => "thm11_2",
            Self::Thm12_1 => "thm12_1",
            Self::Thm12_2 => "thm12_2",
        }
    }

    pub fn target(self) -> (FormId, u32) {
        match self {
            Self::Thm11_1 => (FormId::F, 3),
            Self::Thm11_2 => (FormId::G, 3),
            Self::Thm12_1 => (FormId::F, 4),
            Self::Thm12_2 => (FormId::G, 4),
        }
    }

    pub fn for_value(form: FormId, n: u32) -> Option<Self> {
        Self::ALL.into_iter().find(|id| id.target() == (form, n))
    }

    /// The right-hand side is (π^k/den) Σ weight·F(spec) at x = y = 1.
    pub fn prefactor(self) -> (u32, u32) {
        match self {
            Self::Thm11_1 => (2, 96),
            Self::Thm11_2 => (3, 128),
            Self::Thm12_1 => (3, 288),
            Self::Thm12_2 => (4, 768),
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown theorem `{s}`")))
    }
}

/// The weighted Kampé de Fériet series making up each right-hand side.
pub fn theorem_specs(id: TheoremId) -> Vec<(u32, KdfSpec)> {
    let half2 = &[(1, 2), (1, 2)];
    let one = &[(1, 1)];
    let triple = &[(1, 1), (1, 1), (1, 1)];
    let three_halves2 = &[(3, 2), (3, 2)];
    let s = |a: (i64, i64), c: (i64, i64), b: &[(i64, i64)], d: &[(i64, i64)]| {
        KdfSpec::from_ratios(&[a], &[c], b, d, half2, one).expect("theorem parameters are well formed")
    };
    match id {
        TheoremId::Thm11_1 => vec![(1, s((2, 1), (5, 2), &[(1, 1), (1, 1)], &[(2, 1)]))],
        TheoremId::Thm11_2 => vec![(1, s((3, 2), (2, 1), &[(1, 2), (1, 1)], &[(3, 2)]))],
        TheoremId::Thm12_1 => vec![
            (3, s((1, 2), (3, 2), triple, three_halves2)),
            (1, s((3, 2), (5, 2), triple, three_halves2)),
        ],
        TheoremId::Thm12_2 => vec![
            (2, s((1, 2), (1, 1), triple, three_halves2)),
            (1, s((1, 2), (2, 1), triple, three_halves2)),
        ],
    }
}

/// The theorem right-hand side with every series evaluated at x = y = 1.
pub fn kdf_theorem_rhs(id: TheoremId, strategy: KdfStrategy, ctx: &PrecisionContext) -> Result<LValueResult> {
    let prec = ctx.prec();
    let one = ctx.one();
    let mut sum = Real::new(prec);
    let mut abs_err = 0.0;
    let mut terms = 0;
    for (weight, spec) in theorem_specs(id) {
        let v = kdf(&spec, &one, &one, strategy, ctx)?;
        abs_err += f64::from(weight) * v.value.to_f64().abs() * v.error;
        terms += v.terms;
        sum += v.value * weight;
    }
    let (k, den) = id.prefactor();
    let error = abs_err / sum.to_f64().abs();
    let value = Real::with_val(prec, ctx.pi().pow(k)) / den * sum;
    Ok(LValueResult {
        value: check_finite(value, "kdf_theorem_rhs")?,
        error_estimate: error,
        method: LValueMethod::KdfTheorem,
        terms_or_levels_used: terms,
    })
}
