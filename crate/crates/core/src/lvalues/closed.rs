use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;

use super::{LValueMethod, LValueResult};
use crate::error::{Error, Result};
use crate::hyper::{pfq, PfqSpec};
use crate::numerics::{check_finite, PrecisionContext, Real};

/// The closed forms: L(f,3) = π³ log 2/32, L(f,4) through ₅F₄ at -1, and the
/// ₅F₄(1) expression for L(g,3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClosedFormId {
    Lf3,
    Lf4,
    Lg3,
}

impl ClosedFormId {
    pub const ALL: [ClosedFormId; 3] = [Self::Lf3, Self::Lf4, Self::Lg3];

    pub fn name(self) -> &'static str {
        match self {
            Self::Lf3 => "lf3",
            Self::Lf4 => "lf4",
            Self::Lg3 => "lg3",
        }
    }
}

impl fmt::Display for ClosedFormId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClosedFormId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown closed form `{s}`")))
    }
}

fn repeated(p: (i64, i64), k: usize, extra: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut v = vec![p; k];
    v.extend_from_slice(extra);
    v
}

/// L(χ₋₄, 4) three ways: ₅F₄(1/2,…,1; 3/2,…; -1), and
/// ₅F₄(1/4,…,1; 5/4,…; 1) - ₅F₄(3/4,…,1; 7/4,…; 1)/81.
pub fn lf4_variants(ctx: &PrecisionContext) -> Result<[(Real, f64); 3]> {
    let prec = ctx.prec();
    let at_minus = PfqSpec::from_ratios(&repeated((1, 2), 4, &[(1, 1)]), &repeated((3, 2), 4, &[]))?;
    let quarter = PfqSpec::from_ratios(&repeated((1, 4), 4, &[(1, 1)]), &repeated((5, 4), 4, &[]))?;
    let three_quarter = PfqSpec::from_ratios(&repeated((3, 4), 4, &[(1, 1)]), &repeated((7, 4), 4, &[]))?;
    let a = pfq(&at_minus, &Real::with_val(prec, -1), ctx)?;
    let b = pfq(&quarter, &ctx.one(), ctx)?;
    let c = pfq(&three_quarter, &ctx.one(), ctx)?;
    let c81 = Real::with_val(prec, &c.value / 81u32);
    let diff = Real::with_val(prec, &b.value - &c81);
    let diff_err = (b.value.to_f64().abs() * b.error + c81.to_f64().abs() * c.error) / diff.to_f64().abs();
    Ok([(a.value, a.error), (diff.clone(), diff_err), (diff, diff_err)])
}

/// Each closed form; lf4 is L(f,4) = (π²/12)·L(χ₋₄,4) with the ₅F₄(-1) variant.
pub fn closed_form(id: ClosedFormId, ctx: &PrecisionContext) -> Result<LValueResult> {
    let prec = ctx.prec();
    let pi = ctx.pi();
    let (value, error, terms) = match id {
        ClosedFormId::Lf3 => {
            let v = Real::with_val(prec, (&pi).pow(3u32)) * ctx.ln2() / 32u32;
            (v, ctx.floor(), 0)
        }
        ClosedFormId::Lf4 => {
            let [(l, e), ..] = lf4_variants(ctx)?;
            (Real::with_val(prec, pi.square_ref()) / 12u32 * l, e, 0)
        }
        ClosedFormId::Lg3 => {
            let s = PfqSpec::from_ratios(&[(3, 2), (3, 2), (3, 2), (1, 1), (1, 1)], &[(2, 1); 4])?;
            let f = pfq(&s, &ctx.one(), ctx)?;
            let log_part = ctx.ln2() * 48u32;
            let inner = Real::with_val(prec, &log_part - &f.value);
            let err = f.value.to_f64().abs() * f.error / inner.to_f64().abs();
            (Real::with_val(prec, (&pi).pow(3u32)) / 1024u32 * inner, err, f.terms)
        }
    };
    Ok(LValueResult {
        value: check_finite(value, "closed_form")?,
        error_estimate: error.max(ctx.floor()),
        method: LValueMethod::ClosedForm,
        terms_or_levels_used: terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rel_diff;

    #[test]
    fn lf4_variants_agree() {
        let c = PrecisionContext::new(25).unwrap();
        let [a, b, _] = lf4_variants(&c).unwrap();
        assert!(rel_diff(&a.0, &b.0) < 1e-24);
        // L(χ₋₄, 4) = 0.98894455174110533610…
        assert!((a.0.to_f64() - 0.988_944_551_741_105_3).abs() < 1e-15);
    }

    #[test]
    fn lf3_value() {
        let c = PrecisionContext::new(20).unwrap();
        let v = closed_form(ClosedFormId::Lf3, &c).unwrap();
        assert!((v.value.to_f64() - 0.671_622_2).abs() < 1e-7);
    }
}
