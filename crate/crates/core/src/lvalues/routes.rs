use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;

use super::{LValueMethod, LValueResult, TheoremId};
use crate::error::{Error, Result};
use crate::hyper::{pfq_at, PfqSpec};
use crate::numerics::{
    check_finite, integrate01, integrate_half_line, Endpoints, PrecisionContext, QuadResult, Real,
};
use crate::theta::{form_value, lambert_series, theta, FormId, LambertId, Nome, ThetaKind};

/// Combined value and relative error of a sum of quadrature pieces.
fn combine(parts: &[&QuadResult], prec: u32) -> (Real, f64, usize) {
    let mut value = Real::new(prec);
    let mut abs_err = 0.0;
    let mut levels = 0;
    for p in parts {
        value += &p.value;
        abs_err += p.value.to_f64().abs() * p.error;
        levels = levels.max(p.levels as usize);
    }
    let scale = value.to_f64().abs();
    let rel = if scale > 0.0 { abs_err / scale } else { f64::INFINITY };
    (value, rel, levels)
}

/// L(h, n) = (1/Γ(n)) ∫₀^∞ h(e^{-t}) t^{n-1} dt, split at t = `split`.
/// Beyond the split h is summed directly; below it the substitution t = 1/s
/// leaves a half-line integral whose integrand decays like e^{-π²s/4}, with h
/// evaluated through the theta involution.
pub fn mellin(form: FormId, n: u32, split: &Real, ctx: &PrecisionContext) -> Result<LValueResult> {
    if n < 1 {
        return Err(Error::Domain("Mellin order must be at least 1".into()));
    }
    if !split.is_finite() || *split <= 0 {
        return Err(Error::Domain(format!("split point must be positive, got {}", split.to_f64())));
    }
    let prec = ctx.prec();
    let pi = ctx.pi();
    let h = |u: Real| -> Result<Real> { form_value(form, &Nome::from_half_period(&u, ctx)?, ctx) };
    let upper = integrate_half_line(
        split,
        1.0,
        |t| {
            let u = Real::with_val(prec, t / &pi);
            Ok(h(u)? * Real::with_val(prec, t.pow(n - 1)))
        },
        ctx,
    )?;
    let from = Real::with_val(prec, split.recip_ref());
    let pi2 = Real::with_val(prec, pi.square_ref()).to_f64();
    let lower = integrate_half_line(
        &from,
        pi2 / 4.0,
        |s| {
            let u = Real::with_val(prec, &pi * s).recip();
            Ok(h(u)? / Real::with_val(prec, s.pow(n + 1)))
        },
        ctx,
    )?;
    let (sum, error, levels) = combine(&[&upper, &lower], prec);
    let factorial = Real::with_val(prec, rug::Integer::from(rug::Integer::factorial(n - 1)));
    let value = check_finite(sum / factorial, "mellin")?;
    Ok(LValueResult { value, error_estimate: error, method: LValueMethod::Mellin, terms_or_levels_used: levels })
}

fn spec(u: &[(i64, i64)], l: &[(i64, i64)]) -> PfqSpec {
    PfqSpec::from_ratios(u, l).expect("fixed parameter lists are well formed")
}

/// The α-space integrals obtained from the Mellin transform through
/// θ3⁴ dq/q = dα/(α(1-α)) and θ3² = ₂F₁(1/2,1/2;1;α).
pub fn alpha_integral(id: TheoremId, ctx: &PrecisionContext) -> Result<LValueResult> {
    let prec = ctx.prec();
    let k_spec = spec(&[(1, 2), (1, 2)], &[(1, 1)]);
    let (other, ends) = match id {
        TheoremId::Thm11_1 => (spec(&[(1, 1), (1, 1)], &[(2, 1)]), (2.0, 0.5)),
        TheoremId::Thm11_2 => (spec(&[(1, 2), (1, 1)], &[(3, 2)]), (1.5, 0.5)),
        TheoremId::Thm12_1 => (spec(&[(1, 1), (1, 1), (1, 1)], &[(3, 2), (3, 2)]), (0.5, 1.0)),
        TheoremId::Thm12_2 => (spec(&[(1, 1), (1, 1), (1, 1)], &[(3, 2), (3, 2)]), (0.5, 0.5)),
    };
    let r = integrate01(
        |a, w| {
            let kernel = match id {
                // α²(1-α)^{1/2} / (α(1-α))
                TheoremId::Thm11_1 => Real::with_val(prec, a / w.clone().sqrt()),
                // α^{3/2}(1-α)^{1/2} / (α(1-α))
                TheoremId::Thm11_2 => Real::with_val(prec, a.clone().sqrt() / w.clone().sqrt()),
                // (α^{1/2} + α^{3/2})(1-α) / (α(1-α))
                TheoremId::Thm12_1 => {
                    let sa = Real::with_val(prec, a.sqrt_ref());
                    Real::with_val(prec, sa.recip_ref()) + sa
                }
                // ((1-α)^{1/2} + (1-α)^{3/2}) α^{1/2} / (α(1-α))
                TheoremId::Thm12_2 => {
                    let sw = Real::with_val(prec, w.sqrt_ref());
                    (Real::with_val(prec, sw.recip_ref()) + sw) / Real::with_val(prec, a.sqrt_ref())
                }
            };
            Ok(kernel * pfq_at(&other, a, w, ctx)? * pfq_at(&k_spec, a, w, ctx)?)
        },
        Endpoints { left_exponent: ends.0, right_exponent: ends.1, right_log: true },
        ctx,
    )?;
    let pi = ctx.pi();
    let prefactor = match id {
        TheoremId::Thm11_1 => Real::with_val(prec, pi.square_ref()) / 128u32,
        TheoremId::Thm11_2 => Real::with_val(prec, pi.square_ref()) / 64u32,
        TheoremId::Thm12_1 => Real::with_val(prec, (&pi).pow(3u32)) / 192u32,
        TheoremId::Thm12_2 => Real::with_val(prec, (&pi).pow(3u32)) / 384u32,
    };
    let value = check_finite(r.value * prefactor, "alpha_integral")?;
    Ok(LValueResult {
        value,
        error_estimate: r.error,
        method: LValueMethod::AlphaIntegral,
        terms_or_levels_used: r.levels as usize,
    })
}

/// The q-space integral representations of L(f,3), L(g,3), L(f,4), L(g,4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QIntegralId {
    Prop21_1,
    Prop21_2,
    Prop31_1,
    Prop31_2,
}

impl QIntegralId {
    pub const ALL: [QIntegralId; 4] = [Self::Prop21_1, Self::Prop21_2, Self::Prop31_1, Self::Prop31_2];

    pub fn name(self) -> &'static str {
        match self {
            Self::Prop21_1 => "prop21_1",
            Self::Prop21_2 => "prop21_2",
            Self::Prop31_1 => "prop31_1",
            Self::Prop31_2 => "prop31_2",
        }
    }

    /// The (form, n) whose L-value the integral represents.
    pub fn target(self) -> (FormId, u32) {
        match self {
            Self::Prop21_1 => (FormId::F, 3),
            Self::Prop21_2 => (FormId::G, 3),
            Self::Prop31_1 => (FormId::F, 4),
            Self::Prop31_2 => (FormId::G, 4),
        }
    }

    pub fn for_value(form: FormId, n: u32) -> Option<Self> {
        Self::ALL.into_iter().find(|id| id.target() == (form, n))
    }
}

impl fmt::Display for QIntegralId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QIntegralId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown q-integral `{s}`")))
    }
}

fn theta_pow(nome: &Nome, kind: ThetaKind, k: u32, ctx: &PrecisionContext) -> Result<Real> {
    Ok(theta(nome, kind, ctx)?.pow(k))
}

/// ∫₀¹ Φ(q) dq/q with Φ the theta factor times a Lambert series, as a t = -log q
/// integral split at t = π. Where the theta factor is already below the working
/// epsilon the (slowly convergent, polynomially bounded) Lambert series is skipped.
pub fn q_integral(id: QIntegralId, ctx: &PrecisionContext) -> Result<LValueResult> {
    let prec = ctx.prec();
    let pi = ctx.pi();
    let negligible = Real::with_val(prec, 2u32).pow(-(prec as i32) - 40);
    let phi = |u: Real| -> Result<Real> {
        let nome = Nome::from_half_period(&u, ctx)?;
        let (factor, series) = match id {
            QIntegralId::Prop21_1 | QIntegralId::Prop21_2 => {
                let f = theta_pow(&nome, ThetaKind::Theta2, 4, ctx)? * theta_pow(&nome, ThetaKind::Theta4, 2, ctx)?;
                let l = if id == QIntegralId::Prop21_1 { LambertId::Lemma22First } else { LambertId::Lemma22Second };
                (f, l)
            }
            QIntegralId::Prop31_1 | QIntegralId::Prop31_2 => {
                let (lo, hi) = if id == QIntegralId::Prop31_1 { (1, 2) } else { (2, 4) };
                let a = theta_pow(&nome.power(hi), ThetaKind::Theta4, 8, ctx)? * 2u32;
                let f = a - theta_pow(&nome.power(lo), ThetaKind::Theta4, 8, ctx)?;
                (f, LambertId::RamLhs)
            }
        };
        if Real::with_val(prec, factor.abs_ref()) < negligible {
            return Ok(Real::new(prec));
        }
        Ok(factor * lambert_series(series, &nome, ctx)?)
    };
    let upper = integrate_half_line(&pi, 0.5, |t| phi(Real::with_val(prec, t / &pi)), ctx)?;
    let from = Real::with_val(prec, pi.recip_ref());
    let pi2 = Real::with_val(prec, pi.square_ref()).to_f64();
    let lower = integrate_half_line(
        &from,
        pi2 / 2.0,
        |s| {
            let u = Real::with_val(prec, &pi * s).recip();
            Ok(phi(u)? / Real::with_val(prec, s.square_ref()))
        },
        ctx,
    )?;
    let (sum, error, levels) = combine(&[&upper, &lower], prec);
    let prefactor = match id {
        QIntegralId::Prop21_1 => Real::with_val(prec, pi.square_ref()) / 8u32,
        QIntegralId::Prop21_2 => Real::with_val(prec, pi.square_ref()) / 16u32,
        QIntegralId::Prop31_1 | QIntegralId::Prop31_2 => Real::with_val(prec, (&pi).pow(3u32)) / 48u32,
    };
    let value = check_finite(sum * prefactor, "q_integral")?;
    Ok(LValueResult { value, error_estimate: error, method: LValueMethod::QIntegral, terms_or_levels_used: levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rel_diff;

    #[test]
    fn q_integral_names_round_trip() {
        for id in QIntegralId::ALL {
            assert_eq!(id.name().parse::<QIntegralId>().unwrap(), id);
            assert_eq!(QIntegralId::for_value(id.target().0, id.target().1), Some(id));
        }
    }

    #[test]
    fn mellin_lf3() {
        let c = PrecisionContext::new(25).unwrap();
        let v = mellin(FormId::F, 3, &c.pi(), &c).unwrap();
        let expect = Real::with_val(c.prec(), c.pi().pow(3u32)) * c.ln2() / 32u32;
        assert!(rel_diff(&v.value, &expect) < 1e-24, "{}", v.value);
        assert!(v.error_estimate < 1e-20);
    }

    #[test]
    fn alpha_integral_lf3() {
        let c = PrecisionContext::new(25).unwrap();
        let v = alpha_integral(TheoremId::Thm11_1, &c).unwrap();
        let expect = Real::with_val(c.prec(), c.pi().pow(3u32)) * c.ln2() / 32u32;
        assert!(rel_diff(&v.value, &expect) < 1e-24, "{}", v.value);
    }

    #[test]
    fn q_integral_lf3() {
        let c = PrecisionContext::new(15).unwrap();
        let v = q_integral(QIntegralId::Prop21_1, &c).unwrap();
        let expect = Real::with_val(c.prec(), c.pi().pow(3u32)) * c.ln2() / 32u32;
        assert!(rel_diff(&v.value, &expect) < 1e-12, "{}", v.value);
    }
}
