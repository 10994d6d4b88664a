use rug::ops::Pow;

use super::{LValueMethod, LValueResult};
use crate::error::{Error, Result};
use crate::numerics::{alternating_sum, check_finite, zeta, PrecisionContext, Real};
use crate::theta::{coeffs_convolution, FormId};

/// L(χ₋₄, s) = Σ_{j≥0} (-1)^j (2j+1)^{-s}.
pub fn l_chi4(s: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if !s.is_finite() || *s <= 0 {
        return Err(Error::Domain(format!("L(χ₋₄, s) needs s > 0, got {}", s.to_f64())));
    }
    let prec = ctx.prec() + 32;
    let s = Real::with_val(prec, s);
    let r = alternating_sum(|j| Real::with_val(prec, 2 * j as u64 + 1).pow(&s).recip(), ctx)?;
    Ok(r.value)
}

/// L(ψ, s) for ψ(n) = (-1)^{n-1}: log 2 at s = 1, (1 - 2^{1-s})ζ(s) beyond.
pub fn l_psi(s: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if !s.is_finite() || *s < 1 {
        return Err(Error::Domain(format!("L(ψ, s) is only provided for s ≥ 1, got {}", s.to_f64())));
    }
    if *s == 1 {
        return Ok(ctx.ln2());
    }
    let prec = ctx.prec();
    let factor = 1u32 - Real::with_val(prec, 2u32).pow(Real::with_val(prec, 1u32 - s));
    Ok(factor * zeta(s, ctx)?)
}

/// Σ_{m>N} d(m) m^{-σ} ≈ N^{1-σ}((ln N + 2γ)/(σ-1) + 1/(σ-1)²), doubled for safety.
fn divisor_tail(n: usize, sigma: f64) -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let n = n as f64;
    let e = sigma - 1.0;
    2.0 * n.powf(-e) * ((n.ln() + 2.0 * EULER_GAMMA) / e + 1.0 / (e * e))
}

/// Σ_{m≤N} a_m m^{-s} for the cusp form g, with the tail estimated from |a_m| ≤ d(m)·m.
///
/// Without an explicit `terms`, N is grown until the estimate meets the context
/// tolerance (or the term budget runs out, which is reported as an error).
pub fn dirichlet_sum(form: FormId, s: &Real, terms: Option<usize>, ctx: &PrecisionContext) -> Result<LValueResult> {
    if form != FormId::G {
        return Err(Error::Invalid("the Dirichlet series is only summed for the cusp form g".into()));
    }
    if !s.is_finite() || *s <= 2.5 {
        return Err(Error::Domain(format!("the Dirichlet series of g needs s > 5/2, got {}", s.to_f64())));
    }
    let sigma = s.to_f64() - 1.0;
    let n = match terms {
        Some(n) if n >= 1 => n,
        Some(_) => return Err(Error::Invalid("term count must be positive".into())),
        None => {
            // L(g, s) is of order one for s ≥ 3, so the tolerance is used as an absolute target
            let mut n = 1000usize;
            while divisor_tail(n, sigma) > 0.25 * ctx.tolerance() && n < ctx.max_terms {
                n = (n * 2).min(ctx.max_terms);
            }
            n
        }
    };
    let coeffs = coeffs_convolution(form, n)?;
    let prec = ctx.prec() + 16;
    let s_neg = Real::with_val(prec, -s);
    let mut sum = Real::new(prec);
    for (i, a) in coeffs.coefficients().iter().enumerate() {
        if *a != 0 {
            let m = Real::with_val(prec, i + 1);
            sum += m.pow(&s_neg) * a;
        }
    }
    let value = check_finite(Real::with_val(ctx.prec(), sum), "dirichlet_sum")?;
    let scale = value.to_f64().abs();
    let error = if scale > 0.0 { divisor_tail(n, sigma) / scale } else { f64::INFINITY };
    if terms.is_none() && error > ctx.tolerance() {
        return Err(Error::BudgetExhausted { best: value.to_f64(), estimate: error, used: n });
    }
    Ok(LValueResult { value, error_estimate: error, method: LValueMethod::DirichletSum, terms_or_levels_used: n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rel_diff;
    use rug::float::Constant;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(30).unwrap()
    }

    #[test]
    fn chi4_closed_forms() {
        let c = ctx();
        let pi = c.pi();
        assert!(rel_diff(&l_chi4(&c.real(1), &c).unwrap(), &(pi.clone() / 4u32)) < 1e-29);
        let cube = Real::with_val(c.prec(), (&pi).pow(3u32)) / 32u32;
        assert!(rel_diff(&l_chi4(&c.real(3), &c).unwrap(), &cube) < 1e-29);
        // Catalan's constant
        assert!(rel_diff(&l_chi4(&c.real(2), &c).unwrap(), &Real::with_val(c.prec(), Constant::Catalan)) < 1e-29);
    }

    #[test]
    fn psi_closed_forms() {
        let c = ctx();
        assert_eq!(l_psi(&c.real(1), &c).unwrap(), c.ln2());
        let pi2 = Real::with_val(c.prec(), c.pi().square()) / 12u32;
        assert!(rel_diff(&l_psi(&c.real(2), &c).unwrap(), &pi2) < 1e-29);
        assert!(l_psi(&c.ratio(1, 2), &c).is_err());
    }

    #[test]
    fn divisor_bound_holds_on_computed_coefficients() {
        // |a_m| ≤ d(m)·m for the cusp form, checked before the tail estimate relies on it
        let coeffs = coeffs_convolution(FormId::G, 2000).unwrap();
        for (i, a) in coeffs.coefficients().iter().enumerate() {
            let m = i + 1;
            let d = (1..=m).filter(|k| m % k == 0).count();
            assert!(a.clone().abs() <= d * m, "a_{m} = {a}");
        }
    }

    #[test]
    fn rejects_f_and_small_s() {
        let c = ctx();
        assert!(dirichlet_sum(FormId::F, &c.real(4), Some(10), &c).is_err());
        assert!(dirichlet_sum(FormId::G, &c.real(2), Some(10), &c).is_err());
    }
}
