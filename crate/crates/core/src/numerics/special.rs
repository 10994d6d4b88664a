//! Gamma-family functions, zeta, and accelerated alternating sums.

use rug::ops::Pow;
use rug::{Integer, Rational};

use super::context::{check_finite, PrecisionContext, Real};
use crate::error::{Error, Result};

/// Rising factorial (a)_n = a(a+1)...(a+n-1); exactly 1 for n = 0.
pub fn pochhammer(a: &Real, n: u64) -> Real {
    let mut acc = Real::with_val(a.prec(), 1);
    let mut factor = a.clone();
    for _ in 0..n {
        acc *= &factor;
        factor += 1;
    }
    acc
}

/// Bernoulli numbers B_2, B_4, ..., B_{2k} as exact rationals, via tangent numbers.
pub fn bernoulli_even(count: usize) -> Vec<Rational> {
    if count == 0 {
        return Vec::new();
    }
    // Tangent numbers T_1..T_count (Brent-Harvey in-place recurrence).
    let mut t: Vec<Integer> = vec![Integer::new(); count + 1];
    t[1] = Integer::from(1);
    for k in 2..=count {
        t[k] = Integer::from(&t[k - 1] * (k as u32 - 1));
    }
    for k in 2..=count {
        for j in k..=count {
            let a = Integer::from(&t[j - 1] * (j - k) as u32);
            let b = Integer::from(&t[j] * (j - k + 2) as u32);
            t[j] = a + b;
        }
    }
    (1..=count)
        .map(|k| {
            let four_k = Integer::from(1) << (2 * k as u32);
            let den = Integer::from(&four_k - 1u32) * &four_k;
            let num = Integer::from(&t[k] * (2 * k) as u32);
            let b = Rational::from((num, den));
            if k % 2 == 0 {
                -b
            } else {
                b
            }
        })
        .collect()
}

fn check_positive(x: &Real, what: &str) -> Result<()> {
    if !x.is_finite() || *x <= 0 {
        return Err(Error::Domain(format!("{what} requires a positive argument, got {x:.6e}")));
    }
    Ok(())
}

/// ln Γ(x) for x > 0.
///
/// Shifts the argument up to z = x + N with z above the working digit count, then
/// applies the Stirling series whose remainder is below the working epsilon.
pub fn ln_gamma(x: &Real, ctx: &PrecisionContext) -> Result<Real> {
    check_positive(x, "ln_gamma")?;
    let prec = ctx.prec() + 16;
    let x = Real::with_val(prec, x);
    let shift_to = f64::from(ctx.working_digits()).max(12.0);
    let xf = x.to_f64();
    let shift = if xf < shift_to { (shift_to - xf).ceil() as u64 } else { 0 };

    let mut z = x.clone();
    let mut product = Real::with_val(prec, 1);
    for _ in 0..shift {
        product *= &z;
        z += 1;
    }

    let eps = Real::with_val(prec, Real::i_pow_u(10, ctx.working_digits() + 4)).recip();
    let two_pi = Real::with_val(prec, rug::float::Constant::Pi) * 2u32;
    let mut sum = Real::with_val(prec, &z - 0.5f64) * z.clone().ln() - &z + two_pi.ln() / 2u32;

    let z2 = Real::with_val(prec, &z * &z);
    let mut zpow = z.clone();
    let max_k = ctx.working_digits() as usize + 16;
    let bern = bernoulli_even(max_k);
    let mut converged = false;
    for (i, b) in bern.iter().enumerate() {
        let k = (i + 1) as u32;
        let mut term = Real::with_val(prec, b);
        term /= (2 * k) * (2 * k - 1);
        term /= &zpow;
        let small = term.clone().abs() < Real::with_val(prec, &eps * sum.clone().abs().max(&Real::with_val(prec, 1)));
        sum += &term;
        if small {
            converged = true;
            break;
        }
        zpow *= &z2;
    }
    if !converged {
        return Err(Error::BudgetExhausted {
            best: sum.to_f64(),
            estimate: 1.0,
            used: max_k,
        });
    }
    sum -= product.ln();
    Ok(Real::with_val(ctx.prec(), sum))
}

/// Γ(x) for x > 0.
pub fn gamma(x: &Real, ctx: &PrecisionContext) -> Result<Real> {
    check_positive(x, "gamma")?;
    let lg = ln_gamma(x, &ctx.with_guard(ctx.guard + 6)?)?;
    check_finite(Real::with_val(ctx.prec(), lg.exp()), "gamma")
}

/// B(a, b) = Γ(a)Γ(b)/Γ(a+b).
pub fn beta(a: &Real, b: &Real, ctx: &PrecisionContext) -> Result<Real> {
    check_positive(a, "beta")?;
    check_positive(b, "beta")?;
    let wide = ctx.with_guard(ctx.guard + 6)?;
    let ab = Real::with_val(wide.prec(), a + b);
    let lb = ln_gamma(a, &wide)? + ln_gamma(b, &wide)? - ln_gamma(&ab, &wide)?;
    check_finite(Real::with_val(ctx.prec(), lb.exp()), "beta")
}

/// Result of an accelerated alternating sum.
#[derive(Debug, Clone)]
pub struct AlternatingSum {
    pub value: Real,
    /// Relative error estimate.
    pub error: f64,
    pub terms: usize,
}

/// Number of terms the Cohen-Villegas-Zagier weights need for `digits` digits
/// (the error shrinks like (3+sqrt 8)^-n).
fn cvz_terms(digits: u32) -> usize {
    (f64::from(digits) * 1.31).ceil() as usize + 4
}

fn cvz(a: &[Real], n: usize, prec: u32) -> Real {
    let mut d = Real::with_val(prec, 8u32).sqrt() + 3u32;
    d = d.pow(n as u32);
    d = Real::with_val(prec, &d + d.clone().recip()) / 2u32;
    let mut b = Real::with_val(prec, -1);
    let mut c = Real::with_val(prec, -&d);
    let mut s = Real::new(prec);
    let nn = n as i64;
    for (k, ak) in a.iter().take(n).enumerate() {
        c = Real::with_val(prec, &b - &c);
        s += Real::with_val(prec, &c * ak);
        let k = k as i64;
        b *= (k + nn) * (k - nn);
        b /= Real::with_val(prec, k as f64 + 0.5) * (k + 1);
    }
    s / d
}

/// Σ_{k≥0} (-1)^k a_k for a completely monotone (or smooth, slowly varying) a_k,
/// accelerated with Cohen-Villegas-Zagier weights.
pub fn alternating_sum<F>(a: F, ctx: &PrecisionContext) -> Result<AlternatingSum>
where
    F: Fn(usize) -> Real,
{
    let prec = ctx.prec() + 32;
    let n1 = cvz_terms(ctx.working_digits());
    let n2 = n1 + n1 / 4 + 4;
    if n2 > ctx.max_terms {
        return Err(Error::BudgetExhausted { best: f64::NAN, estimate: 1.0, used: 0 });
    }
    let terms: Vec<Real> = (0..n2).map(|k| Real::with_val(prec, a(k))).collect();
    let s1 = cvz(&terms, n1, prec);
    let s2 = cvz(&terms, n2, prec);
    let value = Real::with_val(ctx.prec(), &s2);
    let error = super::context::rel_diff(&s1, &s2).max(ctx.floor());
    if error > ctx.tolerance() {
        return Err(Error::BudgetExhausted { best: value.to_f64(), estimate: error, used: n2 });
    }
    Ok(AlternatingSum { value: check_finite(value, "alternating_sum")?, error, terms: n2 })
}

/// Dirichlet eta η(s) = Σ (-1)^k (k+1)^{-s}, s > 0.
pub fn eta(s: &Real, ctx: &PrecisionContext) -> Result<AlternatingSum> {
    if *s <= 0 {
        return Err(Error::Domain(format!("eta requires s > 0, got {s:.6e}")));
    }
    let prec = ctx.prec() + 32;
    let s = Real::with_val(prec, s);
    alternating_sum(|k| Real::with_val(prec, (k + 1) as u64).pow(&s).recip(), ctx)
}

/// Riemann zeta ζ(s) for s > 1, through η(s) / (1 - 2^{1-s}).
pub fn zeta(s: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if !s.is_finite() || *s <= 1 {
        return Err(Error::Domain(format!("zeta requires s > 1, got {s:.6e}")));
    }
    // 1 - 2^{1-s} cancels near s = 1; widen the guard by the digits it eats.
    let sf = s.to_f64();
    let lost = (-(1.0 - 2f64.powf(1.0 - sf)).log10()).max(0.0).ceil() as u32;
    let wide = ctx.with_guard(ctx.guard + lost + 4)?;
    let e = eta(s, &wide)?;
    let prec = wide.prec();
    let two = Real::with_val(prec, 2);
    let factor = Real::with_val(prec, 1) - two.pow(Real::with_val(prec, 1 - Real::with_val(prec, s)));
    check_finite(Real::with_val(ctx.prec(), e.value / factor), "zeta")
}
