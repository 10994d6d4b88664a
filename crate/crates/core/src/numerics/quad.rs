//! Double-exponential quadrature on (0,1), finite intervals and half-lines.
//!
//! Integrands on (0,1) receive both `t` and `1 - t`; the complement is formed from
//! the transformation directly, so integrands with (1-t)^{r-1} or log(1-t) factors
//! keep full relative accuracy near t = 1.

use rayon::prelude::*;

use super::context::{check_finite, PrecisionContext, Real};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct QuadResult {
    pub value: Real,
    /// Relative error estimate.
    pub error: f64,
    pub levels: u32,
    pub nodes: usize,
}

/// Endpoint behaviour of an integrand t^{p-1}(1-t)^{r-1}φ(t) on (0,1).
#[derive(Debug, Clone, Copy)]
pub struct Endpoints {
    pub left_exponent: f64,
    pub right_exponent: f64,
    pub right_log: bool,
}

impl Endpoints {
    pub fn smooth() -> Self {
        Self { left_exponent: 1.0, right_exponent: 1.0, right_log: false }
    }
}

/// Bailey-style estimate from the last three level sums.
fn level_error(history: &[Real], floor: f64) -> f64 {
    let n = history.len();
    if n < 3 {
        return 1.0;
    }
    let cur = &history[n - 1];
    let scale = cur.to_f64().abs();
    if scale == 0.0 {
        let d1 = Real::with_val(cur.prec(), cur - &history[n - 2]).to_f64().abs();
        return if d1 == 0.0 { floor } else { 1.0 };
    }
    let d1 = Real::with_val(cur.prec(), cur - &history[n - 2]).to_f64().abs() / scale;
    let d2 = Real::with_val(cur.prec(), cur - &history[n - 3]).to_f64().abs() / scale;
    if d1 == 0.0 {
        return floor;
    }
    let (l1, l2) = (d1.log10(), d2.max(f64::MIN_POSITIVE).log10());
    let est = if l1 < 0.0 && l2 < 0.0 && l2 < l1 * 0.5 {
        // Quadratic convergence: next error ≈ d1² / d2 in log space, but never
        // more optimistic than d1².
        10f64.powf((l1 * l1 / l2).max(2.0 * l1))
    } else {
        d1
    };
    est.max(floor).min(1.0)
}

/// Generic driver: nodes at x = k h for the given abscissa map, level by level.
/// With `trace`, runs exactly that many levels and records every level's estimate.
fn de_levels<M>(
    map: M,
    x_min: f64,
    x_max: f64,
    ctx: &PrecisionContext,
    mut trace: Option<&mut Vec<Real>>,
) -> Result<QuadResult>
where
    M: Fn(&Real) -> Result<Real> + Sync,
{
    let prec = ctx.prec();
    let mut total = Real::new(prec); // Σ over all nodes so far, without the factor h
    let mut history: Vec<Real> = Vec::new();
    let mut nodes = 0usize;
    let mut h = 1.0f64;
    for level in 0..=ctx.quad_level_cap {
        // Level 0: all integer multiples of h=1; afterwards only odd multiples of h.
        let (step, offset) = if level == 0 { (1.0, 0.0) } else { (2.0 * h, h) };
        let mut xs = Vec::new();
        let mut x = x_min.div_euclid(step) * step + offset;
        if x < x_min {
            x += step;
        }
        while x <= x_max {
            xs.push(x);
            x += step;
        }
        let contributions: Vec<Result<Real>> = xs
            .par_iter()
            .map(|&x| map(&Real::with_val(prec, x)))
            .collect();
        for c in contributions {
            total += c?;
        }
        nodes += xs.len();
        let estimate = Real::with_val(prec, &total * h);
        history.push(estimate);
        let error = level_error(&history, ctx.floor());
        if let Some(t) = trace.as_deref_mut() {
            t.push(history.last().expect("non-empty").clone());
            if level == ctx.quad_level_cap {
                let value = history.pop().expect("non-empty");
                return Ok(QuadResult { value, error, levels: level, nodes });
            }
            h /= 2.0;
            continue;
        }
        if level >= 3 && error <= ctx.target() {
            let value = history.pop().expect("non-empty");
            return Ok(QuadResult {
                value: check_finite(value, "quadrature")?,
                error,
                levels: level,
                nodes,
            });
        }
        if level == ctx.quad_level_cap {
            let best = history.last().map(|v| v.to_f64()).unwrap_or(f64::NAN);
            if error <= ctx.tolerance() {
                let value = history.pop().expect("non-empty");
                return Ok(QuadResult { value, error, levels: level, nodes });
            }
            return Err(Error::Quadrature { best, estimate: error, level });
        }
        h /= 2.0;
    }
    unreachable!("loop returns at the level cap")
}

/// ∫₀¹ f(t) dt with f(t) = t^{p-1}(1-t)^{r-1}φ(t), φ smooth (optionally times log(1-t)).
///
/// `f` is called as f(t, 1-t).
pub fn integrate01<F>(f: F, ends: Endpoints, ctx: &PrecisionContext) -> Result<QuadResult>
where
    F: Fn(&Real, &Real) -> Result<Real> + Sync,
{
    integrate01_impl(f, ends, ctx, None)
}

/// Per-level estimates of [`integrate01`] for levels 0..=ctx.quad_level_cap.
pub fn integrate01_trace<F>(f: F, ends: Endpoints, ctx: &PrecisionContext) -> Result<Vec<Real>>
where
    F: Fn(&Real, &Real) -> Result<Real> + Sync,
{
    let mut trace = Vec::new();
    integrate01_impl(f, ends, ctx, Some(&mut trace))?;
    Ok(trace)
}

fn integrate01_impl<F>(f: F, ends: Endpoints, ctx: &PrecisionContext, trace: Option<&mut Vec<Real>>) -> Result<QuadResult>
where
    F: Fn(&Real, &Real) -> Result<Real> + Sync,
{
    if !(ends.left_exponent > 0.0 && ends.right_exponent > 0.0) {
        return Err(Error::Domain("endpoint exponents must be positive".into()));
    }
    let prec = ctx.prec();
    // Truncate where t^p (resp. (1-t)^r) times the weight falls below the working epsilon.
    let budget = ctx.log_working_eps() + 12.0 + if ends.right_log { 6.0 } else { 0.0 };
    let reach = |p: f64| ((budget / (std::f64::consts::PI * p.min(1.0))).asinh() + 0.3).min(12.0);
    let x_min = -reach(ends.left_exponent);
    let x_max = reach(ends.right_exponent);
    let pi = ctx.pi();
    let map = |x: &Real| -> Result<Real> {
        // t = 1/(1+e^{-π sinh x}), 1-t = 1/(1+e^{π sinh x}), dt/dx = π cosh x · t(1-t).
        let s = Real::with_val(prec, &pi * x.clone().sinh());
        let e = Real::with_val(prec, (-s).exp());
        let t = Real::with_val(prec, 1 + &e).recip();
        let u = Real::with_val(prec, &e * &t);
        if t.is_zero() || u.is_zero() {
            return Ok(Real::new(prec));
        }
        let w = Real::with_val(prec, &pi * x.clone().cosh()) * &t * &u;
        let fx = f(&t, &u)?;
        if !fx.is_finite() {
            return Err(Error::NonFinite("integrand"));
        }
        Ok(fx * w)
    };
    de_levels(map, x_min, x_max, ctx, trace)
}

/// ∫_a^b f(x) dx for f analytic on [a,b] up to endpoint singularities.
/// `f` is called as f(x, x-a, b-x) with the distances formed without cancellation.
pub fn integrate_interval<F>(a: &Real, b: &Real, f: F, ends: Endpoints, ctx: &PrecisionContext) -> Result<QuadResult>
where
    F: Fn(&Real, &Real, &Real) -> Result<Real> + Sync,
{
    let prec = ctx.prec();
    let width = Real::with_val(prec, b - a);
    let r = integrate01(
        |t, u| {
            let from_a = Real::with_val(prec, &width * t);
            let to_b = Real::with_val(prec, &width * u);
            let x = Real::with_val(prec, a + &from_a);
            f(&x, &from_a, &to_b)
        },
        ends,
        ctx,
    )?;
    Ok(QuadResult { value: r.value * width, ..r })
}

/// ∫_a^∞ f(x) dx for f decaying at least like e^{-decay·x}.
pub fn integrate_half_line<F>(a: &Real, decay: f64, f: F, ctx: &PrecisionContext) -> Result<QuadResult>
where
    F: Fn(&Real) -> Result<Real> + Sync,
{
    if !(decay > 0.0) {
        return Err(Error::Domain("decay rate must be positive".into()));
    }
    let prec = ctx.prec();
    let budget = ctx.log_working_eps() + 12.0;
    // s = exp(x - e^{-x}) maps ℝ onto (0,∞); ds/dx = s (1 + e^{-x}).
    let x_min = -(budget.ln() + 1.5);
    let x_max = (budget / decay).ln() + 1.5;
    let map = |x: &Real| -> Result<Real> {
        let ex = Real::with_val(prec, (-x.clone()).exp());
        let s = Real::with_val(prec, x - &ex).exp();
        let w = Real::with_val(prec, &s * (1 + ex));
        if s.is_zero() {
            return Ok(Real::new(prec));
        }
        let fx = f(&Real::with_val(prec, a + &s))?;
        if !fx.is_finite() {
            return Err(Error::NonFinite("integrand"));
        }
        Ok(fx * w)
    };
    de_levels(map, x_min, x_max, ctx, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;
    use crate::numerics::context::rel_diff;
    use crate::numerics::special::beta;

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::new(d).unwrap()
    }

    #[test]
    fn constant_one() {
        let c = ctx(30);
        let r = integrate01(|_, _| Ok(c.one()), Endpoints::smooth(), &c).unwrap();
        assert!(rel_diff(&r.value, &c.one()) < 1e-30);
    }

    #[test]
    fn beta_kernel_half() {
        let c = ctx(30);
        let ends = Endpoints { left_exponent: 1.5, right_exponent: 0.5, right_log: false };
        let r = integrate01(|t, u| Ok(t.clone().sqrt() / u.clone().sqrt()), ends, &c).unwrap();
        assert!(rel_diff(&r.value, &(c.pi() / 2u32)) < 1e-30, "{}", rel_diff(&r.value, &(c.pi() / 2u32)));
    }

    #[test]
    fn log_endpoint() {
        let c = ctx(30);
        let ends = Endpoints { left_exponent: 1.0, right_exponent: 1.0, right_log: true };
        let r = integrate01(|_, u| Ok(-u.clone().ln()), ends, &c).unwrap();
        assert!(rel_diff(&r.value, &c.one()) < 1e-30);
    }

    #[test]
    fn strong_left_singularity() {
        // ∫ t^{-0.9} = 10
        let c = ctx(25);
        let ends = Endpoints { left_exponent: 0.1, right_exponent: 1.0, right_log: false };
        let r = integrate01(|t, _| Ok(t.clone().pow(c.ratio(-9, 10))), ends, &c).unwrap();
        assert!(rel_diff(&r.value, &c.real(10)) < 1e-25, "{} {}", r.value, r.error);
    }

    #[test]
    fn half_line_exponential() {
        let c = ctx(30);
        let r = integrate_half_line(&c.one(), 1.0, |x| Ok(Real::with_val(c.prec(), -x).exp() * x), &c).unwrap();
        // ∫_1^∞ x e^{-x} dx = 2/e
        let exact = c.real(2) / c.one().exp();
        assert!(rel_diff(&r.value, &exact) < 1e-30);
    }

    #[test]
    fn interval_sine() {
        let c = ctx(30);
        let r = integrate_interval(&c.zero(), &c.pi(), |x, _, _| Ok(x.clone().sin()), Endpoints::smooth(), &c).unwrap();
        assert!(rel_diff(&r.value, &c.real(2)) < 1e-30);
    }

    #[test]
    fn refinement_monotone_on_beta_kernel() {
        // Each additional level never worsens agreement with the Beta oracle.
        let c = PrecisionContext::with_settings(30, 15, 1000, 7).unwrap();
        let (a, b) = (c.ratio(7, 10), c.ratio(13, 10));
        let exact = beta(&a, &b, &c).unwrap();
        let ends = Endpoints { left_exponent: 0.7, right_exponent: 1.3, right_log: false };
        let am1 = Real::with_val(c.prec(), &a - 1u32);
        let bm1 = Real::with_val(c.prec(), &b - 1u32);
        let trace = integrate01_trace(|t, u| Ok(t.clone().pow(&am1) * u.clone().pow(&bm1)), ends, &c).unwrap();
        let errs: Vec<f64> = trace.iter().map(|v| rel_diff(v, &exact)).collect();
        for w in errs.windows(2).skip(1) {
            assert!(w[1] <= w[0] * 1.0001 + 1e-42, "{errs:?}");
        }
        assert!(*errs.last().unwrap() < 1e-30, "{errs:?}");
    }
}
