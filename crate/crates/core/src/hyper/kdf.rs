use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::Rational;

use super::pfq::{pfq, pfq_at};
use super::spec::{kdf_converges, KdfSpec, PfqSpec};
use crate::error::{Error, Result};
use crate::numerics::{
    beta, check_finite, extrapolate_powerlog, integrate01, Endpoints, PrecisionContext, Real,
};

/// Truncation order used when `double_truncate` is named without one.
pub const DEFAULT_TRUNCATION: usize = 2000;

/// Largest outer index summed by the iterated strategy at x = 1.
const ITERATED_OUTER: usize = 256;
const ITERATED_SAMPLES: usize = 9;
/// Inner sums of the iterated strategy never need more than this many digits.
const ITERATED_DIGITS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KdfStrategy {
    /// Sum over the m × m square; the reported error is a rigorous tail bound.
    DoubleTruncate { m: usize },
    Iterated,
    IntegralReduction,
}

impl fmt::Display for KdfStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KdfStrategy::DoubleTruncate { m } if *m == DEFAULT_TRUNCATION => f.write_str("double_truncate"),
            KdfStrategy::DoubleTruncate { m } => write!(f, "double_truncate:{m}"),
            KdfStrategy::Iterated => f.write_str("iterated"),
            KdfStrategy::IntegralReduction => f.write_str("integral_reduction"),
        }
    }
}

impl FromStr for KdfStrategy {
    type Err = Error;

    /// `double_truncate`, `double_truncate:<M>`, `iterated` or `integral_reduction`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "iterated" => return Ok(KdfStrategy::Iterated),
            "integral_reduction" => return Ok(KdfStrategy::IntegralReduction),
            "double_truncate" => return Ok(KdfStrategy::DoubleTruncate { m: DEFAULT_TRUNCATION }),
            _ => {}
        }
        if let Some(m) = s.strip_prefix("double_truncate:") {
            let m: usize = m.parse().map_err(|_| Error::Invalid(format!("bad truncation order in `{s}`")))?;
            if m >= 2 {
                return Ok(KdfStrategy::DoubleTruncate { m });
            }
        }
        Err(Error::Invalid(format!("unknown KdF strategy `{s}`")))
    }
}

#[derive(Debug, Clone)]
pub struct KdfValue {
    pub value: Real,
    /// Relative error estimate. For `DoubleTruncate` this is a bound: the exact
    /// value lies in [value, value·(1 + error)] when all parameters are positive.
    pub error: f64,
    /// Terms (or integrand evaluations' worth of outer indices) used.
    pub terms: usize,
}

/// The Kampé de Fériet series at (x, y) ∈ [0,1]².
pub fn kdf(spec: &KdfSpec, x: &Real, y: &Real, strategy: KdfStrategy, ctx: &PrecisionContext) -> Result<KdfValue> {
    for (name, v) in [("x", x), ("y", y)] {
        if !v.is_finite() || *v < 0 || *v > 1 {
            return Err(Error::Domain(format!("{name} must lie in [0,1], got {}", v.to_f64())));
        }
    }
    if x.is_zero() && y.is_zero() {
        return Ok(KdfValue { value: ctx.one(), error: 0.0, terms: 1 });
    }
    if *x == 1 && *y == 1 {
        let report = kdf_converges(spec);
        if !report.convergent_at_unit {
            let [m1, m2, m3] = &report.margins;
            return Err(Error::Divergent(format!("{spec} at (1,1): margins ({m1}, {m2}, {m3})")));
        }
    }
    match strategy {
        KdfStrategy::DoubleTruncate { m } => double_truncate(spec, x, y, m, ctx),
        KdfStrategy::Iterated => iterated(spec, x, y, ctx),
        KdfStrategy::IntegralReduction => integral_reduction(spec, x, y, ctx),
    }
}

/// Next-term ratio Π(u+k)·z / Π(l+k), with an extra (1+k) below when `factorial`.
fn step(upper: &[Rational], lower: &[Rational], factorial: bool, z: &Real, k: usize, prec: u32) -> Real {
    let mut num = Real::with_val(prec, z);
    for u in upper {
        num *= Real::with_val(prec, u + Rational::from(k));
    }
    let mut den = Real::with_val(prec, if factorial { k + 1 } else { 1 });
    for l in lower {
        den *= Real::with_val(prec, l + Rational::from(k));
    }
    num / den
}

fn sequence(upper: &[Rational], lower: &[Rational], factorial: bool, z: &Real, len: usize, prec: u32) -> Vec<Real> {
    let mut out = Vec::with_capacity(len);
    let mut t = Real::with_val(prec, 1);
    for k in 0..len {
        out.push(t.clone());
        t *= step(upper, lower, factorial, z, k, prec);
    }
    out
}

fn double_truncate(spec: &KdfSpec, x: &Real, y: &Real, m: usize, ctx: &PrecisionContext) -> Result<KdfValue> {
    if m < 2 {
        return Err(Error::Invalid("truncation order must be at least 2".into()));
    }
    let prec = ctx.prec();
    let one = ctx.one();
    let rho = sequence(&spec.a, &spec.c, false, &one, 2 * m + 1, prec);
    let bx = sequence(&spec.b, &spec.d, true, x, m + 1, prec);
    let gy = sequence(&spec.bp, &spec.dp, true, y, m + 1, prec);
    let rows: Vec<Real> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut row = Real::new(prec);
            for (j, g) in gy[..m].iter().enumerate() {
                row += Real::with_val(prec, &rho[i + j] * g);
            }
            row * &bx[i]
        })
        .collect();
    let mut sum = Real::new(prec);
    for r in &rows {
        sum += r;
    }
    let sum = check_finite(sum, "kdf")?;
    let bound = tail_bound(spec, x, y, m, &rho, &bx, &gy);
    let scale = sum.to_f64().abs();
    let error = if scale > 0.0 { bound / scale } else { f64::INFINITY };
    Ok(KdfValue { value: sum, error, terms: m * m })
}

/// Σ over the complement of the m × m square, bounded by power envelopes
/// s(k) ≤ s(K)(K/k)^σ for the three factor sequences. Infinite when the
/// envelopes cannot be certified (non-positive parameters, insufficient margin).
fn tail_bound(spec: &KdfSpec, x: &Real, y: &Real, m: usize, rho: &[Real], bx: &[Real], gy: &[Real]) -> f64 {
    let positive = [&spec.a, &spec.c, &spec.b, &spec.d, &spec.bp, &spec.dp]
        .iter()
        .all(|list| list.iter().all(|p| *p > 0));
    if !positive {
        return f64::INFINITY;
    }
    let (Some(xr), Some(yr)) = (x.to_rational(), y.to_rational()) else {
        return f64::INFINITY;
    };
    let k = m as u64;
    let envelopes = (
        envelope(&spec.a, &spec.c, false, &Rational::from(1), k),
        envelope(&spec.b, &spec.d, true, &xr, k),
        envelope(&spec.bp, &spec.dp, true, &yr, k),
    );
    let (Some(sr), Some(sb), Some(sg)) = envelopes else {
        return f64::INFINITY;
    };
    let mf = m as f64;
    // Σ_{n ≥ m} n^{-p} ≤ (m-1)^{1-p}/(p-1)
    let zeta_tail = |p: f64| if p > 1.0 { (mf - 1.0).powf(1.0 - p) / (p - 1.0) } else { f64::INFINITY };
    let f = |v: &Real| v.to_f64();
    let scaled_rho = |k: usize| f(&rho[k]) * (k as f64).powf(sr);
    let b_m = f(&bx[m]) * mf.powf(sb);
    let g_m = f(&gy[m]) * mf.powf(sg);
    // m' < m, n ≥ m
    let mut upper_strip = 0.0;
    if g_m > 0.0 {
        let tail = zeta_tail(sr + sg);
        upper_strip = (0..m).map(|i| f(&bx[i]) * scaled_rho(m + i)).sum::<f64>() * g_m * tail;
    }
    // m' ≥ m, n < m
    let mut lower_strip = 0.0;
    if b_m > 0.0 {
        let tail = zeta_tail(sr + sb);
        lower_strip = (0..m).map(|j| f(&gy[j]) * scaled_rho(m + j)).sum::<f64>() * b_m * tail;
    }
    // both ≥ m, using (m'+n)^{-σ} ≤ m'^{-θσ} n^{-(1-θ)σ}
    let mut corner = 0.0;
    if b_m > 0.0 && g_m > 0.0 {
        let excess = sr + sb + sg - 2.0;
        let theta = ((1.0 - sb + excess / 2.0) / sr).clamp(0.0, 1.0);
        corner = scaled_rho(2 * m) * b_m * g_m * zeta_tail(sb + theta * sr) * zeta_tail(sg + (1.0 - theta) * sr);
    }
    let total = upper_strip + lower_strip + corner;
    if total.is_finite() {
        total * 1.01
    } else {
        f64::INFINITY
    }
}

/// An exponent σ > 0 with s(k+1)/s(k) ≤ 1 - σ/k ≤ (k/(k+1))^σ for every k ≥ from,
/// certified by checking that k(Q - P) - σQ has nonnegative Taylor coefficients at k = from.
fn envelope(upper: &[Rational], lower: &[Rational], factorial: bool, z: &Rational, from: u64) -> Option<f64> {
    let roots = |list: &[Rational], extra: bool| -> Vec<Rational> {
        let mut poly = vec![Rational::from(1)];
        let shifts = list.iter().cloned().chain(extra.then(|| Rational::from(1)));
        for s in shifts {
            let mut next = vec![Rational::new(); poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i] += Rational::from(c * &s);
                next[i + 1] += c;
            }
            poly = next;
        }
        poly
    };
    let p: Vec<Rational> = roots(upper, false).into_iter().map(|c| c * z).collect();
    let q = roots(lower, factorial);
    let len = p.len().max(q.len()) + 1;
    let coeff = |v: &[Rational], i: usize| v.get(i).cloned().unwrap_or_default();
    let excess: Rational = lower.iter().sum::<Rational>() + u32::from(factorial) - upper.iter().sum::<Rational>();
    let sigma = if *z == 1 {
        if excess <= 0 || p.len() != q.len() {
            return None;
        }
        excess * Rational::from((31, 32))
    } else {
        Rational::from(2).max(excess * Rational::from((31, 32)))
    };
    // d(k) = k(Q - P) - σQ
    let mut d = vec![Rational::new(); len];
    for i in 0..len - 1 {
        let diff = coeff(&q, i) - coeff(&p, i);
        d[i + 1] += diff;
        d[i] -= &sigma * coeff(&q, i) ;
    }
    // Taylor shift to k = from + t
    let shift = Rational::from(from);
    for i in 0..len {
        for j in (i..len - 1).rev() {
            let add = Rational::from(&d[j + 1] * &shift);
            d[j] += add;
        }
    }
    d.iter().all(|c| *c >= 0).then(|| sigma.to_f64())
}

fn outer_weights(spec: &KdfSpec, x: &Real, len: usize, prec: u32) -> Vec<Real> {
    let upper: Vec<Rational> = spec.a.iter().chain(&spec.b).cloned().collect();
    let lower: Vec<Rational> = spec.c.iter().chain(&spec.d).cloned().collect();
    sequence(&upper, &lower, true, x, len, prec)
}

fn inner_spec(spec: &KdfSpec, m: usize) -> Result<PfqSpec> {
    let shift = |v: &[Rational]| v.iter().map(|p| Rational::from(p + m)).collect::<Vec<_>>();
    let upper = shift(&spec.a).into_iter().chain(spec.bp.iter().cloned()).collect();
    let lower = shift(&spec.c).into_iter().chain(spec.dp.iter().cloned()).collect();
    PfqSpec::new(upper, lower).map_err(|e| Error::Strategy(format!("iterated strategy needs a p+1Fp inner series: {e}")))
}

fn iterated(spec: &KdfSpec, x: &Real, y: &Real, ctx: &PrecisionContext) -> Result<KdfValue> {
    let inner_ctx = (*ctx).with_digits(ctx.digits.min(ITERATED_DIGITS))?;
    let prec = ctx.prec();
    let terms = |from: usize, to: usize, weights: &[Real]| -> Result<Vec<Real>> {
        (from..to)
            .into_par_iter()
            .map(|m| {
                let inner = pfq(&inner_spec(spec, m)?, y, &inner_ctx)?.value;
                Ok(Real::with_val(prec, &weights[m] * &inner))
            })
            .collect()
    };
    if *x == 1 {
        let m1 = kdf_converges(spec).margins[0].to_f64();
        if m1 <= 0.0 {
            return Err(Error::Divergent(format!("{spec}: outer margin {m1} at x = 1")));
        }
        let weights = outer_weights(spec, x, ITERATED_OUTER, prec);
        let t = terms(0, ITERATED_OUTER, &weights)?;
        let mut partial = Vec::with_capacity(ITERATED_OUTER + 1);
        let mut acc = Real::new(prec);
        partial.push(acc.clone());
        for v in &t {
            acc += v;
            partial.push(acc.clone());
        }
        // geometric grid from M/16 to M
        let top = ITERATED_OUTER as f64;
        let samples: Vec<(Real, Real)> = (0..ITERATED_SAMPLES)
            .map(|i| {
                let mm = (top * 2f64.powf(-4.0 * i as f64 / (ITERATED_SAMPLES - 1) as f64)).round() as usize;
                (Real::with_val(prec, mm), partial[mm].clone())
            })
            .collect();
        let ex = extrapolate_powerlog(&samples, m1, 1, ctx)?;
        return Ok(KdfValue { value: ex.value, error: ex.error, terms: ITERATED_OUTER });
    }
    // x < 1: the outer series converges geometrically
    let block = 64;
    let mut weights = outer_weights(spec, x, block, prec);
    let mut sum = Real::new(prec);
    let xf = x.to_f64();
    let mut done = 0;
    while done < ctx.max_terms {
        if weights.len() < done + block {
            weights = outer_weights(spec, x, done + block, prec);
        }
        let t = terms(done, done + block, &weights)?;
        for v in &t {
            sum += v;
        }
        done += block;
        let last = t[block - 1].to_f64().abs();
        let prev = t[block - 2].to_f64().abs();
        let rho = if prev > 0.0 { (last / prev).max(xf) } else { xf };
        if last == 0.0 || rho < 1.0 {
            let tail = last * rho / (1.0 - rho);
            let scale = sum.to_f64().abs();
            if last == 0.0 || tail <= inner_ctx.floor() * scale {
                let error = if scale > 0.0 { (tail / scale).max(inner_ctx.floor()) } else { 1.0 };
                return Ok(KdfValue { value: check_finite(sum, "kdf")?, error, terms: done });
            }
        }
    }
    Err(Error::BudgetExhausted { best: sum.to_f64(), estimate: f64::NAN, used: done })
}

fn integral_reduction(spec: &KdfSpec, x: &Real, y: &Real, ctx: &PrecisionContext) -> Result<KdfValue> {
    let (a, c) = spec
        .single_pair()
        .filter(|(a, c)| **a > 0 && c > a)
        .ok_or_else(|| Error::Strategy(format!("integral reduction needs A = C = 1 and c > a > 0, got {spec}")))?;
    let group = |upper: &[Rational], lower: &[Rational]| {
        PfqSpec::new(upper.to_vec(), lower.to_vec())
            .map_err(|e| Error::Strategy(format!("integral reduction needs p+1Fp groups: {e}")))
    };
    let fx = group(&spec.b, &spec.d)?;
    let fy = group(&spec.bp, &spec.dp)?;
    let gap = Rational::from(c - a);
    // Fx(xt) ~ (1-t)^{min(excess,0)} (with a log at excess 0) when x = 1
    let mut right = gap.clone();
    let mut right_log = false;
    for (g, arg) in [(&fx, x), (&fy, y)] {
        if *arg == 1 {
            let e = g.excess();
            right_log |= e == 0;
            right += e.min(Rational::new());
        }
    }
    if right <= 0 {
        return Err(Error::Divergent(format!("{spec}: Beta-kernel integral diverges at t = 1")));
    }
    let prec = ctx.prec();
    let (ar, gr) = (Real::with_val(prec, a), Real::with_val(prec, &gap));
    let (am1, gm1) = (Real::with_val(prec, &ar - 1u32), Real::with_val(prec, &gr - 1u32));
    let eval = |g: &PfqSpec, arg: &Real, t: &Real, u: &Real| -> Result<Real> {
        if arg.is_zero() {
            return Ok(Real::with_val(prec, 1));
        }
        let z = Real::with_val(prec, arg * t);
        // 1 - arg·t = (1 - t) + (1 - arg)·t
        let w = Real::with_val(prec, 1 - arg) * t + u;
        pfq_at(g, &z, &w, ctx)
    };
    let r = integrate01(
        |t, u| {
            let kernel = Real::with_val(prec, t.pow(&am1)) * Real::with_val(prec, u.pow(&gm1));
            Ok(kernel * eval(&fx, x, t, u)? * eval(&fy, y, t, u)?)
        },
        Endpoints { left_exponent: a.to_f64(), right_exponent: right.to_f64(), right_log },
        ctx,
    )?;
    let value = check_finite(r.value / beta(&ar, &gr, ctx)?, "kdf")?;
    Ok(KdfValue { value, error: r.error, terms: r.nodes })
}
