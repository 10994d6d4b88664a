//! Series summation under declared tail models, and power/log extrapolation.

use rug::ops::Pow;

use super::context::{check_finite, rel_diff, PrecisionContext, Real};
use super::linalg;
use super::special::alternating_sum;
use crate::error::{Error, Result};

/// Asymptotic shape of the terms a series is declared to follow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailKind {
    /// |t(n+1)/t(n)| ≤ ratio eventually.
    Geometric { ratio: f64 },
    /// t(n) ~ C n^{-exponent} with an asymptotic expansion in 1/n.
    Power { exponent: f64 },
    /// t(n) ~ n^{-exponent} (log n)^{log_power} times an expansion in 1/n.
    PowerLog { exponent: f64, log_power: u32 },
    /// t(n) = (-1)^n a(n) with a(n) smooth and decreasing.
    Alternating,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailModel {
    pub kind: TailKind,
    /// Scale hint for the terms; informational.
    pub constant: f64,
}

impl TailModel {
    pub fn geometric(ratio: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::Invalid(format!("geometric ratio must be in (0,1), got {ratio}")));
        }
        Ok(Self { kind: TailKind::Geometric { ratio }, constant: 1.0 })
    }

    pub fn power(exponent: f64) -> Result<Self> {
        Self::power_log(exponent, 0)
    }

    pub fn power_log(exponent: f64, log_power: u32) -> Result<Self> {
        if !(exponent > 1.0) {
            return Err(Error::Invalid(format!("power exponent must exceed 1, got {exponent}")));
        }
        let kind = if log_power == 0 {
            TailKind::Power { exponent }
        } else {
            TailKind::PowerLog { exponent, log_power }
        };
        Ok(Self { kind, constant: 1.0 })
    }

    pub fn alternating() -> Self {
        Self { kind: TailKind::Alternating, constant: 1.0 }
    }
}

#[derive(Debug, Clone)]
pub struct SeriesSum {
    pub value: Real,
    /// Relative error estimate.
    pub error: f64,
    pub terms: usize,
}

/// Tuning knobs for [`sum_series_with`].
#[derive(Debug, Clone, Copy)]
pub struct SumOptions {
    /// First index of the series.
    pub start: usize,
    /// Convergence is tested once per block of terms.
    pub block: usize,
    /// Index at which the declared power asymptotics are trusted (large parameters
    /// push the asymptotic regime out).
    pub asymptotic_from: usize,
}

impl Default for SumOptions {
    fn default() -> Self {
        Self { start: 0, block: 1, asymptotic_from: 0 }
    }
}

/// Σ_{n≥start} term(n). The generator receives the context whose precision it must
/// evaluate at (power tails are extrapolated at raised precision).
pub fn sum_series<F>(term: F, start: usize, tail: TailModel, ctx: &PrecisionContext) -> Result<SeriesSum>
where
    F: Fn(usize, &PrecisionContext) -> Real,
{
    sum_series_with(term, tail, SumOptions { start, ..SumOptions::default() }, ctx)
}

pub fn sum_series_with<F>(
    term: F,
    tail: TailModel,
    opts: SumOptions,
    ctx: &PrecisionContext,
) -> Result<SeriesSum>
where
    F: Fn(usize, &PrecisionContext) -> Real,
{
    match tail.kind {
        TailKind::Geometric { ratio } => sum_geometric(&term, ratio, opts, ctx),
        TailKind::Power { exponent } => sum_power(&term, exponent, 0, opts, ctx),
        TailKind::PowerLog { exponent, log_power } => sum_power(&term, exponent, log_power, opts, ctx),
        TailKind::Alternating => {
            let r = alternating_sum(
                |k| {
                    let t = term(opts.start + k, ctx);
                    if k % 2 == 0 {
                        t
                    } else {
                        -t
                    }
                },
                ctx,
            )?;
            Ok(SeriesSum { value: r.value, error: r.error, terms: r.terms })
        }
    }
}

fn sum_geometric<F>(term: &F, ratio: f64, opts: SumOptions, ctx: &PrecisionContext) -> Result<SeriesSum>
where
    F: Fn(usize, &PrecisionContext) -> Real,
{
    let block = opts.block.max(1);
    let mut sum = ctx.zero();
    let mut last_two = [0.0f64; 2];
    let factor = ratio / (1.0 - ratio);
    let mut count = 0usize;
    loop {
        for _ in 0..block {
            let t = term(opts.start + count, ctx);
            last_two = [last_two[1], t.to_f64().abs()];
            sum += &t;
            count += 1;
        }
        let scale = sum.to_f64().abs();
        let bound = last_two[0].max(last_two[1]) * factor;
        if count >= 2 && bound <= ctx.target() * scale {
            let error = if scale > 0.0 { bound / scale } else { 0.0 }.max(ctx.floor());
            return Ok(SeriesSum { value: check_finite(sum, "sum_series")?, error, terms: count });
        }
        if count >= ctx.max_terms {
            return Err(Error::BudgetExhausted {
                best: sum.to_f64(),
                estimate: if scale > 0.0 { bound / scale } else { f64::INFINITY },
                used: count,
            });
        }
    }
}

/// Basis N^{-e-k} (ln N)^j, k = 0.., j = log_power..0, in the order the fits consume it.
fn power_log_basis(n: &Real, exponent: f64, log_power: u32, count: usize) -> Vec<Real> {
    let prec = n.prec();
    let ln = n.clone().ln();
    let mut out = Vec::with_capacity(count);
    let mut k = 0u32;
    while out.len() < count {
        let p = Real::with_val(prec, n.clone().pow(Real::with_val(prec, -exponent - f64::from(k))));
        for j in (0..=log_power).rev() {
            if out.len() == count {
                break;
            }
            out.push(Real::with_val(prec, &p * ln.clone().pow(j)));
        }
        k += 1;
    }
    out
}

/// Limit of partial sums S(N), N = n0 + i·stride for i < unknowns, assuming
/// S(N) = S + Σ basis terms. Solved exactly (square system).
fn strided_limit(
    partial: &[Real],
    n0: usize,
    stride: usize,
    exponent: f64,
    log_power: u32,
    unknowns: usize,
    prec: u32,
) -> Result<Real> {
    let mut rows = Vec::with_capacity(unknowns);
    let mut rhs = Vec::with_capacity(unknowns);
    for i in 0..unknowns {
        let idx = n0 + i * stride;
        let n = Real::with_val(prec, idx);
        let mut row = vec![Real::with_val(prec, 1)];
        row.extend(power_log_basis(&n, exponent, log_power, unknowns - 1));
        rows.push(row);
        rhs.push(Real::with_val(prec, &partial[idx]));
    }
    let x = linalg::solve(rows, rhs, 1e-300)?;
    Ok(x[0].clone())
}

fn sum_power<F>(
    term: &F,
    exponent: f64,
    log_power: u32,
    opts: SumOptions,
    ctx: &PrecisionContext,
) -> Result<SeriesSum>
where
    F: Fn(usize, &PrecisionContext) -> Real,
{
    let tail_exp = exponent - 1.0;
    let per_order = (log_power + 1) as usize;
    let digits = f64::from(ctx.working_digits());
    // partial[N] = Σ_{n<N} term(start+n); the expansion variable is start+N.
    let mut partial_raw: Vec<Real> = Vec::new();
    let mut previous: Option<Real> = None;
    let mut orders = 6usize;
    let mut last_err = f64::INFINITY;
    loop {
        let unknowns = 1 + orders * per_order;
        let extra = (0.8 * unknowns as f64 + 12.0) as u32;
        let wide = ctx.with_guard(ctx.guard + extra)?;
        let n0 = (orders * per_order).max(opts.asymptotic_from).max(8);
        // Keep the sample window near [n0, 2·n0] in N: consecutive samples far out
        // would crowd into a sliver of 1/N and the fit would lose all its digits.
        let stride = (n0 / unknowns).max(1);
        let needed = n0 + (unknowns - 1) * stride + 1;
        if needed > ctx.max_terms {
            return Err(Error::BudgetExhausted {
                best: previous.map(|p| p.to_f64()).unwrap_or(f64::NAN),
                estimate: last_err,
                used: partial_raw.len(),
            });
        }
        // Recompute at the wider precision when it grew.
        if partial_raw.first().map(|p| p.prec() < wide.prec()).unwrap_or(true) {
            partial_raw.clear();
        }
        if partial_raw.is_empty() {
            partial_raw.push(wide.zero());
        }
        while partial_raw.len() <= needed {
            let n = partial_raw.len() - 1;
            let t = Real::with_val(wide.prec(), term(opts.start + n, &wide));
            let next = Real::with_val(wide.prec(), &partial_raw[n] + &t);
            partial_raw.push(next);
        }
        // Shift so that index N refers to start+N terms; basis variable is start+N.
        let shifted: Vec<Real> = if opts.start == 0 {
            partial_raw.clone()
        } else {
            let mut v = vec![wide.zero(); opts.start];
            v.extend(partial_raw.iter().cloned());
            v
        };
        let limit = strided_limit(&shifted, opts.start + n0, stride, tail_exp, log_power, unknowns, wide.prec())?;
        if let Some(prev) = &previous {
            let err = rel_diff(prev, &limit);
            last_err = err;
            if err <= ctx.target() {
                return Ok(SeriesSum {
                    value: check_finite(Real::with_val(ctx.prec(), &limit), "sum_series")?,
                    error: err.max(ctx.floor()),
                    terms: needed,
                });
            }
        }
        previous = Some(limit);
        if orders as f64 > 2.5 * digits + 40.0 {
            return Err(Error::BudgetExhausted {
                best: previous.map(|p| p.to_f64()).unwrap_or(f64::NAN),
                estimate: last_err,
                used: partial_raw.len(),
            });
        }
        orders += 6;
    }
}

/// Result of [`extrapolate_powerlog`].
#[derive(Debug, Clone)]
pub struct Extrapolation {
    pub value: Real,
    /// Relative error estimate (fit-order disagreement plus residual).
    pub error: f64,
    /// Largest relative residual of the fit at the samples.
    pub residual: f64,
}

/// Fits S(M) = S∞ − M^{-e}(a log^L M + … + b)(1 + o(1)) to samples at
/// (typically geometrically spaced) M and returns S∞.
///
/// Uses one fewer basis function than samples; the error estimate compares against
/// a fit one order lower.
pub fn extrapolate_powerlog(
    samples: &[(Real, Real)],
    exponent: f64,
    log_power: u32,
    ctx: &PrecisionContext,
) -> Result<Extrapolation> {
    if samples.len() < 4 {
        return Err(Error::Invalid(format!("need at least 4 samples, got {}", samples.len())));
    }
    if !(exponent > 0.0) {
        return Err(Error::Invalid(format!("exponent must be positive, got {exponent}")));
    }
    let prec = ctx.prec() * 2;
    let fit = |count: usize| -> Result<(Real, f64)> {
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (m, s) in samples {
            let m = Real::with_val(prec, m);
            let mut row = vec![Real::with_val(prec, 1)];
            row.extend(power_log_basis(&m, exponent, log_power, count - 1));
            rows.push(row);
            rhs.push(Real::with_val(prec, s));
        }
        let x = linalg::least_squares(&rows, &rhs, 1e-250)?;
        let mut worst = 0.0f64;
        for (row, y) in rows.iter().zip(&rhs) {
            let mut fitted = Real::new(prec);
            for (c, b) in x.iter().zip(row) {
                fitted += Real::with_val(prec, c * b);
            }
            worst = worst.max(rel_diff(&fitted, y));
        }
        Ok((x[0].clone(), worst))
    };
    let full = samples.len() - 1;
    let (value, residual) = fit(full)?;
    let (lower, _) = fit(full - 1)?;
    let error = rel_diff(&value, &lower).max(residual);
    if !error.is_finite() {
        return Err(Error::IllConditioned("extrapolation produced a non-finite estimate".into()));
    }
    Ok(Extrapolation {
        value: check_finite(Real::with_val(ctx.prec(), value), "extrapolate_powerlog")?,
        error,
        residual,
    })
}
