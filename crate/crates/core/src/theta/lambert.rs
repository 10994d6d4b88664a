use std::fmt;
use std::str::FromStr;

use super::nome::Nome;
use rug::ops::Pow;

use crate::error::{Error, Result};
use crate::numerics::{check_finite, PrecisionContext, Real};

/// The double series of the proofs, each reorganized as a single sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LambertId {
    /// 4 Σ_{n,k≥1} χ₋₄(n) q^{n(k-1/2)} = θ2²(q)
    Lam1,
    /// 16 Σ_{r,s≥1} (2r-1) q^{(2r-1)(2s-1)} = θ2⁴(q)
    Lam2,
    /// Σ_{r,k≥1} q^{(2r-1)(2k-1)}/(2r-1)
    Lemma22First,
    /// Σ_{r,k≥1} q^{2(r-1/2)(k-1/2)}/(2r-1)
    Lemma22Second,
    /// Σ_{n,r≥1} χ₋₄(n) q^{n(r-1/2)}/(2r-1)²
    RamLhs,
    /// Σ_{n,s≥1} χ₋₄(n) n² q^{n(2s-1)}
    Eis384,
    /// Σ_{s,k≥1} (2k-1)³ q^{(2s-1)(2k-1)}
    Cube,
}

impl LambertId {
    pub const ALL: [LambertId; 7] = [
        LambertId::Lam1,
        LambertId::Lam2,
        LambertId::Lemma22First,
        LambertId::Lemma22Second,
        LambertId::RamLhs,
        LambertId::Eis384,
        LambertId::Cube,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LambertId::Lam1 => "lam1",
            LambertId::Lam2 => "lam2",
            LambertId::Lemma22First => "lemma22_1",
            LambertId::Lemma22Second => "lemma22_2",
            LambertId::RamLhs => "ram_lhs",
            LambertId::Eis384 => "eis384",
            LambertId::Cube => "cube",
        }
    }
}

impl fmt::Display for LambertId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LambertId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown Lambert series `{s}`")))
    }
}

/// Σ_{k≥1} term(k) for terms that eventually decrease geometrically. The tail is
/// bounded by |t_k| ρ/(1-ρ) with ρ the latest observed ratio, once ρ < 1.
fn geometric_tail_sum<F>(mut term: F, ctx: &PrecisionContext) -> Result<Real>
where
    F: FnMut(usize) -> Real,
{
    let prec = ctx.prec();
    let eps = Real::with_val(prec, Real::i_exp(1, -(prec as i32)));
    let mut sum = ctx.zero();
    let mut prev: Option<Real> = None;
    for k in 1..=ctx.max_terms {
        let t = term(k);
        sum += &t;
        let mag = t.abs();
        if mag.is_zero() {
            return check_finite(sum, "lambert_series");
        }
        if let Some(p) = prev.as_ref() {
            if !p.is_zero() {
                let rho = Real::with_val(prec, &mag / p);
                if rho < 1 {
                    let tail = Real::with_val(prec, &mag * &rho) / (1u32 - rho);
                    if tail <= Real::with_val(prec, &sum * &eps).abs() {
                        return check_finite(sum, "lambert_series");
                    }
                }
            }
        }
        prev = Some(mag);
    }
    Err(Error::BudgetExhausted { best: sum.to_f64(), estimate: f64::NAN, used: ctx.max_terms })
}

/// M(q) = 1 + 240 Σ_{s,k≥1} k³ q^{sk} = 1 + 240 Σ_k k³ qᵏ/(1-qᵏ).
pub fn eisenstein_m(nome: &Nome, ctx: &PrecisionContext) -> Result<Real> {
    let prec = ctx.prec();
    let q = Real::with_val(prec, nome.q());
    let mut qk = ctx.one();
    let s = geometric_tail_sum(
        |k| {
            qk *= &q;
            let k3 = (k as u64).pow(3);
            Real::with_val(prec, &qk * k3) / (1u32 - qk.clone())
        },
        ctx,
    )?;
    Ok(s * 240u32 + 1u32)
}

/// Σ_{k≥1} f(z_k, 2k-1) with z_k = base^{2k-1}.
fn odd_power_sum<F>(base: &Real, f: F, ctx: &PrecisionContext) -> Result<Real>
where
    F: Fn(&Real, u64) -> Real,
{
    let prec = ctx.prec();
    let step = Real::with_val(prec, base.square_ref());
    let mut z = Real::with_val(prec, base / &step);
    geometric_tail_sum(
        |k| {
            z *= &step;
            f(&z, (2 * k - 1) as u64)
        },
        ctx,
    )
}

/// The designated double series at nome q.
pub fn lambert_series(id: LambertId, nome: &Nome, ctx: &PrecisionContext) -> Result<Real> {
    let prec = ctx.prec();
    let q = Real::with_val(prec, nome.q());
    let sq = Real::with_val(prec, q.sqrt_ref());
    let sqr = |z: &Real| Real::with_val(prec, z.square_ref());
    match id {
        // Σ_n χ₋₄(n) xⁿ = x/(1+x²) with x = q^{k-1/2}.
        LambertId::Lam1 => Ok(odd_power_sum(&sq, |x, _| Real::with_val(prec, x / (sqr(x) + 1u32)), ctx)? * 4u32),
        LambertId::Lam2 => {
            Ok(odd_power_sum(&q, |y, m| Real::with_val(prec, y * m) / (1u32 - sqr(y)), ctx)? * 16u32)
        }
        LambertId::Lemma22First => odd_power_sum(&q, |y, m| Real::with_val(prec, y / m) / (1u32 - sqr(y)), ctx),
        LambertId::Lemma22Second => odd_power_sum(&sq, |x, m| Real::with_val(prec, x / m) / (1u32 - sqr(x)), ctx),
        LambertId::RamLhs => odd_power_sum(&sq, |x, m| Real::with_val(prec, x / (m * m)) / (sqr(x) + 1u32), ctx),
        // Σ_n χ₋₄(n) n² yⁿ = y(1 - 6y² + y⁴)/(1 + y²)³
        LambertId::Eis384 => odd_power_sum(
            &q,
            |y, _| {
                let y2 = sqr(y);
                let num = sqr(&y2) - Real::with_val(prec, &y2 * 6u32) + 1u32;
                num * y / (y2 + 1u32).pow(3u32)
            },
            ctx,
        ),
        // Σ_k (2k-1)³ y^{2k-1} = y(1 + 23y² + 23y⁴ + y⁶)/(1 - y²)⁴
        LambertId::Cube => odd_power_sum(
            &q,
            |y, _| {
                let y2 = sqr(y);
                let y4 = sqr(&y2);
                let y6 = Real::with_val(prec, &y4 * &y2);
                let num = Real::with_val(prec, &y2 + &y4) * 23u32 + y6 + 1u32;
                num * y / (1u32 - y2).pow(4u32)
            },
            ctx,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rel_diff;
    use crate::theta::jacobi::{alpha, theta2, theta4};

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(30).unwrap()
    }

    /// Raw double sum over the index box [1, n]², no reorganization.
    fn double_sum<F: Fn(i64, i64) -> Real>(n: i64, f: F, c: &PrecisionContext) -> Real {
        let mut s = c.zero();
        for a in 1..=n {
            for b in 1..=n {
                s += f(a, b);
            }
        }
        s
    }

    fn chi4(n: i64) -> i64 {
        match n % 4 {
            1 => 1,
            3 => -1,
            _ => 0,
        }
    }

    fn qpow(q: &Real, e: Real) -> Real {
        rug::ops::Pow::pow(q.clone(), e)
    }

    #[test]
    fn agrees_with_raw_double_sums() {
        let c = ctx();
        let qf = 0.05;
        let n = Nome::from_f64(qf, &c).unwrap();
        let q = c.real(qf);
        let r = |a: i64| c.real(a);
        let cases: Vec<(LambertId, Real)> = vec![
            (LambertId::Lam1, double_sum(80, |a, b| qpow(&q, c.ratio(a * (2 * b - 1), 2)) * (4 * chi4(a)), &c)),
            (LambertId::Lam2, double_sum(60, |a, b| qpow(&q, r((2 * a - 1) * (2 * b - 1))) * (16 * (2 * a - 1)), &c)),
            (LambertId::Lemma22First, double_sum(60, |a, b| qpow(&q, r((2 * a - 1) * (2 * b - 1))) / (2 * a - 1), &c)),
            (
                LambertId::Lemma22Second,
                double_sum(80, |a, b| qpow(&q, c.ratio((2 * a - 1) * (2 * b - 1), 2)) / (2 * a - 1), &c),
            ),
            (
                LambertId::RamLhs,
                double_sum(80, |a, b| qpow(&q, c.ratio(a * (2 * b - 1), 2)) * chi4(a) / ((2 * b - 1) * (2 * b - 1)), &c),
            ),
            (LambertId::Eis384, double_sum(60, |a, b| qpow(&q, r(a * (2 * b - 1))) * (chi4(a) * a * a), &c)),
            (LambertId::Cube, double_sum(60, |a, b| qpow(&q, r((2 * a - 1) * (2 * b - 1))) * (2 * b - 1).pow(3), &c)),
        ];
        for (id, oracle) in cases {
            let v = lambert_series(id, &n, &c).unwrap();
            assert!(rel_diff(&v, &oracle) < 1e-35, "{id}: {v} vs {oracle}");
        }
    }

    #[test]
    fn theta_power_expansions() {
        let c = ctx();
        for q in [0.1, 0.5] {
            let n = Nome::from_f64(q, &c).unwrap();
            let t2 = theta2(&n, &c).unwrap();
            let lam1 = lambert_series(LambertId::Lam1, &n, &c).unwrap();
            let lam2 = lambert_series(LambertId::Lam2, &n, &c).unwrap();
            assert!(rel_diff(&lam1, &t2.clone().square()) < 1e-38);
            assert!(rel_diff(&lam2, &t2.square().square()) < 1e-38);
        }
    }

    #[test]
    fn lemma22_first_is_log() {
        let c = ctx();
        let n = Nome::from_f64(0.1, &c).unwrap();
        let a = alpha(&n, &c).unwrap();
        let v = lambert_series(LambertId::Lemma22First, &n, &c).unwrap();
        let expect = -(c.one() - a).ln() / 16u32;
        assert!(rel_diff(&v, &expect) < 1e-38);
    }

    #[test]
    fn eis384_theta_product() {
        let c = ctx();
        let n = Nome::from_f64(0.2, &c).unwrap();
        let n2 = n.squared();
        let expect = theta2(&n2, &c).unwrap().square() * theta4(&n2, &c).unwrap().square().square() / 4u32;
        let v = lambert_series(LambertId::Eis384, &n, &c).unwrap();
        assert!(rel_diff(&v, &expect) < 1e-36);
    }

    #[test]
    fn empty_sums_at_small_q() {
        let c = ctx();
        let n = Nome::from_f64(1e-20, &c).unwrap();
        for id in LambertId::ALL {
            let v = lambert_series(id, &n, &c).unwrap();
            assert!(v.to_f64().abs() < 1e-8, "{id}");
        }
        for id in [LambertId::Eis384, LambertId::Cube, LambertId::Lam2, LambertId::Lemma22First] {
            let v = lambert_series(id, &n, &c).unwrap() / n.q();
            let lead = if id == LambertId::Lam2 { 16.0 } else { 1.0 };
            assert!((v.to_f64() - lead).abs() < 1e-15, "{id}");
        }
    }

    #[test]
    fn m_direct_truncation() {
        let c = ctx();
        let n = Nome::new(&c.ratio(1, 100), &c).unwrap();
        let m = eisenstein_m(&n, &c).unwrap();
        // 1 + 240 Σ σ₃(n) qⁿ
        let q = c.ratio(1, 100);
        let mut oracle = c.one();
        for k in 1..=40u64 {
            let sigma3: u64 = (1..=k).filter(|d| k % d == 0).map(|d| d.pow(3)).sum();
            oracle += Real::with_val(c.prec(), (&q).pow(k as u32)) * sigma3 * 240u32;
        }
        assert!(rel_diff(&m, &oracle) < 1e-38);
        assert!(m.to_string().starts_with("3.6228982853198244"));
        let tiny = eisenstein_m(&Nome::from_f64(1e-30, &c).unwrap(), &c).unwrap();
        assert!((tiny.to_f64() - 1.0).abs() < 1e-25);
    }

    #[test]
    fn parse_round_trip() {
        for id in LambertId::ALL {
            assert_eq!(id.name().parse::<LambertId>().unwrap(), id);
        }
        assert!("lam3".parse::<LambertId>().is_err());
    }
}
