use std::fmt;
use std::str::FromStr;

use super::nome::Nome;
use crate::error::{Error, Result};
use crate::numerics::{check_finite, PrecisionContext, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThetaKind {
    Theta2,
    Theta3,
    Theta4,
}

impl ThetaKind {
    /// Partner under u ↦ 1/u: θ2 ↔ θ4, θ3 ↔ θ3.
    pub fn dual(self) -> Self {
        match self {
            ThetaKind::Theta2 => ThetaKind::Theta4,
            ThetaKind::Theta3 => ThetaKind::Theta3,
            ThetaKind::Theta4 => ThetaKind::Theta2,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            ThetaKind::Theta2 => 2,
            ThetaKind::Theta3 => 3,
            ThetaKind::Theta4 => 4,
        }
    }
}

impl fmt::Display for ThetaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

impl FromStr for ThetaKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().trim_start_matches("theta") {
            "2" => Ok(ThetaKind::Theta2),
            "3" => Ok(ThetaKind::Theta3),
            "4" => Ok(ThetaKind::Theta4),
            other => Err(Error::Invalid(format!("unknown theta index `{other}` (expected 2, 3 or 4)"))),
        }
    }
}

/// Plain partial sums of the defining series at nome q, stopping once the next
/// term drops below 2^{-prec} of the running sum.
pub fn theta_direct(q: &Real, kind: ThetaKind, ctx: &PrecisionContext) -> Result<Real> {
    if *q < 0 || *q >= 1 {
        return Err(Error::Domain(format!("nome must lie in [0,1), got {}", q.to_f64())));
    }
    let prec = ctx.prec();
    let q = Real::with_val(prec, q);
    let eps = Real::with_val(prec, Real::i_exp(1, -(prec as i32)));
    let q2 = Real::with_val(prec, q.square_ref());
    let mut sum = ctx.one();
    // term holds q^{n²} (θ3, θ4) or q^{n(n+1)} (θ2); step is the ratio to the next one.
    let (mut term, mut step, weight) = match kind {
        ThetaKind::Theta2 => (q2.clone(), Real::with_val(prec, q2.square_ref()), 1u32),
        _ => (q.clone(), Real::with_val(prec, &q * &q2), 2u32),
    };
    let mut n = 1usize;
    loop {
        if term.is_zero() || term < Real::with_val(prec, &sum * &eps).abs() {
            break;
        }
        let t = Real::with_val(prec, &term * weight);
        if kind == ThetaKind::Theta4 && n % 2 == 1 {
            sum -= t;
        } else {
            sum += t;
        }
        term *= &step;
        step *= &q2;
        n += 1;
        if n > ctx.max_terms {
            return Err(Error::BudgetExhausted { best: sum.to_f64(), estimate: term.to_f64(), used: n });
        }
    }
    if kind == ThetaKind::Theta2 {
        sum *= q.sqrt().sqrt() * 2u32;
    }
    check_finite(sum, "theta_direct")
}

/// θ_kind(e^{-πu}), summed at whichever of u, 1/u is at least 1.
pub fn theta_involution(u: &Real, kind: ThetaKind, ctx: &PrecisionContext) -> Result<Real> {
    if !u.is_finite() || *u <= 0 {
        return Err(Error::Domain(format!("half-period must be positive, got {}", u.to_f64())));
    }
    let prec = ctx.prec();
    let u = Real::with_val(prec, u);
    if u >= 1 {
        let q = Real::with_val(prec, -(ctx.pi() * &u)).exp();
        return theta_direct(&q, kind, ctx);
    }
    let v = Real::with_val(prec, u.recip_ref());
    let q = Real::with_val(prec, -(ctx.pi() * &v)).exp();
    let dual = theta_direct(&q, kind.dual(), ctx)?;
    check_finite(dual / u.sqrt(), "theta_involution")
}

pub fn theta(nome: &Nome, kind: ThetaKind, ctx: &PrecisionContext) -> Result<Real> {
    if nome.is_small() {
        theta_direct(nome.q(), kind, ctx)
    } else {
        theta_involution(nome.u(), kind, ctx)
    }
}

pub fn theta2(nome: &Nome, ctx: &PrecisionContext) -> Result<Real> {
    theta(nome, ThetaKind::Theta2, ctx)
}

pub fn theta3(nome: &Nome, ctx: &PrecisionContext) -> Result<Real> {
    theta(nome, ThetaKind::Theta3, ctx)
}

pub fn theta4(nome: &Nome, ctx: &PrecisionContext) -> Result<Real> {
    theta(nome, ThetaKind::Theta4, ctx)
}

/// α = θ2⁴/θ3⁴.
pub fn alpha(nome: &Nome, ctx: &PrecisionContext) -> Result<Real> {
    let r = theta2(nome, ctx)? / theta3(nome, ctx)?;
    Ok(r.square().square())
}

/// 1 - α = θ4⁴/θ3⁴, without the cancellation of forming 1 - α near q = 1.
pub fn alpha_complement(nome: &Nome, ctx: &PrecisionContext) -> Result<Real> {
    let r = theta4(nome, ctx)? / theta3(nome, ctx)?;
    Ok(r.square().square())
}

/// f(q) = θ2⁴(q)θ4²(q)/16.
pub fn form_f(nome: &Nome, ctx: &PrecisionContext) -> Result<Real> {
    let t2 = theta2(nome, ctx)?;
    let t4 = theta4(nome, ctx)?;
    Ok(t2.square().square() * t4.square() / 16u32)
}

/// g(q) = θ2⁴(q)θ4²(q²)/16.
pub fn form_g(nome: &Nome, ctx: &PrecisionContext) -> Result<Real> {
    let t2 = theta2(nome, ctx)?;
    let t4 = theta4(&nome.squared(), ctx)?;
    Ok(t2.square().square() * t4.square() / 16u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rel_diff;
    use rug::ops::Pow;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(30).unwrap()
    }

    /// Independent oracle: Σ_{n=-N}^{N} with the full bilateral index.
    fn bilateral(q: f64, kind: ThetaKind, c: &PrecisionContext) -> Real {
        let q = c.real(q);
        let mut s = c.zero();
        for n in -60i64..=60 {
            let (e, sign) = match kind {
                ThetaKind::Theta2 => (c.ratio((2 * n + 1) * (2 * n + 1), 4), 1),
                ThetaKind::Theta3 => (c.real(n * n), 1),
                ThetaKind::Theta4 => (c.real(n * n), if n % 2 == 0 { 1 } else { -1 }),
            };
            let t = Real::with_val(c.prec(), (&q).pow(&e));
            s += t * sign;
        }
        s
    }

    #[test]
    fn small_q_limits() {
        let c = ctx();
        let n = Nome::from_f64(1e-12, &c).unwrap();
        assert!(theta2(&n, &c).unwrap().to_f64() < 1e-2);
        assert!((theta3(&n, &c).unwrap().to_f64() - 1.0).abs() < 1e-11);
        assert!((theta4(&n, &c).unwrap().to_f64() - 1.0).abs() < 1e-11);
    }

    #[test]
    fn theta3_at_one_tenth() {
        let c = ctx();
        let n = Nome::new(&c.ratio(1, 10), &c).unwrap();
        let v = theta3(&n, &c).unwrap();
        // 1 + 2(q + q⁴ + q⁹ + q¹⁶ + q²⁵) at q = 1/10, exact through 10^-36
        let mut expect = c.one();
        for k in [1, 4, 9, 16, 25] {
            expect += c.real(10).pow(-k) * 2u32;
        }
        assert!(rel_diff(&v, &expect) < 1e-35, "{v}");
        assert!(v.to_string().starts_with("1.2002000020000002"));
    }

    #[test]
    fn matches_bilateral_oracle() {
        let c = ctx();
        for q in [0.01, 0.1, 0.3, 0.5] {
            let n = Nome::from_f64(q, &c).unwrap();
            for kind in [ThetaKind::Theta2, ThetaKind::Theta3, ThetaKind::Theta4] {
                let v = theta(&n, kind, &c).unwrap();
                let o = bilateral(q, kind, &c);
                assert!(rel_diff(&v, &o) < 1e-35, "q={q} {kind}: {v} vs {o}");
            }
        }
    }

    #[test]
    fn u_equal_one_fixed_point() {
        let c = ctx();
        let n = Nome::from_half_period(&c.one(), &c).unwrap();
        let d = theta4(&n, &c).unwrap() - theta2(&n, &c).unwrap();
        assert!(d.abs().to_f64() < 1e-40);
    }

    #[test]
    fn involution_pairs() {
        let c = ctx();
        // √2 θ4(e^{-2π}) = θ2(e^{-π/2})
        let lhs = theta_direct(&Real::with_val(c.prec(), -(c.pi() * 2u32)).exp(), ThetaKind::Theta4, &c).unwrap()
            * c.real(2).sqrt();
        let rhs = theta_direct(&Real::with_val(c.prec(), -(c.pi() / 2u32)).exp(), ThetaKind::Theta2, &c).unwrap();
        assert!(rel_diff(&lhs, &rhs) < 1e-40);
        // θ2(e^{-π/4}) = √4 θ4(e^{-4π})
        let a = theta_direct(&Real::with_val(c.prec(), -(c.pi() / 4u32)).exp(), ThetaKind::Theta2, &c).unwrap();
        let b = theta_direct(&Real::with_val(c.prec(), -(c.pi() * 4u32)).exp(), ThetaKind::Theta4, &c).unwrap() * 2u32;
        assert!(rel_diff(&a, &b) < 1e-40, "{a} vs {b}");
    }

    #[test]
    fn involution_route_agrees_with_direct_near_one() {
        let c = ctx();
        let u = c.ratio(1, 5);
        let q = Real::with_val(c.prec(), -(c.pi() * &u)).exp();
        for kind in [ThetaKind::Theta2, ThetaKind::Theta3, ThetaKind::Theta4] {
            let a = theta_involution(&u, kind, &c).unwrap();
            let b = theta_direct(&q, kind, &c).unwrap();
            assert!(rel_diff(&a, &b) < 1e-38, "{kind}: {a} vs {b}");
        }
    }

    #[test]
    fn tiny_half_period_does_not_overflow() {
        let c = ctx();
        let u = c.real(1e-9);
        assert!(theta_involution(&u, ThetaKind::Theta4, &c).unwrap().is_zero());
        let t3 = theta_involution(&u, ThetaKind::Theta3, &c).unwrap();
        assert!(rel_diff(&t3, &(c.one() / u.sqrt())) < 1e-40);
    }

    #[test]
    fn alpha_values() {
        let c = ctx();
        let half = alpha(&Nome::from_half_period(&c.one(), &c).unwrap(), &c).unwrap();
        assert!((half - c.ratio(1, 2)).abs().to_f64() < 1e-40);
        let n = Nome::from_f64(0.1, &c).unwrap();
        let a = alpha(&n, &c).unwrap();
        let b = alpha_complement(&n, &c).unwrap();
        assert!((a.clone() + b - 1u32).abs().to_f64() < 1e-40);
        let o = (bilateral(0.1, ThetaKind::Theta2, &c) / bilateral(0.1, ThetaKind::Theta3, &c)).square().square();
        assert!(rel_diff(&a, &o) < 1e-38);
    }

    #[test]
    fn form_leading_terms() {
        let c = ctx();
        let n = Nome::from_f64(1e-8, &c).unwrap();
        let r = form_f(&n, &c).unwrap() / n.q();
        assert!((r.to_f64() - 1.0).abs() < 1e-7);
        let q = 0.05f64;
        let n = Nome::from_f64(q, &c).unwrap();
        let f = form_f(&n, &c).unwrap().to_f64();
        assert!((f - (q - 4.0 * q * q + 8.0 * q.powi(3))).abs() < 20.0 * q.powi(4));
        let g = form_g(&n, &c).unwrap().to_f64();
        assert!((g - (q - 6.0 * q.powi(5))).abs() < 20.0 * q.powi(9));
    }
}
