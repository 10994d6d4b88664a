use rug::ops::Pow;

use crate::error::{Error, Result};
use crate::numerics::{PrecisionContext, Real};

/// A real nome q ∈ (0,1) carried together with its half-period u = -ln(q)/π.
///
/// Both are kept so that q², q^{1/2} and the involution u ↦ 1/u never pass through
/// a decimal re-parse. For very large u the stored q may underflow to zero; every
/// theta routine treats that as the q → 0⁺ limit.
#[derive(Debug, Clone, PartialEq)]
pub struct Nome {
    q: Real,
    u: Real,
}

impl Nome {
    pub fn new(q: &Real, ctx: &PrecisionContext) -> Result<Self> {
        if !q.is_finite() || *q <= 0 || *q >= 1 {
            return Err(Error::Domain(format!("nome must lie in (0,1), got {}", q.to_f64())));
        }
        let q = Real::with_val(ctx.prec(), q);
        let u = -Real::with_val(ctx.prec(), q.ln_ref()) / ctx.pi();
        Ok(Self { q, u })
    }

    pub fn from_f64(q: f64, ctx: &PrecisionContext) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::Domain(format!("nome must be finite, got {q}")));
        }
        Self::new(&ctx.real(q), ctx)
    }

    /// q = e^{-πu}.
    pub fn from_half_period(u: &Real, ctx: &PrecisionContext) -> Result<Self> {
        if !u.is_finite() || *u <= 0 {
            return Err(Error::Domain(format!("half-period must be positive, got {}", u.to_f64())));
        }
        let u = Real::with_val(ctx.prec(), u);
        let q = Real::with_val(ctx.prec(), -(ctx.pi() * &u)).exp();
        Ok(Self { q, u })
    }

    pub fn q(&self) -> &Real {
        &self.q
    }

    pub fn u(&self) -> &Real {
        &self.u
    }

    /// The nome q^k.
    pub fn power(&self, k: u32) -> Self {
        let prec = self.q.prec();
        Self { q: Real::with_val(prec, (&self.q).pow(k)), u: Real::with_val(prec, &self.u * k) }
    }

    pub fn squared(&self) -> Self {
        self.power(2)
    }

    /// The nome q^{1/2}.
    pub fn sqrt(&self) -> Self {
        Self { q: self.q.clone().sqrt(), u: self.u.clone() / 2u32 }
    }

    /// q^{1/k} for k ≥ 1.
    pub fn root(&self, k: u32) -> Self {
        Self { q: self.q.clone().root(k), u: self.u.clone() / k }
    }

    /// True when direct summation converges quickly (u ≥ 1, i.e. q ≤ e^{-π}).
    pub fn is_small(&self) -> bool {
        self.u >= 1
    }
}
