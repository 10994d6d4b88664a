use rug::Float;

use crate::error::{Error, Result};

/// Working scalar. Always created at a context's working precision.
pub type Real = Float;

/// Precision and budget settings threaded through every numeric operation.
///
/// `digits` is the requested number of correct significant decimal digits;
/// arithmetic runs at `digits + guard`. Every operation either returns an
/// error estimate at most `10^-digits` (relative) or fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionContext {
    pub digits: u32,
    pub guard: u32,
    pub max_terms: usize,
    pub quad_level_cap: u32,
}

impl PrecisionContext {
    pub const MIN_DIGITS: u32 = 10;
    pub const MAX_DIGITS: u32 = 300;
    pub const MIN_GUARD: u32 = 5;
    pub const DEFAULT_GUARD: u32 = 15;
    pub const DEFAULT_MAX_TERMS: usize = 2_000_000;
    pub const DEFAULT_QUAD_LEVEL_CAP: u32 = 10;

    pub fn new(digits: u32) -> Result<Self> {
        Self::with_settings(
            digits,
            Self::DEFAULT_GUARD,
            Self::DEFAULT_MAX_TERMS,
            Self::DEFAULT_QUAD_LEVEL_CAP,
        )
    }

    pub fn with_settings(
        digits: u32,
        guard: u32,
        max_terms: usize,
        quad_level_cap: u32,
    ) -> Result<Self> {
        if !(Self::MIN_DIGITS..=Self::MAX_DIGITS).contains(&digits) {
            return Err(Error::Invalid(format!(
                "digits must lie in [{}, {}], got {digits}",
                Self::MIN_DIGITS,
                Self::MAX_DIGITS
            )));
        }
        if guard < Self::MIN_GUARD {
            return Err(Error::Invalid(format!(
                "guard must be at least {}, got {guard}",
                Self::MIN_GUARD
            )));
        }
        if max_terms == 0 || quad_level_cap == 0 {
            return Err(Error::Invalid("budgets must be positive".into()));
        }
        Ok(Self {
            digits,
            guard,
            max_terms,
            quad_level_cap,
        })
    }

    pub fn with_guard(self, guard: u32) -> Result<Self> {
        Self::with_settings(self.digits, guard, self.max_terms, self.quad_level_cap)
    }

    pub fn with_max_terms(self, max_terms: usize) -> Result<Self> {
        Self::with_settings(self.digits, self.guard, max_terms, self.quad_level_cap)
    }

    /// Same budgets, different target digits.
    pub fn with_digits(self, digits: u32) -> Result<Self> {
        Self::with_settings(digits, self.guard, self.max_terms, self.quad_level_cap)
    }

    pub fn working_digits(&self) -> u32 {
        self.digits + self.guard
    }

    /// Working precision in bits.
    pub fn prec(&self) -> u32 {
        (f64::from(self.working_digits()) * std::f64::consts::LOG2_10).ceil() as u32 + 8
    }

    /// Relative tolerance promised to callers.
    pub fn tolerance(&self) -> f64 {
        10f64.powi(-(self.digits as i32))
    }

    /// Tolerance internal loops aim for, so compositions stay inside `tolerance`.
    pub fn target(&self) -> f64 {
        10f64.powi(-((self.digits + self.guard / 3) as i32))
    }

    /// Smallest relative error any result may claim; roundoff at working precision
    /// is never reported as better than this.
    pub fn floor(&self) -> f64 {
        10f64.powi(-((self.digits + self.guard / 2) as i32))
    }

    /// `ln(10^working_digits)`, the decay needed before a term is negligible.
    pub fn log_working_eps(&self) -> f64 {
        f64::from(self.working_digits()) * std::f64::consts::LN_10
    }

    pub fn real<T>(&self, value: T) -> Real
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.prec(), value)
    }

    pub fn zero(&self) -> Real {
        Float::new(self.prec())
    }

    pub fn one(&self) -> Real {
        self.real(1)
    }

    pub fn pi(&self) -> Real {
        self.real(rug::float::Constant::Pi)
    }

    pub fn ln2(&self) -> Real {
        self.real(rug::float::Constant::Log2)
    }

    /// Exact rational converted at working precision.
    pub fn ratio(&self, num: i64, den: i64) -> Real {
        let mut x = self.real(num);
        x /= den;
        x
    }
}

/// Rejects NaN or infinite values that would otherwise leak out of an operation.
pub fn check_finite(x: Real, what: &'static str) -> Result<Real> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Relative difference |a-b| / max(|a|,|b|), zero when both vanish.
pub fn rel_diff(a: &Real, b: &Real) -> f64 {
    let diff = Float::with_val(a.prec().max(b.prec()), a - b).abs();
    let scale = if a.cmp_abs(b) == Some(std::cmp::Ordering::Less) {
        b.clone().abs()
    } else {
        a.clone().abs()
    };
    if scale.is_zero() {
        if diff.is_zero() {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (diff / scale).to_f64()
    }
}

/// |x| as f64 (saturating at the f64 range).
pub fn abs_f64(x: &Real) -> f64 {
    x.to_f64().abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_digits_and_guard() {
        assert!(PrecisionContext::new(9).is_err());
        assert!(PrecisionContext::new(10).is_ok());
        assert!(PrecisionContext::new(30).unwrap().with_guard(4).is_err());
    }

    #[test]
    fn precision_grows_with_digits() {
        let a = PrecisionContext::new(20).unwrap();
        let b = PrecisionContext::new(40).unwrap();
        assert!(b.prec() > a.prec());
        assert!(a.prec() as f64 >= 35.0 * std::f64::consts::LOG2_10);
    }

    #[test]
    fn rel_diff_basics() {
        let ctx = PrecisionContext::new(20).unwrap();
        assert_eq!(rel_diff(&ctx.zero(), &ctx.zero()), 0.0);
        let d = rel_diff(&ctx.real(1), &ctx.real(1.5));
        assert!((d - 1.0 / 3.0).abs() < 1e-15);
    }
}
