use std::fmt;
use std::str::FromStr;

use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::numerics::{PrecisionContext, Real};

/// Parses an exact parameter: an integer, a fraction `p/q`, or a finite decimal.
pub fn parse_param(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("malformed parameter `{s}`"));
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let num = Integer::from_str(&digits).map_err(|_| bad())?;
        let den = Integer::from(Integer::u_pow_u(10, frac.len() as u32));
        let r = Rational::from((num, den));
        return Ok(if negative { -r } else { r });
    }
    Rational::from_str(s).map_err(|_| bad())
}

fn is_nonpositive_integer(r: &Rational) -> bool {
    *r.denom() == 1 && *r.numer() <= 0
}

fn sum(params: &[Rational]) -> Rational {
    params.iter().fold(Rational::new(), |acc, p| acc + p)
}

fn fmt_params(f: &mut fmt::Formatter<'_>, params: &[Rational]) -> fmt::Result {
    for (i, p) in params.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{p}")?;
    }
    Ok(())
}

pub fn to_real(r: &Rational, ctx: &PrecisionContext) -> Real {
    Real::with_val(ctx.prec(), r)
}

/// p+1Fp parameter lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PfqSpec {
    pub upper: Vec<Rational>,
    pub lower: Vec<Rational>,
}

impl PfqSpec {
    pub fn new(upper: Vec<Rational>, lower: Vec<Rational>) -> Result<Self> {
        if upper.len() != lower.len() + 1 {
            return Err(Error::Invalid(format!(
                "expected {} upper parameters for {} lower, got {}",
                lower.len() + 1,
                lower.len(),
                upper.len()
            )));
        }
        if let Some(b) = lower.iter().find(|b| is_nonpositive_integer(b)) {
            return Err(Error::Invalid(format!("lower parameter {b} is zero or a negative integer")));
        }
        Ok(Self { upper, lower })
    }

    /// Builds from small integer fractions, e.g. `&[(1, 2), (1, 1)]`.
    pub fn from_ratios(upper: &[(i64, i64)], lower: &[(i64, i64)]) -> Result<Self> {
        let conv = |v: &[(i64, i64)]| v.iter().map(|&(n, d)| Rational::from((n, d))).collect();
        Self::new(conv(upper), conv(lower))
    }

    pub fn parse(upper: &str, lower: &str) -> Result<Self> {
        let list = |s: &str| -> Result<Vec<Rational>> {
            if s.trim().is_empty() {
                return Ok(Vec::new());
            }
            s.split(',').map(parse_param).collect()
        };
        Self::new(list(upper)?, list(lower)?)
    }

    /// Σ lower − Σ upper.
    pub fn excess(&self) -> Rational {
        sum(&self.lower) - sum(&self.upper)
    }

    /// Degree of the polynomial when some upper parameter is zero or a negative integer.
    pub fn terminates(&self) -> Option<u64> {
        self.upper
            .iter()
            .filter(|a| is_nonpositive_integer(a))
            .map(|a| Integer::from(-a.numer()).to_u64().unwrap_or(u64::MAX))
            .min()
    }
}

impl fmt::Display for PfqSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}F{}(", self.upper.len(), self.lower.len())?;
        fmt_params(f, &self.upper)?;
        f.write_str("; ")?;
        fmt_params(f, &self.lower)?;
        f.write_str(")")
    }
}

pub fn pfq_excess(spec: &PfqSpec) -> Rational {
    spec.excess()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfqClass {
    Interior,
    BoundaryConvergent,
    Divergent,
}

/// Convergence class of the series at real z.
pub fn pfq_converges(spec: &PfqSpec, z: &Real) -> PfqClass {
    if spec.terminates().is_some() && z.is_finite() {
        return PfqClass::Interior;
    }
    let excess = spec.excess();
    if z.cmp_abs(&Real::with_val(8, 1)) == Some(std::cmp::Ordering::Less) {
        PfqClass::Interior
    } else if (*z == 1 && excess > 0) || (*z == -1 && excess > -1) {
        PfqClass::BoundaryConvergent
    } else {
        PfqClass::Divergent
    }
}

/// Kampé de Fériet parameter lists: Σ (a)_{m+n} Π(b)_m Π(b')_n / ((c)_{m+n} Π(d)_m Π(d')_n) xᵐyⁿ/(m!n!).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KdfSpec {
    pub a: Vec<Rational>,
    pub c: Vec<Rational>,
    pub b: Vec<Rational>,
    pub d: Vec<Rational>,
    pub bp: Vec<Rational>,
    pub dp: Vec<Rational>,
}

impl KdfSpec {
    pub fn new(
        a: Vec<Rational>,
        c: Vec<Rational>,
        b: Vec<Rational>,
        d: Vec<Rational>,
        bp: Vec<Rational>,
        dp: Vec<Rational>,
    ) -> Result<Self> {
        for (name, list) in [("c", &c), ("d", &d), ("d'", &dp)] {
            if let Some(p) = list.iter().find(|p| is_nonpositive_integer(p)) {
                return Err(Error::Invalid(format!("{name} parameter {p} is zero or a negative integer")));
            }
        }
        Ok(Self { a, c, b, d, bp, dp })
    }

    pub fn from_ratios(
        a: &[(i64, i64)],
        c: &[(i64, i64)],
        b: &[(i64, i64)],
        d: &[(i64, i64)],
        bp: &[(i64, i64)],
        dp: &[(i64, i64)],
    ) -> Result<Self> {
        let conv = |v: &[(i64, i64)]| -> Vec<Rational> { v.iter().map(|&(n, den)| Rational::from((n, den))).collect() };
        Self::new(conv(a), conv(c), conv(b), conv(d), conv(bp), conv(dp))
    }

    /// Exchanges the roles of the x- and y-groups.
    pub fn swapped(&self) -> Self {
        Self {
            a: self.a.clone(),
            c: self.c.clone(),
            b: self.bp.clone(),
            d: self.dp.clone(),
            bp: self.b.clone(),
            dp: self.d.clone(),
        }
    }

    /// The (a; c) pair when A = C = 1.
    pub fn single_pair(&self) -> Option<(&Rational, &Rational)> {
        match (self.a.as_slice(), self.c.as_slice()) {
            ([a], [c]) => Some((a, c)),
            _ => None,
        }
    }

    /// Single series in x obtained at y = 0: upper (a, b), lower (c, d). Fails unless
    /// the merged lists have the p+1Fp shape.
    pub fn x_reduction(&self) -> Result<PfqSpec> {
        let upper: Vec<Rational> = self.a.iter().chain(&self.b).cloned().collect();
        let lower: Vec<Rational> = self.c.iter().chain(&self.d).cloned().collect();
        PfqSpec::new(upper, lower)
    }
}

impl fmt::Display for KdfSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("F[")?;
        fmt_params(f, &self.a)?;
        f.write_str(" / ")?;
        fmt_params(f, &self.c)?;
        f.write_str("; ")?;
        fmt_params(f, &self.b)?;
        f.write_str(" / ")?;
        fmt_params(f, &self.d)?;
        f.write_str("; ")?;
        fmt_params(f, &self.bp)?;
        f.write_str(" / ")?;
        fmt_params(f, &self.dp)?;
        f.write_str("]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceReport {
    pub margins: [Rational; 3],
    pub convergent_at_unit: bool,
}

/// The three absolute-convergence margins at |x|, |y| ≤ 1.
pub fn kdf_converges(spec: &KdfSpec) -> ConvergenceReport {
    let base = sum(&spec.c) - sum(&spec.a);
    let m1 = (&base + sum(&spec.d)) - sum(&spec.b);
    let m2 = (&base + sum(&spec.dp)) - sum(&spec.bp);
    let m3 = base + sum(&spec.d) + sum(&spec.dp) - sum(&spec.b) - sum(&spec.bp);
    let convergent_at_unit = m1 > 0 && m2 > 0 && m3 > 0;
    ConvergenceReport { margins: [m1, m2, m3], convergent_at_unit }
}
