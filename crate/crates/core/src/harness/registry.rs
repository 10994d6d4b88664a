use rug::Rational;

use super::RunConfig;
use crate::error::{Error, Result};
use crate::hyper::{euler_2f1, kdf, kdf_converges, pfq, pfq_at, KdfSpec, KdfStrategy, PfqSpec};
use crate::lvalues::{
    closed_form, factorized, kdf_theorem_rhs, lf4_variants, mellin, q_integral, theorem_specs, ClosedFormId, FormId,
    QIntegralId, TheoremId,
};
use crate::numerics::{pochhammer, rel_diff, PrecisionContext, Real};
use crate::theta::{
    alpha, alpha_complement, coeffs_convolution, coeffs_lambert, eisenstein_m, lambert_series, theta, theta_direct,
    LambertId, Nome, ThetaKind,
};

/// How many digits an identity must reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// `digits - k` at the run precision.
    BelowDigits(u32),
    Fixed(u32),
    /// Fixed digits when the Kampé de Fériet series are summed by integral
    /// reduction; the coarser strategies get their own, lower, targets.
    Kdf(u32),
    /// Exact (integer or rational) equality.
    Exact,
}

impl Target {
    pub fn digits(self, config: &RunConfig) -> u32 {
        if let Some(t) = config.target {
            return t;
        }
        match self {
            Target::BelowDigits(k) => config.digits.saturating_sub(k),
            Target::Fixed(t) => t,
            Target::Kdf(t) => match config.kdf_strategy {
                KdfStrategy::IntegralReduction => t,
                KdfStrategy::Iterated => 5,
                KdfStrategy::DoubleTruncate { .. } => 4,
            },
            Target::Exact => config.digits,
        }
    }
}

/// Both sides of a comparison; `exact` is set when the sides are integers or
/// rationals compared without rounding.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub lhs: Real,
    pub rhs: Real,
    pub exact: Option<bool>,
}

impl Comparison {
    fn new(lhs: Real, rhs: Real) -> Self {
        Self { lhs, rhs, exact: None }
    }

    /// The comparison with the larger relative error.
    fn worst(self, other: Self) -> Self {
        if other.rel_err() > self.rel_err() {
            other
        } else {
            self
        }
    }

    pub fn rel_err(&self) -> f64 {
        match self.exact {
            Some(true) => 0.0,
            Some(false) => rel_diff(&self.lhs, &self.rhs).max(1.0),
            None => rel_diff(&self.lhs, &self.rhs),
        }
    }
}

pub type PointFn = fn(&Nome, &PrecisionContext) -> Result<Comparison>;
pub type ValueFn = fn(&PrecisionContext, &RunConfig) -> Result<Comparison>;

#[derive(Clone, Copy)]
pub enum Eval {
    /// Checked at every grid point; the worst point is reported.
    Pointwise(PointFn),
    Value(ValueFn),
}

#[derive(Clone, Copy)]
pub struct Identity {
    pub id: &'static str,
    pub name: &'static str,
    pub lhs_method: &'static str,
    pub rhs_method: &'static str,
    pub target: Target,
    pub eval: Eval,
}

impl std::fmt::Debug for Identity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Identity").field("id", &self.id).field("name", &self.name).finish()
    }
}

fn th(n: &Nome, k: ThetaKind, c: &PrecisionContext) -> Result<Real> {
    theta(n, k, c)
}

fn pow8(x: Real) -> Real {
    x.square().square().square()
}

fn spec(u: &[(i64, i64)], l: &[(i64, i64)]) -> PfqSpec {
    PfqSpec::from_ratios(u, l).expect("fixed parameter lists are well formed")
}

fn k_tilde(n: &Nome, c: &PrecisionContext) -> Result<Real> {
    pfq_at(&spec(&[(1, 2), (1, 2)], &[(1, 1)]), &alpha(n, c)?, &alpha_complement(n, c)?, c)
}

/// θ(q) and q·θ′(q) for θ2 or θ3 by termwise differentiation of the defining series.
fn theta_with_log_derivative(q: &Real, kind: ThetaKind, c: &PrecisionContext) -> Result<(Real, Real)> {
    let prec = c.prec();
    let log_q = Real::with_val(prec, q.ln_ref());
    let eps = Real::with_val(prec, Real::i_exp(1, -(prec as i32)));
    let (mut value, mut deriv) = match kind {
        ThetaKind::Theta3 => (c.one(), c.zero()),
        _ => (c.zero(), c.zero()),
    };
    for n in 0..c.max_terms {
        let e = match kind {
            ThetaKind::Theta3 if n == 0 => continue,
            ThetaKind::Theta3 => c.real(n).square(),
            _ => (c.real(n) + c.ratio(1, 2)).square(),
        };
        let term = Real::with_val(prec, &e * &log_q).exp() * 2u32;
        let d = Real::with_val(prec, &term * &e);
        value += &term;
        deriv += &d;
        if d < Real::with_val(prec, &deriv * &eps) && term < Real::with_val(prec, &value * &eps) {
            return Ok((value, deriv));
        }
    }
    Err(Error::BudgetExhausted { best: value.to_f64(), estimate: f64::NAN, used: c.max_terms })
}

fn i1(n: &Nome, c: &PrecisionContext) -> Result<Comparison> {
    Ok(Comparison::new(th(n, ThetaKind::Theta3, c)?.square(), k_tilde(n, c)?))
}

fn i2(n: &Nome, c: &PrecisionContext) -> Result<Comparison> {
    let (t2, d2) = theta_with_log_derivative(n.q(), ThetaKind::Theta2, c)?;
    let (t3, d3) = theta_with_log_derivative(n.q(), ThetaKind::Theta3, c)?;
    let a = alpha(n, c)?;
    let lhs = Real::with_val(c.prec(), d2 / t2) - d3 / &t3;
    let lhs = lhs * &a * 4u32;
    let rhs = a * alpha_complement(n, c)? * t3.square().square();
    Ok(Comparison::new(lhs, rhs))
}

fn i3(n: &Nome, c: &PrecisionContext) -> Result<Comparison> {
    let u = n.u();
    let lhs = theta_direct(n.q(), ThetaKind::Theta4, c)? * Real::with_val(c.prec(), u.sqrt_ref());
    let dual = Real::with_val(c.prec(), -(c.pi() / u)).exp();
    Ok(Comparison::new(lhs, theta_direct(&dual, ThetaKind::Theta2, c)?))
}

fn i4(n: &Nome, c: &PrecisionContext) -> Result<Comparison> {
    Ok(Comparison::new(lambert_series(LambertId::Lam1, n, c)?, th(n, ThetaKind::Theta2, c)?.square()))
}

fn i5(n: &Nome, c: &PrecisionContext) -> Result<Comparison> {
    Ok(Comparison::new(lambert_series(LambertId::Lam2, n, c)?, th(n, ThetaKind::Theta2, c)?.square().square()))
}

fn i6(n: &Nome, c: &PrecisionContext) -> Result<Comparison> {
    let n2 = n.squared();
    let rhs = th(&n2, ThetaKind::Theta2, c)?.square() * th(&n2, ThetaKind::Theta4, c)?.square().square() / 4u32;
    Ok(Comparison::new(lambert_series(LambertId::Eis384, n, c)?, rhs))
}

fn i7(n: &Nome, c: &PrecisionContext) -> Result<Comparison> {
    let (a, w) = (alpha(n, c)?, alpha_complement(n, c)?);
    let rhs = pfq_at(&spec(&[(1, 1), (1, 1)], &[(2, 1)]), &a, &w, c)? * &a / 16u32;
    Ok(Comparison::new(lambert_series(LambertId::Lemma22First, n, c)?, rhs))
}

fn i8(n: &Nome, c: &PrecisionContext) -> Result<Comparison> {
    let (a, w) = (alpha(n, c)?, alpha_complement(n, c)?);
    let rhs = pfq_at(&spec(&[(1, 2), (1, 1)], &[(3, 2)]), &a, &w, c)? * a.sqrt() / 4u32;
    Ok(Comparison::new(lambert_series(LambertId::Lemma22Second, n, c)?, rhs))
}

fn i9(n: &Nome, c: &PrecisionContext) -> Result<Comparison> {
    let n2 = n.squared();
    let lhs = th(&n2, ThetaKind::Theta2, c)? * th(&n2, ThetaKind::Theta3, c)? * 2u32;
    Ok(Comparison::new(lhs, th(n, ThetaKind::Theta2, c)?.square()))
}

fn i10(n: &Nome, c: &PrecisionContext) -> Result<Comparison> {
    let rhs = pow8(th(&n.sqrt(), ThetaKind::Theta2, c)?) - pow8(th(n, ThetaKind::Theta2, c)?) * 8u32;
    Ok(Comparison::new(lambert_series(LambertId::Cube, n, c)?, rhs / 256u32))
}

fn i11(n: &Nome, c: &PrecisionContext) -> Result<Comparison> {
    let rhs = (eisenstein_m(n, c)? - eisenstein_m(&n.squared(), c)?) * 16u32 / 15u32;
    Ok(Comparison::new(pow8(th(&n.sqrt(), ThetaKind::Theta2, c)?), rhs))
}

fn i12(n: &Nome, c: &PrecisionContext) -> Result<Comparison> {
    let (a, w) = (alpha(n, c)?, alpha_complement(n, c)?);
    let ram = pfq_at(&spec(&[(1, 1), (1, 1), (1, 1)], &[(3, 2), (3, 2)]), &a, &w, c)?;
    let rhs = ram * a.sqrt() / 4u32 / k_tilde(n, c)?;
    Ok(Comparison::new(lambert_series(LambertId::RamLhs, n, c)?, rhs))
}

fn i13(n: &Nome, c: &PrecisionContext) -> Result<Comparison> {
    let lhs = pow8(th(&n.squared(), ThetaKind::Theta4, c)?) * 2u32 - pow8(th(n, ThetaKind::Theta4, c)?);
    let (a, w) = (alpha(n, c)?, alpha_complement(n, c)?);
    let rhs = (a + 1u32) * w * pow8(th(n, ThetaKind::Theta3, c)?);
    Ok(Comparison::new(lhs, rhs))
}

fn i14(n: &Nome, c: &PrecisionContext) -> Result<Comparison> {
    let lhs = pow8(th(&n.power(4), ThetaKind::Theta4, c)?) * 2u32 - pow8(th(&n.squared(), ThetaKind::Theta4, c)?);
    let w = alpha_complement(n, c)?;
    let sw = Real::with_val(c.prec(), w.sqrt_ref());
    let rhs = (Real::with_val(c.prec(), &sw * &w) + sw) * pow8(th(n, ThetaKind::Theta3, c)?) / 2u32;
    Ok(Comparison::new(lhs, rhs))
}

fn i15(n: &Nome, c: &PrecisionContext) -> Result<Comparison> {
    let lhs = th(&n.squared(), ThetaKind::Theta3, c)?.square() * 2u32;
    let rhs = th(n, ThetaKind::Theta3, c)?.square() + th(n, ThetaKind::Theta4, c)?.square();
    Ok(Comparison::new(lhs, rhs))
}

fn i16(n: &Nome, c: &PrecisionContext) -> Result<Comparison> {
    let lhs = th(n, ThetaKind::Theta3, c)? * th(n, ThetaKind::Theta4, c)?;
    Ok(Comparison::new(lhs, th(&n.squared(), ThetaKind::Theta4, c)?.square()))
}

fn kdf_vs(id: TheoremId, other: Result<Real>, c: &PrecisionContext, cfg: &RunConfig) -> Result<Comparison> {
    Ok(Comparison::new(kdf_theorem_rhs(id, cfg.kdf_strategy, c)?.value, other?))
}

fn i17(c: &PrecisionContext, cfg: &RunConfig) -> Result<Comparison> {
    kdf_vs(TheoremId::Thm11_1, closed_form(ClosedFormId::Lf3, c).map(|r| r.value), c, cfg)
}

fn i18(c: &PrecisionContext, cfg: &RunConfig) -> Result<Comparison> {
    kdf_vs(TheoremId::Thm11_2, mellin(FormId::G, 3, &c.pi(), c).map(|r| r.value), c, cfg)
}

fn i19(c: &PrecisionContext, cfg: &RunConfig) -> Result<Comparison> {
    kdf_vs(TheoremId::Thm12_1, factorized(4, c).map(|r| r.value), c, cfg)
}

fn i20(c: &PrecisionContext, cfg: &RunConfig) -> Result<Comparison> {
    kdf_vs(TheoremId::Thm12_2, mellin(FormId::G, 4, &c.pi(), c).map(|r| r.value), c, cfg)
}

fn at_unit(spec: &KdfSpec, c: &PrecisionContext, cfg: &RunConfig) -> Result<Real> {
    Ok(kdf(spec, &c.one(), &c.one(), cfg.kdf_strategy, c)?.value)
}

fn i21(c: &PrecisionContext, cfg: &RunConfig) -> Result<Comparison> {
    let lhs = at_unit(&theorem_specs(TheoremId::Thm11_1)[0].1, c, cfg)?;
    Ok(Comparison::new(lhs, c.pi() * c.ln2() * 3u32))
}

fn i22(c: &PrecisionContext, cfg: &RunConfig) -> Result<Comparison> {
    let lhs = at_unit(&theorem_specs(TheoremId::Thm11_2)[0].1, c, cfg)? * 8u32;
    let samart = spec(&[(3, 2), (3, 2), (3, 2), (1, 1), (1, 1)], &[(2, 1); 4]);
    let rhs = c.ln2() * 48u32 - pfq(&samart, &c.one(), c)?.value;
    Ok(Comparison::new(lhs, rhs))
}

fn i23(c: &PrecisionContext, cfg: &RunConfig) -> Result<Comparison> {
    let pair = theorem_specs(TheoremId::Thm12_1);
    let combo = at_unit(&pair[0].1, c, cfg)? * 3u32 + at_unit(&pair[1].1, c, cfg)?;
    let lhs = c.pi() / 24u32 * combo;
    let [(rhs, _), ..] = lf4_variants(c)?;
    Ok(Comparison::new(lhs, rhs))
}

fn i24(c: &PrecisionContext, _: &RunConfig) -> Result<Comparison> {
    let mut worst: Option<Comparison> = None;
    for n in [3, 4] {
        let cmp = Comparison::new(factorized(n, c)?.value, mellin(FormId::F, n, &c.pi(), c)?.value);
        worst = Some(match worst {
            Some(w) => w.worst(cmp),
            None => cmp,
        });
    }
    Ok(worst.expect("two orders compared"))
}

fn i25(c: &PrecisionContext, _: &RunConfig) -> Result<Comparison> {
    let [(a, _), (b, _), (d, _)] = lf4_variants(c)?;
    Ok(Comparison::new(a.clone(), b.clone())
        .worst(Comparison::new(a, d.clone()))
        .worst(Comparison::new(b, d)))
}

/// The q-integrals are a moderate-precision check; they run at no more than 12 digits.
fn q_vs_mellin(id: QIntegralId, c: &PrecisionContext) -> Result<Comparison> {
    let c = (*c).with_digits(c.digits.min(12))?;
    let (form, n) = id.target();
    Ok(Comparison::new(q_integral(id, &c)?.value, mellin(form, n, &c.pi(), &c)?.value))
}

fn i26a(c: &PrecisionContext, _: &RunConfig) -> Result<Comparison> {
    q_vs_mellin(QIntegralId::Prop21_1, c)
}

fn i26b(c: &PrecisionContext, _: &RunConfig) -> Result<Comparison> {
    q_vs_mellin(QIntegralId::Prop21_2, c)
}

fn i26c(c: &PrecisionContext, _: &RunConfig) -> Result<Comparison> {
    q_vs_mellin(QIntegralId::Prop31_1, c)
}

fn i26d(c: &PrecisionContext, _: &RunConfig) -> Result<Comparison> {
    q_vs_mellin(QIntegralId::Prop31_2, c)
}

/// 2n+1 = (3/2)_n/(1/2)_n, 4n+1 = (5/4)_n/(1/4)_n, 4n+3 = 3(7/4)_n/(3/4)_n for n ≤ 64.
fn i27(c: &PrecisionContext, _: &RunConfig) -> Result<Comparison> {
    let mut worst = Comparison::new(c.one(), c.one());
    for n in 0..=64u64 {
        let ratio = |a: (i64, i64), b: (i64, i64)| pochhammer(&c.ratio(a.0, a.1), n) / pochhammer(&c.ratio(b.0, b.1), n);
        let k = c.real(n);
        worst = worst
            .worst(Comparison::new(ratio((3, 2), (1, 2)), Real::with_val(c.prec(), &k * 2u32) + 1u32))
            .worst(Comparison::new(ratio((5, 4), (1, 4)), Real::with_val(c.prec(), &k * 4u32) + 1u32))
            .worst(Comparison::new(ratio((7, 4), (3, 4)) * 3u32, Real::with_val(c.prec(), &k * 4u32) + 3u32));
    }
    Ok(worst)
}

/// Euler's integral against the series for a few ₂F₁ parameter sets, z = q.
fn i28(n: &Nome, c: &PrecisionContext) -> Result<Comparison> {
    let mut worst: Option<Comparison> = None;
    for (a, b, cc) in [((1, 2), (1, 2), (1, 1)), ((1, 1), (1, 3), (3, 2)), ((2, 3), (3, 4), (7, 3))] {
        let r = |p: (i64, i64)| Rational::from(p);
        let euler = euler_2f1(&r(a), &r(b), &r(cc), n.q(), c)?;
        let series = pfq(&spec(&[a, b], &[cc]), n.q(), c)?.value;
        let cmp = Comparison::new(euler, series);
        worst = Some(match worst {
            Some(w) => w.worst(cmp),
            None => cmp,
        });
    }
    Ok(worst.expect("three parameter sets"))
}

const ORACLE_LENGTH: usize = 2000;

fn i29(c: &PrecisionContext, _: &RunConfig) -> Result<Comparison> {
    let conv = coeffs_convolution(FormId::F, ORACLE_LENGTH)?;
    let lam = coeffs_lambert(FormId::F, ORACLE_LENGTH)?;
    let norm = |s: &[rug::Integer]| Real::with_val(c.prec(), s.iter().fold(rug::Integer::new(), |acc, a| acc + a.as_abs().clone()));
    let lhs = norm(conv.coefficients());
    let rhs = norm(lam.coefficients());
    Ok(Comparison { lhs, rhs, exact: Some(conv.coefficients() == lam.coefficients()) })
}

fn i30(c: &PrecisionContext, _: &RunConfig) -> Result<Comparison> {
    let half = Rational::from((1, 2));
    let one = Rational::from(1);
    let three_halves = Rational::from((3, 2));
    let expected = [
        (TheoremId::Thm11_1, vec![&half]),
        (TheoremId::Thm11_2, vec![&half]),
        (TheoremId::Thm12_1, vec![&one, &one]),
        (TheoremId::Thm12_2, vec![&half, &three_halves]),
    ];
    let mut computed = Rational::new();
    let mut target = Rational::new();
    let mut all_equal = true;
    for (id, margins) in expected {
        for ((_, spec), m) in theorem_specs(id).iter().zip(margins) {
            let report = kdf_converges(spec);
            for got in &report.margins {
                all_equal &= got == m;
                computed += got;
                target += m;
            }
        }
    }
    Ok(Comparison {
        lhs: Real::with_val(c.prec(), &computed),
        rhs: Real::with_val(c.prec(), &target),
        exact: Some(all_equal),
    })
}

macro_rules! identity {
    ($id:literal, $name:literal, $lhs:literal, $rhs:literal, $target:expr, $eval:expr) => {
        Identity { id: $id, name: $name, lhs_method: $lhs, rhs_method: $rhs, target: $target, eval: $eval }
    };
}

use Eval::{Pointwise, Value};
use Target::{BelowDigits, Exact, Fixed, Kdf};

/// Every identity in registry order.
pub const REGISTRY: &[Identity] = &[
    identity!("I1", "trans-1", "theta3^2", "2F1(1/2,1/2;1;alpha)", BelowDigits(2), Pointwise(i1)),
    identity!("I2", "trans-2", "q dalpha/dq (termwise theta derivatives)", "alpha(1-alpha) theta3^4", BelowDigits(2), Pointwise(i2)),
    identity!("I3", "inv", "sqrt(u) theta4(e^-pi u) direct", "theta2(e^-pi/u) direct", BelowDigits(2), Pointwise(i3)),
    identity!("I4", "lam1", "lambert lam1", "theta2^2", BelowDigits(2), Pointwise(i4)),
    identity!("I5", "lam2", "lambert lam2", "theta2^4", BelowDigits(2), Pointwise(i5)),
    identity!("I6", "eis384", "lambert eis384", "theta2^2(q^2) theta4^4(q^2)/4", BelowDigits(2), Pointwise(i6)),
    identity!("I7", "lemma22-1", "lambert lemma22_1", "alpha/16 2F1(1,1;2;alpha)", BelowDigits(2), Pointwise(i7)),
    identity!("I8", "lemma22-2", "lambert lemma22_2", "alpha^(1/2)/4 2F1(1/2,1;3/2;alpha)", BelowDigits(2), Pointwise(i8)),
    identity!("I9", "doubling-theta2theta3", "2 theta2(q^2) theta3(q^2)", "theta2^2", BelowDigits(2), Pointwise(i9)),
    identity!("I10", "cube-M-lemma", "lambert cube", "(theta2^8(q^1/2) - 8 theta2^8)/256", BelowDigits(2), Pointwise(i10)),
    identity!("I11", "M-theta2^8", "theta2^8(q^1/2)", "16/15 (M(q) - M(q^2))", BelowDigits(2), Pointwise(i11)),
    identity!("I12", "ram", "lambert ram_lhs", "alpha^(1/2)/4 3F2(1,1,1;3/2,3/2;alpha)/2F1(1/2,1/2;1;alpha)", BelowDigits(2), Pointwise(i12)),
    identity!("I13", "theta-combination-1", "2 theta4^8(q^2) - theta4^8", "(1+alpha)(1-alpha) theta3^8", BelowDigits(2), Pointwise(i13)),
    identity!("I14", "theta-combination-2", "2 theta4^8(q^4) - theta4^8(q^2)", "((1-alpha)^(1/2)+(1-alpha)^(3/2)) theta3^8/2", BelowDigits(2), Pointwise(i14)),
    identity!("I15", "doubling-theta3", "2 theta3^2(q^2)", "theta3^2 + theta4^2", BelowDigits(2), Pointwise(i15)),
    identity!("I16", "doubling-theta4", "theta3 theta4", "theta4^2(q^2)", BelowDigits(2), Pointwise(i16)),
    identity!("I17", "thm11-1", "pi^2/96 kdf", "closed_form lf3", Kdf(10), Value(i17)),
    identity!("I18", "thm11-2", "pi^3/128 kdf", "mellin L(g,3)", Kdf(10), Value(i18)),
    identity!("I19", "thm12-1", "pi^3/288 (3 F_A + F_B)", "factorized L(f,4)", Kdf(10), Value(i19)),
    identity!("I20", "thm12-2", "pi^4/768 (2 F_A + F_B)", "mellin L(g,4)", Kdf(10), Value(i20)),
    identity!("I21", "corollary-1", "kdf thm11_1", "3 pi log 2", Kdf(8), Value(i21)),
    identity!("I22", "corollary-2", "8 kdf thm11_2", "48 log 2 - 5F4(3/2,3/2,3/2,1,1;2,2,2,2;1)", Kdf(8), Value(i22)),
    identity!("I23", "corollary-3", "pi/24 (3 F_A + F_B)", "5F4(1/2,1/2,1/2,1/2,1;3/2,3/2,3/2,3/2;-1)", Kdf(8), Value(i23)),
    identity!("I24", "factorization", "L(psi,n-2) L(chi4,n)", "mellin L(f,n), n = 3, 4", BelowDigits(2), Value(i24)),
    identity!("I25", "lf4-5F4-triple", "5F4 at -1", "5F4 at 1 pair (1/81 combination)", BelowDigits(2), Value(i25)),
    identity!("I26a", "prop21-1", "q_integral prop21_1", "mellin L(f,3)", Fixed(8), Value(i26a)),
    identity!("I26b", "prop21-2", "q_integral prop21_2", "mellin L(g,3)", Fixed(8), Value(i26b)),
    identity!("I26c", "prop31-1", "q_integral prop31_1", "mellin L(f,4)", Fixed(8), Value(i26c)),
    identity!("I26d", "prop31-2", "q_integral prop31_2", "mellin L(g,4)", Fixed(8), Value(i26d)),
    identity!("I27", "pochhammer-ratios", "pochhammer quotients", "2n+1, 4n+1, 4n+3", BelowDigits(2), Value(i27)),
    identity!("I28", "euler-2F1", "euler integral", "2F1 series", BelowDigits(2), Pointwise(i28)),
    identity!("I29", "coefficient-oracles", "coeffs_convolution(f, 2000)", "coeffs_lambert(f, 2000)", Exact, Value(i29)),
    identity!("I30", "kdf-margins", "kdf_converges margins", "exact margin table", Exact, Value(i30)),
];

pub fn lookup(id: &str) -> Option<&'static Identity> {
    REGISTRY.iter().find(|i| i.id.eq_ignore_ascii_case(id))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique() {
        let mut ids: Vec<_> = REGISTRY.iter().map(|i| i.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), REGISTRY.len());
        assert!(REGISTRY.len() >= 30);
    }

    #[test]
    fn derivative_series_at_small_q() {
        let c = PrecisionContext::new(20).unwrap();
        let q = c.ratio(1, 100);
        let (t, d) = theta_with_log_derivative(&q, ThetaKind::Theta3, &c).unwrap();
        // θ3 = 1 + 2q + 2q⁴ + …, qθ3′ = 2q + 8q⁴ + …
        assert!((t.to_f64() - 1.020_000_02).abs() < 1e-12);
        assert!((d.to_f64() - 0.020_000_08).abs() < 1e-12);
    }
}
