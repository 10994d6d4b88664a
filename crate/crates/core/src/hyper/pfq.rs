use std::cell::RefCell;

use rug::Rational;

use super::spec::{pfq_converges, PfqClass, PfqSpec};
use crate::error::{Error, Result};
use crate::numerics::{
    beta, check_finite, integrate01, integrate_interval, sum_series_with, Endpoints, PrecisionContext, Real, SeriesSum,
    SumOptions, TailModel,
};

/// Incremental term generator t(n) = Π(a)_n / Π(b)_n · zⁿ/n!.
///
/// Successive indices at a fixed precision reuse the previous term (one ratio per
/// step); any other request restarts from t(0).
pub(crate) struct TermGen<'a> {
    upper: &'a [Rational],
    lower: &'a [Rational],
    z: Rational,
    state: RefCell<Option<(u32, usize, Real)>>,
}

impl<'a> TermGen<'a> {
    pub(crate) fn new(upper: &'a [Rational], lower: &'a [Rational], z: Rational) -> Self {
        Self { upper, lower, z, state: RefCell::new(None) }
    }

    /// t(n+1)/t(n).
    pub(crate) fn ratio(&self, n: usize, prec: u32) -> Real {
        let mut num = Real::with_val(prec, &self.z);
        for a in self.upper {
            num *= Real::with_val(prec, a + Rational::from(n));
        }
        let mut den = Real::with_val(prec, n + 1);
        for b in self.lower {
            den *= Real::with_val(prec, b + Rational::from(n));
        }
        num / den
    }

    pub(crate) fn term(&self, n: usize, ctx: &PrecisionContext) -> Real {
        let prec = ctx.prec();
        let mut state = self.state.borrow_mut();
        let (mut k, mut t) = match state.take() {
            Some((p, k, t)) if p == prec && k <= n => (k, t),
            _ => (0, Real::with_val(prec, 1)),
        };
        while k < n {
            t *= self.ratio(k, prec);
            k += 1;
        }
        *state = Some((prec, n, t.clone()));
        t
    }
}

fn max_param(spec: &PfqSpec) -> f64 {
    spec.upper.iter().chain(&spec.lower).map(|p| p.to_f64().abs()).fold(0.0, f64::max)
}

/// Series value at real z ∈ [-1, 1], including the convergent boundary points.
pub fn pfq(spec: &PfqSpec, z: &Real, ctx: &PrecisionContext) -> Result<SeriesSum> {
    let class = pfq_converges(spec, z);
    if class == PfqClass::Divergent {
        return Err(Error::Divergent(format!(
            "{spec} at z = {} (excess {})",
            z.to_f64(),
            spec.excess()
        )));
    }
    if z.is_zero() {
        return Ok(SeriesSum { value: ctx.one(), error: 0.0, terms: 1 });
    }
    if let Some(degree) = spec.terminates() {
        return terminating(spec, z, degree, ctx);
    }
    if class == PfqClass::Interior {
        return interior(spec, z, ctx);
    }
    let asymptotic_from = (4.0 * max_param(spec)).ceil() as usize;
    let opts = SumOptions { start: 0, block: 1, asymptotic_from };
    if *z == 1 {
        let gen = TermGen::new(&spec.upper, &spec.lower, Rational::from(1));
        let exponent = 1.0 + spec.excess().to_f64();
        sum_series_with(|n, c| gen.term(n, c), TailModel::power(exponent)?, opts, ctx)
    } else {
        let gen = TermGen::new(&spec.upper, &spec.lower, Rational::from(-1));
        sum_series_with(|n, c| gen.term(n, c), TailModel::alternating(), opts, ctx)
    }
}

fn terminating(spec: &PfqSpec, z: &Real, degree: u64, ctx: &PrecisionContext) -> Result<SeriesSum> {
    let prec = ctx.prec();
    let mut sum = ctx.one();
    let mut t = ctx.one();
    let gen = TermGen::new(&spec.upper, &spec.lower, Rational::from(1));
    for n in 0..degree as usize {
        t *= gen.ratio(n, prec) * z;
        sum += &t;
    }
    Ok(SeriesSum { value: check_finite(sum, "pfq")?, error: ctx.floor(), terms: degree as usize + 1 })
}

/// |z| < 1: sum until the remaining tail, bounded geometrically by the current
/// term ratio, falls below the working precision.
fn interior(spec: &PfqSpec, z: &Real, ctx: &PrecisionContext) -> Result<SeriesSum> {
    let prec = ctx.prec();
    let gen = TermGen::new(&spec.upper, &spec.lower, Rational::from(1));
    let zabs = z.to_f64().abs();
    let mut sum = ctx.one();
    let mut t = ctx.one();
    for n in 0..ctx.max_terms {
        let r = gen.ratio(n, prec) * z;
        t *= &r;
        sum += &t;
        let rho = r.to_f64().abs().max(zabs) * (1.0 + 1e-6);
        if rho < 1.0 {
            let tail = Real::with_val(53, &t).abs() * (rho / (1.0 - rho));
            let scale = Real::with_val(53, &sum).abs();
            let rel = if scale.is_zero() { f64::INFINITY } else { (tail / scale).to_f64() };
            if rel <= ctx.floor() * 1e-3 || t.is_zero() {
                return Ok(SeriesSum { value: check_finite(sum, "pfq")?, error: rel.max(ctx.floor()), terms: n + 2 });
            }
        }
    }
    Err(Error::BudgetExhausted { best: sum.to_f64(), estimate: f64::NAN, used: ctx.max_terms })
}

fn ratios(v: &[(i64, i64)]) -> Vec<Rational> {
    v.iter().map(|&(n, d)| Rational::from((n, d))).collect()
}

fn spec_is(spec: &PfqSpec, upper: &[(i64, i64)], lower: &[(i64, i64)]) -> bool {
    let mut u = spec.upper.clone();
    let mut l = spec.lower.clone();
    u.sort();
    l.sort();
    let mut eu = ratios(upper);
    let mut el = ratios(lower);
    eu.sort();
    el.sort();
    u == eu && l == el
}

/// The continuations known in closed or integral form for z up to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Continuation {
    /// ₂F₁(1/2,1/2;1;z) = 1/AGM(1, √(1-z))
    EllipticK,
    /// ₂F₁(1,1;2;z) = -log(1-z)/z
    Log,
    /// ₂F₁(1/2,1;3/2;z) = artanh(√z)/√z
    Artanh,
    /// ₃F₂(1,1,1;3/2,3/2;z) = (π²/4)K̃(z)/√z - (1/√z)∫₀^{π/2} arccos(w)/√(1-w²) dφ, w = √z sin φ
    Ram,
}

impl Continuation {
    pub fn lookup(spec: &PfqSpec) -> Option<Self> {
        if spec_is(spec, &[(1, 2), (1, 2)], &[(1, 1)]) {
            Some(Continuation::EllipticK)
        } else if spec_is(spec, &[(1, 1), (1, 1)], &[(2, 1)]) {
            Some(Continuation::Log)
        } else if spec_is(spec, &[(1, 2), (1, 1)], &[(3, 2)]) {
            Some(Continuation::Artanh)
        } else if spec_is(spec, &[(1, 1), (1, 1), (1, 1)], &[(3, 2), (3, 2)]) {
            Some(Continuation::Ram)
        } else {
            None
        }
    }

    pub fn eval(self, z: &Real, w: &Real, ctx: &PrecisionContext) -> Result<Real> {
        let prec = ctx.prec();
        let z = Real::with_val(prec, z);
        let w = Real::with_val(prec, w);
        let value = match self {
            Continuation::EllipticK => elliptic_k(&w, ctx),
            Continuation::Log => -w.ln() / z,
            Continuation::Artanh => {
                // artanh(s) = ½ log1p((2s + 2z)/(1 - z)), s = √z
                let s = Real::with_val(prec, z.sqrt_ref());
                let arg = Real::with_val(prec, &s + &z) * 2u32 / &w;
                arg.ln_1p() / (s * 2u32)
            }
            Continuation::Ram => ram_continuation(&z, &w, ctx)?,
        };
        check_finite(value, "pfq continuation")
    }
}

/// ₂F₁(1/2,1/2;1;z) from w = 1 - z.
pub fn elliptic_k(w: &Real, ctx: &PrecisionContext) -> Real {
    let s = Real::with_val(ctx.prec(), w.sqrt_ref());
    ctx.one().agm(&s).recip()
}

fn ram_continuation(z: &Real, w: &Real, ctx: &PrecisionContext) -> Result<Real> {
    let prec = ctx.prec();
    let sz = Real::with_val(prec, z.sqrt_ref());
    let zero = ctx.zero();
    let half_pi = ctx.pi() / 2u32;
    let inner = integrate_interval(
        &zero,
        &half_pi,
        |_phi, _from_left, from_right| {
            // sin φ = cos(π/2 − φ), cos φ = sin(π/2 − φ) keep both accurate near π/2
            let sin_phi = Real::with_val(prec, from_right.cos_ref());
            let cos_phi = Real::with_val(prec, from_right.sin_ref());
            let wv = Real::with_val(prec, &sz * &sin_phi);
            let u = Real::with_val(prec, cos_phi.square_ref()) * z + w;
            let s = u.sqrt();
            if s.is_zero() {
                return Ok(Real::with_val(prec, 1));
            }
            Ok(Real::with_val(prec, s.atan2_ref(&wv)) / s)
        },
        Endpoints::smooth(),
        ctx,
    )?;
    let k = elliptic_k(w, ctx);
    let lead = ctx.pi().square() / 4u32 * k;
    Ok((lead - inner.value) / sz)
}

/// Evaluates at z ∈ [0,1) with w = 1 - z supplied separately, so that values near
/// z = 1 do not suffer from forming 1 - z. Registered continuations take over from
/// z ≥ 1/2; otherwise the series is summed directly.
pub fn pfq_at(spec: &PfqSpec, z: &Real, w: &Real, ctx: &PrecisionContext) -> Result<Real> {
    if *z < 0 || *w <= 0 {
        return Err(Error::Domain(format!("pfq_at needs 0 ≤ z < 1, got z = {}", z.to_f64())));
    }
    if *z >= 0.5 {
        if let Some(cont) = Continuation::lookup(spec) {
            return cont.eval(z, w, ctx);
        }
        if *z > 0.99 {
            return Err(Error::Strategy(format!("no continuation registered for {spec} near z = 1")));
        }
    }
    Ok(pfq(spec, z, ctx)?.value)
}

/// Euler integral Γ(c)/(Γ(b)Γ(c-b)) ∫₀¹ t^{b-1}(1-t)^{c-b-1}(1-zt)^{-a} dt.
pub fn euler_2f1(a: &Rational, b: &Rational, c: &Rational, z: &Real, ctx: &PrecisionContext) -> Result<Real> {
    let cb = Rational::from(c - b);
    if *b <= 0 || cb <= 0 {
        return Err(Error::Domain(format!("Euler integral needs c > b > 0, got b = {b}, c = {c}")));
    }
    if *z > 1 || (*z == 1 && Rational::from(&cb - a) <= 0) {
        return Err(Error::Domain(format!("Euler integral diverges at z = {}", z.to_f64())));
    }
    if z.is_zero() {
        return Ok(ctx.one());
    }
    let prec = ctx.prec();
    let (ar, bm1, cbm1) = (
        Real::with_val(prec, a),
        Real::with_val(prec, b - Rational::from(1)),
        Real::with_val(prec, &cb - Rational::from(1)),
    );
    let z = Real::with_val(prec, z);
    let wz = Real::with_val(prec, 1u32 - &z);
    let right = if z == 1 { Rational::from(&cb - a).to_f64() } else { cb.to_f64() };
    let ends = Endpoints { left_exponent: b.to_f64(), right_exponent: right, right_log: false };
    let q = integrate01(
        |t, u| {
            // 1 − z t = (1 − t) + (1 − z) t
            let base = Real::with_val(prec, &wz * t) + u;
            let mut v = Real::with_val(prec, rug::ops::Pow::pow(t, &bm1));
            v *= Real::with_val(prec, rug::ops::Pow::pow(u, &cbm1));
            v *= rug::ops::Pow::pow(base, -ar.clone());
            Ok(v)
        },
        ends,
        ctx,
    )?;
    let norm = beta(&Real::with_val(prec, b), &Real::with_val(prec, &cb), ctx)?;
    check_finite(q.value / norm, "euler_2f1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rel_diff;
    use rug::ops::Pow;
    use crate::theta::{alpha, theta3, Nome};

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(30).unwrap()
    }

    fn spec(u: &[(i64, i64)], l: &[(i64, i64)]) -> PfqSpec {
        PfqSpec::from_ratios(u, l).unwrap()
    }

    #[test]
    fn zero_argument() {
        let c = ctx();
        let v = pfq(&spec(&[(3, 2), (7, 3)], &[(5, 4)]), &c.zero(), &c).unwrap();
        assert_eq!(v.value, 1);
    }

    #[test]
    fn log_at_half() {
        let c = ctx();
        let v = pfq(&spec(&[(1, 1), (1, 1)], &[(2, 1)]), &c.ratio(1, 2), &c).unwrap();
        assert!(rel_diff(&v.value, &(c.ln2() * 2u32)) < 1e-40);
        assert!(v.error <= c.tolerance());
    }

    #[test]
    fn k_of_alpha_is_theta3_squared() {
        let c = ctx();
        let n = Nome::new(&c.ratio(1, 10), &c).unwrap();
        let a = alpha(&n, &c).unwrap();
        let v = pfq(&spec(&[(1, 2), (1, 2)], &[(1, 1)]), &a, &c).unwrap();
        assert!(rel_diff(&v.value, &theta3(&n, &c).unwrap().square()) < 1e-38);
    }

    #[test]
    fn boundary_unit_argument() {
        let c = ctx();
        // ₂F₁(1,1;3;1) = Γ(3)Γ(1)/(Γ(2)Γ(2)) = 2 (Gauss); terms decay like n^{-2}
        let v = pfq(&spec(&[(1, 1), (1, 1)], &[(3, 1)]), &c.one(), &c).unwrap();
        assert!(rel_diff(&v.value, &c.real(2)) < 1e-30, "{}", v.value);
        // Σ 1/(4n+1)⁴ via ₅F₄(1/4,…,1; 5/4,…; 1) against the Hurwitz-type oracle
        let f = spec(&[(1, 4), (1, 4), (1, 4), (1, 4), (1, 1)], &[(5, 4); 4]);
        let v = pfq(&f, &c.one(), &c).unwrap();
        let mut direct = c.zero();
        for n in 0..20000u32 {
            direct += c.real(4 * n + 1).pow(-4i32);
        }
        // tail beyond 20000 ≈ 1/(3·4⁴·20000³)
        assert!((v.value.clone() - direct).abs().to_f64() < 2e-16, "{}", v.value);
        assert!(v.error <= c.tolerance());
    }

    #[test]
    fn boundary_minus_one() {
        let c = ctx();
        // ₂F₁(1,1;2;-1) = log 2
        let v = pfq(&spec(&[(1, 1), (1, 1)], &[(2, 1)]), &c.real(-1), &c).unwrap();
        assert!(rel_diff(&v.value, &c.ln2()) < 1e-30);
    }

    #[test]
    fn divergent_rejected() {
        let c = ctx();
        let k = spec(&[(1, 2), (1, 2)], &[(1, 1)]);
        assert!(matches!(pfq(&k, &c.one(), &c), Err(Error::Divergent(_))));
        assert!(matches!(pfq(&k, &c.real(1.5), &c), Err(Error::Divergent(_))));
    }

    #[test]
    fn polynomial_case() {
        let c = ctx();
        // ₂F₁(-2,1;1;z) = (1-z)²
        let v = pfq(&spec(&[(-2, 1), (1, 1)], &[(1, 1)]), &c.real(3), &c).unwrap();
        assert_eq!(v.value, 4);
    }

    #[test]
    fn continuations_match_series() {
        let c = ctx();
        for (u, l) in [
            (vec![(1, 2), (1, 2)], vec![(1, 1)]),
            (vec![(1, 1), (1, 1)], vec![(2, 1)]),
            (vec![(1, 2), (1, 1)], vec![(3, 2)]),
            (vec![(1, 1), (1, 1), (1, 1)], vec![(3, 2), (3, 2)]),
        ] {
            let s = spec(&u, &l);
            let cont = Continuation::lookup(&s).unwrap();
            for z in [c.ratio(1, 2), c.ratio(9, 10), c.ratio(99, 100)] {
                let w = Real::with_val(c.prec(), 1u32 - &z);
                let a = cont.eval(&z, &w, &c).unwrap();
                let b = pfq(&s, &z, &c).unwrap().value;
                assert!(rel_diff(&a, &b) < 1e-38, "{s} at {}: {a} vs {b}", z.to_f64());
            }
        }
    }

    #[test]
    fn ram_continuation_close_to_one() {
        // at 1 − z = 10⁻¹² the series would need ~10¹⁴ terms; the integral term tends to
        // ∫₀^{π/2} x/sin x dx = 2G, so F(z) − (π²/4)K̃(z)/√z → −2G
        let c = ctx();
        let w = c.real(10).pow(-12i32);
        let z = Real::with_val(c.prec(), 1u32 - &w);
        let f = Continuation::Ram.eval(&z, &w, &c).unwrap();
        let k = elliptic_k(&w, &c) * c.pi().square() / 4u32 / z.clone().sqrt();
        let two_g = c.real(rug::float::Constant::Catalan) * 2u32;
        assert!(((f - k) + two_g).abs().to_f64() < 1e-9);
    }

    #[test]
    fn euler_examples() {
        let c = ctx();
        let half = Rational::from((1, 2));
        let one = Rational::from(1);
        let two = Rational::from(2);
        let v = euler_2f1(&one, &one, &two, &c.ratio(1, 2), &c).unwrap();
        assert!(rel_diff(&v, &(c.ln2() * 2u32)) < 1e-30);
        assert_eq!(euler_2f1(&one, &one, &two, &c.zero(), &c).unwrap(), 1);
        let z = c.ratio(3, 10);
        let e = euler_2f1(&half, &one, &Rational::from((3, 2)), &z, &c).unwrap();
        let s = pfq(&spec(&[(1, 2), (1, 1)], &[(3, 2)]), &z, &c).unwrap().value;
        assert!(rel_diff(&e, &s) < 1e-30);
        assert!(euler_2f1(&one, &two, &two, &z, &c).is_err());
    }

    #[test]
    fn pfq_at_routes() {
        let c = ctx();
        let s = spec(&[(1, 1), (1, 1), (1, 1)], &[(3, 2), (3, 2)]);
        let z = c.ratio(1, 5);
        let w = c.ratio(4, 5);
        assert!(rel_diff(&pfq_at(&s, &z, &w, &c).unwrap(), &pfq(&s, &z, &c).unwrap().value) < 1e-40);
        let other = spec(&[(1, 3), (1, 1)], &[(5, 3)]);
        let near = c.ratio(999, 1000);
        assert!(matches!(pfq_at(&other, &near, &c.ratio(1, 1000), &c), Err(Error::Strategy(_))));
    }

    fn pochhammer_quotient(spec: &PfqSpec, z: &Rational, n: usize) -> Rational {
        let mut t = Rational::from(1);
        for k in 0..n {
            for a in &spec.upper {
                t *= Rational::from(a + k);
            }
            for b in &spec.lower {
                t /= Rational::from(b + k);
            }
            t *= z;
            t /= k + 1;
        }
        t
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(20))]

        #[test]
        fn incremental_terms_match_pochhammer(
            nums in proptest::collection::vec(1i64..40, 5),
            zn in -9i64..10,
            order in proptest::collection::vec(0usize..60, 6),
        ) {
            let c = PrecisionContext::new(25).unwrap();
            let r = |n: i64| Rational::from((n, 7));
            let s = PfqSpec::new(vec![r(nums[0]), r(nums[1]), r(nums[2])], vec![r(nums[3]), r(nums[4])]).unwrap();
            let z = Rational::from((zn, 10));
            let gen = TermGen::new(&s.upper, &s.lower, z.clone());
            // out-of-order requests exercise the restart path
            for &n in &order {
                let exact = Real::with_val(c.prec(), &pochhammer_quotient(&s, &z, n));
                let got = gen.term(n, &c);
                if exact.is_zero() {
                    proptest::prop_assert!(got.is_zero());
                } else {
                    proptest::prop_assert!(rel_diff(&got, &exact) < 1e-30, "n = {}", n);
                }
            }
        }
    }
}
