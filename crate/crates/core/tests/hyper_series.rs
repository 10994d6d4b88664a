use proptest::prelude::*;
use rug::Rational;
use thetal::hyper::*;
use thetal::numerics::{rel_diff, PrecisionContext};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn series_matches_euler_integral(
        an in -20i64..30,
        bn in 1i64..30,
        gap in 1i64..30,
        zn in -90i64..90,
    ) {
        let c = PrecisionContext::new(20).unwrap();
        let (a, b) = (Rational::from((an, 10)), Rational::from((bn, 10)));
        let cc = &b + Rational::from((gap, 10));
        let z = c.ratio(zn, 100);
        let spec = PfqSpec::new(vec![a.clone(), b.clone()], vec![cc.clone()]).unwrap();
        let series = pfq(&spec, &z, &c).unwrap().value;
        let integral = euler_2f1(&a, &b, &cc, &z, &c).unwrap();
        prop_assert!(rel_diff(&series, &integral) < 1e-19, "{} vs {}", series, integral);
    }
}

#[test]
fn ram_series_terms_decay_like_inverse_n() {
    // t(n) = (1)_n³ / ((3/2)_n² n!) at z = 1
    let c = PrecisionContext::new(20).unwrap();
    let spec = PfqSpec::from_ratios(&[(1, 1), (1, 1), (1, 1)], &[(3, 2), (3, 2)]).unwrap();
    assert_eq!(spec.excess(), 0);
    let mut t = c.one();
    let mut at = Vec::new();
    for n in 0..10_000usize {
        if n == 1_000 || n == 9_999 {
            at.push((n as f64, t.to_f64()));
        }
        let k = Rational::from(n);
        let r = Rational::from(&k + 1) * Rational::from(&k + 1) / (Rational::from((3, 2)) + &k) / (Rational::from((3, 2)) + &k);
        t *= thetal::numerics::Real::with_val(c.prec(), &r);
    }
    let slope = (at[1].1 / at[0].1).ln() / (at[1].0 / at[0].0).ln();
    assert!((slope + 1.0).abs() < 0.05, "slope {slope}");
    assert!(matches!(pfq(&spec, &c.one(), &c), Err(thetal::Error::Divergent(_))));
}

#[test]
fn margin_table_for_theorem_specs() {
    let half2: &[(i64, i64)] = &[(1, 2), (1, 2)];
    let triple: &[(i64, i64)] = &[(1, 1), (1, 1), (1, 1)];
    let th2: &[(i64, i64)] = &[(3, 2), (3, 2)];
    let cases: [(&[(i64, i64)], &[(i64, i64)], &[(i64, i64)], &[(i64, i64)], (i64, i64)); 6] = [
        (&[(2, 1)], &[(5, 2)], &[(1, 1), (1, 1)], &[(2, 1)], (1, 2)),
        (&[(3, 2)], &[(2, 1)], &[(1, 2), (1, 1)], &[(3, 2)], (1, 2)),
        (&[(1, 2)], &[(3, 2)], triple, th2, (1, 1)),
        (&[(3, 2)], &[(5, 2)], triple, th2, (1, 1)),
        (&[(1, 2)], &[(1, 1)], triple, th2, (1, 2)),
        (&[(1, 2)], &[(2, 1)], triple, th2, (3, 2)),
    ];
    for (a, cc, b, d, m) in cases {
        let spec = KdfSpec::from_ratios(a, cc, b, d, half2, &[(1, 1)]).unwrap();
        let report = kdf_converges(&spec);
        let m = Rational::from(m);
        assert_eq!(report.margins, [m.clone(), m.clone(), m], "{spec}");
        assert!(report.convergent_at_unit);
    }
}
