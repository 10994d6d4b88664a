use thetal::hyper::*;
use thetal::numerics::{rel_diff, PrecisionContext, Real};

type Ratios = &'static [(i64, i64)];

fn theorem_specs() -> Vec<(&'static str, KdfSpec)> {
    let half2: Ratios = &[(1, 2), (1, 2)];
    let one: Ratios = &[(1, 1)];
    let triple: Ratios = &[(1, 1), (1, 1), (1, 1)];
    let three_halves2: Ratios = &[(3, 2), (3, 2)];
    let s = |a: Ratios, c: Ratios, b: Ratios, d: Ratios| KdfSpec::from_ratios(a, c, b, d, half2, one).unwrap();
    vec![
        ("thm11_1", s(&[(2, 1)], &[(5, 2)], &[(1, 1), (1, 1)], &[(2, 1)])),
        ("thm11_2", s(&[(3, 2)], &[(2, 1)], &[(1, 2), (1, 1)], &[(3, 2)])),
        ("thm12_1a", s(&[(1, 2)], &[(3, 2)], triple, three_halves2)),
        ("thm12_1b", s(&[(3, 2)], &[(5, 2)], triple, three_halves2)),
        ("thm12_2a", s(&[(1, 2)], &[(1, 1)], triple, three_halves2)),
        ("thm12_2b", s(&[(1, 2)], &[(2, 1)], triple, three_halves2)),
    ]
}

fn at_unit(spec: &KdfSpec, strategy: KdfStrategy, c: &PrecisionContext) -> KdfValue {
    kdf(spec, &c.one(), &c.one(), strategy, c).unwrap()
}

#[test]
fn iterated_agrees_with_integral_reduction() {
    let c = PrecisionContext::new(20).unwrap();
    for (name, spec) in theorem_specs() {
        let reference = at_unit(&spec, KdfStrategy::IntegralReduction, &c);
        let it = at_unit(&spec, KdfStrategy::Iterated, &c);
        let d = rel_diff(&reference.value, &it.value);
        assert!(d < 1e-6, "{name}: {d:e}");
    }
}

#[test]
fn truncation_brackets_reference() {
    let c = PrecisionContext::new(20).unwrap();
    for (name, spec) in theorem_specs() {
        let reference = at_unit(&spec, KdfStrategy::IntegralReduction, &c).value;
        let t = at_unit(&spec, KdfStrategy::DoubleTruncate { m: 300 }, &c);
        assert!(t.value < reference, "{name}");
        let top = t.value.clone() * (1.0 + t.error);
        assert!(top > reference, "{name}: bound {:e}", t.error);
        assert!(t.error < 1.0, "{name}: bound {:e} is vacuous", t.error);
    }
}

#[test]
fn swapping_groups_is_a_symmetry() {
    let c = PrecisionContext::new(20).unwrap();
    let (x, y) = (c.ratio(3, 5), c.ratio(9, 10));
    for (name, spec) in theorem_specs() {
        let sw = spec.swapped();
        for strategy in [KdfStrategy::IntegralReduction, KdfStrategy::DoubleTruncate { m: 200 }] {
            let v = kdf(&spec, &x, &y, strategy, &c).unwrap();
            let w = kdf(&sw, &y, &x, strategy, &c).unwrap();
            assert!(rel_diff(&v.value, &w.value) < 1e-18, "{name} {strategy}");
        }
        let v = kdf(&spec, &c.one(), &c.one(), KdfStrategy::IntegralReduction, &c).unwrap();
        let w = kdf(&sw, &c.one(), &c.one(), KdfStrategy::IntegralReduction, &c).unwrap();
        assert!(rel_diff(&v.value, &w.value) < 1e-18, "{name} at (1,1)");
    }
}

#[test]
fn vanishing_y_collapses_to_single_series() {
    let c = PrecisionContext::new(20).unwrap();
    let x = c.ratio(7, 10);
    for (name, spec) in theorem_specs() {
        let single = pfq(&spec.x_reduction().unwrap(), &x, &c).unwrap().value;
        for strategy in [KdfStrategy::IntegralReduction, KdfStrategy::Iterated, KdfStrategy::DoubleTruncate { m: 200 }] {
            let v = kdf(&spec, &x, &c.zero(), strategy, &c).unwrap();
            assert!(rel_diff(&v.value, &single) < 1e-18, "{name} {strategy}");
        }
    }
}

#[test]
fn interior_strategies_agree() {
    let c = PrecisionContext::new(20).unwrap();
    let (x, y) = (c.ratio(1, 2), c.ratio(4, 5));
    for (name, spec) in theorem_specs() {
        let r = kdf(&spec, &x, &y, KdfStrategy::IntegralReduction, &c).unwrap().value;
        let it = kdf(&spec, &x, &y, KdfStrategy::Iterated, &c).unwrap().value;
        assert!(rel_diff(&r, &it) < 1e-10, "{name}");
    }
}

#[test]
fn corollary_one_value() {
    let c = PrecisionContext::new(40).unwrap();
    let (_, spec) = &theorem_specs()[0];
    let v = at_unit(spec, KdfStrategy::IntegralReduction, &c);
    let expect = Real::with_val(c.prec(), c.pi() * c.ln2()) * 3u32;
    assert!(rel_diff(&v.value, &expect) < 1e-38);
    assert!((v.value.to_f64() - 6.532758270910806).abs() < 1e-14);
}
