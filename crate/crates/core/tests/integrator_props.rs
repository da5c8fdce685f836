mod common;

use common::q;
use gaugeint::integrator::fine_sum;
use gaugeint::{
    additivity_check, gauge_integrate, hake_limit, riemann_integrate, Builtin, GaugeOptions, HakeOptions, Interval,
    PartitionOptions, Rational, RealFn, Tag, TagStrategy,
};
use proptest::prelude::*;

fn exact_poly_integral(c: &[i64]) -> f64 {
    c.iter().enumerate().map(|(i, &a)| a as f64 / (i + 1) as f64).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gauge_and_riemann_agree_on_polynomials(c in proptest::collection::vec(-3i64..=3, 1..=6)) {
        let b = Builtin::Poly(c.iter().map(|&a| Rational::from_integer(a)).collect());
        let f = b.function();
        let phi = b.modulus(&Interval::unit()).unwrap();
        let g = gauge_integrate(&f, &phi, &Interval::unit(), &GaugeOptions::new(1.0 / 256.0)).unwrap();
        let r = riemann_integrate(&f, &Interval::unit(), 1e-8).unwrap();
        prop_assert!(g.converged && r.converged);
        prop_assert!((g.value - r.value).abs() <= g.error_bound + r.error_bound + 1e-6);
        prop_assert!((g.value - exact_poly_integral(&c)).abs() <= g.error_bound);
    }

    #[test]
    fn riemann_sums_over_fine_partitions_stay_close(k in 2u32..8) {
        // sqrt_recip with its modulus: the cell at 0 has length ≤ ε² and loses
        // up to 2ε; every other item is off by at most ε·√t·len/(2(1−ε)^{3/2}),
        // which sums to under ε for ε ≤ 1/4.
        let eps = Rational::pow2_neg(k);
        let b = Builtin::SqrtRecip;
        let delta = b.modulus(&Interval::unit()).unwrap().at(&eps).unwrap();
        for s in [TagStrategy::default(), TagStrategy::irrational_first()] {
            let (sum, _, _) = fine_sum(&b.function(), &delta, &Interval::unit(), &s, &PartitionOptions::default()).unwrap();
            prop_assert!((sum - 2.0).abs() <= 3.0 * eps.to_f64(), "{k}: {sum}");
        }
    }

    #[test]
    fn additivity_holds_for_rational_splits(n in 1i64..16) {
        let x = Tag::ratio(n, 16);
        let b = Builtin::Poly(vec![q(1, 1), q(-2, 1), q(3, 1)]);
        let phi = b.modulus(&Interval::unit()).unwrap();
        let eps = Rational::pow2_neg(6);
        let a = additivity_check(&b.function(), &phi, &phi, &x, &eps, 64).unwrap();
        prop_assert!(a.defect <= 4.0 * eps.to_f64() + 1e-6);
    }
}

#[test]
fn riemann_is_exact_for_affine_functions() {
    let f = RealFn::from_f64("3x+1", |x| 3.0 * x + 1.0);
    let r = riemann_integrate(&f, &Interval::unit(), 1e-9).unwrap();
    assert!((r.value - 2.5).abs() < 1e-12);
}

#[test]
fn hake_on_both_test_functions() {
    let probes = gaugeint::integrator::default_probes(8);
    let conv = hake_limit(&Builtin::SqrtRecip.function(), &probes, &HakeOptions::default()).unwrap();
    assert!(!conv.diverges());
    let div = hake_limit(&Builtin::Recip.function(), &probes, &HakeOptions::default()).unwrap();
    assert!(div.diverges());
    assert!(div.partials().windows(2).all(|w| w[1] > w[0]));
}
