use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use proptest::prelude::*;

use nearcurve::counting::{count_gamma, sublevel_intervals, CountQuery};
use nearcurve::experiments::{
    bound_exponents, fit_and_report, fit_exponent, theorem_terms, BoundSpec, BoundVariant, ExperimentConfig,
    ReportOutputs,
};
use nearcurve::forms::{monomials, IntegerForm, MultiIndex};
use nearcurve::thue::Sublattice2;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ternary(degree: u32, coeffs: &[i64]) -> IntegerForm {
    let terms = monomials(3, degree).into_iter().zip(coeffs.iter().map(|c| BigInt::from(*c)));
    IntegerForm::new(3, degree, terms.collect::<Vec<(MultiIndex, BigInt)>>()).unwrap()
}

proptest! {
    #[test]
    fn euler_identity(degree in 1u32..6, seed in prop::collection::vec(-20i64..20, 21)) {
        let f = ternary(degree, &seed);
        let vars: Vec<IntegerForm> = (0..3).map(|i| {
            let mut c = vec![BigInt::from(0); 3];
            c[i] = BigInt::from(1);
            IntegerForm::linear(&c)
        }).collect();
        let mut lhs = IntegerForm::zero(3, degree);
        for (i, d) in f.gradient().iter().enumerate() {
            lhs = lhs.add(&vars[i].mul(d));
        }
        prop_assert_eq!(lhs, f.scale(&BigInt::from(degree)));
    }

    #[test]
    fn json_round_trip(degree in 1u32..6, seed in prop::collection::vec(-1000i64..1000, 21)) {
        let f = ternary(degree, &seed);
        prop_assert_eq!(IntegerForm::from_json(&f.to_json()).unwrap(), f);
    }

    #[test]
    fn sublevel_matches_scan(c in prop::collection::vec(-30i64..30, 1..6), bound in 0i64..400) {
        let got = sublevel_intervals(&c, &bound, &-25, &25);
        let eval = |z: i64| c.iter().rev().fold(0i64, |a, k| a * z + k);
        let want: Vec<i64> = (-25..=25).filter(|z| eval(*z).abs() <= bound).collect();
        let flat: Vec<i64> = got.iter().flat_map(|(a, b)| *a..=*b).collect();
        prop_assert_eq!(flat, want);
    }

    #[test]
    fn sublattice_membership(eta in 1i64..60, s0 in -50i64..50, t0 in -50i64..50, s in -40i64..40, t in -40i64..40) {
        prop_assume!(s0.gcd(&t0) == 1);
        let l = Sublattice2::new(eta, s0, t0).unwrap();
        prop_assert_eq!(l.det(), eta);
        // membership by the congruence and by the triangular basis agree
        let [[a, b], [_, c]] = l.basis;
        let by_basis = s % a == 0 && (t - (s / a) * b) % c == 0;
        prop_assert_eq!(l.contains(s, t), by_basis);
    }

    #[test]
    fn power_law_recovered(p in 1u32..6, r in 1u32..4) {
        let samples: Vec<(u64, u64)> = (1..5u32).map(|i| (1u64 << (r * i), 1u64 << (p * i))).collect();
        let fit = fit_exponent(&samples).unwrap();
        prop_assert!((fit.slope - p as f64 / r as f64).abs() < 1e-9);
    }

    #[test]
    fn generic_bound_below_main(k in 5u32..20, num in 200i64..2000) {
        let tau = q(num, 100);
        prop_assume!(tau <= BigRational::from_integer(k.into()));
        let main = bound_exponents(&BoundSpec::new(BoundVariant::ThmMain, k, tau.clone())).unwrap();
        let generic = bound_exponents(&BoundSpec::new(BoundVariant::ThmGeneric, k, tau)).unwrap();
        prop_assert!(generic.exact().unwrap() <= main.exact().unwrap());
    }
}

#[test]
fn middle_terms_vanish_beyond_threshold() {
    for k in 5u32..=12 {
        let mut num = 3721i64;
        while q(num, 1000) <= BigRational::from_integer(k.into()) {
            let tau = q(num, 1000);
            let t = theorem_terms(k, &tau);
            let main = bound_exponents(&BoundSpec::new(BoundVariant::ThmMain, k, tau.clone())).unwrap();
            let outer = t[0].clone().max(t[3].clone());
            assert_eq!(main.exact().unwrap(), &outer, "k={k} tau={tau}");
            num += 37;
        }
    }
}

#[test]
fn scaling_rerun_is_byte_identical() {
    let f = IntegerForm::parse(3, "x^5 + 2*y^5 - 3*z^5").unwrap();
    let plan: Vec<CountQuery> = [16u64, 32, 64].iter().map(|&b| CountQuery::new(f.clone(), b, q(2, 1)).unwrap()).collect();
    let dir = std::env::temp_dir();
    let read = |tag: &str| {
        let path = dir.join(format!("nearcurve-props-{}-{tag}.csv", std::process::id()));
        let outs = ReportOutputs { csv: Some(path.clone()), svg: None };
        let r = fit_and_report(&plan, None, &outs, &ExperimentConfig::default()).unwrap();
        let s = std::fs::read_to_string(&path).unwrap();
        let _ = std::fs::remove_file(&path);
        assert_eq!(s, r.csv());
        s
    };
    assert_eq!(read("a"), read("b"));
}

#[test]
fn partial_csv_survives_failure() {
    // singular form: the gate refuses every count, so only the header is written
    let f = IntegerForm::parse(3, "x^2*z - y^3").unwrap();
    let plan: Vec<CountQuery> = [4u64, 8, 16].iter().map(|&b| CountQuery::new(f.clone(), b, q(1, 1)).unwrap()).collect();
    let path = std::env::temp_dir().join(format!("nearcurve-props-{}-fail.csv", std::process::id()));
    let outs = ReportOutputs { csv: Some(path.clone()), svg: None };
    assert!(fit_and_report(&plan, None, &outs, &ExperimentConfig::default()).is_err());
    let s = std::fs::read_to_string(&path).unwrap();
    let _ = std::fs::remove_file(&path);
    assert_eq!(s.trim(), nearcurve::counting::CountReport::csv_header());
    assert!(count_gamma(&plan[0], None).is_err());
}
