use num_bigint::BigInt;
use num_rational::BigRational;

use nearcurve::counting::CountQuery;
use nearcurve::detmethod::pipeline::cover_boxes;
use nearcurve::detmethod::{run_pipeline, PipelineConfig};
use nearcurve::forms::IntegerForm;
use nearcurve::lattice::minima_histogram;
use nearcurve::thue::factor_binary;
use nearcurve::thue::parameterize_conic;

// per-bucket constant for the minima histogram, fitted once on the F5 covers
const HISTOGRAM_CONSTANT: f64 = 2.0;

fn f5() -> IntegerForm {
    IntegerForm::parse(3, "x^5 + y^5 - z^5").unwrap()
}

#[test]
fn minima_histogram_within_frozen_constant() {
    for b in [64u64, 128, 256] {
        let q = CountQuery::new(f5(), b, BigRational::new(BigInt::from(5), BigInt::from(2))).unwrap();
        let rep = run_pipeline(&q, &PipelineConfig::default()).unwrap();
        let cover = cover_boxes(&q, rep.parameters.m, rep.m0).unwrap();
        let rows = minima_histogram(&cover, b as i64).unwrap();
        assert_eq!(rows.iter().map(|r| r.count).sum::<u64>() as usize, cover.boxes.len());
        for r in &rows {
            assert!(
                r.count as f64 <= HISTOGRAM_CONSTANT * r.bound_value,
                "B={b} L=2^{}: {} boxes against {}",
                r.l_exponent,
                r.count,
                r.bound_value
            );
        }
    }
}

#[test]
fn pullback_to_conic() {
    let q = IntegerForm::parse(3, "x^2 + y^2 - z^2").unwrap();
    let p = parameterize_conic(&q, 10).unwrap().unwrap();
    let g = p.pullback(&f5()).unwrap();
    assert_eq!(g.degree(), 10);
    // the conic touches F5 at its flexes (1, 0, 1) and (0, 1, 1)
    assert_eq!(factor_binary(&g).unwrap().a, 2);
    // a line-pair conic through a flex with the flex tangent as a component
    let bad = IntegerForm::parse(3, "x^2 - z^2 + y^2 - y^2").unwrap();
    assert!(parameterize_conic(&bad, 10).is_err());
}
