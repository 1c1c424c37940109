//! Measure of sublevel sets `{x in I : |h(x)| <= delta}` of polynomials.
//!
//! The estimate checked here is the classical one for `|h| <= delta`; the
//! printed statement of the lemma has the inequality the other way round,
//! which would make the bound false for small `delta`.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{real_roots_in, QPoly, RatInterval, RealAlg};

#[derive(Clone, Debug)]
pub struct SublevelResult {
    /// Certified enclosure of the measure.
    pub measure: RatInterval,
    pub bound: f64,
    pub within_bound: bool,
}

/// `2e ((k+1)!)^(1/k) (delta/C)^(1/k)`.
pub fn sublevel_bound(k: u32, delta: f64, c: f64) -> f64 {
    let fact: f64 = (1..=k + 1).map(|i| i as f64).product();
    2.0 * std::f64::consts::E * fact.powf(1.0 / k as f64) * (delta / c).powf(1.0 / k as f64)
}

/// Requires `|h^(k)| >= C` on `[a, b]`, which is certified first.
pub fn sublevel_measure(
    h: &QPoly,
    a: &BigRational,
    b: &BigRational,
    delta: &BigRational,
    k: u32,
    c: &BigRational,
) -> Result<SublevelResult> {
    if a >= b || delta.is_negative() || !c.is_positive() || k == 0 {
        return Err(Error::precondition("need a < b, delta >= 0, C > 0, k >= 1"));
    }
    let mut dk = h.clone();
    for _ in 0..k {
        dk = dk.derivative();
    }
    // |h^(k)| >= C on [a,b]: no crossing of +-C inside and the midpoint passes
    let cc = QPoly::constant(c.clone());
    let crossing = &(&dk - &cc) * &(&dk + &cc);
    let mid = (a + b) / BigRational::from_integer(2.into());
    let ok_mid = dk.eval(&mid).abs() >= *c;
    let crosses = !crossing.is_zero()
        && real_roots_in(&crossing, a, b).into_iter().any(|mut r| {
            r.cmp_rational(a) == std::cmp::Ordering::Greater && r.cmp_rational(b) == std::cmp::Ordering::Less
        });
    if !ok_mid || crosses {
        return Err(Error::certification("derivative lower bound does not hold on the interval"));
    }

    let dq = QPoly::constant(delta.clone());
    let mut pts: Vec<RealAlg> = vec![RealAlg::rational(a.clone())];
    for q in [h - &dq, h + &dq] {
        if q.is_zero() {
            continue;
        }
        for r in real_roots_in(&q, a, b) {
            pts.push(r);
        }
    }
    pts.push(RealAlg::rational(b.clone()));
    sort_dedup(&mut pts);
    let tol = BigRational::new(1.into(), num_bigint::BigInt::from(1u64 << 62));
    let mut measure = RatInterval::point(BigRational::zero());
    for w in pts.windows(2) {
        let (mut lo, mut hi) = (w[0].clone(), w[1].clone());
        let t = lo.rational_between(&mut hi);
        if h.eval(&t).abs() <= *delta {
            lo.refine_to(&tol);
            hi.refine_to(&tol);
            let len = RatInterval::new(&hi.enclosure().lo - &lo.enclosure().hi, &hi.enclosure().hi - &lo.enclosure().lo);
            measure = &measure + &len;
        }
    }
    let bound = sublevel_bound(k, crate::poly::upoly::to_f64(delta), crate::poly::upoly::to_f64(c));
    let within_bound = measure.to_f64().1 <= bound;
    Ok(SublevelResult { measure, bound, within_bound })
}

fn sort_dedup(v: &mut Vec<RealAlg>) {
    let mut out: Vec<RealAlg> = Vec::with_capacity(v.len());
    for r in v.drain(..) {
        let mut r = r;
        let mut i = 0;
        let mut dup = false;
        while i < out.len() {
            match r.cmp_alg(&mut out[i]) {
                std::cmp::Ordering::Equal => {
                    dup = true;
                    break;
                }
                std::cmp::Ordering::Less => break,
                std::cmp::Ordering::Greater => i += 1,
            }
        }
        if !dup {
            out.insert(i, r);
        }
    }
    *v = out;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::upoly::{rat, ratio};

    #[test]
    fn square_sublevel() {
        let h = QPoly::from_ints(&[0, 0, 1]);
        let r = sublevel_measure(&h, &rat(-1), &rat(1), &ratio(1, 100), 2, &rat(2)).unwrap();
        assert!(r.measure.contains(&ratio(1, 5)));
        assert!((r.bound - 0.9417).abs() < 1e-3);
        assert!(r.within_bound);
    }

    #[test]
    fn zero_delta_has_zero_measure() {
        let h = QPoly::from_ints(&[0, 1]);
        let r = sublevel_measure(&h, &rat(-1), &rat(1), &rat(0), 1, &rat(1)).unwrap();
        assert!(r.measure.contains(&rat(0)));
        assert!(r.measure.to_f64().1 < 1e-15);
    }

    #[test]
    fn rejects_small_derivative() {
        let h = QPoly::from_ints(&[0, 0, 0, 1]);
        assert!(sublevel_measure(&h, &rat(-1), &rat(1), &ratio(1, 10), 1, &rat(1)).is_err());
    }
}
