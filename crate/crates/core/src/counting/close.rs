//! Rational points close to a graph patch.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geometry::CurvePatch;
use crate::poly::RatInterval;

fn ceil(r: &BigRational) -> BigInt {
    r.ceil().to_integer()
}

fn floor(r: &BigRational) -> BigInt {
    r.floor().to_integer()
}

/// Number of primitive `(a, b, q)` with `B/2 <= q <= B`, `a/q` in `interval`
/// and `|b/q - f(a/q)| <= delta/B`, where `f` is the patch function.
/// Boundary cases are settled by exact comparison with the algebraic value.
pub fn count_close_rationals(patch: &CurvePatch, interval: &RatInterval, b: u64, delta: &BigRational) -> Result<u64> {
    if b == 0 {
        return Err(Error::precondition("B must be positive"));
    }
    if delta.is_negative() {
        return Err(Error::precondition("delta must be non-negative"));
    }
    if !patch.contains(&interval.lo) || !patch.contains(&interval.hi) {
        return Err(Error::precondition("interval is not inside the patch interval"));
    }
    let w = delta / BigRational::from_integer(BigInt::from(b));
    let qs: Vec<u64> = ((b + 1) / 2..=b).collect();
    let counts: Vec<Result<u64>> = qs.par_iter().map(|&q| count_for_q(patch, interval, q, &w)).collect();
    let mut total = 0;
    for c in counts {
        total += c?;
    }
    Ok(total)
}

fn count_for_q(patch: &CurvePatch, interval: &RatInterval, q: u64, w: &BigRational) -> Result<u64> {
    let qi = BigInt::from(q);
    let qr = BigRational::from_integer(qi.clone());
    let tol = BigRational::new(BigInt::one(), BigInt::one() << 40);
    let mut n = 0u64;
    let mut a = ceil(&(&interval.lo * &qr));
    let amax = floor(&(&interval.hi * &qr));
    while a <= amax {
        let t = BigRational::new(a.clone(), qi.clone());
        let mut u = patch.value(&t)?;
        let (lo, hi) = match u.as_rational() {
            Some(r) => (r.clone(), r.clone()),
            None if w.is_zero() => {
                // b/q is rational, f(a/q) is not
                a += 1;
                continue;
            }
            None => {
                u.refine_to(&tol);
                let e = u.enclosure();
                (e.lo, e.hi)
            }
        };
        let mut bb = ceil(&((&lo - w) * &qr));
        let bmax = floor(&((&hi + w) * &qr));
        while bb <= bmax {
            let y = BigRational::new(bb.clone(), qi.clone());
            let lower = &y - w;
            let upper = &y + w;
            let inside = if lower <= lo && hi <= upper {
                true
            } else {
                u.cmp_rational(&lower) != Ordering::Less && u.cmp_rational(&upper) != Ordering::Greater
            };
            if inside && a.gcd(&bb).gcd(&qi).is_one() {
                n += 1;
            }
            bb += 1;
        }
        a += 1;
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Axis;
    use crate::poly::upoly::{rat, ratio};
    use crate::poly::BiPoly;

    fn parabola() -> CurvePatch {
        // y = x^2 on [0, 1]
        let g = BiPoly::from_terms(&[(0, 1, rat(1)), (2, 0, rat(-1))]);
        CurvePatch::from_graph(&g, Axis::X, rat(0), rat(1), RatInterval::new(ratio(-1, 2), rat(2))).unwrap()
    }

    fn oracle(b: i64, delta: &BigRational, lo: &BigRational, hi: &BigRational) -> u64 {
        let w = delta / rat(b);
        let mut n = 0;
        for q in (b + 1) / 2..=b {
            for a in -b..=b {
                let t = ratio(a, q);
                if &t < lo || &t > hi {
                    continue;
                }
                let f = &t * &t;
                for bb in -4 * b..=4 * b {
                    if (ratio(bb, q) - &f).abs() <= w && a.gcd(&bb).gcd(&q) == 1 {
                        n += 1;
                    }
                }
            }
        }
        n
    }

    #[test]
    fn parabola_on_curve() {
        let p = parabola();
        let i = RatInterval::new(rat(0), rat(1));
        assert_eq!(count_close_rationals(&p, &i, 2, &rat(0)).unwrap(), 2);
    }

    #[test]
    fn parabola_matches_exact_oracle() {
        let p = parabola();
        let i = RatInterval::new(ratio(1, 5), ratio(7, 8));
        for b in [3i64, 8, 13] {
            for d in [ratio(0, 1), ratio(1, 3), ratio(1, 1), ratio(5, 2)] {
                let got = count_close_rationals(&p, &i, b as u64, &d).unwrap();
                assert_eq!(got, oracle(b, &d, &i.lo, &i.hi), "B={} delta={}", b, d);
            }
        }
    }
}
