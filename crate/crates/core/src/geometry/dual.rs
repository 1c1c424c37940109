//! Legendre dual of a convex or concave graph: `g(y) = y h(y) - f(h(y))`
//! with `h` the inverse of `f'`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use std::cmp::Ordering;

use super::patch::{implicit_jet, jet_numerators, CurvePatch};
use crate::error::{Error, Result};
use crate::poly::upoly::to_f64;
use crate::poly::{real_roots_in, resultant_y, RatInterval};

#[derive(Clone, Debug)]
pub struct DualPoint {
    /// Enclosure of `h(y)`, which is also `g'(y)`.
    pub h: RatInterval,
    pub g: RatInterval,
    /// `1 / f''(h(y))`.
    pub g2: f64,
}

impl DualPoint {
    pub fn g1(&self) -> f64 {
        self.h.mid_f64()
    }
}

fn two() -> BigRational {
    BigRational::from_integer(BigInt::from(2))
}

/// Sign of `f''` on the patch, certified constant.
pub fn convexity_sign(patch: &CurvePatch) -> Result<i8> {
    let p2 = &jet_numerators(&patch.g, 2)[2];
    let r = resultant_y(&patch.g, p2);
    let (a, b) = (patch.square[0].lo.clone(), patch.square[0].hi.clone());
    if !r.is_zero() {
        for mut root in real_roots_in(&r, &a, &b) {
            if root.cmp_alg(&mut patch.lo.clone()) == Ordering::Greater
                && root.cmp_alg(&mut patch.hi.clone()) == Ordering::Less
            {
                return Err(Error::precondition("f'' changes sign on the patch"));
            }
        }
    }
    let (mut lo, mut hi) = (patch.lo.clone(), patch.hi.clone());
    let m = lo.rational_between(&mut hi);
    let tol = BigRational::new(BigInt::one(), BigInt::one() << 60);
    let jet = implicit_jet(patch, &m, 2, &tol)?;
    jet[2].sign().filter(|s| *s != 0).ok_or_else(|| Error::precondition("f'' vanishes on the patch"))
}

fn inner_endpoints(patch: &CurvePatch) -> (BigRational, BigRational) {
    let p = match patch.lo.as_rational() {
        Some(r) => r.clone(),
        None => {
            let mut l = patch.lo.clone();
            l.refine_bits(64);
            l.enclosure().hi
        }
    };
    let q = match patch.hi.as_rational() {
        Some(r) => r.clone(),
        None => {
            let mut h = patch.hi.clone();
            h.refine_bits(64);
            h.enclosure().lo
        }
    };
    (p, q)
}

/// Evaluate the dual at `y`, locating `h(y)` to width `tol` by bisection on `f'`.
pub fn legendre_dual(patch: &CurvePatch, y: &BigRational, tol: &BigRational) -> Result<DualPoint> {
    let s = convexity_sign(patch)?;
    let (mut p, mut q) = inner_endpoints(patch);
    let jt = BigRational::new(BigInt::one(), BigInt::one() << 80);
    // with f'' > 0, f' increases; flip comparisons otherwise
    let side = |t: &BigRational| -> Result<Ordering> {
        let mut bits = 80usize;
        loop {
            let jtol = BigRational::new(BigInt::one(), BigInt::one() << bits);
            let d = &implicit_jet(patch, t, 1, &jtol)?[1];
            let o = if &d.hi < y {
                Ordering::Less
            } else if &d.lo > y {
                Ordering::Greater
            } else if bits >= 1024 {
                let u = patch.value(t)?;
                let gx = patch.g.dx();
                let gy = patch.g.dy();
                let q = &gx + &gy.scale(y);
                if u.is_root_of(&q.eval_x(t)) {
                    Ordering::Equal
                } else {
                    bits *= 2;
                    continue;
                }
            } else {
                bits *= 2;
                continue;
            };
            return Ok(if s > 0 { o } else { o.reverse() });
        }
    };
    let sp = side(&p)?;
    let sq = side(&q)?;
    if sp == Ordering::Greater || sq == Ordering::Less {
        return Err(Error::precondition("y is outside the range of f' on the patch"));
    }
    let mut exact = None;
    if sp == Ordering::Equal {
        exact = Some(p.clone());
    } else if sq == Ordering::Equal {
        exact = Some(q.clone());
    }
    while exact.is_none() && &(&q - &p) > tol {
        let m = (&p + &q) / two();
        match side(&m)? {
            Ordering::Less => p = m,
            Ordering::Greater => q = m,
            Ordering::Equal => exact = Some(m),
        }
    }
    if let Some(e) = exact {
        p = e.clone();
        q = e;
    }
    let fp = implicit_jet(patch, &p, 1, &jt)?;
    let fq = implicit_jet(patch, &q, 1, &jt)?;
    let lip = fp[1].abs().hull(&fq[1].abs()).hi;
    let w = &q - &p;
    let spread = &w * &lip;
    let fh = RatInterval::new(&fp[0].lo - &spread, &fp[0].hi + &spread);
    let h = RatInterval::new(p.clone(), q.clone());
    let g = &(&RatInterval::point(y.clone()) * &h) - &fh;
    let m = (&p + &q) / two();
    let f2 = implicit_jet(patch, &m, 2, &jt)?;
    let g2 = 1.0 / to_f64(&f2[2].mid());
    if !g2.is_finite() || f2[2].contains_zero() {
        return Err(Error::certification("f'' not separated from zero"));
    }
    Ok(DualPoint { h, g, g2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::patch::Axis;
    use crate::poly::upoly::{rat, ratio};
    use crate::poly::BiPoly;

    #[test]
    fn half_parabola_is_self_dual() {
        // f = x^2/2 has g = y^2/2, g'' = 1
        let g = BiPoly::from_terms(&[(0, 1, rat(2)), (2, 0, rat(-1))]);
        let p = CurvePatch::from_graph(&g, Axis::X, rat(-1), rat(1), RatInterval::new(rat(-1), rat(1))).unwrap();
        let tol = BigRational::new(BigInt::one(), BigInt::one() << 50);
        let d = legendre_dual(&p, &ratio(1, 3), &tol).unwrap();
        assert!(d.h.contains(&ratio(1, 3)));
        assert!((d.g.mid_f64() - 1.0 / 18.0).abs() < 1e-12);
        assert!((d.g2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flex_patch_is_rejected() {
        let g = BiPoly::from_terms(&[(0, 1, rat(4)), (3, 0, rat(-1))]);
        let p = CurvePatch::from_graph(&g, Axis::X, rat(-1), rat(1), RatInterval::new(rat(-1), rat(1))).unwrap();
        let tol = BigRational::new(BigInt::one(), BigInt::one() << 30);
        assert!(legendre_dual(&p, &ratio(1, 10), &tol).is_err());
    }
}
