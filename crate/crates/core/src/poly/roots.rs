//! Real root isolation (Descartes bisection) and real algebraic numbers.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::interval::{eval_interval, RatInterval};
use super::upoly::{int_poly_sign_at, to_f64, QPoly};

/// Value of an integer polynomial at a rational point.
fn eval_int(coeffs: &[BigInt], x: &BigRational) -> BigRational {
    if coeffs.is_empty() {
        return BigRational::zero();
    }
    let n = x.numer();
    let d = x.denom();
    let mut acc = coeffs[coeffs.len() - 1].clone();
    let mut dpow = BigInt::one();
    for c in coeffs.iter().rev().skip(1) {
        dpow *= d;
        acc = acc * n + c * &dpow;
    }
    BigRational::new(acc, dpow)
}

fn two() -> BigRational {
    BigRational::from_integer(BigInt::from(2))
}

/// Sign variations in a coefficient sequence, zeros skipped.
fn sign_variations(c: &[BigInt]) -> usize {
    let mut last = 0i8;
    let mut v = 0;
    for x in c {
        let s = if x.is_zero() {
            continue;
        } else if x.is_positive() {
            1
        } else {
            -1
        };
        if last != 0 && s != last {
            v += 1;
        }
        last = s;
    }
    v
}

/// In place `q(t) -> q(t + 1)`.
fn taylor_shift_one(c: &mut [BigInt]) {
    let n = c.len();
    if n < 2 {
        return;
    }
    for i in 0..n - 1 {
        for j in (i..n - 1).rev() {
            let t = c[j + 1].clone();
            c[j] += t;
        }
    }
}

/// Upper bound on sign variations for roots of `q` in the open interval (0, 1).
fn descartes_01(q: &[BigInt]) -> usize {
    let mut r: Vec<BigInt> = q.iter().rev().cloned().collect();
    taylor_shift_one(&mut r);
    sign_variations(&r)
}

fn strip_zero_roots(q: &mut Vec<BigInt>) {
    while q.len() > 1 && q[0].is_zero() {
        q.remove(0);
    }
}

/// `2^n q(t/2)`, i.e. the left half of (0,1) rescaled.
fn halve(q: &[BigInt]) -> Vec<BigInt> {
    let n = q.len() - 1;
    q.iter().enumerate().map(|(i, c)| c << (n - i)).collect()
}

fn primitive_part(q: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for c in q.iter() {
        g = g.gcd(c);
        if g.is_one() {
            return;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for c in q.iter_mut() {
            *c /= &g;
        }
    }
}

/// One isolated real root.
#[derive(Clone, Debug)]
pub enum Bracket {
    Exact(BigRational),
    Open(BigRational, BigRational),
}

/// Isolate the real roots of a squarefree polynomial in the open interval (a, b).
/// Results are sorted and pairwise disjoint.
pub fn isolate_open(p: &QPoly, a: &BigRational, b: &BigRational) -> Vec<Bracket> {
    assert!(a < b);
    if p.deg() == 0 {
        return Vec::new();
    }
    let w = b - a;
    let q = p.compose_linear(&w, a);
    let mut q = q.to_primitive_ints();
    strip_zero_roots(&mut q);
    // remove a possible root at t = 1
    let mut sum: BigInt = q.iter().sum();
    while sum.is_zero() && q.len() > 1 {
        // synthetic division by (t - 1)
        let n = q.len() - 1;
        let mut out = vec![BigInt::zero(); n];
        let mut carry = BigInt::zero();
        for i in (0..n).rev() {
            carry += &q[i + 1];
            out[i] = carry.clone();
        }
        q = out;
        sum = q.iter().sum();
    }
    let mut found: Vec<(BigRational, BigRational, bool)> = Vec::new();
    // (poly, c, k) for subinterval (c/2^k, (c+1)/2^k)
    let mut stack: Vec<(Vec<BigInt>, BigInt, u32)> = vec![(q, BigInt::zero(), 0)];
    while let Some((q, c, k)) = stack.pop() {
        if q.len() <= 1 {
            continue;
        }
        let v = descartes_01(&q);
        let scale = BigRational::from_integer(BigInt::one() << k);
        if v == 0 {
            continue;
        }
        if v == 1 {
            let lo = BigRational::from_integer(c.clone()) / &scale;
            let hi = BigRational::from_integer(&c + 1) / &scale;
            found.push((lo, hi, false));
            continue;
        }
        let mut ql = halve(&q);
        let mut qr = ql.clone();
        taylor_shift_one(&mut qr);
        // root exactly at the midpoint: qr(0) = 0
        if qr[0].is_zero() {
            let m = BigRational::from_integer(&c * 2 + 1) / (&scale * two());
            found.push((m.clone(), m, true));
            strip_zero_roots(&mut qr);
            // ql has the root at t = 1
            let mut out = vec![BigInt::zero(); ql.len() - 1];
            let mut carry = BigInt::zero();
            for i in (0..ql.len() - 1).rev() {
                carry += &ql[i + 1];
                out[i] = carry.clone();
            }
            ql = out;
        }
        primitive_part(&mut ql);
        primitive_part(&mut qr);
        stack.push((ql, &c * 2, k + 1));
        stack.push((qr, &c * 2 + 1, k + 1));
    }
    found.sort_by(|x, y| x.0.cmp(&y.0));
    found
        .into_iter()
        .map(|(lo, hi, exact)| {
            let lo = a + &w * lo;
            if exact {
                Bracket::Exact(lo)
            } else {
                Bracket::Open(lo, a + &w * hi)
            }
        })
        .collect()
}

/// Cauchy bound rounded up to a power of two.
pub fn root_bound(p: &QPoly) -> BigRational {
    let lc = p.lc().abs();
    let mut m = BigRational::zero();
    for c in &p.coeffs()[..p.deg()] {
        let r = c.abs() / &lc;
        if r > m {
            m = r;
        }
    }
    let bound = m + BigRational::one();
    let mut r = BigRational::one();
    while r <= bound {
        r *= two();
    }
    r
}

/// All real roots of `p` (any polynomial), sorted increasingly.
pub fn real_roots(p: &QPoly) -> Vec<RealAlg> {
    if p.deg() == 0 {
        return Vec::new();
    }
    let sf = p.squarefree_part();
    let r = root_bound(&sf);
    brackets_to_alg(&sf, isolate_open(&sf, &-&r, &r))
}

/// Real roots in the closed interval [a, b].
pub fn real_roots_in(p: &QPoly, a: &BigRational, b: &BigRational) -> Vec<RealAlg> {
    if p.deg() == 0 {
        return Vec::new();
    }
    let sf = p.squarefree_part();
    let mut out = Vec::new();
    if sf.eval(a).is_zero() {
        out.push(RealAlg::rational(a.clone()));
    }
    if a < b {
        out.extend(brackets_to_alg(&sf, isolate_open(&sf, a, b)));
        if sf.eval(b).is_zero() {
            out.push(RealAlg::rational(b.clone()));
        }
    }
    out
}

fn brackets_to_alg(sf: &QPoly, bs: Vec<Bracket>) -> Vec<RealAlg> {
    let ints = sf.to_primitive_ints();
    bs.into_iter()
        .map(|b| match b {
            Bracket::Exact(r) => RealAlg::rational(r),
            Bracket::Open(lo, hi) => RealAlg::from_bracket(ints.clone(), lo, hi),
        })
        .collect()
}

/// A real algebraic number: a root of a squarefree integer polynomial inside
/// an isolating open interval whose endpoints are not roots, or a rational.
#[derive(Clone)]
pub struct RealAlg {
    poly: Vec<BigInt>,
    lo: BigRational,
    hi: BigRational,
    exact: Option<BigRational>,
}

impl fmt::Debug for RealAlg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(r) => write!(f, "{}", r),
            None => write!(f, "root in ({}, {}) ~ {}", self.lo, self.hi, self.to_f64()),
        }
    }
}

impl RealAlg {
    pub fn rational(r: BigRational) -> Self {
        RealAlg { poly: Vec::new(), lo: r.clone(), hi: r.clone(), exact: Some(r) }
    }

    /// Build from an interval holding exactly one root of the squarefree `poly`.
    /// Endpoints that happen to be roots are moved inward.
    pub fn from_bracket(poly: Vec<BigInt>, lo: BigRational, hi: BigRational) -> Self {
        if poly.len() == 2 {
            return RealAlg::rational(BigRational::new(-poly[0].clone(), poly[1].clone()));
        }
        let slo = int_poly_sign_at(&poly, &lo);
        let shi = int_poly_sign_at(&poly, &hi);
        if slo != 0 && shi != 0 {
            debug_assert!(slo != shi);
            return RealAlg { poly, lo, hi, exact: None };
        }
        // divide out endpoint roots and search inner endpoints
        let mut red = QPoly::from_bigints(&poly);
        if slo == 0 {
            red = red.exact_div(&QPoly::new(vec![-lo.clone(), BigRational::one()]));
        }
        if shi == 0 {
            red = red.exact_div(&QPoly::new(vec![-hi.clone(), BigRational::one()]));
        }
        let redi = red.to_primitive_ints();
        let w = &hi - &lo;
        let mut frac = BigRational::new(BigInt::one(), BigInt::from(4));
        loop {
            let a = &lo + &w * &frac;
            let b = &hi - &w * &frac;
            let sa = int_poly_sign_at(&redi, &a);
            let sb = int_poly_sign_at(&redi, &b);
            if sa == 0 {
                return RealAlg::rational(a);
            }
            if sb == 0 {
                return RealAlg::rational(b);
            }
            if sa != sb {
                return RealAlg { poly, lo: a, hi: b, exact: None };
            }
            frac /= two();
        }
    }

    pub fn is_rational(&self) -> bool {
        self.exact.is_some()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }

    pub fn poly(&self) -> QPoly {
        match &self.exact {
            Some(r) => QPoly::new(vec![-r.clone(), BigRational::one()]),
            None => QPoly::from_bigints(&self.poly),
        }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn enclosure(&self) -> RatInterval {
        RatInterval::new(self.lo.clone(), self.hi.clone())
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Halve the isolating interval.
    pub fn refine(&mut self) {
        if self.exact.is_some() {
            return;
        }
        let m = (&self.lo + &self.hi) / two();
        let sm = int_poly_sign_at(&self.poly, &m);
        if sm == 0 {
            self.lo = m.clone();
            self.hi = m.clone();
            self.exact = Some(m);
            return;
        }
        let shi = int_poly_sign_at(&self.poly, &self.hi);
        if sm == shi {
            self.hi = m;
        } else {
            self.lo = m;
        }
    }

    /// Shrink the interval below `width`, by quadratic interval refinement:
    /// a Newton step picks one of `n` equal subintervals, `n` squares on
    /// success and falls back to bisection on failure.
    pub fn refine_to(&mut self, width: &BigRational) {
        let dp: Vec<BigInt> = self.poly.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
        let mut n = BigInt::from(4);
        while self.exact.is_none() && &self.width() > width {
            if self.qir_step(&dp, &n) {
                if n.bits() < 4096 {
                    n = &n * &n;
                }
            } else {
                n = n.sqrt().max(BigInt::from(4));
                self.refine();
            }
        }
    }

    fn qir_step(&mut self, dp: &[BigInt], n: &BigInt) -> bool {
        let w = self.width();
        let m = (&self.lo + &self.hi) / two();
        let pm = eval_int(&self.poly, &m);
        let dm = eval_int(dp, &m);
        if dm.is_zero() {
            return false;
        }
        let x = &m - pm / dm;
        let nr = BigRational::from_integer(n.clone());
        let k = ((&x - &self.lo) * &nr / &w).floor().to_integer();
        if k.is_negative() || &k >= n {
            return false;
        }
        let step = &w / &nr;
        let a = &self.lo + &step * BigRational::from_integer(k.clone());
        let b = &a + &step;
        let sa = int_poly_sign_at(&self.poly, &a);
        let sb = int_poly_sign_at(&self.poly, &b);
        if sa == 0 {
            self.set_exact(a);
            return true;
        }
        if sb == 0 {
            self.set_exact(b);
            return true;
        }
        if sa == sb {
            return false;
        }
        self.lo = a;
        self.hi = b;
        true
    }

    fn set_exact(&mut self, r: BigRational) {
        self.lo = r.clone();
        self.hi = r.clone();
        self.exact = Some(r);
    }

    /// Refine until the enclosure is at most `2^-bits` wide.
    pub fn refine_bits(&mut self, bits: u32) {
        let w = BigRational::new(BigInt::one(), BigInt::one() << bits);
        self.refine_to(&w);
    }

    pub fn to_f64(&self) -> f64 {
        match &self.exact {
            Some(r) => to_f64(r),
            None => {
                let mut c = self.clone();
                c.refine_bits(60);
                to_f64(&((&c.lo + &c.hi) / two()))
            }
        }
    }

    /// Exact sign of `q` at this number.
    pub fn sign_of(&mut self, q: &QPoly) -> i8 {
        if q.is_zero() {
            return 0;
        }
        if let Some(r) = &self.exact {
            let v = q.eval(r);
            return super::upoly::sign_of(&v);
        }
        let p = QPoly::from_bigints(&self.poly);
        let g = p.gcd(q);
        if g.deg() > 0 {
            let gi = g.to_primitive_ints();
            let a = int_poly_sign_at(&gi, &self.lo);
            let b = int_poly_sign_at(&gi, &self.hi);
            if a != b {
                return 0;
            }
        }
        loop {
            let e = eval_interval(q, &self.enclosure());
            if let Some(s) = e.sign() {
                if s != 0 {
                    return s;
                }
            }
            self.refine();
            if let Some(r) = &self.exact {
                return super::upoly::sign_of(&q.eval(r));
            }
        }
    }

    /// Whether `q` vanishes at this number.
    pub fn is_root_of(&self, q: &QPoly) -> bool {
        if q.is_zero() {
            return true;
        }
        if let Some(r) = &self.exact {
            return q.eval(r).is_zero();
        }
        let p = QPoly::from_bigints(&self.poly);
        let g = p.gcd(q);
        if g.deg() == 0 {
            return false;
        }
        let gi = g.to_primitive_ints();
        int_poly_sign_at(&gi, &self.lo) != int_poly_sign_at(&gi, &self.hi)
    }

    /// Enclosure of `q` at this number with width at most `tol`.
    pub fn eval_enclosure(&mut self, q: &QPoly, tol: &BigRational) -> RatInterval {
        loop {
            let e = eval_interval(q, &self.enclosure());
            let ew = e.width();
            if &ew <= tol {
                return e;
            }
            let deficit = (&ew / tol).ceil().to_integer().bits() + 2;
            let target = self.width() / BigRational::from_integer(BigInt::one() << deficit);
            self.refine_to(&target);
        }
    }

    pub fn cmp_rational(&mut self, r: &BigRational) -> Ordering {
        if let Some(x) = &self.exact {
            return x.cmp(r);
        }
        loop {
            if r <= &self.lo {
                return Ordering::Greater;
            }
            if r >= &self.hi {
                return Ordering::Less;
            }
            if int_poly_sign_at(&self.poly, r) == 0 {
                return Ordering::Equal;
            }
            self.refine();
            if let Some(x) = &self.exact {
                return x.cmp(r);
            }
        }
    }

    pub fn cmp_alg(&mut self, other: &mut RealAlg) -> Ordering {
        if let Some(r) = other.exact.clone() {
            return self.cmp_rational(&r);
        }
        if let Some(r) = self.exact.clone() {
            return other.cmp_rational(&r).reverse();
        }
        let g = self.poly().gcd(&other.poly());
        let common = g.deg() > 0 && self.is_root_of(&g) && other.is_root_of(&g);
        loop {
            if self.hi <= other.lo {
                return Ordering::Less;
            }
            if other.hi <= self.lo {
                return Ordering::Greater;
            }
            if common {
                let lo = if self.lo < other.lo { self.lo.clone() } else { other.lo.clone() };
                let hi = if self.hi > other.hi { self.hi.clone() } else { other.hi.clone() };
                let inner = real_roots_in(&g, &lo, &hi);
                if inner.len() == 1 {
                    return Ordering::Equal;
                }
            }
            self.refine();
            other.refine();
            if self.exact.is_some() || other.exact.is_some() {
                return self.cmp_alg(other);
            }
        }
    }

    /// A rational strictly between `self` and `other`, assuming `self < other`.
    pub fn rational_between(&mut self, other: &mut RealAlg) -> BigRational {
        loop {
            let a = self.hi.clone();
            let b = other.lo.clone();
            if a < b {
                return (a + b) / two();
            }
            if a == b {
                // a is not a root of either (endpoints are non-roots unless exact)
                let a_ok = self.exact.as_ref().is_none_or(|x| x < &a);
                let b_ok = other.exact.as_ref().is_none_or(|x| x > &b);
                if a_ok && b_ok {
                    return a;
                }
            }
            self.refine();
            other.refine();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::upoly::{rat, ratio};

    #[test]
    fn isolates_roots_of_cubic() {
        // (x-1)(x+2)(2x-1)
        let p = &(&QPoly::from_ints(&[-1, 1]) * &QPoly::from_ints(&[2, 1])) * &QPoly::from_ints(&[-1, 2]);
        let roots = real_roots(&p);
        assert_eq!(roots.len(), 3);
        let vals: Vec<f64> = roots.iter().map(|r| r.to_f64()).collect();
        assert!((vals[0] + 2.0).abs() < 1e-12);
        assert!((vals[1] - 0.5).abs() < 1e-12);
        assert!((vals[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sqrt_two_sign_queries() {
        let p = QPoly::from_ints(&[-2, 0, 1]);
        let mut roots = real_roots(&p);
        assert_eq!(roots.len(), 2);
        let r = &mut roots[1];
        assert_eq!(r.sign_of(&QPoly::from_ints(&[-2, 0, 1])), 0);
        assert_eq!(r.sign_of(&QPoly::from_ints(&[-1, 1])), 1);
        assert_eq!(r.cmp_rational(&ratio(141, 100)), Ordering::Greater);
        assert_eq!(r.cmp_rational(&ratio(142, 100)), Ordering::Less);
        assert!((r.to_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn roots_in_closed_interval() {
        let p = QPoly::from_ints(&[0, -1, 0, 1]); // x^3 - x
        let r = real_roots_in(&p, &rat(-1), &rat(1));
        assert_eq!(r.len(), 3);
        let r = real_roots_in(&p, &rat(0), &rat(1));
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn compare_equal_algebraics() {
        let p = QPoly::from_ints(&[-2, 0, 1]);
        let q = &p * &QPoly::from_ints(&[-3, 0, 1]);
        let mut a = real_roots(&p).pop().unwrap();
        let roots_q = real_roots(&q);
        let mut b = roots_q[2].clone();
        assert_eq!(a.cmp_alg(&mut b), Ordering::Equal);
        let mut c = roots_q[3].clone();
        assert_eq!(a.cmp_alg(&mut c), Ordering::Less);
    }
}
