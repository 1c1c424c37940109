//! Closed intervals with rational endpoints.

use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::upoly::{to_f64, QPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        RatInterval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Sign if the interval excludes zero.
    pub fn sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    pub fn abs(&self) -> RatInterval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            -self
        } else {
            let m = if -&self.lo > self.hi { -&self.lo } else { self.hi.clone() };
            RatInterval::new(BigRational::zero(), m)
        }
    }

    pub fn recip(&self) -> Option<RatInterval> {
        if self.contains_zero() {
            return None;
        }
        Some(RatInterval::new(self.hi.recip(), self.lo.recip()))
    }

    pub fn pow(&self, e: usize) -> RatInterval {
        let mut out = RatInterval::point(BigRational::from_integer(1.into()));
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.lo), to_f64(&self.hi))
    }

    pub fn mid_f64(&self) -> f64 {
        to_f64(&self.mid())
    }

    pub fn hull(&self, o: &RatInterval) -> RatInterval {
        RatInterval::new(
            if self.lo < o.lo { self.lo.clone() } else { o.lo.clone() },
            if self.hi > o.hi { self.hi.clone() } else { o.hi.clone() },
        )
    }
}

impl Add for &RatInterval {
    type Output = RatInterval;
    fn add(self, o: &RatInterval) -> RatInterval {
        RatInterval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }
}

impl Sub for &RatInterval {
    type Output = RatInterval;
    fn sub(self, o: &RatInterval) -> RatInterval {
        RatInterval::new(&self.lo - &o.hi, &self.hi - &o.lo)
    }
}

impl Neg for &RatInterval {
    type Output = RatInterval;
    fn neg(self) -> RatInterval {
        RatInterval::new(-&self.hi, -&self.lo)
    }
}

impl Mul for &RatInterval {
    type Output = RatInterval;
    fn mul(self, o: &RatInterval) -> RatInterval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let mut lo = c[0].clone();
        let mut hi = c[0].clone();
        for v in &c[1..] {
            if *v < lo {
                lo = v.clone();
            }
            if *v > hi {
                hi = v.clone();
            }
        }
        RatInterval::new(lo, hi)
    }
}

/// Horner evaluation of a univariate polynomial over an interval.
pub fn eval_interval(p: &QPoly, x: &RatInterval) -> RatInterval {
    if x.lo == x.hi {
        return RatInterval::point(p.eval(&x.lo));
    }
    let mut acc = RatInterval::point(BigRational::zero());
    for c in p.coeffs().iter().rev() {
        acc = &(&acc * x) + &RatInterval::point(c.clone());
    }
    acc
}
