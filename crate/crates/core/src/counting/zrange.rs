//! Integer sublevel sets `{z : |p(z)| <= T}` of univariate polynomials by
//! splitting the range into runs on which `p` is monotone.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::forms::IntegerForm;

/// Integer arithmetic the run solver is generic over (`i64`, `i128`, `BigInt`).
pub trait Ring:
    Clone
    + Ord
    + Zero
    + ToPrimitive
    + From<i64>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + Debug
{
}

impl<T> Ring for T where
    T: Clone
        + Ord
        + Zero
        + ToPrimitive
        + From<i64>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Div<Output = T>
        + Neg<Output = T>
        + Send
        + Sync
        + Debug
{
}

pub fn horner<T: Ring>(c: &[T], z: &T) -> T {
    let mut acc = T::zero();
    for ci in c.iter().rev() {
        acc = acc * z.clone() + ci.clone();
    }
    acc
}

fn sign<T: Ring>(v: &T) -> i8 {
    match v.cmp(&T::zero()) {
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Greater => 1,
    }
}

/// First `z` in `[a, b]` with `pred(z)`, for a predicate that is monotone
/// (false then true); `b + 1` if there is none.
fn first_true<T: Ring>(a: &T, b: &T, pred: impl Fn(&T) -> bool) -> T {
    let one = T::from(1);
    let two = T::from(2);
    let (mut lo, mut hi) = (a.clone(), b.clone() + one.clone());
    while lo < hi {
        let mid = lo.clone() + (hi.clone() - lo.clone()) / two.clone();
        if pred(&mid) {
            hi = mid;
        } else {
            lo = mid + one.clone();
        }
    }
    lo
}

/// Coefficients of all derivatives, `derivs[j]` for `p^(j)`.
pub fn derivative_table<T: Ring>(p: &[T]) -> Vec<Vec<T>> {
    let mut out = vec![p.to_vec()];
    for j in 1..p.len() {
        let prev = &out[j - 1];
        let next: Vec<T> = (1..prev.len()).map(|i| prev[i].clone() * T::from(i as i64)).collect();
        out.push(next);
    }
    out
}

fn trim<T: Ring>(p: &[T]) -> &[T] {
    let mut n = p.len();
    while n > 0 && p[n - 1].is_zero() {
        n -= 1;
    }
    &p[..n]
}

/// Split a run on which `f` is monotone into runs of constant sign of `f`.
fn split_by_sign<T: Ring>(f: &[T], a: &T, b: &T, out: &mut Vec<(T, T)>) {
    let fa = horner(f, a);
    let fb = horner(f, b);
    let (sa, sb) = (sign(&fa), sign(&fb));
    if sa == sb && sa != 0 || fa == fb {
        out.push((a.clone(), b.clone()));
        return;
    }
    let one = T::from(1);
    let zero = T::zero();
    let (c1, c2) = if fa < fb {
        (first_true(a, b, |z| horner(f, z) >= zero), first_true(a, b, |z| horner(f, z) > zero))
    } else {
        (first_true(a, b, |z| horner(f, z) <= zero), first_true(a, b, |z| horner(f, z) < zero))
    };
    for (lo, hi) in [(a.clone(), c1.clone() - one.clone()), (c1, c2.clone() - one.clone()), (c2, b.clone())] {
        if lo <= hi {
            out.push((lo, hi));
        }
    }
}

/// Integers `z` in `[zlo, zhi]` with `|p(z)| <= bound`, as sorted disjoint intervals.
pub fn sublevel_intervals<T: Ring>(p: &[T], bound: &T, zlo: &T, zhi: &T) -> Vec<(T, T)> {
    let mut out = Vec::new();
    if zlo > zhi {
        return out;
    }
    let p = trim(p);
    let nb = -bound.clone();
    if p.len() <= 1 {
        let c = p.first().cloned().unwrap_or_else(T::zero);
        if c >= nb && &c <= bound {
            out.push((zlo.clone(), zhi.clone()));
        }
        return out;
    }
    let derivs = derivative_table(p);
    let d = p.len() - 1;
    let mut runs = vec![(zlo.clone(), zhi.clone())];
    for j in (1..d).rev() {
        let mut next = Vec::with_capacity(runs.len() + 2);
        for (a, b) in &runs {
            split_by_sign(&derivs[j], a, b, &mut next);
        }
        runs = next;
    }
    let one = T::from(1);
    for (a, b) in runs {
        let pa = horner(p, &a);
        let pb = horner(p, &b);
        let (s, e) = if pa <= pb {
            let s = first_true(&a, &b, |z| horner(p, z) >= nb);
            let e = first_true(&a, &b, |z| &horner(p, z) > bound) - one.clone();
            (s, e)
        } else {
            let s = first_true(&a, &b, |z| &horner(p, z) <= bound);
            let e = first_true(&a, &b, |z| horner(p, z) < nb) - one.clone();
            (s, e)
        };
        if s <= e {
            match out.last_mut() {
                Some((_, last_hi)) if last_hi.clone() + one.clone() >= s => *last_hi = e,
                _ => out.push((s, e)),
            }
        }
    }
    out
}

/// The polynomial `F(x, y, .)` as integer coefficients, lowest first.
pub fn fiber_coefficients(f: &IntegerForm, x: &BigInt, y: &BigInt) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); f.degree() as usize + 1];
    for (e, v) in f.terms() {
        c[e.0[2] as usize] += v * x.pow(e.0[0]) * y.pow(e.0[1]);
    }
    c
}

/// All integers `z` with `|F(x, y, z)| <= bound`, as sorted disjoint intervals.
/// The set is infinite exactly when `F(x, y, .)` is a constant within the
/// bound; that case is rejected.
pub fn solve_z_range(f: &IntegerForm, x: &BigInt, y: &BigInt, bound: &BigInt) -> Result<Vec<(BigInt, BigInt)>> {
    if f.nvars() != 3 {
        return Err(Error::precondition("solve_z_range needs a ternary form"));
    }
    if bound.is_negative() {
        return Ok(Vec::new());
    }
    let c = fiber_coefficients(f, x, y);
    let p = trim(&c);
    if p.len() <= 1 {
        let c0 = p.first().cloned().unwrap_or_default();
        if c0.abs() <= *bound {
            return Err(Error::precondition("solution set is unbounded: F(x, y, z) does not depend on z"));
        }
        return Ok(Vec::new());
    }
    // Cauchy bound for the roots of p -+ bound
    let lc = p[p.len() - 1].abs();
    let mut m = BigInt::zero();
    for (i, ci) in p[..p.len() - 1].iter().enumerate() {
        let v = if i == 0 { ci.abs() + bound } else { ci.abs() };
        m = m.max(v);
    }
    let r: BigInt = m.div_ceil(&lc) + 1;
    Ok(sublevel_intervals(p, bound, &-r.clone(), &r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> IntegerForm {
        IntegerForm::parse(3, "x^5 + y^5 - z^5").unwrap()
    }

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn fermat_fibers() {
        let f = f5();
        assert_eq!(solve_z_range(&f, &bi(2), &bi(1), &bi(1)).unwrap(), vec![(bi(2), bi(2))]);
        assert!(solve_z_range(&f, &bi(3), &bi(3), &bi(1)).unwrap().is_empty());
        assert_eq!(solve_z_range(&f, &bi(1), &bi(1), &bi(1)).unwrap(), vec![(bi(1), bi(1))]);
    }

    #[test]
    fn matches_scan_for_wiggly_polynomial() {
        // (z-3)(z+2)(z-7)(z+5) has several monotone runs
        let p: Vec<i64> = vec![-210, -1, 43, -3, 1];
        for bound in [0i64, 5, 50, 500, 5000] {
            let got = sublevel_intervals(&p, &bound, &-30, &30);
            let mut want: Vec<i64> = Vec::new();
            for z in -30..=30 {
                if horner(&p, &z).abs() <= bound {
                    want.push(z);
                }
            }
            let flat: Vec<i64> = got.iter().flat_map(|(a, b)| *a..=*b).collect();
            assert_eq!(flat, want, "bound {}", bound);
        }
    }

    #[test]
    fn unbounded_fiber_rejected() {
        let e3 = IntegerForm::parse(3, "y^2*z - x^3 + x*z^2").unwrap();
        assert!(solve_z_range(&e3, &bi(0), &bi(0), &bi(0)).is_err());
    }
}
