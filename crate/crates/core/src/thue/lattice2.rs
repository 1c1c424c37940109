//! The sublattices `{(s, t) = lambda (s0, t0) mod eta}` and the counting
//! function of the inequality `1 <= |F(x)| <= P` on them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::counting::sublevel_intervals;
use crate::error::{Error, Result};
use crate::forms::IntegerForm;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Sublattice2 {
    pub eta: i64,
    pub s0: i64,
    pub t0: i64,
    /// Rows span the lattice; upper triangular with positive diagonal.
    pub basis: [[i64; 2]; 2],
}

/// Upper triangular basis of the lattice spanned by integer rows.
fn hnf2(rows: &[[i64; 2]]) -> [[i64; 2]; 2] {
    // column 0: fold rows into one with gcd in front
    let mut first = [0i64, 0];
    let mut rest: Vec<[i64; 2]> = Vec::new();
    for r in rows {
        let (a, b) = (first[0], r[0]);
        if b == 0 {
            rest.push(*r);
            continue;
        }
        let e = a.extended_gcd(&b);
        let g = e.gcd;
        let new_first = [e.x * first[0] + e.y * r[0], e.x * first[1] + e.y * r[1]];
        let (ua, ub) = (a / g, b / g);
        // the complementary combination has zero in column 0
        rest.push([ub * first[0] - ua * r[0], ub * first[1] - ua * r[1]]);
        first = new_first;
    }
    let mut c = 0i64;
    for r in &rest {
        debug_assert_eq!(r[0], 0);
        c = c.gcd(&r[1]);
    }
    if first[0] < 0 {
        first = [-first[0], -first[1]];
    }
    if c != 0 {
        first[1] = first[1].rem_euclid(c);
    }
    [first, [0, c]]
}

impl Sublattice2 {
    pub fn new(eta: i64, s0: i64, t0: i64) -> Result<Self> {
        if eta < 1 {
            return Err(Error::precondition("eta must be positive"));
        }
        if s0.gcd(&t0) != 1 {
            return Err(Error::precondition("(s0, t0) must be primitive"));
        }
        let basis = hnf2(&[[s0, t0], [eta, 0], [0, eta]]);
        Ok(Sublattice2 { eta, s0, t0, basis })
    }

    pub fn full() -> Self {
        Sublattice2::new(1, 1, 0).expect("valid")
    }

    pub fn det(&self) -> i64 {
        (self.basis[0][0] * self.basis[1][1] - self.basis[0][1] * self.basis[1][0]).abs()
    }

    pub fn contains(&self, s: i64, t: i64) -> bool {
        ((s as i128 * self.t0 as i128 - t as i128 * self.s0 as i128).rem_euclid(self.eta as i128)) == 0
    }
}

fn prime_powers(mut n: i64) -> Vec<(i64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn eval_mod(g: &IntegerForm, s: i64, t: i64, m: i64) -> i64 {
    let v = g.evaluate_i64(&[s, t]).expect("binary form");
    (v % BigInt::from(m)).to_i64().unwrap()
}

/// Representatives of `P^1(Z/p^e)`: `(u, 1)` and `(1, p v)`.
fn projective_points(p: i64, e: u32) -> Vec<(i64, i64)> {
    let q = p.pow(e);
    let mut out: Vec<(i64, i64)> = (0..q).map(|u| (u, 1)).collect();
    out.extend((0..q / p).map(|v| (1, p * v)));
    out
}

/// Lattices `Lambda_{eta, (s0, t0)}` whose union contains every primitive
/// `(s, t)` with `eta | gcd(g_1(s, t), g_2(s, t), g_3(s, t))`. Built per prime
/// power from the classes of the projective line that satisfy the
/// congruence, then glued by the Chinese remainder theorem.
pub fn sublattice_cover(g: &[IntegerForm; 3], eta: i64) -> Result<Vec<Sublattice2>> {
    if eta < 1 {
        return Err(Error::precondition("eta must be positive"));
    }
    if g.iter().any(|gi| gi.nvars() != 2) {
        return Err(Error::precondition("g_i must be binary forms"));
    }
    let mut classes: Vec<(i64, i64, i64)> = vec![(1, 0, 1)]; // (s0, t0) mod modulus
    for (p, e) in prime_powers(eta) {
        let q = p.pow(e);
        let local: Vec<(i64, i64)> = projective_points(p, e)
            .into_iter()
            .filter(|&(s, t)| g.iter().all(|gi| eval_mod(gi, s, t, q) == 0))
            .collect();
        let mut next = Vec::new();
        for &(s, t, m) in &classes {
            for &(ls, lt) in &local {
                next.push((crt(s, m, ls, q), crt(t, m, lt, q), m * q));
            }
        }
        classes = next;
    }
    let mut out = Vec::new();
    for (s, t, m) in classes {
        debug_assert_eq!(m, eta);
        let (s0, t0) = primitive_lift(s, t, eta);
        out.push(Sublattice2::new(eta, s0, t0)?);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn crt(a: i64, m: i64, b: i64, n: i64) -> i64 {
    // m and n coprime
    let e = m.extended_gcd(&n);
    let l = m * n;
    let r = (a as i128 * e.y as i128 * n as i128 + b as i128 * e.x as i128 * m as i128).rem_euclid(l as i128);
    r as i64
}

/// A primitive pair congruent to `(s, t)` modulo `eta`, given `gcd(s, t, eta) = 1`.
fn primitive_lift(s: i64, t: i64, eta: i64) -> (i64, i64) {
    let (s, t) = (s.rem_euclid(eta), t.rem_euclid(eta));
    if s.gcd(&t) == 1 {
        return (s, t);
    }
    let mut k = 0i64;
    loop {
        for (a, b) in [(s + k * eta, t), (s, t + k * eta)] {
            if a.gcd(&b) == 1 {
                return (a, b);
            }
        }
        k += 1;
    }
}

/// Number of primitive `x` in the lattice with `|x|_inf <= B` and `1 <= |F(x)| <= P`.
pub fn count_thue_lattice(f: &IntegerForm, lattice: Option<&Sublattice2>, b: u64, p: u64) -> Result<u64> {
    if f.nvars() != 2 {
        return Err(Error::precondition("need a binary form"));
    }
    if b < 1 || p < 1 {
        return Err(Error::precondition("need B >= 1 and P >= 1"));
    }
    let k = f.degree() as usize;
    let bi = b as i64;
    let pb = BigInt::from(p);
    let xs: Vec<i64> = (-bi..=bi).collect();
    let counts: Vec<u64> = xs
        .par_iter()
        .map(|&x| {
            let xb = BigInt::from(x);
            let mut c = vec![BigInt::zero(); k + 1];
            for (e, v) in f.terms() {
                c[e.0[1] as usize] += v * xb.pow(e.0[0]);
            }
            let mut n = 0u64;
            for (lo, hi) in sublevel_intervals(&c, &pb, &BigInt::from(-bi), &BigInt::from(bi)) {
                let (lo, hi) = (lo.to_i64().unwrap(), hi.to_i64().unwrap());
                for y in lo..=hi {
                    if x.gcd(&y) != 1 || !lattice.map(|l| l.contains(x, y)).unwrap_or(true) {
                        continue;
                    }
                    let v = f.evaluate_i64(&[x, y]).expect("binary form");
                    if !v.is_zero() {
                        debug_assert!(v.abs() <= pb);
                        n += 1;
                    }
                }
            }
            n
        })
        .collect();
    Ok(counts.into_iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinants() {
        for (eta, s0, t0) in [(4, 1, 2), (1, 1, 0), (6, 5, 3), (9, 2, 7), (10, 0, 1)] {
            let l = Sublattice2::new(eta, s0, t0).unwrap();
            assert_eq!(l.det(), eta);
            assert!(l.contains(s0, t0) && l.contains(eta, 0) && l.contains(0, eta));
        }
    }

    #[test]
    fn counts() {
        let f = IntegerForm::parse(2, "x^2 + y^2").unwrap();
        assert_eq!(count_thue_lattice(&f, None, 10, 1).unwrap(), 4);
        let l = Sublattice2::new(3, 1, 0).unwrap();
        assert_eq!(count_thue_lattice(&f, Some(&l), 10, 25).unwrap(), 14);
    }

    #[test]
    fn pythagorean_parity() {
        let g = [
            IntegerForm::parse(2, "2*x*y").unwrap(),
            IntegerForm::parse(2, "x^2 - y^2").unwrap(),
            IntegerForm::parse(2, "x^2 + y^2").unwrap(),
        ];
        let c = sublattice_cover(&g, 2).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c[0].contains(1, 1));
        assert!(sublattice_cover(&g, 15).unwrap().len() <= 16);
    }
}
