//! Arithmetic in `Q[x]/(m)` for a squarefree modulus `m`.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::forms::IntegerForm;

use super::upoly::QPoly;

#[derive(Clone, Debug)]
pub struct QuotientRing {
    m: QPoly,
}

impl QuotientRing {
    pub fn new(m: QPoly) -> Self {
        QuotientRing { m: m.monic() }
    }

    pub fn modulus(&self) -> &QPoly {
        &self.m
    }

    pub fn degree(&self) -> usize {
        self.m.deg()
    }

    pub fn reduce(&self, a: &QPoly) -> QPoly {
        if a.deg() < self.m.deg() {
            a.clone()
        } else {
            a.rem(&self.m)
        }
    }

    pub fn mul(&self, a: &QPoly, b: &QPoly) -> QPoly {
        self.reduce(&(a * b))
    }

    pub fn add(&self, a: &QPoly, b: &QPoly) -> QPoly {
        a + b
    }

    pub fn sub(&self, a: &QPoly, b: &QPoly) -> QPoly {
        a - b
    }

    pub fn inv(&self, a: &QPoly) -> Option<QPoly> {
        a.inv_mod(&self.m)
    }

    pub fn is_zero(&self, a: &QPoly) -> bool {
        self.reduce(a).is_zero()
    }

    pub fn pow(&self, a: &QPoly, e: usize) -> QPoly {
        let mut out = QPoly::one();
        let mut base = self.reduce(a);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = self.mul(&out, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        out
    }

    pub fn constant(c: i64) -> QPoly {
        QPoly::constant(BigRational::from_integer(BigInt::from(c)))
    }

    /// Evaluate an integer form at a point with coordinates in the ring.
    pub fn eval_form(&self, f: &IntegerForm, p: &[QPoly]) -> QPoly {
        let k = f.degree() as usize;
        let pows: Vec<Vec<QPoly>> = p
            .iter()
            .map(|v| {
                let mut row = vec![QPoly::one()];
                for i in 1..=k {
                    let next = self.mul(&row[i - 1], v);
                    row.push(next);
                }
                row
            })
            .collect();
        let mut acc = QPoly::zero();
        for (e, c) in f.terms() {
            let mut t = QPoly::constant(BigRational::from_integer(c.clone()));
            for (i, &ei) in e.0.iter().enumerate() {
                if ei > 0 {
                    t = self.mul(&t, &pows[i][ei as usize]);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Coefficients in `s` of `f(p + s v)`, lowest first, each reduced.
    pub fn eval_form_along_line(&self, f: &IntegerForm, p: &[QPoly], v: &[QPoly]) -> Vec<QPoly> {
        let k = f.degree() as usize;
        // powers of (p_i + s v_i) as polynomials in s with ring coefficients
        let lin: Vec<Vec<QPoly>> = p.iter().zip(v).map(|(a, b)| vec![a.clone(), b.clone()]).collect();
        let pows: Vec<Vec<Vec<QPoly>>> = lin
            .iter()
            .map(|l| {
                let mut row = vec![vec![QPoly::one()]];
                for i in 1..=k {
                    let next = self.mul_series(&row[i - 1], l);
                    row.push(next);
                }
                row
            })
            .collect();
        let mut acc: Vec<QPoly> = vec![QPoly::zero(); k + 1];
        for (e, c) in f.terms() {
            let mut t = vec![QPoly::constant(BigRational::from_integer(c.clone()))];
            for (i, &ei) in e.0.iter().enumerate() {
                if ei > 0 {
                    t = self.mul_series(&t, &pows[i][ei as usize]);
                }
            }
            for (j, c) in t.into_iter().enumerate() {
                acc[j] = &acc[j] + &c;
            }
        }
        acc.into_iter().map(|c| self.reduce(&c)).collect()
    }

    fn mul_series(&self, a: &[QPoly], b: &[QPoly]) -> Vec<QPoly> {
        let mut out = vec![QPoly::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                out[i + j] = &out[i + j] + &self.mul(x, y);
            }
        }
        out
    }

    /// gcd of the modulus with several elements (monic).
    pub fn common_roots(&self, elems: &[QPoly]) -> QPoly {
        let mut g = self.m.clone();
        for e in elems {
            if g.deg() == 0 {
                break;
            }
            g = g.gcd(&self.reduce(e));
        }
        if g.is_zero() {
            QPoly::one()
        } else {
            g.monic()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_mod_quadratic() {
        let k = QuotientRing::new(QPoly::from_ints(&[-2, 0, 1]));
        let x = QPoly::x();
        assert_eq!(k.mul(&x, &x), QPoly::from_ints(&[2]));
        let inv = k.inv(&QPoly::from_ints(&[1, 1])).unwrap();
        assert_eq!(k.mul(&inv, &QPoly::from_ints(&[1, 1])), QPoly::one());
        assert_eq!(k.pow(&x, 5), QPoly::from_ints(&[0, 4]));
    }
}
