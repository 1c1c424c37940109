//! Exact linear algebra: fraction-free determinants, incremental echelon forms
//! and polynomial interpolation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::upoly::QPoly;

/// Determinant by Bareiss fraction-free elimination.
pub fn det_bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Determinant of a rational matrix.
pub fn det_rational(m: &[Vec<BigRational>]) -> BigRational {
    let mut den = BigInt::one();
    let ints: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| {
            let mut l = BigInt::one();
            for c in row {
                l = l.lcm(c.denom());
            }
            den *= &l;
            row.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect();
    BigRational::new(det_bareiss(ints), den)
}

fn make_primitive(v: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for c in v.iter() {
        g = g.gcd(c);
    }
    if !g.is_zero() && !g.is_one() {
        for c in v.iter_mut() {
            *c /= &g;
        }
    }
}

/// Row echelon form over the integers, built one row at a time. Rows are kept
/// primitive so entries stay small.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    /// Insert a row; returns true if the rank grew.
    pub fn insert(&mut self, row: &[BigInt]) -> bool {
        debug_assert_eq!(row.len(), self.ncols);
        let mut r = row.to_vec();
        for (p, b) in &self.rows {
            if r[*p].is_zero() {
                continue;
            }
            let a = r[*p].clone();
            let bp = &b[*p];
            for j in 0..self.ncols {
                r[j] = &r[j] * bp - &b[j] * &a;
            }
            make_primitive(&mut r);
        }
        let Some(piv) = r.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        make_primitive(&mut r);
        let pos = self.rows.iter().position(|(p, _)| *p > piv).unwrap_or(self.rows.len());
        // rows after `pos` have pivots beyond `piv`, so the form stays echelon
        self.rows.insert(pos, (piv, r));
        true
    }

    /// Reduced row echelon form over the rationals.
    pub fn rref(&self) -> Vec<(usize, Vec<BigRational>)> {
        let mut rows: Vec<(usize, Vec<BigRational>)> = self
            .rows
            .iter()
            .map(|(p, r)| {
                let inv = BigRational::from_integer(r[*p].clone()).recip();
                (*p, r.iter().map(|c| BigRational::from_integer(c.clone()) * &inv).collect())
            })
            .collect();
        for i in (0..rows.len()).rev() {
            let (p, piv_row) = rows[i].clone();
            for (_, r) in rows.iter_mut().take(i) {
                if r[p].is_zero() {
                    continue;
                }
                let f = r[p].clone();
                for j in 0..piv_row.len() {
                    let t = &f * &piv_row[j];
                    r[j] -= t;
                }
            }
        }
        rows
    }

    /// Kernel basis from the reduced echelon form: one vector per free column,
    /// with a one at that column, ordered by free column.
    pub fn kernel_basis(&self) -> Vec<Vec<BigRational>> {
        let rref = self.rref();
        let pivots: Vec<usize> = rref.iter().map(|(p, _)| *p).collect();
        let mut out = Vec::new();
        for f in 0..self.ncols {
            if pivots.contains(&f) {
                continue;
            }
            let mut v = vec![BigRational::zero(); self.ncols];
            v[f] = BigRational::one();
            for (p, r) in &rref {
                v[*p] = -r[f].clone();
            }
            out.push(v);
        }
        out
    }

    /// First kernel basis vector scaled to coprime integers with its first
    /// nonzero entry positive.
    pub fn canonical_kernel_vector(&self) -> Option<Vec<BigInt>> {
        let v = self.kernel_basis().into_iter().next()?;
        Some(primitive_integer_vector(&v))
    }
}

/// Scale a nonzero rational vector to coprime integers, first nonzero entry positive.
pub fn primitive_integer_vector(v: &[BigRational]) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for c in v {
        l = l.lcm(c.denom());
    }
    let mut out: Vec<BigInt> = v.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect();
    make_primitive(&mut out);
    if let Some(first) = out.iter().find(|c| !c.is_zero()) {
        if first.is_negative() {
            for c in out.iter_mut() {
                *c = -c.clone();
            }
        }
    }
    out
}

/// Newton interpolation through the points `(xs[i], ys[i])`.
pub fn interpolate(xs: &[BigRational], ys: &[BigRational]) -> QPoly {
    let n = xs.len();
    let mut coef: Vec<BigRational> = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            coef[i] = (&coef[i] - &coef[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut p = QPoly::zero();
    for i in (0..n).rev() {
        p = &(&p * &QPoly::new(vec![-xs[i].clone(), BigRational::one()])) + &QPoly::constant(coef[i].clone());
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::upoly::rat;

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn bareiss_matches_cofactor() {
        let m = vec![bi(&[2, -1, 3]), bi(&[0, 4, 1]), bi(&[5, 2, -2])];
        // 2(-8-2) +1(0-5) +3(0-20) = -20 -5 -60
        assert_eq!(det_bareiss(m), BigInt::from(-85));
        let m = vec![bi(&[0, 1]), bi(&[1, 0])];
        assert_eq!(det_bareiss(m), BigInt::from(-1));
    }

    #[test]
    fn echelon_kernel() {
        let mut e = Echelon::new(3);
        assert!(e.insert(&bi(&[1, 1, 1])));
        assert!(!e.insert(&bi(&[2, 2, 2])));
        let k = e.canonical_kernel_vector().unwrap();
        assert_eq!(k, bi(&[1, -1, 0]));
        assert!(e.insert(&bi(&[1, 0, 1])));
        assert!(e.insert(&bi(&[0, 0, 1])));
        assert!(e.is_full());
        assert!(e.canonical_kernel_vector().is_none());
    }

    #[test]
    fn interpolation_recovers_cubic() {
        let p = QPoly::from_ints(&[3, 0, -2, 1]);
        let xs: Vec<BigRational> = (0..4).map(rat).collect();
        let ys: Vec<BigRational> = xs.iter().map(|x| p.eval(x)).collect();
        assert_eq!(interpolate(&xs, &ys), p);
    }
}
