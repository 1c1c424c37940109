//! Bivariate polynomials over the rationals and resultants in `y`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::interval::{eval_interval, RatInterval};
use super::linalg::{det_bareiss, interpolate};
use super::upoly::{rat, QPoly};

/// `sum_j c[j](x) y^j`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BiPoly {
    c: Vec<QPoly>,
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(j, p)| format!("({})*y^{}", p, j))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl BiPoly {
    pub fn new(mut c: Vec<QPoly>) -> Self {
        while c.last().is_some_and(|p| p.is_zero()) {
            c.pop();
        }
        BiPoly { c }
    }

    pub fn zero() -> Self {
        BiPoly { c: Vec::new() }
    }

    pub fn constant(r: BigRational) -> Self {
        Self::new(vec![QPoly::constant(r)])
    }

    /// Build from `(i, j, coefficient)` triples meaning `coef * x^i * y^j`.
    pub fn from_terms(terms: &[(usize, usize, BigRational)]) -> Self {
        let dy = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut rows: Vec<Vec<BigRational>> = vec![Vec::new(); dy + 1];
        for (i, j, c) in terms {
            let row = &mut rows[*j];
            if row.len() <= *i {
                row.resize(*i + 1, BigRational::zero());
            }
            row[*i] += c;
        }
        Self::new(rows.into_iter().map(QPoly::new).collect())
    }

    pub fn from_int_terms(terms: &[(usize, usize, i64)]) -> Self {
        let t: Vec<(usize, usize, BigRational)> = terms.iter().map(|&(i, j, c)| (i, j, rat(c))).collect();
        Self::from_terms(&t)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn deg_y(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn deg_x(&self) -> usize {
        self.c.iter().map(|p| p.deg()).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> usize {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(j, p)| j + p.deg())
            .max()
            .unwrap_or(0)
    }

    pub fn coeff_y(&self, j: usize) -> QPoly {
        self.c.get(j).cloned().unwrap_or_else(QPoly::zero)
    }

    /// Iterate nonzero terms as `(i, j, coef)`.
    pub fn terms(&self) -> Vec<(usize, usize, BigRational)> {
        let mut out = Vec::new();
        for (j, p) in self.c.iter().enumerate() {
            for (i, a) in p.coeffs().iter().enumerate() {
                if !a.is_zero() {
                    out.push((i, j, a.clone()));
                }
            }
        }
        out
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(self.c.iter().map(|p| p.scale(r)).collect())
    }

    pub fn dx(&self) -> Self {
        Self::new(self.c.iter().map(|p| p.derivative()).collect())
    }

    pub fn dy(&self) -> Self {
        Self::new(self.c.iter().enumerate().skip(1).map(|(j, p)| p.scale(&rat(j as i64))).collect())
    }

    /// Exchange the roles of `x` and `y`.
    pub fn swap(&self) -> Self {
        let t: Vec<(usize, usize, BigRational)> = self.terms().into_iter().map(|(i, j, c)| (j, i, c)).collect();
        Self::from_terms(&t)
    }

    /// Specialise `x`, giving a polynomial in `y`.
    pub fn eval_x(&self, x: &BigRational) -> QPoly {
        QPoly::new(self.c.iter().map(|p| p.eval(x)).collect())
    }

    /// Specialise `y`, giving a polynomial in `x`.
    pub fn eval_y(&self, y: &BigRational) -> QPoly {
        let mut acc = QPoly::zero();
        for p in self.c.iter().rev() {
            acc = &acc.scale(y) + p;
        }
        acc
    }

    pub fn eval(&self, x: &BigRational, y: &BigRational) -> BigRational {
        self.eval_x(x).eval(y)
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for p in self.c.iter().rev() {
            acc = acc * y + p.eval_f64(x);
        }
        acc
    }

    pub fn eval_interval(&self, x: &RatInterval, y: &RatInterval) -> RatInterval {
        let mut acc = RatInterval::point(BigRational::zero());
        for p in self.c.iter().rev() {
            acc = &(&acc * y) + &eval_interval(p, x);
        }
        acc
    }

    /// Substitute a polynomial in `x` for `y`.
    pub fn compose_y(&self, f: &QPoly) -> QPoly {
        let mut acc = QPoly::zero();
        for p in self.c.iter().rev() {
            acc = &(&acc * f) + p;
        }
        acc
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut out = Self::constant(BigRational::one());
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Integer coefficients of a positive multiple, indexed `[j][i]`.
    fn to_int_rows(&self) -> Vec<Vec<BigInt>> {
        let mut l = BigInt::one();
        for p in &self.c {
            for a in p.coeffs() {
                l = l.lcm(a.denom());
            }
        }
        let lr = BigRational::from_integer(l);
        self.c
            .iter()
            .map(|p| p.coeffs().iter().map(|a| (a * &lr).to_integer()).collect())
            .collect()
    }
}

fn eval_int_row(row: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in row.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Sample points 0, 1, -1, 2, -2, ...
fn sample_points(n: usize) -> Vec<BigInt> {
    (0..n)
        .map(|i| {
            let h = (i as i64 + 1) / 2;
            BigInt::from(if i % 2 == 1 { h } else { -h })
        })
        .collect()
}

/// Rows of the subresultant matrix of index `j` for coefficient vectors given
/// lowest degree first with formal degrees `m = a.len()-1`, `n = b.len()-1`.
fn subres_matrix(a: &[BigInt], b: &[BigInt], j: usize) -> Vec<Vec<BigInt>> {
    let m = a.len() - 1;
    let n = b.len() - 1;
    let ncols = m + n - j;
    let mut rows = Vec::with_capacity(m + n - 2 * j);
    for s in (0..n - j).rev() {
        let mut r = vec![BigInt::zero(); ncols];
        for (t, c) in a.iter().enumerate() {
            r[ncols - 1 - (t + s)] = c.clone();
        }
        rows.push(r);
    }
    for s in (0..m - j).rev() {
        let mut r = vec![BigInt::zero(); ncols];
        for (t, c) in b.iter().enumerate() {
            r[ncols - 1 - (t + s)] = c.clone();
        }
        rows.push(r);
    }
    rows
}

/// Coefficient `s_{j,i}` of the `j`-th subresultant.
fn subres_coeff(rows: &[Vec<BigInt>], j: usize, i: usize, m: usize, n: usize) -> BigInt {
    let ncols = m + n - j;
    let keep = m + n - 2 * j - 1;
    let col_i = ncols - 1 - i;
    let mat: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let mut v: Vec<BigInt> = r[..keep].to_vec();
            v.push(r[col_i].clone());
            v
        })
        .collect();
    det_bareiss(mat)
}

fn specialize(rows: &[Vec<BigInt>], x: &BigInt) -> Vec<BigInt> {
    rows.iter().map(|r| eval_int_row(r, x)).collect()
}

fn degree_bound(a: &BiPoly, b: &BiPoly) -> usize {
    let m = a.deg_y();
    let n = b.deg_y();
    let by_rows = m * b.deg_x() + n * a.deg_x();
    by_rows.min(a.total_degree() * b.total_degree())
}

/// `Res_y(a, b)` with formal `y`-degrees, as a polynomial in `x`; defined up to
/// a nonzero rational factor.
pub fn resultant_y(a: &BiPoly, b: &BiPoly) -> QPoly {
    subresultant_coeffs(a, b, 0).pop().unwrap_or_else(QPoly::zero)
}

/// First subresultant `s11(x) y + s10(x)`, returned as `(s11, s10)`.
/// Both share the scaling of [`resultant_y`] computed on the same inputs.
pub fn subresultant1_y(a: &BiPoly, b: &BiPoly) -> (QPoly, QPoly) {
    let mut v = subresultant_coeffs(a, b, 1);
    let s10 = v.pop().unwrap();
    let s11 = v.pop().unwrap();
    (s11, s10)
}

/// Returns `[s_{j,j}, ..., s_{j,0}]` for j = 0 or 1; for j = 0 a single entry.
fn subresultant_coeffs(a: &BiPoly, b: &BiPoly, j: usize) -> Vec<QPoly> {
    if a.is_zero() || b.is_zero() {
        return vec![QPoly::zero(); j + 1];
    }
    let ai = a.to_int_rows();
    let bi = b.to_int_rows();
    let m = a.deg_y();
    let n = b.deg_y();
    if m < j || n < j || m + n < 2 * j + 1 {
        return vec![QPoly::zero(); j + 1];
    }
    if m == 0 && n == 0 {
        return vec![QPoly::one()];
    }
    let bound = degree_bound(a, b) + 1;
    let pts = sample_points(bound);
    let mut vals: Vec<Vec<BigRational>> = vec![Vec::with_capacity(bound); j + 1];
    for x in &pts {
        let av = specialize(&ai, x);
        let bv = specialize(&bi, x);
        let rows = subres_matrix(&av, &bv, j);
        for (k, i) in (0..=j).rev().enumerate() {
            vals[k].push(BigRational::from_integer(subres_coeff(&rows, j, i, m, n)));
        }
    }
    let xs: Vec<BigRational> = pts.into_iter().map(BigRational::from_integer).collect();
    vals.iter().map(|ys| interpolate(&xs, ys)).collect()
}

/// Resultant of two univariate polynomials over Q via the Sylvester matrix.
pub fn resultant(p: &QPoly, q: &QPoly) -> BigRational {
    if p.is_zero() || q.is_zero() {
        return BigRational::zero();
    }
    let m = p.deg();
    let n = q.deg();
    if m == 0 && n == 0 {
        return BigRational::one();
    }
    // clear denominators, tracking the factor
    let lp = p.coeffs().iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let lq = q.coeffs().iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let pi: Vec<BigInt> = p.coeffs().iter().map(|c| (c * BigRational::from_integer(lp.clone())).to_integer()).collect();
    let qi: Vec<BigInt> = q.coeffs().iter().map(|c| (c * BigRational::from_integer(lq.clone())).to_integer()).collect();
    let rows = subres_matrix(&pi, &qi, 0);
    let d = det_bareiss(rows);
    BigRational::new(d, num_traits::pow(lp, n) * num_traits::pow(lq, m))
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, o: &BiPoly) -> BiPoly {
        let n = self.c.len().max(o.c.len());
        BiPoly::new((0..n).map(|j| &self.coeff_y(j) + &o.coeff_y(j)).collect())
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, o: &BiPoly) -> BiPoly {
        let n = self.c.len().max(o.c.len());
        BiPoly::new((0..n).map(|j| &self.coeff_y(j) - &o.coeff_y(j)).collect())
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        BiPoly::new(self.c.iter().map(|p| -p).collect())
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, o: &BiPoly) -> BiPoly {
        if self.is_zero() || o.is_zero() {
            return BiPoly::zero();
        }
        let mut out = vec![QPoly::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        BiPoly::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::upoly::ratio;

    #[test]
    fn resultant_of_circle_and_line() {
        // x^2 + y^2 - 1 and y - x: Res_y = 2x^2 - 1 up to scaling
        let a = BiPoly::from_int_terms(&[(2, 0, 1), (0, 2, 1), (0, 0, -1)]);
        let b = BiPoly::from_int_terms(&[(0, 1, 1), (1, 0, -1)]);
        let r = resultant_y(&a, &b);
        assert_eq!(r.monic(), QPoly::new(vec![ratio(-1, 2), rat(0), rat(1)]));
    }

    #[test]
    fn subresultant_recovers_common_root() {
        // a = (y - x)(y + 1), b = (y - x)(y - 2): gcd degree 1 generically
        let a = BiPoly::from_int_terms(&[(0, 2, 1), (0, 1, 1), (1, 1, -1), (1, 0, -1)]);
        let b = BiPoly::from_int_terms(&[(0, 2, 1), (0, 1, -2), (1, 1, -1), (1, 0, 2)]);
        assert!(resultant_y(&a, &b).is_zero());
        let (s11, s10) = subresultant1_y(&a, &b);
        // s11 y + s10 proportional to y - x
        assert_eq!(&s10 + &(&s11 * &QPoly::x()), QPoly::zero());
    }

    #[test]
    fn univariate_resultant() {
        let p = QPoly::from_ints(&[-2, 0, 1]);
        let q = QPoly::from_ints(&[-1, 1]);
        // Res(x^2-2, x-1) = (1)^2 - 2 up to sign conventions: prod q(roots of p)
        let r = resultant(&p, &q);
        assert_eq!(r.clone() * r, rat(1));
    }
}
