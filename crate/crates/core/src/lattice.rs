//! Sup-norm successive minima of rank 2 and 3 lattices with rational bases.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::detmethod::BoxCover;
use crate::error::{Error, Result};
use crate::poly::linalg::det_rational;

type Q = BigRational;

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntLattice {
    /// Rows generate the lattice.
    pub basis: Vec<Vec<Q>>,
}

impl IntLattice {
    pub fn new(basis: Vec<Vec<Q>>) -> Result<Self> {
        let n = basis.len();
        if !(2..=3).contains(&n) || basis.iter().any(|r| r.len() != n) {
            return Err(Error::precondition("need a square basis of rank 2 or 3"));
        }
        if det_rational(&basis).is_zero() {
            return Err(Error::precondition("basis is singular"));
        }
        Ok(IntLattice { basis })
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.iter().map(|c| q(*c)).collect()).collect())
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn det(&self) -> Q {
        det_rational(&self.basis).abs()
    }

    pub fn vector(&self, coeffs: &[i64]) -> Vec<Q> {
        let n = self.rank();
        (0..n).map(|j| (0..n).fold(Q::zero(), |a, i| a + &self.basis[i][j] * q(coeffs[i]))).collect()
    }
}

pub fn sup_norm(v: &[Q]) -> Q {
    v.iter().map(|c| c.abs()).max().unwrap_or_else(Q::zero)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimaResult {
    pub minima: Vec<Q>,
    /// Independent vectors attaining the minima.
    pub vectors: Vec<Vec<Q>>,
    /// A basis of the lattice whose vectors attain the minima, when one was found.
    pub basis: Option<Vec<Vec<Q>>>,
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |s, (x, y)| s + x * y)
}

/// Exact LLL with `delta = 3/4`; used only to shrink the enumeration box.
fn lll(mut b: Vec<Vec<Q>>) -> Vec<Vec<Q>> {
    let n = b.len();
    let delta = Q::new(3.into(), 4.into());
    let mut k = 1;
    let gso = |b: &Vec<Vec<Q>>| -> (Vec<Vec<Q>>, Vec<Vec<Q>>) {
        let mut bs: Vec<Vec<Q>> = Vec::new();
        let mut mu = vec![vec![Q::zero(); n]; n];
        for i in 0..n {
            let mut v = b[i].clone();
            for j in 0..i {
                mu[i][j] = dot(&b[i], &bs[j]) / dot(&bs[j], &bs[j]);
                for t in 0..n {
                    v[t] = &v[t] - &mu[i][j] * &bs[j][t];
                }
            }
            bs.push(v);
        }
        (bs, mu)
    };
    let mut guard = 0;
    while k < n && guard < 10_000 {
        guard += 1;
        for j in (0..k).rev() {
            let (_, mu) = gso(&b);
            let r = mu[k][j].round();
            if !r.is_zero() {
                for t in 0..n {
                    b[k][t] = &b[k][t] - &r * &b[j][t];
                }
            }
        }
        let (bs, mu) = gso(&b);
        let lhs = dot(&bs[k], &bs[k]);
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * dot(&bs[k - 1], &bs[k - 1]);
        if lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    b
}

fn inverse(m: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).expect("nonsingular");
        a.swap(c, p);
        let inv = a[c][c].recip();
        for t in 0..2 * n {
            a[c][t] = &a[c][t] * &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for t in 0..2 * n {
                    let d = &f * &a[c][t];
                    a[r][t] = &a[r][t] - d;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

fn rank_int(rows: &[Vec<i64>]) -> usize {
    let m: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|c| q(*c)).collect()).collect();
    rank_q(&m)
}

fn rank_q(rows: &[Vec<Q>]) -> usize {
    let mut m = rows.to_vec();
    let mut rank = 0;
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] / &m[rank][c];
                for t in 0..cols {
                    let d = &f * &m[rank][t];
                    m[r][t] = &m[r][t] - d;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Gcd of the maximal minors of an integer `k x n` matrix (`k <= n <= 3`).
fn minors_gcd(rows: &[Vec<i64>]) -> i64 {
    let k = rows.len();
    let n = rows[0].len();
    let mut g = 0i64;
    let cols: Vec<Vec<usize>> = match k {
        1 => (0..n).map(|i| vec![i]).collect(),
        2 => (0..n).flat_map(|i| (i + 1..n).map(move |j| vec![i, j])).collect(),
        _ => vec![(0..n).collect()],
    };
    for c in cols {
        let sub: Vec<Vec<BigInt>> = rows.iter().map(|r| c.iter().map(|&j| BigInt::from(r[j])).collect()).collect();
        let d = crate::poly::linalg::det_bareiss(sub).to_i64().expect("minor fits");
        g = g.gcd(&d);
    }
    g
}

/// Exact sup-norm successive minima by enumeration inside a box that is
/// guaranteed to hold vectors attaining every minimum.
pub fn successive_minima(l: &IntLattice) -> MinimaResult {
    let n = l.rank();
    let red = lll(l.basis.clone());
    let radius = red.iter().map(|r| sup_norm(r)).max().unwrap();
    let inv = inverse(&red);
    // coefficient j of v is sum_i v_i inv[i][j]
    let bounds: Vec<i64> = (0..n)
        .map(|j| {
            let s = (0..n).fold(Q::zero(), |a, i| a + inv[i][j].abs());
            (&radius * s).floor().to_integer().to_i64().expect("enumeration bound fits")
        })
        .collect();
    let reduced = IntLattice { basis: red.clone() };
    let mut cands: Vec<(Q, Vec<Q>, Vec<i64>)> = Vec::new();
    let mut c = vec![0i64; n];
    let total: i64 = bounds.iter().map(|b| 2 * b + 1).product();
    for idx in 0..total {
        let mut r = idx;
        for j in 0..n {
            let w = 2 * bounds[j] + 1;
            c[j] = r % w - bounds[j];
            r /= w;
        }
        if c.iter().all(|x| *x == 0) {
            continue;
        }
        let v = reduced.vector(&c);
        let nv = sup_norm(&v);
        if nv <= radius {
            cands.push((nv, v, c.clone()));
        }
    }
    cands.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| cmp_vec(&a.1, &b.1)));
    let mut minima = Vec::new();
    let mut vectors: Vec<Vec<Q>> = Vec::new();
    for (nv, v, _) in &cands {
        let mut trial = vectors.clone();
        trial.push(v.clone());
        if rank_q(&trial) == trial.len() {
            minima.push(nv.clone());
            vectors = trial;
            if vectors.len() == n {
                break;
            }
        }
    }
    // basis attaining the minima: among vectors of norm minima[k], keep the
    // chosen set primitive
    let mut chosen: Vec<Vec<i64>> = Vec::new();
    let mut basis_vecs: Vec<Vec<Q>> = Vec::new();
    for m in &minima {
        let pick = cands.iter().filter(|(nv, _, _)| nv == m).find(|(_, _, c)| {
            let mut t = chosen.clone();
            t.push(c.clone());
            rank_int(&t) == t.len() && minors_gcd(&t).abs() == 1
        });
        match pick {
            Some((_, v, c)) => {
                chosen.push(c.clone());
                basis_vecs.push(v.clone());
            }
            None => break,
        }
    }
    let basis = (basis_vecs.len() == n).then_some(basis_vecs);
    MinimaResult { minima, vectors, basis }
}

fn cmp_vec(a: &[Q], b: &[Q]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// The lattice `{(M/B (x - r z), M/B (y - s z), z/B)}` with `r = r_num/M`, `s = s_num/M`.
pub fn gamma_lattice(m: i64, b: i64, r_num: i64, s_num: i64) -> Result<IntLattice> {
    if m < 1 || b < 1 {
        return Err(Error::precondition("need M, B >= 1"));
    }
    let bb = BigInt::from(b);
    let f = |n: i64| Q::new(n.into(), bb.clone());
    IntLattice::new(vec![vec![f(m), f(0), f(0)], vec![f(0), f(m), f(0)], vec![f(-r_num), f(-s_num), f(1)]])
}

pub fn gamma_minima(m: i64, b: i64, r_num: i64, s_num: i64) -> Result<(IntLattice, MinimaResult)> {
    let l = gamma_lattice(m, b, r_num, s_num)?;
    let r = successive_minima(&l);
    Ok((l, r))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramRow {
    /// `L = 2^l_exponent`.
    pub l_exponent: u32,
    pub count: u64,
    /// `B^2 log2(B) / L^2`.
    pub bound_value: f64,
}

/// Boxes by the dyadic level `L <= 1/gamma^(1) < 2L` of their lattice, using
/// the cover's resolution for `M` and box corners as centers.
pub fn minima_histogram(cover: &BoxCover, b: i64) -> Result<Vec<HistogramRow>> {
    let res = cover.resolution() as i64;
    let levels: Vec<Result<u32>> = cover
        .boxes
        .par_iter()
        .map(|bx| {
            let (_, r) = gamma_minima(res, b, bx.v, bx.w)?;
            let inv = r.minima[0].recip();
            let fl = inv.floor().to_integer();
            Ok(fl.bits().saturating_sub(1) as u32)
        })
        .collect();
    let mut hist: BTreeMap<u32, u64> = BTreeMap::new();
    for l in levels {
        *hist.entry(l?).or_insert(0) += 1;
    }
    let bf = b as f64;
    Ok(hist
        .into_iter()
        .map(|(e, count)| HistogramRow {
            l_exponent: e,
            count,
            bound_value: bf * bf * bf.log2().max(1.0) / 4f64.powi(e as i32),
        })
        .collect())
}

pub fn histogram_csv(rows: &[HistogramRow]) -> String {
    let mut s = String::from("L_exponent,count,bound_value\n");
    for r in rows {
        s.push_str(&format!("{},{},{}\n", r.l_exponent, r.count, r.bound_value));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_gamma_lattice() {
        let (l, r) = gamma_minima(4, 16, 0, 0).unwrap();
        assert_eq!(r.minima, vec![Q::new(1.into(), 16.into()), Q::new(1.into(), 4.into()), Q::new(1.into(), 4.into())]);
        assert_eq!(l.det(), Q::new(16.into(), 4096.into()));
        assert!(r.basis.is_some());
    }

    #[test]
    fn small_examples() {
        let r = successive_minima(&IntLattice::from_ints(&[vec![1, 0], vec![0, 3]]).unwrap());
        assert_eq!(r.minima, vec![q(1), q(3)]);
        let r = successive_minima(&IntLattice::from_ints(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap());
        assert_eq!(r.minima, vec![q(1), q(1), q(1)]);
        // skewed basis of Z^2
        let r = successive_minima(&IntLattice::from_ints(&[vec![7, 5], vec![10, 7]]).unwrap());
        assert_eq!(r.minima, vec![q(1), q(1)]);
    }
}
