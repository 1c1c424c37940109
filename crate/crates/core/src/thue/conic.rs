//! Rational parameterisation of conics with a rational point.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::forms::{IntegerForm, MultiIndex};
use crate::poly::linalg::det_bareiss;

#[derive(Clone, Debug)]
pub struct ConicParam {
    pub q: IntegerForm,
    pub base_point: [i64; 3],
    /// Unimodular with second column the base point.
    pub u: [[i64; 3]; 3],
    /// Binary quadratic forms with `Q(g_1, g_2, g_3) = 0`.
    pub g: [IntegerForm; 3],
    /// Determinant of the Hessian matrix of `Q`.
    pub disc: BigInt,
}

fn bi(v: i64) -> BigInt {
    BigInt::from(v)
}

/// Primitive zeros ordered by sup-norm, then lexicographically, one per
/// antipodal pair (first nonzero coordinate positive).
pub fn find_base_point(q: &IntegerForm, search_bound: i64) -> Option<[i64; 3]> {
    for h in 1..=search_bound {
        for x in 0..=h {
            for y in -h..=h {
                for z in -h..=h {
                    if x.abs().max(y.abs()).max(z.abs()) != h {
                        continue;
                    }
                    let first_pos = x > 0 || (x == 0 && (y > 0 || (y == 0 && z > 0)));
                    if !first_pos || x.gcd(&y).gcd(&z) != 1 {
                        continue;
                    }
                    if q.evaluate_i64(&[x, y, z]).map(|v| v.is_zero()).unwrap_or(false) {
                        return Some([x, y, z]);
                    }
                }
            }
        }
    }
    None
}

/// Unimodular integer matrix whose second column is the primitive vector `xi`.
pub fn complete_to_unimodular(xi: [i64; 3]) -> [[i64; 3]; 3] {
    // find (a, b, c) . xi = 1 via two extended gcds
    let e1 = xi[0].extended_gcd(&xi[1]);
    let g = e1.gcd;
    let e2 = g.extended_gcd(&xi[2]);
    debug_assert_eq!(e2.gcd.abs(), 1);
    let w = [e2.x * e1.x, e2.x * e1.y, e2.y];
    // Z^3 = Z xi + ker(w) since w . xi = 1
    let m = kernel_pair(&w);
    let mut u = [[0i64; 3]; 3];
    for i in 0..3 {
        u[i][0] = m[0][i];
        u[i][1] = xi[i];
        u[i][2] = m[1][i];
    }
    let d = det3(&u);
    if d == -1 {
        for row in u.iter_mut() {
            row[0] = -row[0];
        }
    }
    u
}

fn det3(m: &[[i64; 3]; 3]) -> i64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Basis of the lattice `{v : w . v = 0}` for primitive `w`, which the cross
/// products of `w` with the unit vectors generate.
fn kernel_pair(w: &[i64; 3]) -> [[i64; 3]; 2] {
    let cands = [[0, w[2], -w[1]], [-w[2], 0, w[0]], [w[1], -w[0], 0]];
    let mut rows: Vec<[i64; 3]> = cands.to_vec();
    let mut basis: Vec<[i64; 3]> = Vec::new();
    for col in 0..3 {
        let idx: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
        if idx.is_empty() {
            continue;
        }
        // gcd-combine rows with nonzero entries in this column
        let mut piv = rows[idx[0]];
        let mut others: Vec<[i64; 3]> = Vec::new();
        for &i in &idx[1..] {
            let r = rows[i];
            let e = piv[col].extended_gcd(&r[col]);
            let (pa, rb) = (piv[col] / e.gcd, r[col] / e.gcd);
            let np = [0, 1, 2].map(|j| e.x * piv[j] + e.y * r[j]);
            others.push([0, 1, 2].map(|j| rb * piv[j] - pa * r[j]));
            piv = np;
        }
        let zero: Vec<[i64; 3]> = (0..rows.len()).filter(|i| !idx.contains(i)).map(|i| rows[i]).collect();
        basis.push(piv);
        rows = zero.into_iter().chain(others).filter(|r| r.iter().any(|c| *c != 0)).collect();
        if basis.len() == 2 {
            break;
        }
    }
    [basis[0], basis[1]]
}

fn coeff(q: &IntegerForm, e: [u32; 3]) -> BigInt {
    q.coefficient(&e)
}

/// Parameterise the conic through its first primitive zero of height at
/// most `search_bound`; `Ok(None)` when there is none.
pub fn parameterize_conic(q: &IntegerForm, search_bound: i64) -> Result<Option<ConicParam>> {
    if q.nvars() != 3 || q.degree() != 2 {
        return Err(Error::precondition("need a ternary quadratic form"));
    }
    let h = q.hessian_form()?;
    if h.is_zero() {
        return Err(Error::precondition("conic is singular"));
    }
    let Some(xi) = find_base_point(q, search_bound) else {
        return Ok(None);
    };
    let u = complete_to_unimodular(xi);
    let ub: Vec<Vec<BigInt>> = u.iter().map(|r| r.iter().map(|c| bi(*c)).collect()).collect();
    let qp = q.compose_linear(&ub);
    debug_assert!(coeff(&qp, [0, 2, 0]).is_zero());
    // Q'(X, Y, Z) = Y L(X, Z) + q(X, Z)
    let l = IntegerForm::new(2, 1, [(MultiIndex(vec![1, 0]), coeff(&qp, [1, 1, 0])), (MultiIndex(vec![0, 1]), coeff(&qp, [0, 1, 1]))])?;
    if l.is_zero() {
        return Err(Error::precondition("conic is singular at the base point"));
    }
    let qq = IntegerForm::new(
        2,
        2,
        [
            (MultiIndex(vec![2, 0]), coeff(&qp, [2, 0, 0])),
            (MultiIndex(vec![1, 1]), coeff(&qp, [1, 0, 1])),
            (MultiIndex(vec![0, 2]), coeff(&qp, [0, 0, 2])),
        ],
    )?;
    let s = IntegerForm::linear(&[bi(1), bi(0)]);
    let t = IntegerForm::linear(&[bi(0), bi(1)]);
    let gp = [s.mul(&l), qq.scale(&bi(-1)), t.mul(&l)];
    let g: [IntegerForm; 3] = [0, 1, 2].map(|i| {
        let mut acc = IntegerForm::zero(2, 2);
        for j in 0..3 {
            acc = acc.add(&gp[j].scale(&bi(u[i][j])));
        }
        acc
    });
    let comp = q.compose_forms(&g)?;
    if !comp.is_zero() {
        return Err(Error::certification("parameterisation does not satisfy Q(g) = 0"));
    }
    let hm: Vec<Vec<BigInt>> = (0..3)
        .map(|i| {
            (0..3)
                .map(|j| {
                    let mut e = [0u32; 3];
                    e[i] += 1;
                    e[j] += 1;
                    let c = coeff(q, e);
                    if i == j {
                        c * 2
                    } else {
                        c
                    }
                })
                .collect()
        })
        .collect();
    let disc = det_bareiss(hm);
    Ok(Some(ConicParam { q: q.clone(), base_point: xi, u, g, disc }))
}

impl ConicParam {
    /// `G = F(g_1, g_2, g_3)`, refused when some zero of `G` has multiplicity
    /// above `deg G / 2`.
    pub fn pullback(&self, f: &IntegerForm) -> Result<IntegerForm> {
        let g = f.compose_forms(&self.g)?;
        if g.is_zero() {
            return Err(Error::precondition("the conic is a component of F"));
        }
        let fac = super::height::factor_binary(&g)?;
        if 2 * fac.a > fac.degree {
            return Err(Error::precondition(format!("a(G) = {} exceeds deg G / 2 = {}/2", fac.a, fac.degree)));
        }
        Ok(g)
    }

    /// `eta(s, t) = gcd(g_1, g_2, g_3)(s, t)` and the point `g(s, t) / eta`.
    pub fn point(&self, s: i64, t: i64) -> Option<(i64, [i64; 3])> {
        if let Some(c) = self.small_coefficients() {
            return point_small(&c, s, t);
        }
        let v: Vec<BigInt> = self.g.iter().map(|gi| gi.evaluate_i64(&[s, t]).unwrap()).collect();
        let eta = v[0].gcd(&v[1]).gcd(&v[2]);
        if eta.is_zero() {
            return None;
        }
        let p = [0, 1, 2].map(|i| (&v[i] / &eta).to_i64().expect("point fits i64"));
        Some((eta.to_i64().expect("eta fits i64"), p))
    }

    /// Coefficients of `g_i` (`s^2, s t, t^2`) when they fit comfortably in `i64`.
    fn small_coefficients(&self) -> Option<[[i128; 3]; 3]> {
        let mut out = [[0i128; 3]; 3];
        for (i, gi) in self.g.iter().enumerate() {
            for (j, e) in [[2u32, 0], [1, 1], [0, 2]].iter().enumerate() {
                let c = gi.coefficient(e).to_i64()?;
                if c.abs() > 1 << 20 {
                    return None;
                }
                out[i][j] = c as i128;
            }
        }
        Some(out)
    }

    /// Sup-norm bound on `(s, t)` for points of height at most `h`: the
    /// inverse of `U` sends a point to `(s L, -q, t L)`.
    pub fn parameter_bound(&self, h: i64) -> i64 {
        let inv = inverse_unimodular(&self.u);
        let r = [inv[0], inv[2]].iter().map(|row| row.iter().map(|c| c.abs()).sum::<i64>()).max().unwrap();
        r * h
    }

    /// All primitive zeros of height at most `h`, as the image of primitive
    /// `(s, t)` divided by `eta`, with both signs.
    pub fn points_up_to(&self, h: i64) -> BTreeSet<[i64; 3]> {
        let r = self.parameter_bound(h);
        let small = self.small_coefficients();
        let rows: Vec<BTreeSet<[i64; 3]>> = (-r..=r)
            .into_par_iter()
            .map(|s| {
                let mut out = BTreeSet::new();
                for t in -r..=r {
                    if s.gcd(&t) != 1 {
                        continue;
                    }
                    let pt = match &small {
                        Some(c) => point_small(c, s, t),
                        None => self.point(s, t),
                    };
                    if let Some((_, p)) = pt {
                        if p.iter().all(|c| c.abs() <= h) {
                            out.insert(p);
                            out.insert(p.map(|c| -c));
                        }
                    }
                }
                out
            })
            .collect();
        rows.into_iter().flatten().collect()
    }
}

fn point_small(c: &[[i128; 3]; 3], s: i64, t: i64) -> Option<(i64, [i64; 3])> {
    let (s, t) = (s as i128, t as i128);
    let (ss, st, tt) = (s * s, s * t, t * t);
    let v = c.map(|r| r[0] * ss + r[1] * st + r[2] * tt);
    let eta = v[0].gcd(&v[1]).gcd(&v[2]);
    if eta == 0 {
        return None;
    }
    Some((eta as i64, v.map(|x| (x / eta) as i64)))
}

fn inverse_unimodular(u: &[[i64; 3]; 3]) -> [[i64; 3]; 3] {
    let d = det3(u);
    let mut inv = [[0i64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let r0: Vec<usize> = (0..3).filter(|&k| k != j).collect();
            let c: Vec<usize> = (0..3).filter(|&k| k != i).collect();
            let minor = u[r0[0]][c[0]] * u[r0[1]][c[1]] - u[r0[0]][c[1]] * u[r0[1]][c[0]];
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            inv[i][j] = sign * minor * d;
        }
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conic(s: &str) -> IntegerForm {
        IntegerForm::parse(3, s).unwrap()
    }

    #[test]
    fn unimodular_completion() {
        for xi in [[0, 1, -1], [3, 4, 5], [1, 0, 0], [6, 10, 15], [-2, 3, 7]] {
            let u = complete_to_unimodular(xi);
            assert_eq!(det3(&u), 1);
            assert_eq!([u[0][1], u[1][1], u[2][1]], xi);
            let inv = inverse_unimodular(&u);
            for i in 0..3 {
                for j in 0..3 {
                    let v: i64 = (0..3).map(|k| inv[i][k] * u[k][j]).sum();
                    assert_eq!(v, (i == j) as i64);
                }
            }
        }
    }

    #[test]
    fn circle_round_trip() {
        let p = parameterize_conic(&conic("x^2 + y^2 - z^2"), 5).unwrap().unwrap();
        let pts = p.points_up_to(30);
        assert!(pts.contains(&[3, 4, 5]) && pts.contains(&[-20, 21, -29]));
        let mut brute = BTreeSet::new();
        for x in -30i64..=30 {
            for y in -30i64..=30 {
                for z in -30i64..=30 {
                    if x.gcd(&y).gcd(&z) == 1 && x * x + y * y == z * z {
                        brute.insert([x, y, z]);
                    }
                }
            }
        }
        assert_eq!(pts, brute);
    }

    #[test]
    fn no_point_signal() {
        assert!(parameterize_conic(&conic("x^2 + y^2 - 3*z^2"), 100).unwrap().is_none());
    }
}
