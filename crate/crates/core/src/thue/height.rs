//! Linear factorisations of binary forms, the height `H(F)`, the multiplicity
//! `a(F)` and the lower bound probe for `m(F)`.

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::IntegerForm;
use crate::poly::upoly::to_f64;
use crate::poly::QPoly;

/// `F = prod L_i` with real factors first, then `s` complex factors followed by
/// their conjugates in the same order.
#[derive(Clone, Debug)]
pub struct BinaryFactorization {
    pub degree: usize,
    /// Coefficient vectors `(a_1, a_2)` of `L_i = a_1 X + a_2 Y`; the leading
    /// coefficient is folded into the first factor.
    pub factors: Vec<[Complex64; 2]>,
    /// Factors with equal root share an id.
    pub root_ids: Vec<usize>,
    pub real: usize,
    pub pairs: usize,
    pub height: f64,
    /// Highest multiplicity of a zero, counting the zero at infinity.
    pub a: usize,
}

impl BinaryFactorization {
    pub fn eval_factor(&self, i: usize, x: &[f64; 2]) -> Complex64 {
        self.factors[i][0] * x[0] + self.factors[i][1] * x[1]
    }
}

fn norm(v: &[Complex64; 2]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for ci in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + ci;
    }
    (p, dp)
}

/// Roots of a squarefree polynomial by Aberth iteration, polished by Newton.
pub fn aberth_roots(p: &QPoly) -> Vec<Complex64> {
    let n = p.deg();
    if n == 0 {
        return Vec::new();
    }
    let lc = to_f64(&p.lc());
    let c: Vec<Complex64> = p.coeffs().iter().map(|v| Complex64::new(to_f64(v) / lc, 0.0)).collect();
    if n == 1 {
        return vec![-c[0]];
    }
    let radius = 1.0 + c[..n].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(radius * 0.5, 2.0 * std::f64::consts::PI * (j as f64 + 0.25) / n as f64))
        .collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (pv, dpv) = horner(&c, z[i]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dpv;
            let mut s = Complex64::zero();
            for j in 0..n {
                if j != i {
                    s += 1.0 / (z[i] - z[j]);
                }
            }
            let w = ratio / (1.0 - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-16 {
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (pv, dpv) = horner(&c, *r);
            if dpv.norm() > 0.0 {
                *r -= pv / dpv;
            }
        }
    }
    z
}

/// Linear factorisation, height and multiplicity of a nonzero binary form.
/// Multiplicities come from an exact squarefree decomposition.
pub fn factor_binary(f: &IntegerForm) -> Result<BinaryFactorization> {
    if f.nvars() != 2 || f.is_zero() {
        return Err(Error::precondition("need a nonzero binary form"));
    }
    let d = f.degree() as usize;
    let p = f.binary_to_upoly();
    let m = p.deg();
    let at_infinity = d - m;
    let lead = to_f64(&p.lc());
    let mut real: Vec<([Complex64; 2], usize)> = Vec::new();
    let mut upper: Vec<([Complex64; 2], usize)> = Vec::new();
    let mut a = at_infinity;
    let mut next_id = 0;
    if m > 0 {
        for (g, mult) in p.squarefree_decomposition() {
            a = a.max(mult);
            let roots = aberth_roots(&g);
            let tol = 1e-9;
            for r in roots {
                if r.im.abs() <= tol * (1.0 + r.norm()) {
                    for _ in 0..mult {
                        real.push(([Complex64::new(1.0, 0.0), Complex64::new(-r.re, 0.0)], next_id));
                    }
                    next_id += 1;
                } else if r.im > 0.0 {
                    for _ in 0..mult {
                        upper.push(([Complex64::new(1.0, 0.0), -r], next_id));
                    }
                    next_id += 1;
                }
            }
        }
    }
    for _ in 0..at_infinity {
        real.push(([Complex64::zero(), Complex64::new(1.0, 0.0)], next_id));
    }
    real.sort_by(|x, y| x.1.cmp(&y.1).then(x.0[1].re.partial_cmp(&y.0[1].re).unwrap()));
    let pairs = upper.len();
    let conj: Vec<([Complex64; 2], usize)> =
        upper.iter().map(|(v, id)| ([v[0].conj(), v[1].conj()], id + 10_000)).collect();
    let mut factors = Vec::with_capacity(d);
    let mut root_ids = Vec::with_capacity(d);
    let nreal = real.len();
    for (v, id) in real.into_iter().chain(upper).chain(conj) {
        factors.push(v);
        root_ids.push(id);
    }
    if factors.len() != d {
        return Err(Error::certification("root count does not match the degree"));
    }
    if let Some(first) = factors.first_mut() {
        first[0] *= lead;
        first[1] *= lead;
    }
    let height = factors.iter().map(norm).product();
    Ok(BinaryFactorization { degree: d, factors, root_ids, real: nreal, pairs, height, a })
}

pub fn height(f: &IntegerForm) -> Result<f64> {
    Ok(factor_binary(f)?.height)
}

/// Deterministic real matrices of determinant `+-1`; the first is the identity.
pub fn unimodular_real_samples(count: usize, seed: u64) -> Vec<[[f64; 2]; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![[[1.0, 0.0], [0.0, 1.0]]];
    while out.len() < count {
        let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let u: f64 = rng.gen_range(-2.0..2.0);
        let v: f64 = rng.gen_range(-4.0..4.0);
        let flip = if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
        let (c, s) = (th.cos(), th.sin());
        let (e, ei) = (u.exp(), (-u).exp());
        // rotation * diag(e, 1/e) * [[1, v], [0, flip]]
        let a = [[c * e, -s * ei], [s * e, c * ei]];
        out.push([[a[0][0], a[0][0] * v + a[0][1] * flip], [a[1][0], a[1][0] * v + a[1][1] * flip]]);
    }
    out.truncate(count);
    out
}

/// `H(F o T)` from a factorisation of `F`: the factors become `L_i T`.
pub fn height_after(fac: &BinaryFactorization, t: &[[f64; 2]; 2]) -> f64 {
    fac.factors
        .iter()
        .map(|l| {
            let r = [l[0] * t[0][0] + l[1] * t[1][0], l[0] * t[0][1] + l[1] * t[1][1]];
            norm(&r)
        })
        .product()
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub form_id: String,
    pub d: usize,
    pub a: usize,
    pub h: f64,
    pub samples: usize,
    pub min_h_observed: f64,
    pub bound_2pow: f64,
    pub pass: bool,
}

impl ProbeReport {
    pub fn csv_header() -> &'static str {
        "form_id,d,a,H,samples,min_H_observed,bound_2pow,pass"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.12},{},{:.12},{:e},{}",
            self.form_id, self.d, self.a, self.h, self.samples, self.min_h_observed, self.bound_2pow, self.pass
        )
    }
}

/// Smallest `H(F o T)` over seeded samples, against the bound `2^(-2d)`.
pub fn m_bound_probe(f: &IntegerForm, samples: usize, seed: u64) -> Result<ProbeReport> {
    let fac = factor_binary(f)?;
    if 2 * fac.a > fac.degree {
        return Err(Error::precondition(format!("a(F) = {} exceeds d/2 = {}/2", fac.a, fac.degree)));
    }
    if samples == 0 {
        return Err(Error::precondition("need at least one sample"));
    }
    let min = unimodular_real_samples(samples, seed).iter().map(|t| height_after(&fac, t)).fold(f64::INFINITY, f64::min);
    let bound = 2f64.powi(-2 * fac.degree as i32);
    Ok(ProbeReport {
        form_id: f.to_string().replace(' ', ""),
        d: fac.degree,
        a: fac.a,
        h: fac.height,
        samples,
        min_h_observed: min,
        bound_2pow: bound,
        pass: min >= bound,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BestPair {
    /// One-based factor indices.
    pub i1: usize,
    pub i2: usize,
    pub ratio: f64,
    /// `sqrt(2(d-1)/d) 2^4 |F(x)|^(2/d)`, the relaxed right-hand side.
    pub bound: f64,
}

/// The independent pair of factors minimising `|L_i(x)| |L_j(x)| / |det(L_i, L_j)|`;
/// `None` when `F(x) = 0`.
pub fn best_pair(f: &IntegerForm, x: [i64; 2]) -> Result<Option<BestPair>> {
    let fx = f.evaluate_i64(&x)?;
    if fx.is_zero() {
        return Ok(None);
    }
    let fac = factor_binary(f)?;
    let xf = [x[0] as f64, x[1] as f64];
    let vals: Vec<f64> = (0..fac.degree).map(|i| fac.eval_factor(i, &xf).norm()).collect();
    let mut best: Option<BestPair> = None;
    let d = fac.degree as f64;
    let bound = (2.0 * (d - 1.0) / d).sqrt() * 16.0 * fx.to_f64().unwrap().abs().powf(2.0 / d);
    for i in 0..fac.degree {
        for j in i + 1..fac.degree {
            if fac.root_ids[i] == fac.root_ids[j] {
                continue;
            }
            let (l1, l2) = (&fac.factors[i], &fac.factors[j]);
            let det = (l1[0] * l2[1] - l1[1] * l2[0]).norm();
            let ratio = vals[i] * vals[j] / det;
            if best.as_ref().map(|b| ratio < b.ratio).unwrap_or(true) {
                best = Some(BestPair { i1: i + 1, i2: j + 1, ratio, bound });
            }
        }
    }
    assert!(best.is_some(), "all factors proportional although F(x) != 0");
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bf(s: &str) -> IntegerForm {
        IntegerForm::parse(2, s).unwrap()
    }

    #[test]
    fn heights_and_multiplicities() {
        let f = factor_binary(&bf("x^2 + y^2")).unwrap();
        assert!((f.height - 2.0).abs() < 1e-12);
        assert_eq!((f.a, f.real, f.pairs), (1, 0, 1));
        let f = factor_binary(&bf("x*y")).unwrap();
        assert!((f.height - 1.0).abs() < 1e-12);
        assert_eq!(f.a, 1);
        assert_eq!(factor_binary(&bf("x^2*y^2")).unwrap().a, 2);
        assert_eq!(factor_binary(&bf("x^3*y")).unwrap().a, 3);
    }

    #[test]
    fn probe_and_pairs() {
        let r = m_bound_probe(&bf("x^2 + y^2"), 1000, 7).unwrap();
        assert!(r.pass && r.min_h_observed >= 1.0 / 16.0);
        assert!(m_bound_probe(&bf("x^3*y"), 10, 7).is_err());
        let b = best_pair(&bf("x*y"), [3, 5]).unwrap().unwrap();
        assert_eq!((b.i1, b.i2), (1, 2));
        assert!((b.ratio - 15.0).abs() < 1e-9);
        let b = best_pair(&bf("x^2 + y^2"), [1, 0]).unwrap().unwrap();
        assert!((b.ratio - 0.5).abs() < 1e-12);
        assert!(best_pair(&bf("x*y"), [0, 7]).unwrap().is_none());
    }
}
