//! Integer forms in two or three variables.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{resultant_y, BiPoly, QPoly};

/// Exponent tuple. Ordered so that iteration runs in graded-lex order with the
/// largest tuple first (`x^5` before `x^4 y`).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        other.degree().cmp(&self.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponent tuples of the given degree, in term order.
pub fn monomials(nvars: usize, degree: u32) -> Vec<MultiIndex> {
    fn rec(nvars: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if cur.len() + 1 == nvars {
            cur.push(left);
            out.push(MultiIndex(cur.clone()));
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(nvars, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        return out;
    }
    rec(nvars, degree, &mut Vec::new(), &mut out);
    out
}

/// Homogeneous polynomial with integer coefficients in 2 or 3 variables.
#[derive(Clone, PartialEq, Eq)]
pub struct IntegerForm {
    nvars: usize,
    degree: u32,
    terms: BTreeMap<MultiIndex, BigInt>,
}

/// Integer triple with coprime entries.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct PrimitiveTriple {
    pub x: BigInt,
    pub y: BigInt,
    pub z: BigInt,
}

impl PrimitiveTriple {
    pub fn new(x: BigInt, y: BigInt, z: BigInt) -> Result<Self> {
        if gcd3(&x, &y, &z).is_one() {
            Ok(PrimitiveTriple { x, y, z })
        } else {
            Err(Error::precondition("triple is not primitive"))
        }
    }

    pub fn from_i64(x: i64, y: i64, z: i64) -> Result<Self> {
        Self::new(x.into(), y.into(), z.into())
    }

    pub fn to_vec(&self) -> Vec<BigInt> {
        vec![self.x.clone(), self.y.clone(), self.z.clone()]
    }
}

/// gcd of absolute values; gcd(0,0,0) = 0.
pub fn gcd3(a: &BigInt, b: &BigInt, c: &BigInt) -> BigInt {
    a.gcd(b).gcd(c)
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

#[derive(Serialize, Deserialize)]
struct JsonTerm {
    e: Vec<u32>,
    c: String,
}

#[derive(Serialize, Deserialize)]
struct JsonForm {
    nvars: usize,
    degree: u32,
    terms: Vec<JsonTerm>,
}

const VAR_NAMES: [&str; 3] = ["x", "y", "z"];

impl IntegerForm {
    pub fn new(nvars: usize, degree: u32, terms: impl IntoIterator<Item = (MultiIndex, BigInt)>) -> Result<Self> {
        if !(2..=3).contains(&nvars) {
            return Err(Error::precondition(format!("forms need 2 or 3 variables, got {}", nvars)));
        }
        if degree == 0 {
            return Err(Error::precondition("form degree must be positive"));
        }
        let mut map: BTreeMap<MultiIndex, BigInt> = BTreeMap::new();
        for (e, c) in terms {
            if e.0.len() != nvars {
                return Err(Error::Arity { expected: nvars, got: e.0.len() });
            }
            if e.degree() != degree {
                return Err(Error::precondition(format!("term {:?} does not have degree {}", e.0, degree)));
            }
            *map.entry(e).or_insert_with(BigInt::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(IntegerForm { nvars, degree, terms: map })
    }

    /// Unchecked constructor for internal use; degree may be 0 for constants.
    fn raw(nvars: usize, degree: u32, terms: BTreeMap<MultiIndex, BigInt>) -> Self {
        let mut terms = terms;
        terms.retain(|_, c| !c.is_zero());
        IntegerForm { nvars, degree, terms }
    }

    pub fn zero(nvars: usize, degree: u32) -> Self {
        Self::raw(nvars, degree, BTreeMap::new())
    }

    pub fn from_terms(nvars: usize, terms: &[(&[u32], i64)]) -> Result<Self> {
        let degree = terms.first().map(|t| t.0.iter().sum()).unwrap_or(1);
        Self::new(nvars, degree, terms.iter().map(|(e, c)| (MultiIndex(e.to_vec()), BigInt::from(*c))))
    }

    /// Parse an expression such as `x^5 + y^5 - 3*x^2*y^2*z`.
    pub fn parse(nvars: usize, s: &str) -> Result<Self> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::Parse("empty expression".into()));
        }
        let mut terms: Vec<(MultiIndex, BigInt)> = Vec::new();
        let mut chunks: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (i, ch) in cleaned.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') {
                chunks.push((neg, std::mem::take(&mut cur)));
                neg = ch == '-';
            } else if (ch == '+' || ch == '-') && i == 0 {
                neg = ch == '-';
            } else {
                cur.push(ch);
            }
        }
        chunks.push((neg, cur));
        for (neg, chunk) in chunks {
            let mut coef = BigInt::one();
            let mut e = vec![0u32; nvars];
            for factor in chunk.split('*') {
                if factor.is_empty() {
                    return Err(Error::Parse(format!("bad term '{}'", chunk)));
                }
                let (base, pow) = match factor.split_once('^') {
                    Some((b, p)) => (b, p.parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent in '{}'", factor)))?),
                    None => (factor, 1),
                };
                if let Some(v) = VAR_NAMES[..nvars].iter().position(|n| *n == base) {
                    e[v] += pow;
                } else {
                    let c: BigInt = base.parse().map_err(|_| Error::Parse(format!("unknown factor '{}'", base)))?;
                    coef *= num_traits::pow(c, pow as usize);
                }
            }
            if neg {
                coef = -coef;
            }
            terms.push((MultiIndex(e), coef));
        }
        let degree = terms[0].0.degree();
        Self::new(nvars, degree, terms)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, e: &[u32]) -> BigInt {
        self.terms.get(&MultiIndex(e.to_vec())).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Largest absolute coefficient.
    pub fn height(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(BigInt::zero)
    }

    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divide by the content and make the leading coefficient positive.
    pub fn primitive(&self) -> Self {
        let g = self.content();
        if g.is_zero() {
            return self.clone();
        }
        let sign = if self.terms.values().next().is_some_and(|c| c.is_negative()) { -BigInt::one() } else { BigInt::one() };
        let d = g * sign;
        Self::raw(self.nvars, self.degree, self.terms.iter().map(|(e, c)| (e.clone(), c / &d)).collect())
    }

    pub fn evaluate(&self, p: &[BigInt]) -> Result<BigInt> {
        if p.len() != self.nvars {
            return Err(Error::Arity { expected: self.nvars, got: p.len() });
        }
        let mut pows: Vec<Vec<BigInt>> = Vec::with_capacity(self.nvars);
        for v in p {
            let mut row = vec![BigInt::one()];
            for i in 1..=self.degree as usize {
                let next = &row[i - 1] * v;
                row.push(next);
            }
            pows.push(row);
        }
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &ei) in e.0.iter().enumerate() {
                if ei > 0 {
                    t *= &pows[i][ei as usize];
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn evaluate_i64(&self, p: &[i64]) -> Result<BigInt> {
        let v: Vec<BigInt> = p.iter().map(|&x| BigInt::from(x)).collect();
        self.evaluate(&v)
    }

    pub fn evaluate_rational(&self, p: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = BigRational::from_integer(c.clone());
            for (i, &ei) in e.0.iter().enumerate() {
                t *= num_traits::pow(p[i].clone(), ei as usize);
            }
            acc += t;
        }
        acc
    }

    pub fn evaluate_f64(&self, p: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = c.to_f64().unwrap_or(f64::NAN);
                for (i, &ei) in e.0.iter().enumerate() {
                    t *= p[i].powi(ei as i32);
                }
                t
            })
            .sum()
    }

    /// Coefficients as `(exponents, i128)` if every coefficient fits.
    pub fn to_i128_terms(&self) -> Option<Vec<(Vec<u32>, i128)>> {
        self.terms.iter().map(|(e, c)| c.to_i128().map(|v| (e.0.clone(), v))).collect()
    }

    pub fn partial_derivative(&self, i: usize) -> Self {
        assert!(i < self.nvars, "variable index out of range");
        let mut out = BTreeMap::new();
        for (e, c) in &self.terms {
            if e.0[i] == 0 {
                continue;
            }
            let mut f = e.0.clone();
            f[i] -= 1;
            out.insert(MultiIndex(f), c * BigInt::from(e.0[i]));
        }
        Self::raw(self.nvars, self.degree.saturating_sub(1), out)
    }

    pub fn gradient(&self) -> Vec<IntegerForm> {
        (0..self.nvars).map(|i| self.partial_derivative(i)).collect()
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        Self::raw(self.nvars, self.degree, self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.terms.clone();
        for (e, c) in &o.terms {
            *out.entry(e.clone()).or_insert_with(BigInt::zero) += c;
        }
        let degree = if self.is_zero() { o.degree } else { self.degree };
        Self::raw(self.nvars, degree, out)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-BigInt::one()))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out: BTreeMap<MultiIndex, BigInt> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.0.iter().zip(&e2.0).map(|(a, b)| a + b).collect();
                *out.entry(MultiIndex(e)).or_insert_with(BigInt::zero) += c1 * c2;
            }
        }
        Self::raw(self.nvars, self.degree + o.degree, out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant(self.nvars, BigInt::one());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    fn constant(nvars: usize, c: BigInt) -> Self {
        let mut m = BTreeMap::new();
        m.insert(MultiIndex(vec![0; nvars]), c);
        Self::raw(nvars, 0, m)
    }

    /// Linear form `sum c_i x_i`.
    pub fn linear(coeffs: &[BigInt]) -> Self {
        let n = coeffs.len();
        let mut m = BTreeMap::new();
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            m.insert(MultiIndex(e), c.clone());
        }
        Self::raw(n, 1, m)
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero(self.nvars, self.degree.saturating_sub(d.degree)));
        }
        let (lead_e, lead_c) = d.terms.iter().next().map(|(e, c)| (e.clone(), c.clone()))?;
        let mut rem = self.terms.clone();
        let mut q: BTreeMap<MultiIndex, BigInt> = BTreeMap::new();
        while let Some((e, c)) = rem.iter().next().map(|(e, c)| (e.clone(), c.clone())) {
            if e.0.iter().zip(&lead_e.0).any(|(a, b)| a < b) {
                return None;
            }
            let (qc, r) = c.div_rem(&lead_c);
            if !r.is_zero() {
                return None;
            }
            let qe: Vec<u32> = e.0.iter().zip(&lead_e.0).map(|(a, b)| a - b).collect();
            for (de, dc) in &d.terms {
                let te: Vec<u32> = de.0.iter().zip(&qe).map(|(a, b)| a + b).collect();
                let entry = rem.entry(MultiIndex(te)).or_insert_with(BigInt::zero);
                *entry -= &qc * dc;
            }
            rem.retain(|_, c| !c.is_zero());
            q.insert(MultiIndex(qe), qc);
        }
        Some(Self::raw(self.nvars, self.degree - d.degree, q))
    }

    pub fn hessian_form(&self) -> Result<Self> {
        if self.nvars != 3 {
            return Err(Error::precondition("hessian_form needs a ternary form"));
        }
        if self.degree < 2 {
            return Err(Error::precondition("hessian_form needs degree at least 2"));
        }
        let g = self.gradient();
        let h: Vec<Vec<IntegerForm>> = g.iter().map(|gi| (0..3).map(|j| gi.partial_derivative(j)).collect()).collect();
        let minor = |a: usize, b: usize, c: usize, d: usize| h[1][a].mul(&h[2][b]).sub(&h[1][c].mul(&h[2][d]));
        let det = h[0][0]
            .mul(&minor(1, 2, 2, 1))
            .sub(&h[0][1].mul(&minor(0, 2, 2, 0)))
            .add(&h[0][2].mul(&minor(0, 1, 1, 0)));
        Ok(Self::raw(3, 3 * (self.degree - 2), det.terms))
    }

    /// Substitute 1 for variable `var`; the two remaining variables become `x`
    /// and `y` in their original order.
    pub fn dehomogenize(&self, var: usize) -> Result<BiPoly> {
        if self.nvars != 3 {
            return Err(Error::precondition("dehomogenize needs a ternary form"));
        }
        let keep: Vec<usize> = (0..3).filter(|&i| i != var).collect();
        let terms: Vec<(usize, usize, BigRational)> = self
            .terms
            .iter()
            .map(|(e, c)| (e.0[keep[0]] as usize, e.0[keep[1]] as usize, BigRational::from_integer(c.clone())))
            .collect();
        Ok(BiPoly::from_terms(&terms))
    }

    /// Homogenise a bivariate polynomial with integer coefficients to the
    /// given degree, inserting the new variable at position `var`.
    pub fn rehomogenize(g: &BiPoly, degree: u32, var: usize) -> Result<Self> {
        let mut terms = Vec::new();
        for (i, j, c) in g.terms() {
            if !c.is_integer() {
                return Err(Error::precondition("rehomogenize needs integer coefficients"));
            }
            let used = (i + j) as u32;
            if used > degree {
                return Err(Error::precondition("polynomial degree exceeds target degree"));
            }
            let mut e = vec![i as u32, j as u32];
            e.insert(var, degree - used);
            terms.push((MultiIndex(e), c.to_integer()));
        }
        Self::new(3, degree, terms)
    }

    /// Binary form `F(x, y)` viewed as the univariate polynomial `F(x, 1)`.
    pub fn binary_to_upoly(&self) -> QPoly {
        assert_eq!(self.nvars, 2);
        let mut c = vec![BigRational::zero(); self.degree as usize + 1];
        for (e, v) in &self.terms {
            c[e.0[0] as usize] += BigRational::from_integer(v.clone());
        }
        QPoly::new(c)
    }

    /// `F(T x)` for an integer matrix `T` (rows give the substituted linear forms).
    pub fn compose_linear(&self, t: &[Vec<BigInt>]) -> Self {
        let n = self.nvars;
        let lin: Vec<IntegerForm> = (0..n).map(|i| Self::linear(&t[i])).collect();
        let mut powers: Vec<Vec<IntegerForm>> = lin
            .iter()
            .map(|l| vec![Self::constant(n, BigInt::one()), l.clone()])
            .collect();
        let mut out = Self::zero(n, self.degree);
        for (e, c) in &self.terms {
            let mut t = Self::constant(n, c.clone());
            for (i, &ei) in e.0.iter().enumerate() {
                while powers[i].len() <= ei as usize {
                    let next = powers[i].last().unwrap().mul(&lin[i]);
                    powers[i].push(next);
                }
                t = t.mul(&powers[i][ei as usize]);
            }
            out = out.add(&t);
        }
        Self::raw(n, self.degree, out.terms)
    }

    /// `F(g_1, ..., g_n)` for forms `g_i` of a common degree in a common set of variables.
    pub fn compose_forms(&self, subs: &[IntegerForm]) -> Result<Self> {
        if subs.len() != self.nvars || subs.is_empty() {
            return Err(Error::Arity { expected: self.nvars, got: subs.len() });
        }
        let m = subs[0].nvars;
        let dg = subs.iter().map(|g| g.degree).max().unwrap_or(0);
        if subs.iter().any(|g| g.nvars != m || (!g.is_zero() && g.degree != dg)) {
            return Err(Error::precondition("substituted forms need a common degree and arity"));
        }
        let mut powers: Vec<Vec<IntegerForm>> = subs.iter().map(|g| vec![Self::constant(m, BigInt::one()), g.clone()]).collect();
        let mut out = Self::zero(m, self.degree * dg);
        for (e, c) in &self.terms {
            let mut t = Self::constant(m, c.clone());
            for (i, &ei) in e.0.iter().enumerate() {
                while powers[i].len() <= ei as usize {
                    let next = powers[i].last().unwrap().mul(&subs[i]);
                    powers[i].push(next);
                }
                t = t.mul(&powers[i][ei as usize]);
            }
            out = out.add(&t);
        }
        Ok(Self::raw(m, self.degree * dg, out.terms))
    }

    pub fn to_json(&self) -> String {
        let jf = JsonForm {
            nvars: self.nvars,
            degree: self.degree,
            terms: self.terms.iter().map(|(e, c)| JsonTerm { e: e.0.clone(), c: c.to_string() }).collect(),
        };
        serde_json::to_string(&jf).expect("form serialization")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let jf: JsonForm = serde_json::from_str(s)?;
        let mut terms = Vec::new();
        for t in jf.terms {
            let c: BigInt = t.c.parse().map_err(|_| Error::Parse(format!("bad coefficient '{}'", t.c)))?;
            terms.push((MultiIndex(t.e), c));
        }
        Self::new(jf.nvars, jf.degree, terms)
    }

    pub fn singularity_scan(&self, budget: &ScanBudget) -> Result<SingularityVerdict> {
        singularity_scan(self, budget)
    }
}

impl fmt::Display for IntegerForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let mut mono = Vec::new();
            for (i, &ei) in e.0.iter().enumerate() {
                match ei {
                    0 => {}
                    1 => mono.push(VAR_NAMES[i].to_string()),
                    _ => mono.push(format!("{}^{}", VAR_NAMES[i], ei)),
                }
            }
            let abs = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", sign)?;
            }
            first = false;
            if mono.is_empty() {
                write!(f, "{}", abs)?;
            } else if abs.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", abs, mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntegerForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SingularityVerdict {
    NonsingularCertified,
    SingularWithWitness(PrimitiveTriple),
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct ScanBudget {
    /// Number of coordinate changes tried by the elimination test.
    pub transforms: usize,
    /// Sup-norm radius of the witness search.
    pub witness_radius: i64,
}

impl Default for ScanBudget {
    fn default() -> Self {
        ScanBudget { transforms: 6, witness_radius: 12 }
    }
}

/// Deterministic sequence of integer matrices with determinant ±1, starting
/// with the identity.
pub fn unimodular_sequence(n: usize, seed: u64, count: usize, max_entry: i64) -> Vec<Vec<Vec<BigInt>>> {
    let mut out = Vec::with_capacity(count);
    let ident: Vec<Vec<BigInt>> =
        (0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect()).collect();
    out.push(ident);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < count {
        let m: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-max_entry..=max_entry)).collect()).collect();
        let d = if n == 2 {
            m[0][0] * m[1][1] - m[0][1] * m[1][0]
        } else {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        if d.abs() == 1 {
            out.push(m.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect());
        }
    }
    out
}

fn gradient_vanishes(grad: &[IntegerForm], p: &[BigInt]) -> bool {
    grad.iter().all(|g| g.evaluate(p).map(|v| v.is_zero()).unwrap_or(false))
}

/// Decide whether the gradient of a ternary form has a common nonzero complex zero.
pub fn singularity_scan(f: &IntegerForm, budget: &ScanBudget) -> Result<SingularityVerdict> {
    if f.nvars != 3 {
        return Err(Error::precondition("singularity_scan needs a ternary form"));
    }
    if f.is_zero() {
        return Ok(SingularityVerdict::Inconclusive);
    }
    if f.degree == 1 {
        return Ok(SingularityVerdict::NonsingularCertified);
    }
    if f.degree == 2 {
        let h = f.hessian_form()?;
        if !h.is_zero() {
            return Ok(SingularityVerdict::NonsingularCertified);
        }
        return Ok(match witness_search(f, budget.witness_radius) {
            Some(w) => SingularityVerdict::SingularWithWitness(w),
            None => SingularityVerdict::Inconclusive,
        });
    }
    for t in unimodular_sequence(3, 0x5eed_5ca9, budget.transforms.max(1), 2) {
        let g = f.compose_linear(&t);
        if certify_no_common_zero(&g.gradient()) {
            return Ok(SingularityVerdict::NonsingularCertified);
        }
    }
    Ok(match witness_search(f, budget.witness_radius) {
        Some(w) => SingularityVerdict::SingularWithWitness(w),
        None => SingularityVerdict::Inconclusive,
    })
}

fn certify_no_common_zero(grad: &[IntegerForm]) -> bool {
    let d: Vec<BiPoly> = match grad.iter().map(|g| g.dehomogenize(2)).collect::<Result<Vec<_>>>() {
        Ok(v) => v,
        Err(_) => return false,
    };
    let r1 = resultant_y(&d[0], &d[1]);
    let r2 = resultant_y(&d[0], &d[2]);
    if r1.is_zero() || r2.is_zero() || r1.gcd(&r2).deg() > 0 {
        return false;
    }
    // points at infinity: z = 0
    let at_inf: Vec<QPoly> = grad
        .iter()
        .map(|g| {
            let mut c = vec![BigRational::zero(); g.degree as usize + 1];
            for (e, v) in g.terms() {
                if e.0[2] == 0 {
                    c[e.0[0] as usize] += BigRational::from_integer(v.clone());
                }
            }
            QPoly::new(c)
        })
        .collect();
    let one_zero_zero = [BigInt::one(), BigInt::zero(), BigInt::zero()];
    if gradient_vanishes(grad, &one_zero_zero) {
        return false;
    }
    let mut g = QPoly::zero();
    for p in &at_inf {
        g = g.gcd(p);
    }
    // all three vanish identically on z = 0 only if g stays zero
    !g.is_zero() && g.deg() == 0
}

fn witness_search(f: &IntegerForm, radius: i64) -> Option<PrimitiveTriple> {
    let grad = f.gradient();
    for r in 1..=radius {
        let mut pts: Vec<[i64; 3]> = Vec::new();
        for x in -r..=r {
            for y in -r..=r {
                for z in -r..=r {
                    if x.abs().max(y.abs()).max(z.abs()) != r {
                        continue;
                    }
                    pts.push([x, y, z]);
                }
            }
        }
        for p in pts {
            let g = gcd_i64(gcd_i64(p[0], p[1]), p[2]);
            if g != 1 {
                continue;
            }
            let first = p.iter().find(|v| **v != 0).copied().unwrap_or(0);
            if first < 0 {
                continue;
            }
            let v: Vec<BigInt> = p.iter().map(|&c| BigInt::from(c)).collect();
            if gradient_vanishes(&grad, &v) {
                return PrimitiveTriple::from_i64(p[0], p[1], p[2]).ok();
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> IntegerForm {
        IntegerForm::parse(3, "x^5 + y^5 - z^5").unwrap()
    }

    #[test]
    fn parse_and_display() {
        let f = IntegerForm::parse(3, "x^5+y^5+z^5-3*x^2*y^2*z").unwrap();
        assert_eq!(f.to_string(), "x^5 - 3*x^2*y^2*z + y^5 + z^5");
        assert_eq!(f.degree(), 5);
    }

    #[test]
    fn monomial_order_degree_two() {
        let m: Vec<Vec<u32>> = monomials(3, 2).into_iter().map(|e| e.0).collect();
        assert_eq!(m, vec![vec![2, 0, 0], vec![1, 1, 0], vec![1, 0, 1], vec![0, 2, 0], vec![0, 1, 1], vec![0, 0, 2]]);
    }

    #[test]
    fn division_by_linear_factor() {
        let a = IntegerForm::parse(3, "y^5 - z^5").unwrap();
        let l = IntegerForm::parse(3, "y - z").unwrap();
        let q = a.div_exact(&l).unwrap();
        assert_eq!(q, IntegerForm::parse(3, "y^4 + y^3*z + y^2*z^2 + y*z^3 + z^4").unwrap());
        assert!(a.div_exact(&IntegerForm::parse(3, "x - z").unwrap()).is_none());
    }

    #[test]
    fn compose_with_swap() {
        let t = vec![
            vec![BigInt::from(0), BigInt::from(1), BigInt::from(0)],
            vec![BigInt::from(1), BigInt::from(0), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(0), BigInt::from(1)],
        ];
        let g = IntegerForm::parse(3, "x^2*y - z^3").unwrap().compose_linear(&t);
        assert_eq!(g, IntegerForm::parse(3, "x*y^2 - z^3").unwrap());
    }

    #[test]
    fn hessian_of_fermat_quintic() {
        let h = f5().hessian_form().unwrap();
        assert_eq!(h, IntegerForm::parse(3, "-8000*x^3*y^3*z^3").unwrap());
    }
}
