//! Counting primitive solutions of `|F(x, y, z)| <= B^gamma`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::time::Instant;

use super::zrange::{horner, sublevel_intervals, Ring};
use crate::error::{Error, Result};
use crate::forms::{IntegerForm, ScanBudget, SingularityVerdict};
use crate::geometry::FlexReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Strategy {
    Naive,
    RootIsolation,
}

impl Strategy {
    pub fn tag(&self) -> &'static str {
        match self {
            Strategy::Naive => "naive",
            Strategy::RootIsolation => "root-isolation",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CountQuery {
    pub form: IntegerForm,
    pub form_id: String,
    pub b: u64,
    pub gamma: BigRational,
    pub strategy: Strategy,
    /// Proceed when the singularity scan is inconclusive.
    pub allow_unverified: bool,
    /// Record wall-clock time; off by default so reports are reproducible.
    pub record_time: bool,
}

impl CountQuery {
    pub fn new(form: IntegerForm, b: u64, gamma: BigRational) -> Result<Self> {
        if form.nvars() != 3 {
            return Err(Error::precondition("count queries need a ternary form"));
        }
        if b == 0 {
            return Err(Error::precondition("B must be positive"));
        }
        if gamma.is_negative() || gamma >= BigRational::from_integer(form.degree().into()) {
            return Err(Error::precondition("gamma must lie in [0, k)"));
        }
        let form_id = form.to_string().replace(' ', "");
        Ok(CountQuery {
            form,
            form_id,
            b,
            gamma,
            strategy: Strategy::RootIsolation,
            allow_unverified: false,
            record_time: false,
        })
    }

    pub fn with_id(mut self, id: &str) -> Self {
        self.form_id = id.to_string();
        self
    }

    pub fn tau(&self) -> BigRational {
        BigRational::from_integer(self.form.degree().into()) - &self.gamma
    }

    pub fn threshold(&self) -> BigInt {
        threshold(self.b, &self.gamma)
    }
}

/// `floor(B^gamma)` for rational `gamma = p/q`, as the integer `q`-th root of `B^p`.
pub fn threshold(b: u64, gamma: &BigRational) -> BigInt {
    let p = gamma.numer().to_u32().expect("gamma numerator");
    let q = gamma.denom().to_u32().expect("gamma denominator");
    BigInt::from(b).pow(p).nth_root(q)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub form_id: String,
    pub b: u64,
    pub gamma: String,
    pub tau: String,
    pub threshold: String,
    pub n: u64,
    pub n_star: Option<u64>,
    /// Excluded points per tangent line (`T<flex id>`, or `complex`).
    pub per_line: BTreeMap<String, u64>,
    pub excluded_total: u64,
    /// Sum over excluded points of (lines through the point - 1).
    pub overlap: u64,
    pub strategy: String,
    pub singularity: String,
    pub wall_ms: u64,
}

impl CountReport {
    pub fn csv_header() -> &'static str {
        "form_id,B,gamma,tau,N,N_star,excluded_total,overlap,strategy,wall_ms"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.form_id,
            self.b,
            self.gamma,
            self.tau,
            self.n,
            self.n_star.map(|v| v.to_string()).unwrap_or_default(),
            self.excluded_total,
            self.overlap,
            self.strategy,
            self.wall_ms
        )
    }
}

/// Which triples a scan visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// `B/2 < max(|x|,|y|,|z|) <= B`.
    Annulus,
    /// `max(|x|,|y|,|z|) <= B`.
    Cube,
}

/// Numeric tier for the fiber polynomials.
fn fits(f: &IntegerForm, b: u64, limit_bits: u64) -> bool {
    let k = f.degree();
    let mut s = BigInt::zero();
    for (_, c) in f.terms() {
        s += c.abs();
    }
    let fact: u64 = (1..=k as u64).product::<u64>().max(1);
    let bound: BigInt = s * BigInt::from(b).pow(k) * BigInt::from(fact) * 4;
    bound.bits() < limit_bits
}

struct Fiber<T> {
    /// `(exponent of z, exponent of x, exponent of y, coefficient)`
    terms: Vec<(usize, u32, u32, T)>,
    k: usize,
}

impl<T: Ring> Fiber<T> {
    fn new(f: &IntegerForm, conv: impl Fn(&BigInt) -> T) -> Self {
        let terms = f.terms().map(|(e, c)| (e.0[2] as usize, e.0[0], e.0[1], conv(c))).collect();
        Fiber { terms, k: f.degree() as usize }
    }

    fn coefficients(&self, xp: &[T], yp: &[T]) -> Vec<T> {
        let mut c = vec![T::zero(); self.k + 1];
        for (ez, ex, ey, v) in &self.terms {
            c[*ez] = c[*ez].clone() + v.clone() * xp[*ex as usize].clone() * yp[*ey as usize].clone();
        }
        c
    }
}

fn powers<T: Ring>(x: i64, k: usize) -> Vec<T> {
    let mut out = vec![T::from(1)];
    for i in 1..=k {
        let next = out[i - 1].clone() * T::from(x);
        out.push(next);
    }
    out
}

fn to_i64(v: &BigInt) -> i64 {
    v.to_i64().expect("coefficient fits i64 in this tier")
}

fn to_i128(v: &BigInt) -> i128 {
    v.to_i128().expect("coefficient fits i128 in this tier")
}

/// Visit every solution of `|F| <= t` in the region, with the fiber solver
/// of the given strategy; `visit` receives `(x, y, z)` and returns nothing.
/// Work is split over `x` and partial results are merged in `x` order.
pub fn scan_solutions<A, V>(
    f: &IntegerForm,
    b: u64,
    t: &BigInt,
    region: Region,
    strategy: Strategy,
    init: impl Fn() -> A + Sync + Send,
    visit: V,
    merge: impl Fn(A, A) -> A + Sync + Send,
) -> A
where
    A: Send,
    V: Fn(&mut A, i64, i64, i64) + Sync + Send,
{
    if fits(f, b, 62) {
        let t = t.to_i64().unwrap_or(i64::MAX / 4);
        scan_tier::<i64, A, V>(f, b, t, region, strategy, &init, &visit, &merge, to_i64)
    } else if fits(f, b, 126) {
        let t = t.to_i128().unwrap_or(i128::MAX / 4);
        scan_tier::<i128, A, V>(f, b, t, region, strategy, &init, &visit, &merge, to_i128)
    } else {
        scan_tier::<BigInt, A, V>(f, b, t.clone(), region, strategy, &init, &visit, &merge, |v| v.clone())
    }
}

#[allow(clippy::too_many_arguments)]
fn scan_tier<T, A, V>(
    f: &IntegerForm,
    b: u64,
    t: T,
    region: Region,
    strategy: Strategy,
    init: &(impl Fn() -> A + Sync + Send),
    visit: &V,
    merge: &(impl Fn(A, A) -> A + Sync + Send),
    conv: impl Fn(&BigInt) -> T,
) -> A
where
    T: Ring,
    A: Send,
    V: Fn(&mut A, i64, i64, i64) + Sync + Send,
{
    let fiber = Fiber::<T>::new(f, conv);
    let k = fiber.k;
    let bi = b as i64;
    let half = bi / 2;
    let xs: Vec<i64> = (-bi..=bi).collect();
    let partials: Vec<A> = xs
        .par_iter()
        .map(|&x| {
            let mut acc = init();
            let xp = powers::<T>(x, k);
            for y in -bi..=bi {
                let yp = powers::<T>(y, k);
                let c = fiber.coefficients(&xp, &yp);
                let mxy = x.abs().max(y.abs());
                // annulus: B/2 < max <=> 2 max > B
                let ranges: Vec<(i64, i64)> = match region {
                    Region::Cube => vec![(-bi, bi)],
                    Region::Annulus if 2 * mxy > bi => vec![(-bi, bi)],
                    Region::Annulus => vec![(-bi, -half - 1), (half + 1, bi)],
                };
                for (lo, hi) in ranges {
                    if lo > hi {
                        continue;
                    }
                    match strategy {
                        Strategy::RootIsolation => {
                            for (s, e) in sublevel_intervals(&c, &t, &T::from(lo), &T::from(hi)) {
                                let s = format_i64(&s);
                                let e = format_i64(&e);
                                for z in s..=e {
                                    visit(&mut acc, x, y, z);
                                }
                            }
                        }
                        Strategy::Naive => {
                            let nt = -t.clone();
                            for z in lo..=hi {
                                let v = horner(&c, &T::from(z));
                                if v >= nt && v <= t {
                                    visit(&mut acc, x, y, z);
                                }
                            }
                        }
                    }
                }
            }
            acc
        })
        .collect();
    let mut it = partials.into_iter();
    let first = it.next().unwrap_or_else(init);
    it.fold(first, |a, p| merge(a, p))
}

fn format_i64<T: Ring>(v: &T) -> i64 {
    v.to_i64().expect("endpoint within [-B, B]")
}

/// Decides membership of points in the tangent lines at flexes.
pub struct TangentExcluder<'a> {
    report: &'a FlexReport,
    product: IntegerForm,
    irrational_part: IntegerForm,
    /// Distinct rational lines with the smallest flex id carrying each.
    rational: Vec<(usize, [BigInt; 3])>,
    canonical: BTreeMap<usize, usize>,
}

impl<'a> TangentExcluder<'a> {
    pub fn new(report: &'a FlexReport) -> Result<Self> {
        let product = report.conjugate_product_form.clone();
        let mut rational: Vec<(usize, [BigInt; 3])> = Vec::new();
        let mut canonical = BTreeMap::new();
        for (id, c) in &report.rational_tangents {
            match rational.iter().find(|(_, d)| d == c) {
                Some((first, _)) => {
                    canonical.insert(*id, *first);
                }
                None => {
                    canonical.insert(*id, *id);
                    rational.push((*id, c.clone()));
                }
            }
        }
        let mut irr = product.clone();
        for (_, c) in &rational {
            let l = IntegerForm::linear(c);
            while let Some(q) = irr.div_exact(&l) {
                irr = q;
                if irr.degree() == 0 {
                    break;
                }
            }
        }
        Ok(TangentExcluder { report, product, irrational_part: irr, rational, canonical })
    }

    /// Line keys through `p`; empty when `p` is on no tangent line.
    pub fn lines_through(&self, p: &[BigInt; 3]) -> Vec<String> {
        if self.report.total_flexes == 0 || !self.product.evaluate(p).map(|v| v.is_zero()).unwrap_or(false) {
            return Vec::new();
        }
        let on_irrational = self.irrational_part.degree() > 0
            && self.irrational_part.evaluate(p).map(|v| v.is_zero()).unwrap_or(false);
        if !on_irrational {
            return self
                .rational
                .iter()
                .filter(|(_, c)| (&c[0] * &p[0] + &c[1] * &p[1] + &c[2] * &p[2]).is_zero())
                .map(|(id, _)| format!("T{}", id))
                .collect();
        }
        let inc = self.report.incidence(p);
        let mut keys: Vec<String> = Vec::new();
        for id in &inc.real_ids {
            let k = format!("T{}", self.canonical.get(id).unwrap_or(id));
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
        for _ in inc.real_ids.len()..inc.total {
            keys.push("complex".to_string());
        }
        keys
    }
}

#[derive(Default)]
struct Tally {
    n: u64,
    n_star: u64,
    per_line: BTreeMap<String, u64>,
    excluded: u64,
    overlap: u64,
}

fn merge_tally(mut a: Tally, b: Tally) -> Tally {
    a.n += b.n;
    a.n_star += b.n_star;
    a.excluded += b.excluded;
    a.overlap += b.overlap;
    for (k, v) in b.per_line {
        *a.per_line.entry(k).or_insert(0) += v;
    }
    a
}

fn gcd3(x: i64, y: i64, z: i64) -> i64 {
    x.gcd(&y).gcd(&z)
}

/// Singularity gate shared by the counting entry points.
pub fn singularity_gate(f: &IntegerForm, allow_unverified: bool) -> Result<String> {
    match f.singularity_scan(&ScanBudget::default())? {
        SingularityVerdict::NonsingularCertified => Ok("certified".into()),
        SingularityVerdict::SingularWithWitness(w) if allow_unverified => Ok(format!("override-singular({},{},{})", w.x, w.y, w.z)),
        SingularityVerdict::Inconclusive if allow_unverified => Ok("override-inconclusive".into()),
        SingularityVerdict::SingularWithWitness(w) => {
            Err(Error::precondition(format!("form is singular at ({}, {}, {})", w.x, w.y, w.z)))
        }
        SingularityVerdict::Inconclusive => Err(Error::precondition("singularity scan inconclusive; pass the override to proceed")),
    }
}

/// Exact `N_gamma(F, B)` and, with flexes, `N*_gamma(F, B)`.
pub fn count_gamma(q: &CountQuery, flexes: Option<&FlexReport>) -> Result<CountReport> {
    let singularity = singularity_gate(&q.form, q.allow_unverified)?;
    let start = Instant::now();
    let t = q.threshold();
    let excluder = match flexes {
        Some(r) => Some(TangentExcluder::new(r)?),
        None => None,
    };
    let f = &q.form;
    let b = q.b as i64;
    let tally = scan_solutions(
        f,
        q.b,
        &t,
        Region::Annulus,
        q.strategy,
        Tally::default,
        |acc: &mut Tally, x, y, z| {
            if gcd3(x, y, z) != 1 {
                return;
            }
            let p = [BigInt::from(x), BigInt::from(y), BigInt::from(z)];
            let v = f.evaluate(&p).expect("ternary");
            let m = x.abs().max(y.abs()).max(z.abs());
            assert!(v.abs() <= t && 2 * m > b && m <= b, "enumerated point fails re-verification");
            acc.n += 1;
            if let Some(ex) = &excluder {
                let keys = ex.lines_through(&p);
                if keys.is_empty() {
                    acc.n_star += 1;
                } else {
                    acc.excluded += 1;
                    acc.overlap += keys.len() as u64 - 1;
                    for k in keys {
                        *acc.per_line.entry(k).or_insert(0) += 1;
                    }
                }
            }
        },
        merge_tally,
    );
    let wall_ms = if q.record_time { start.elapsed().as_millis() as u64 } else { 0 };
    Ok(CountReport {
        form_id: q.form_id.clone(),
        b: q.b,
        gamma: q.gamma.to_string(),
        tau: q.tau().to_string(),
        threshold: t.to_string(),
        n: tally.n,
        n_star: excluder.as_ref().map(|_| tally.n_star),
        per_line: tally.per_line,
        excluded_total: tally.excluded,
        overlap: tally.overlap,
        strategy: q.strategy.tag().to_string(),
        singularity,
        wall_ms,
    })
}

/// All primitive solutions of `|F| <= t` in the region, sorted.
pub fn enumerate_solutions(f: &IntegerForm, b: u64, t: &BigInt, region: Region) -> Vec<[i64; 3]> {
    let mut v = scan_solutions(
        f,
        b,
        t,
        region,
        Strategy::RootIsolation,
        Vec::new,
        |acc: &mut Vec<[i64; 3]>, x, y, z| {
            if gcd3(x, y, z) == 1 {
                acc.push([x, y, z]);
            }
        },
        |mut a, b| {
            a.extend(b);
            a
        },
    );
    v.sort();
    v
}

/// `N_F(B)`: primitive zeros in the full cube `max(|x|,|y|,|z|) <= B`.
pub fn count_on_curve(f: &IntegerForm, b: u64) -> Result<u64> {
    if f.nvars() != 3 {
        return Err(Error::precondition("count_on_curve needs a ternary form"));
    }
    let zero = BigInt::zero();
    Ok(scan_solutions(
        f,
        b,
        &zero,
        Region::Cube,
        Strategy::RootIsolation,
        || 0u64,
        |acc: &mut u64, x, y, z| {
            if gcd3(x, y, z) == 1 {
                let v = f.evaluate_i64(&[x, y, z]).expect("ternary");
                assert!(v.is_zero(), "enumerated point fails re-verification");
                *acc += 1;
            }
        },
        |a, b| a + b,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{flex_report, FlexOptions};

    fn f5() -> IntegerForm {
        IntegerForm::parse(3, "x^5 + y^5 - z^5").unwrap()
    }

    fn naive(f: &IntegerForm, b: i64, t: i64) -> u64 {
        let mut n = 0;
        for x in -b..=b {
            for y in -b..=b {
                for z in -b..=b {
                    let m = x.abs().max(y.abs()).max(z.abs());
                    if 2 * m > b && gcd3(x, y, z) == 1 && f.evaluate_i64(&[x, y, z]).unwrap().abs() <= BigInt::from(t) {
                        n += 1;
                    }
                }
            }
        }
        n
    }

    #[test]
    fn threshold_is_floor_of_power() {
        assert_eq!(threshold(10, &BigRational::new(1.into(), 2.into())), BigInt::from(3));
        assert_eq!(threshold(16, &BigRational::new(3.into(), 2.into())), BigInt::from(64));
        assert_eq!(threshold(7, &BigRational::from_integer(0.into())), BigInt::from(1));
    }

    #[test]
    fn fermat_small_goldens() {
        let q = CountQuery::new(f5(), 1, BigRational::from_integer(0.into())).unwrap();
        assert_eq!(count_gamma(&q, None).unwrap().n, 18);
        assert_eq!(count_on_curve(&f5(), 10).unwrap(), 6);
        let fr = flex_report(&f5(), &FlexOptions::default()).unwrap();
        let q = CountQuery::new(f5(), 4, BigRational::from_integer(0.into())).unwrap();
        let r = count_gamma(&q, Some(&fr)).unwrap();
        assert_eq!(r.n, naive(&f5(), 4, 1));
        assert_eq!(r.n - r.n_star.unwrap(), 24);
        assert_eq!(r.overlap, 0);
        assert_eq!(r.per_line.values().sum::<u64>(), 24);
    }

    #[test]
    fn strategies_agree_with_triple_loop() {
        let f = IntegerForm::parse(3, "x^5 + 2*y^5 - 3*z^5").unwrap();
        for b in [3u64, 7, 12] {
            for g in 0..3i64 {
                let gamma = BigRational::from_integer(g.into());
                let mut q = CountQuery::new(f.clone(), b, gamma).unwrap();
                let t = q.threshold().to_i64().unwrap();
                let want = naive(&f, b as i64, t);
                assert_eq!(count_gamma(&q, None).unwrap().n, want);
                q.strategy = Strategy::Naive;
                assert_eq!(count_gamma(&q, None).unwrap().n, want);
            }
        }
    }

    #[test]
    fn csv_row_layout() {
        let q = CountQuery::new(f5(), 2, BigRational::new(1.into(), 2.into())).unwrap().with_id("F5");
        let r = count_gamma(&q, None).unwrap();
        let row = r.csv_row();
        assert!(row.starts_with("F5,2,1/2,9/2,"));
        assert_eq!(row.split(',').count(), CountReport::csv_header().split(',').count());
    }
}
