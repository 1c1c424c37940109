//! Box covering, auxiliary forms and the end-to-end run.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

use super::params::{dm_parameters, DMParameters, DEFAULT_LAMBDA};
use crate::counting::gamma::singularity_gate;
use crate::counting::{enumerate_solutions, CountQuery, Region};
use crate::error::{Error, Result};
use crate::forms::{monomials, IntegerForm, MultiIndex, PrimitiveTriple};
use crate::poly::linalg::Echelon;
use crate::poly::{BiPoly, RatInterval};

/// Which coordinate dominates; the other two, divided by it, give the box point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Chart {
    Z,
    X,
    Y,
}

impl Chart {
    pub fn of(p: &[i64; 3]) -> Chart {
        let [x, y, z] = p.map(|c| c.abs());
        if z >= x.max(y) {
            Chart::Z
        } else if x >= y {
            Chart::X
        } else {
            Chart::Y
        }
    }

    /// Index of the dominant coordinate.
    pub fn var(&self) -> usize {
        match self {
            Chart::X => 0,
            Chart::Y => 1,
            Chart::Z => 2,
        }
    }

    /// The two normalised coordinates `(t1, t2)` as numerator indices.
    fn others(&self) -> [usize; 2] {
        match self {
            Chart::Z => [0, 1],
            Chart::X => [1, 2],
            Chart::Y => [0, 2],
        }
    }
}

/// Half-open box `[v/R, (v+1)/R) x [w/R, (w+1)/R)` in a chart, `R = M0 M`.
#[derive(Clone, Debug, Serialize)]
pub struct CoverBox {
    pub chart: Chart,
    pub v: i64,
    pub w: i64,
    pub points: Vec<[i64; 3]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoxCover {
    pub m: u64,
    pub m0: u64,
    pub boxes: Vec<CoverBox>,
}

impl BoxCover {
    pub fn resolution(&self) -> u64 {
        self.m * self.m0
    }

    pub fn num_points(&self) -> usize {
        self.boxes.iter().map(|b| b.points.len()).sum()
    }
}

/// Box index of `num/den` at resolution `r`: `floor(r num / den)`.
fn cell(num: i64, den: i64, r: u64) -> i64 {
    let (n, d) = if den < 0 { (-(num as i128), -(den as i128)) } else { (num as i128, den as i128) };
    (n * r as i128).div_euclid(d) as i64
}

/// Assign each point to its chart and half-open box; boxes sorted by `(chart, v, w)`.
pub fn assign_boxes(points: &[[i64; 3]], m: u64, m0: u64) -> BoxCover {
    let r = m * m0;
    let mut map: BTreeMap<(Chart, i64, i64), Vec<[i64; 3]>> = BTreeMap::new();
    for p in points {
        let c = Chart::of(p);
        let [i, j] = c.others();
        let d = p[c.var()];
        let key = (c, cell(p[i], d, r), cell(p[j], d, r));
        map.entry(key).or_default().push(*p);
    }
    BoxCover {
        m,
        m0,
        boxes: map.into_iter().map(|((chart, v, w), points)| CoverBox { chart, v, w, points }).collect(),
    }
}

/// Primitive solutions of the query sorted into boxes of side `1/(M0 M)`.
pub fn cover_boxes(q: &CountQuery, m: u64, m0: u64) -> Result<BoxCover> {
    if m == 0 || m0 == 0 {
        return Err(Error::precondition("M and M0 must be positive"));
    }
    let pts = enumerate_solutions(&q.form, q.b, &q.threshold(), Region::Annulus);
    Ok(assign_boxes(&pts, m, m0))
}

/// The curve is a single sheet over the box when one partial derivative of
/// the dehomogenised form has no zero on the closed box.
fn single_sheet(charts: &BTreeMap<Chart, [BiPoly; 2]>, b: &CoverBox, r: u64) -> bool {
    let rr = BigInt::from(r);
    let iv = |i: i64| RatInterval::new(BigRational::new(i.into(), rr.clone()), BigRational::new((i + 1).into(), rr.clone()));
    let (t1, t2) = (iv(b.v), iv(b.w));
    charts[&b.chart].iter().any(|d| !d.eval_interval(&t1, &t2).contains_zero())
}

/// Smallest power of two `M0 <= cap` for which every occupied box is single-sheet.
pub fn calibrate_m0(f: &IntegerForm, points: &[[i64; 3]], m: u64, cap: u64) -> Result<u64> {
    let mut charts = BTreeMap::new();
    for c in [Chart::Z, Chart::X, Chart::Y] {
        let g = f.dehomogenize(c.var())?;
        charts.insert(c, [g.dx(), g.dy()]);
    }
    let mut m0 = 1u64;
    while m0 <= cap {
        let cover = assign_boxes(points, m, m0);
        let ok = cover.boxes.par_iter().all(|b| single_sheet(&charts, b, m * m0));
        if ok {
            return Ok(m0);
        }
        m0 *= 2;
    }
    Err(Error::certification(format!("no M0 up to {} makes every box single-sheet", cap)))
}

/// Auxiliary form of degree `degree` with coprime integer coefficients in
/// term order (`x^D, x^(D-1) y, ...`), first nonzero coefficient positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxiliaryForm {
    pub degree: u32,
    pub coefficients: Vec<BigInt>,
}

impl AuxiliaryForm {
    pub fn form(&self) -> IntegerForm {
        let terms: Vec<(MultiIndex, BigInt)> = monomials(3, self.degree).into_iter().zip(self.coefficients.iter().cloned()).collect();
        IntegerForm::new(3, self.degree, terms).expect("valid auxiliary form")
    }

    pub fn max_bits(&self) -> u64 {
        self.coefficients.iter().map(|c| c.bits()).max().unwrap_or(0)
    }
}

fn monomial_row(exps: &[MultiIndex], p: &[BigInt; 3]) -> Vec<BigInt> {
    let d = exps.first().map(|e| e.degree()).unwrap_or(0) as usize;
    let pw: Vec<Vec<BigInt>> = p
        .iter()
        .map(|c| {
            let mut v = vec![BigInt::from(1)];
            for i in 1..=d {
                let next = &v[i - 1] * c;
                v.push(next);
            }
            v
        })
        .collect();
    exps.iter().map(|e| &pw[0][e.0[0] as usize] * &pw[1][e.0[1] as usize] * &pw[2][e.0[2] as usize]).collect()
}

/// The canonical form of degree `d` vanishing at all points, or `None` when
/// the evaluation matrix has full column rank.
pub fn fit_auxiliary_form(points: &[PrimitiveTriple], d: u32) -> Option<AuxiliaryForm> {
    let pts: Vec<[BigInt; 3]> = points.iter().map(|p| [p.x.clone(), p.y.clone(), p.z.clone()]).collect();
    fit_points(&pts, d)
}

fn fit_points(points: &[[BigInt; 3]], d: u32) -> Option<AuxiliaryForm> {
    let exps = monomials(3, d);
    let mut ech = Echelon::new(exps.len());
    for p in points {
        ech.insert(&monomial_row(&exps, p));
        if ech.is_full() {
            return None;
        }
    }
    ech.canonical_kernel_vector().map(|coefficients| AuxiliaryForm { degree: d, coefficients })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoxResult {
    pub chart: Chart,
    pub v: i64,
    pub w: i64,
    pub points: usize,
    /// `None` when no degree up to `D_max` works.
    pub d_used: Option<u32>,
    #[serde(serialize_with = "ser_coeffs")]
    pub coefficients: Option<Vec<BigInt>>,
}

fn ser_coeffs<S: serde::Serializer>(c: &Option<Vec<BigInt>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match c {
        None => s.serialize_none(),
        Some(v) => s.collect_seq(v.iter().map(|x| x.to_string())),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub degree1: usize,
    pub degree2: usize,
    pub degree3_plus: usize,
    pub uncovered: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub form_id: String,
    pub parameters: DMParameters,
    pub m0: u64,
    pub resolution: u64,
    pub solutions: usize,
    pub occupied_boxes: usize,
    pub classification: Classification,
    pub max_coefficient_bits: u64,
    pub boxes: Vec<BoxResult>,
}

impl PipelineReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Error when some box has no auxiliary form.
    pub fn check_complete(&self) -> Result<()> {
        if self.classification.uncovered > 0 {
            return Err(Error::Uncovered(format!("{} boxes without an auxiliary form", self.classification.uncovered)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub d_max: u32,
    pub lambda: f64,
    /// Largest `M0` tried by the calibration.
    pub m0_cap: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { d_max: 6, lambda: DEFAULT_LAMBDA, m0_cap: 1 << 16 }
    }
}

fn projective_key(p: &[i64; 3]) -> [BigInt; 3] {
    let s = if p.iter().find(|c| **c != 0).map(|c| *c < 0).unwrap_or(false) { -1 } else { 1 };
    p.map(|c| BigInt::from(c * s))
}

fn fit_box(b: &CoverBox, d_max: u32) -> BoxResult {
    // antipodal points give the same row up to sign
    let mut pts: Vec<[BigInt; 3]> = b.points.iter().map(projective_key).collect();
    pts.sort();
    pts.dedup();
    let mut found = None;
    for d in 1..=d_max {
        if let Some(a) = fit_points(&pts, d) {
            let form = a.form();
            for p in &b.points {
                let v = form.evaluate_i64(p).expect("ternary");
                assert!(v.is_zero(), "auxiliary form does not vanish at {:?}", p);
            }
            found = Some(a);
            break;
        }
    }
    BoxResult {
        chart: b.chart,
        v: b.v,
        w: b.w,
        points: b.points.len(),
        d_used: found.as_ref().map(|a| a.degree),
        coefficients: found.map(|a| a.coefficients),
    }
}

/// Fit a form of minimal degree `<= d_max` in every occupied box.
pub fn fit_cover(cover: &BoxCover, d_max: u32) -> Vec<BoxResult> {
    cover.boxes.par_iter().map(|b| fit_box(b, d_max)).collect()
}

pub fn classify(results: &[BoxResult]) -> Classification {
    let mut c = Classification::default();
    for r in results {
        match r.d_used {
            Some(1) => c.degree1 += 1,
            Some(2) => c.degree2 += 1,
            Some(_) => c.degree3_plus += 1,
            None => c.uncovered += 1,
        }
    }
    c
}

/// Solutions, calibrated cover and auxiliary forms for a planar query.
pub fn run_pipeline(q: &CountQuery, cfg: &PipelineConfig) -> Result<PipelineReport> {
    singularity_gate(&q.form, q.allow_unverified)?;
    if cfg.d_max == 0 {
        return Err(Error::precondition("D_max must be positive"));
    }
    let k = q.form.degree();
    let base = dm_parameters(3, k, &q.gamma, q.b, 1, cfg.lambda, cfg.d_max as usize)?;
    let points = enumerate_solutions(&q.form, q.b, &q.threshold(), Region::Annulus);
    let m0 = calibrate_m0(&q.form, &points, base.m, cfg.m0_cap)?;
    let parameters = dm_parameters(3, k, &q.gamma, q.b, m0, cfg.lambda, cfg.d_max as usize)?;
    let cover = assign_boxes(&points, base.m, m0);
    let boxes = fit_cover(&cover, cfg.d_max);
    let classification = classify(&boxes);
    let max_coefficient_bits = boxes
        .iter()
        .filter_map(|b| b.coefficients.as_ref())
        .flat_map(|c| c.iter().map(|x| x.abs().bits()))
        .max()
        .unwrap_or(0);
    Ok(PipelineReport {
        form_id: q.form_id.clone(),
        m0,
        resolution: base.m * m0,
        solutions: points.len(),
        occupied_boxes: boxes.len(),
        classification,
        max_coefficient_bits,
        parameters,
        boxes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: i64, y: i64, z: i64) -> PrimitiveTriple {
        PrimitiveTriple::from_i64(x, y, z).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|c| BigInt::from(*c)).collect()
    }

    #[test]
    fn kernel_examples() {
        let a = fit_auxiliary_form(&[pt(1, 0, 1), pt(1, 1, 1), pt(2, 1, 2), pt(3, 2, 3)], 1).unwrap();
        assert_eq!(a.coefficients, ints(&[1, 0, -1]));
        let pts = [pt(1, 0, 1), pt(0, 1, 1), pt(3, 4, 5), pt(5, 12, 13), pt(8, 15, 17)];
        let a = fit_auxiliary_form(&pts, 2).unwrap();
        assert_eq!(a.coefficients, ints(&[1, 0, 0, 1, 0, -1]));
        let a = fit_auxiliary_form(&[pt(1, 1, 1)], 1).unwrap();
        assert_eq!(a.coefficients, ints(&[1, -1, 0]));
        assert!(fit_auxiliary_form(&[pt(1, 0, 0), pt(0, 1, 0), pt(0, 0, 1)], 1).is_none());
    }

    #[test]
    fn boxes_partition_points() {
        let pts = vec![[3, 4, 5], [-3, -4, -5], [5, 1, 2], [1, -7, 3], [2, 2, 2]];
        let c = assign_boxes(&pts, 4, 2);
        assert_eq!(c.num_points(), pts.len());
        let first = &c.boxes[0];
        assert_eq!((first.chart, first.v, first.w), (Chart::Z, 4, 6));
        assert_eq!(first.points.len(), 2);
    }

    #[test]
    fn fermat_pipeline_small() {
        let f = IntegerForm::parse(3, "x^5 + y^5 - z^5").unwrap();
        let q = CountQuery::new(f, 64, BigRational::new(5.into(), 2.into())).unwrap();
        let rep = run_pipeline(&q, &PipelineConfig::default()).unwrap();
        assert_eq!(rep.classification.uncovered, 0);
        let total: usize = rep.boxes.iter().map(|b| b.points).sum();
        assert_eq!(total, rep.solutions);
        assert!(rep.classification.degree1 > 0);
    }
}
