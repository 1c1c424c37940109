//! Inflection points, tangent lines and contact orders of plane curves.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::forms::{unimodular_sequence, IntegerForm};
use crate::poly::interval::RatInterval;
use crate::poly::linalg::primitive_integer_vector;
use crate::poly::quotient::QuotientRing;
use crate::poly::upoly::to_f64;
use crate::poly::{real_roots, resultant, resultant_y, subresultant1_y, BiPoly, QPoly, RealAlg};

#[derive(Clone, Debug)]
pub struct FlexOptions {
    pub precision_bits: u32,
    pub precision_cap_bits: u32,
    pub seed: u64,
    pub max_transforms: usize,
}

impl Default for FlexOptions {
    fn default() -> Self {
        FlexOptions { precision_bits: 128, precision_cap_bits: 4096, seed: 0xf1e7, max_transforms: 40 }
    }
}

#[derive(Clone, Debug)]
pub struct TangentLine {
    /// Coefficients as elements of `Q[x]/(R*)`.
    pub coeffs: [QPoly; 3],
    /// Enclosures at the flex.
    pub values: [RatInterval; 3],
    /// Coprime integer coefficients when the line is rational.
    pub rational: Option<[BigInt; 3]>,
}

#[derive(Clone, Debug)]
pub struct Flex {
    pub id: usize,
    pub root: RealAlg,
    pub point: [RatInterval; 3],
    pub tangent: TangentLine,
    pub contact: u32,
}

impl Flex {
    /// Point scaled so that its largest coordinate has absolute value 1.
    pub fn point_f64(&self) -> [f64; 3] {
        let v: Vec<f64> = self.point.iter().map(|i| i.mid_f64()).collect();
        normalize3(&v)
    }

    pub fn tangent_f64(&self) -> [f64; 3] {
        let v: Vec<f64> = self.tangent.values.iter().map(|i| i.mid_f64()).collect();
        normalize3(&v)
    }
}

fn normalize3(v: &[f64]) -> [f64; 3] {
    let m = v.iter().cloned().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
    if m == 0.0 {
        return [0.0; 3];
    }
    [v[0] / m, v[1] / m, v[2] / m]
}

/// Algebraic description of all (complex) flexes: the roots of `modulus`
/// parametrise them, with `point` and `tangent` given as ring elements.
#[derive(Clone, Debug)]
pub struct FlexField {
    pub ring: QuotientRing,
    pub point: [QPoly; 3],
    pub tangent: [QPoly; 3],
    pub transform: Vec<Vec<BigInt>>,
}

#[derive(Clone, Debug)]
pub struct FlexReport {
    pub degree: u32,
    /// Real flexes.
    pub flexes: Vec<Flex>,
    /// Number of distinct complex flexes, real ones included.
    pub total_flexes: usize,
    pub nu_max: u32,
    /// `(flex id, coefficients)` of the rational tangent lines.
    pub rational_tangents: Vec<(usize, [BigInt; 3])>,
    pub conjugate_product_form: IntegerForm,
    pub field: Option<FlexField>,
}

/// How many tangent lines pass through a point, and which real ones.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LineIncidence {
    pub total: usize,
    pub real_ids: Vec<usize>,
}

impl FlexReport {
    /// Exact incidence of the point with the tangent lines at all flexes.
    pub fn incidence(&self, p: &[BigInt]) -> LineIncidence {
        let Some(field) = &self.field else {
            return LineIncidence::default();
        };
        let a = &(&field.tangent[0].scale(&BigRational::from_integer(p[0].clone()))
            + &field.tangent[1].scale(&BigRational::from_integer(p[1].clone())))
            + &field.tangent[2].scale(&BigRational::from_integer(p[2].clone()));
        let g = field.ring.common_roots(&[a]);
        let total = g.deg();
        if total == 0 {
            return LineIncidence::default();
        }
        let real_ids = self.flexes.iter().filter(|f| f.root.is_root_of(&g)).map(|f| f.id).collect();
        LineIncidence { total, real_ids }
    }

    pub fn to_json(&self) -> Value {
        let flexes: Vec<Value> = self
            .flexes
            .iter()
            .map(|f| {
                let enc = |i: &RatInterval| json!([i.lo.to_string(), i.hi.to_string()]);
                json!({
                    "id": f.id,
                    "root": {
                        "poly": f.root.poly().to_primitive_ints().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                        "interval": [f.root.lo().to_string(), f.root.hi().to_string()],
                    },
                    "point_decimal": f.point_f64(),
                    "point_enclosure": f.point.iter().map(enc).collect::<Vec<_>>(),
                    "tangent_decimal": f.tangent_f64(),
                    "tangent_ring": f.tangent.coeffs.iter().map(|c| c.coeffs().iter().map(|r| r.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "tangent_rational": f.tangent.rational.as_ref().map(|r| r.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
                    "contact": f.contact,
                })
            })
            .collect();
        json!({
            "degree": self.degree,
            "total_flexes": self.total_flexes,
            "nu_max": self.nu_max,
            "modulus": self.field.as_ref().map(|f| f.ring.modulus().coeffs().iter().map(|r| r.to_string()).collect::<Vec<_>>()),
            "flexes": flexes,
            "rational_tangents": self.rational_tangents.iter().map(|(id, c)| json!({"id": id, "coeffs": c.iter().map(|v| v.to_string()).collect::<Vec<_>>()})).collect::<Vec<_>>(),
            "conjugate_product_form": serde_json::from_str::<Value>(&self.conjugate_product_form.to_json()).unwrap_or(Value::Null),
        })
    }
}

fn coefficient_of_pure_y(f: &IntegerForm) -> BigInt {
    let k = f.degree();
    f.coefficient(&[0, k, 0])
}

/// `F(x, 1, 0)`-type restriction: the binary form on z = 0 as a polynomial in y at x = 1.
fn at_infinity(f: &IntegerForm) -> QPoly {
    let mut c = vec![BigRational::zero(); f.degree() as usize + 1];
    for (e, v) in f.terms() {
        if e.0[2] == 0 {
            c[e.0[1] as usize] += BigRational::from_integer(v.clone());
        }
    }
    QPoly::new(c)
}

fn cross(ring: &QuotientRing, a: &[QPoly], b: &[QPoly]) -> [QPoly; 3] {
    [
        ring.reduce(&(&(&a[1] * &b[2]) - &(&a[2] * &b[1]))),
        ring.reduce(&(&(&a[2] * &b[0]) - &(&a[0] * &b[2]))),
        ring.reduce(&(&(&a[0] * &b[1]) - &(&a[1] * &b[0]))),
    ]
}

/// Simplest rational in the closed interval.
pub fn simplest_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    if hi.is_negative() {
        return -simplest_between(&-hi, &-lo);
    }
    if !lo.is_positive() {
        return BigRational::zero();
    }
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    let next = &fl + BigRational::one();
    if &next <= hi {
        return next;
    }
    let inner = simplest_between(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

struct Candidate {
    ring: QuotientRing,
    point: [QPoly; 3],
    transform: Vec<Vec<BigInt>>,
}

fn try_transform(f: &IntegerForm, h: &IntegerForm, t: &[Vec<BigInt>]) -> Option<Candidate> {
    let g = f.compose_linear(t);
    let hg = h.compose_linear(t);
    if coefficient_of_pure_y(&g).is_zero() || coefficient_of_pure_y(&hg).is_zero() {
        return None;
    }
    let gi = at_infinity(&g);
    let hi = at_infinity(&hg);
    if gi.gcd(&hi).deg() > 0 {
        return None;
    }
    let gb = g.dehomogenize(2).ok()?;
    let hb = hg.dehomogenize(2).ok()?;
    let r = resultant_y(&gb, &hb);
    if r.is_zero() {
        return None;
    }
    let rs = r.squarefree_part();
    let (s11, s10) = subresultant1_y(&gb, &hb);
    if rs.gcd(&s11).deg() > 0 {
        return None;
    }
    let ring = QuotientRing::new(rs);
    let inv = ring.inv(&s11)?;
    let y = ring.mul(&-&s10, &inv);
    let x = ring.reduce(&QPoly::x());
    let coords = [x, y, QPoly::one()];
    let point: Vec<QPoly> = (0..3)
        .map(|i| {
            let mut acc = QPoly::zero();
            for (j, c) in coords.iter().enumerate() {
                acc = &acc + &c.scale(&BigRational::from_integer(t[i][j].clone()));
            }
            ring.reduce(&acc)
        })
        .collect();
    Some(Candidate { ring, point: [point[0].clone(), point[1].clone(), point[2].clone()], transform: t.to_vec() })
}

/// Compute all flexes of a nonsingular ternary form.
pub fn flex_report(f: &IntegerForm, opts: &FlexOptions) -> Result<FlexReport> {
    if f.nvars() != 3 {
        return Err(Error::precondition("flex_report needs a ternary form"));
    }
    let k = f.degree();
    if k < 3 {
        return Ok(FlexReport {
            degree: k,
            flexes: Vec::new(),
            total_flexes: 0,
            nu_max: 0,
            rational_tangents: Vec::new(),
            conjugate_product_form: IntegerForm::zero(3, 0),
            field: None,
        });
    }
    let h = f.hessian_form()?;
    if h.is_zero() {
        return Err(Error::precondition("Hessian vanishes identically"));
    }
    let mut cand = None;
    for t in unimodular_sequence(3, opts.seed, opts.max_transforms, 1) {
        if let Some(c) = try_transform(f, &h, &t) {
            cand = Some(c);
            break;
        }
    }
    let Candidate { ring, point, transform } =
        cand.ok_or_else(|| Error::certification("no admissible coordinate change separates the flexes"))?;

    // certificates: the points lie on F and on the Hessian, tangents pass through them
    if !ring.is_zero(&ring.eval_form(f, &point)) || !ring.is_zero(&ring.eval_form(&h, &point)) {
        return Err(Error::certification("flex points do not satisfy F = H = 0"));
    }
    let grad = f.gradient();
    let tangent: Vec<QPoly> = grad.iter().map(|g| ring.eval_form(g, &point)).collect();
    let tangent = [tangent[0].clone(), tangent[1].clone(), tangent[2].clone()];
    let through = ring.reduce(
        &(&(&ring.mul(&tangent[0], &point[0]) + &ring.mul(&tangent[1], &point[1])) + &ring.mul(&tangent[2], &point[2])),
    );
    if !through.is_zero() {
        return Err(Error::certification("tangent does not pass through its flex"));
    }
    let total = ring.degree();
    if total > (3 * k * (k - 2)) as usize {
        return Err(Error::certification("more flexes than 3k(k-2)"));
    }

    // contact orders: split the flexes by which direction e_j gives a usable line parametrisation
    let mut remaining = ring.modulus().clone();
    let mut nu_max = 0u32;
    let mut directions: Vec<(QPoly, Vec<QPoly>)> = Vec::new();
    for j in 0..3 {
        if remaining.deg() == 0 {
            break;
        }
        let mut e = [QPoly::zero(), QPoly::zero(), QPoly::zero()];
        e[j] = QPoly::one();
        let v = cross(&ring, &tangent, &e);
        let bad = cross(&ring, &v, &point);
        let sub = QuotientRing::new(remaining.clone());
        let bad_g = sub.common_roots(&bad);
        let good = remaining.exact_div(&bad_g).monic();
        remaining = bad_g;
        if good.deg() == 0 {
            continue;
        }
        let coeffs = ring.eval_form_along_line(f, &point, &v);
        let gr = QuotientRing::new(good.clone());
        if !gr.is_zero(&coeffs[1]) || !gr.is_zero(&coeffs[2]) {
            return Err(Error::certification("tangent contact below 3 at a flex"));
        }
        let mut cur = good.clone();
        let mut i = 2;
        while cur.deg() > 0 && i < k as usize {
            i += 1;
            cur = QuotientRing::new(cur.clone()).common_roots(&[coeffs[i].clone()]);
        }
        if cur.deg() > 0 {
            return Err(Error::certification("tangent line is a component of the curve"));
        }
        nu_max = nu_max.max(i as u32);
        directions.push((good, coeffs));
    }
    if remaining.deg() > 0 {
        return Err(Error::certification("degenerate tangent direction"));
    }

    let product = product_form(&ring, &tangent)?;
    let hb = linear_factor_height_bound(&product);
    let bits = opts.precision_bits.min(opts.precision_cap_bits);
    let tol = BigRational::new(BigInt::one(), BigInt::one() << bits);
    let mut flexes = Vec::new();
    let mut rational_tangents = Vec::new();
    for (id, mut root) in real_roots(ring.modulus()).into_iter().enumerate() {
        root.refine_to(&tol);
        let pt = [
            root.eval_enclosure(&point[0], &tol),
            root.eval_enclosure(&point[1], &tol),
            root.eval_enclosure(&point[2], &tol),
        ];
        let tv = [
            root.eval_enclosure(&tangent[0], &tol),
            root.eval_enclosure(&tangent[1], &tol),
            root.eval_enclosure(&tangent[2], &tol),
        ];
        let mut contact = 0;
        for (good, coeffs) in &directions {
            if root.is_root_of(good) {
                let mut i = 3;
                while root.is_root_of(&coeffs[i]) {
                    i += 1;
                }
                contact = i as u32;
                break;
            }
        }
        let rational = rational_line(&mut root, &tangent, &hb);
        if let Some(r) = &rational {
            rational_tangents.push((id, r.clone()));
        }
        flexes.push(Flex {
            id,
            root,
            point: pt,
            tangent: TangentLine { coeffs: tangent.clone(), values: tv, rational },
            contact,
        });
    }
    Ok(FlexReport {
        degree: k,
        flexes,
        total_flexes: total,
        nu_max,
        rational_tangents,
        conjugate_product_form: product,
        field: Some(FlexField { ring, point, tangent, transform }),
    })
}

/// Decide whether the tangent at a real flex is a rational line. A rational
/// tangent is a linear factor of the product form, so its coefficients are
/// bounded by `height_bound`; an enclosure of each coefficient ratio narrower
/// than `1/height_bound^2` then pins the only possible candidate, the simplest
/// rational inside it, which is verified exactly.
fn rational_line(root: &mut RealAlg, tangent: &[QPoly; 3], height_bound: &BigInt) -> Option<[BigInt; 3]> {
    if let Some(r) = root.as_rational() {
        let v: Vec<BigRational> = tangent.iter().map(|c| c.eval(r)).collect();
        let p = primitive_integer_vector(&v);
        return Some([p[0].clone(), p[1].clone(), p[2].clone()]);
    }
    let m = (0..3).find(|&i| !root.is_root_of(&tangent[i]))?;
    let gap = BigRational::new(BigInt::one(), height_bound * height_bound);
    let mut ratios = Vec::new();
    for i in 0..3 {
        if i == m {
            ratios.push(BigRational::one());
            continue;
        }
        let mut tol = gap.clone() / BigRational::from_integer(BigInt::from(4));
        let q = loop {
            let den = root.eval_enclosure(&tangent[m], &tol);
            let num = root.eval_enclosure(&tangent[i], &tol);
            if let Some(inv) = den.recip() {
                let q = &num * &inv;
                if q.width() < gap {
                    break q;
                }
            }
            tol = &tol / BigRational::from_integer(BigInt::from(1u64 << 16));
        };
        let guess = simplest_between(&q.lo, &q.hi);
        if guess.denom() > height_bound || guess.numer().abs() > *height_bound {
            return None;
        }
        if !root.is_root_of(&(&tangent[i] - &tangent[m].scale(&guess))) {
            return None;
        }
        ratios.push(guess);
    }
    let p = primitive_integer_vector(&ratios);
    Some([p[0].clone(), p[1].clone(), p[2].clone()])
}

/// Bound on the coefficients of any integer linear factor of `n`: a
/// Mignotte-type bound `4^deg * |n|_2` on the dehomogenised form.
fn linear_factor_height_bound(n: &IntegerForm) -> BigInt {
    let mut s2 = BigInt::zero();
    for (_, c) in n.terms() {
        s2 += c * c;
    }
    let norm = s2.sqrt() + BigInt::one();
    (BigInt::one() << (2 * n.degree() as usize)) * norm
}

/// Norm of the tangent line form over the flex algebra, as a primitive integer form.
fn product_form(ring: &QuotientRing, tangent: &[QPoly; 3]) -> Result<IntegerForm> {
    let n = ring.degree();
    let m = ring.modulus();
    let pts: Vec<BigRational> = (0..=n as i64).map(|v| BigRational::from_integer(BigInt::from(v))).collect();
    // values N(X, Y, 1) on the grid, then interpolate in Y for each X and in X per coefficient
    let mut per_x: Vec<QPoly> = Vec::with_capacity(n + 1);
    for xv in &pts {
        let mut ys = Vec::with_capacity(n + 1);
        for yv in &pts {
            let a = &(&tangent[0].scale(xv) + &tangent[1].scale(yv)) + &tangent[2];
            let a = ring.reduce(&a);
            ys.push(resultant(m, &a));
        }
        per_x.push(crate::poly::linalg::interpolate(&pts, &ys));
    }
    let mut terms: Vec<(usize, usize, BigRational)> = Vec::new();
    for j in 0..=n {
        let vals: Vec<BigRational> = per_x.iter().map(|p| p.coeff(j)).collect();
        let cx = crate::poly::linalg::interpolate(&pts, &vals);
        for (i, c) in cx.coeffs().iter().enumerate() {
            if !c.is_zero() {
                terms.push((i, j, c.clone()));
            }
        }
    }
    let bp = BiPoly::from_terms(&terms);
    if bp.total_degree() > n {
        return Err(Error::certification("product form has excess degree"));
    }
    let coeffs: Vec<BigRational> = terms.iter().map(|t| t.2.clone()).collect();
    let ints = primitive_integer_vector(&coeffs);
    let scaled: Vec<(usize, usize, BigRational)> =
        terms.iter().zip(ints).map(|(t, c)| (t.0, t.1, BigRational::from_integer(c))).collect();
    IntegerForm::rehomogenize(&BiPoly::from_terms(&scaled), n as u32, 2)
}

/// Contact order of a line with a curve at a rational point, by direct
/// expansion along the line. Used as an independent check.
pub fn contact_at_rational_point(f: &IntegerForm, p: &[BigInt; 3], line: &[BigInt; 3]) -> Option<u32> {
    // direction on the line, not proportional to p
    let dirs = [
        [BigInt::zero(), -line[2].clone(), line[1].clone()],
        [line[2].clone(), BigInt::zero(), -line[0].clone()],
        [-line[1].clone(), line[0].clone(), BigInt::zero()],
    ];
    for v in dirs.iter() {
        let cr = [&v[1] * &p[2] - &v[2] * &p[1], &v[2] * &p[0] - &v[0] * &p[2], &v[0] * &p[1] - &v[1] * &p[0]];
        if cr.iter().all(|c| c.is_zero()) {
            continue;
        }
        let ring = QuotientRing::new(QPoly::x());
        let pp: Vec<QPoly> = p.iter().map(|c| QPoly::from_bigints(std::slice::from_ref(c))).collect();
        let vv: Vec<QPoly> = v.iter().map(|c| QPoly::from_bigints(std::slice::from_ref(c))).collect();
        let coeffs = ring.eval_form_along_line(f, &pp, &vv);
        return coeffs.iter().position(|c| !c.is_zero()).map(|i| i as u32);
    }
    None
}

pub fn interval_to_f64(i: &RatInterval) -> f64 {
    to_f64(&i.mid())
}

pub fn bigint_to_f64(b: &BigInt) -> f64 {
    b.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::upoly::ratio;

    #[test]
    fn simplest_rationals() {
        assert_eq!(simplest_between(&ratio(3, 10), &ratio(4, 10)), ratio(1, 3));
        assert_eq!(simplest_between(&ratio(-7, 5), &ratio(-6, 5)), ratio(-4, 3));
        assert_eq!(simplest_between(&ratio(-1, 5), &ratio(1, 5)), ratio(0, 1));
        assert_eq!(simplest_between(&ratio(2, 1), &ratio(2, 1)), ratio(2, 1));
    }

    fn f5() -> IntegerForm {
        IntegerForm::parse(3, "x^5 + y^5 - z^5").unwrap()
    }

    #[test]
    fn fermat_quintic_flexes() {
        let r = flex_report(&f5(), &FlexOptions::default()).unwrap();
        assert_eq!(r.total_flexes, 15);
        assert_eq!(r.nu_max, 5);
        assert_eq!(r.flexes.len(), 3);
        assert!(r.flexes.iter().all(|f| f.contact == 5));
        let mut lines: Vec<Vec<i64>> = r
            .rational_tangents
            .iter()
            .map(|(_, c)| c.iter().map(|v| v.to_string().parse().unwrap()).collect())
            .collect();
        lines.sort();
        assert_eq!(lines, vec![vec![0, 1, -1], vec![1, 0, -1], vec![1, 1, 0]]);
        let a = IntegerForm::parse(3, "y^5 - z^5").unwrap();
        let b = IntegerForm::parse(3, "x^5 - z^5").unwrap();
        let c = IntegerForm::parse(3, "x^5 + y^5").unwrap();
        let prod = a.mul(&b).mul(&c);
        let got = &r.conjugate_product_form;
        assert!(got == &prod || got == &prod.scale(&BigInt::from(-1)));
    }

    #[test]
    fn incidence_on_fermat_lines() {
        let r = flex_report(&f5(), &FlexOptions::default()).unwrap();
        let p: Vec<BigInt> = [3, 7, 7].iter().map(|&v| BigInt::from(v)).collect();
        let inc = r.incidence(&p);
        assert_eq!(inc.total, 1);
        assert_eq!(inc.real_ids.len(), 1);
        // the five tangents y = zeta z meet at (1:0:0)
        let o: Vec<BigInt> = [1, 0, 0].iter().map(|&v| BigInt::from(v)).collect();
        let inc = r.incidence(&o);
        assert_eq!(inc.total, 5);
        assert_eq!(inc.real_ids.len(), 1);
        let q: Vec<BigInt> = [2, 3, 5].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(r.incidence(&q).total, 0);
    }

    #[test]
    fn cubic_contact_three() {
        let f = IntegerForm::parse(3, "x^3 + y^3 + 2*z^3").unwrap();
        let r = flex_report(&f, &FlexOptions::default()).unwrap();
        assert_eq!(r.total_flexes, 9);
        assert_eq!(r.nu_max, 3);
    }
}
