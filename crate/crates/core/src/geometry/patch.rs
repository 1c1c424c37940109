//! Subdivision of the unit square into graph patches and certified jets of
//! the implicit function on a patch.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::poly::{real_roots_in, resultant_y, BiPoly, QPoly, RatInterval, RealAlg};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// `y = f(x)`.
    X,
    /// `x = f(y)`.
    Y,
}

/// Which root of `g(t, .)` is the graph.
#[derive(Clone, Debug)]
pub enum Branch {
    /// The `j`-th root (increasing) in `[-1, 1]`.
    Index(usize),
    /// The only root in a fixed window.
    Window(RatInterval),
}

#[derive(Clone, Debug)]
pub struct CurvePatch {
    pub axis: Axis,
    /// Curve in graph coordinates `(t, u)`: `t` is the parameter, `u = f(t)`.
    /// For `Axis::Y` this is the original polynomial with variables swapped.
    pub g: BiPoly,
    pub lo: RealAlg,
    pub hi: RealAlg,
    /// Rational outer box `[t0, t1] x [u0, u1]` in graph coordinates.
    pub square: [RatInterval; 2],
    pub branch: Branch,
    pub f_bounded: bool,
    pub fprime_bounded: bool,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn fiber(g: &BiPoly, t: &BigRational) -> QPoly {
    g.eval_x(t)
}

fn fiber_roots(g: &BiPoly, t: &BigRational, lo: &BigRational, hi: &BigRational) -> Result<Vec<RealAlg>> {
    let p = fiber(g, t);
    if p.is_zero() {
        return Err(Error::certification("curve contains a line orthogonal to the graph axis"));
    }
    Ok(real_roots_in(&p, lo, hi))
}

/// Sorted distinct points of `[-1, 1]` where the branch structure may change.
fn critical_points(g: &BiPoly) -> Result<Vec<RealAlg>> {
    let gx = g.dx();
    let gy = g.dy();
    let mut crit = QPoly::one();
    for h in [gy.clone(), gx.clone(), &gx - &gy, &gx + &gy] {
        if h.is_zero() {
            continue;
        }
        let r = resultant_y(g, &h);
        if r.is_zero() {
            return Err(Error::certification("curve shares a component with a split locus"));
        }
        crit = &crit * &r.squarefree_part();
    }
    for u in [rat(1), rat(-1)] {
        let e = g.eval_y(&u);
        if !e.is_zero() {
            crit = &crit * &e;
        }
    }
    crit = &crit * &g.coeff_y(g.deg_y());
    let mut pts = vec![RealAlg::rational(rat(-1))];
    let inner = real_roots_in(&crit.squarefree_part(), &rat(-1), &rat(1));
    for r in inner {
        if r.as_rational().map(|v| v.abs() == rat(1)).unwrap_or(false) {
            continue;
        }
        pts.push(r);
    }
    pts.push(RealAlg::rational(rat(1)));
    Ok(pts)
}

/// Sign of `q(t, u)` at a rational `t` and an algebraic root `u` of the fiber.
fn sign_on_branch(q: &BiPoly, t: &BigRational, u: &mut RealAlg) -> i8 {
    u.sign_of(&q.eval_x(t))
}

fn cad_patches(g: &BiPoly, axis: Axis) -> Result<Vec<CurvePatch>> {
    if g.deg_y() == 0 {
        return Ok(Vec::new());
    }
    let pts = critical_points(g)?;
    let gx = g.dx();
    let gy = g.dy();
    let steep = &(&gx * &gx) - &(&gy * &gy);
    let mut out = Vec::new();
    for w in pts.windows(2) {
        let (mut a, mut b) = (w[0].clone(), w[1].clone());
        let t = a.rational_between(&mut b);
        let roots = fiber_roots(g, &t, &rat(-1), &rat(1))?;
        for (j, mut u) in roots.into_iter().enumerate() {
            if sign_on_branch(&steep, &t, &mut u) > 0 {
                continue;
            }
            let ilo = a.enclosure().lo.clone().max(rat(-1));
            let ihi = b.enclosure().hi.clone().min(rat(1));
            let half = (&ihi - &ilo).max(BigRational::zero());
            let ue = u.enclosure();
            let u0 = (&ue.lo - &half).max(rat(-1));
            let u1 = (&ue.hi + &half).min(rat(1));
            out.push(CurvePatch {
                axis,
                g: g.clone(),
                lo: a.clone(),
                hi: b.clone(),
                square: [RatInterval::new(ilo, ihi), RatInterval::new(u0, u1)],
                branch: Branch::Index(j),
                f_bounded: true,
                fprime_bounded: true,
            });
        }
    }
    Ok(out)
}

/// Cover `{g = 0} ∩ [-1, 1]^2` by graph patches with `|f|, |f'| <= 1`:
/// branches with `|g_x| <= |g_y|` are graphs over `x`, the rest graphs over `y`.
pub fn subdivide_unit_square(g: &BiPoly) -> Result<Vec<CurvePatch>> {
    if g.is_zero() {
        return Err(Error::precondition("zero polynomial"));
    }
    let mut out = cad_patches(g, Axis::X)?;
    out.extend(cad_patches(&g.swap(), Axis::Y)?);
    Ok(out)
}

impl CurvePatch {
    /// Graph of the unique root of `g(t, .)` in `window` for `t` in `[t0, t1]`.
    /// Uniqueness is certified: `g_u` and `g` on the window's edges have no
    /// zero over the interval and the midpoint fiber has one root.
    pub fn from_graph(g: &BiPoly, axis: Axis, t0: BigRational, t1: BigRational, window: RatInterval) -> Result<Self> {
        if t0 >= t1 {
            return Err(Error::precondition("empty parameter interval"));
        }
        let gy = g.dy();
        let mut blockers = resultant_y(g, &gy);
        if blockers.is_zero() {
            return Err(Error::certification("g is not squarefree in the graph variable"));
        }
        for e in [&window.lo, &window.hi] {
            let ge = g.eval_y(e);
            if ge.is_zero() {
                return Err(Error::certification("window edge lies on the curve"));
            }
            blockers = &blockers * &ge;
        }
        if !real_roots_in(&blockers, &t0, &t1).is_empty() {
            return Err(Error::certification("graph window is not a single sheet over the interval"));
        }
        let mid = (&t0 + &t1) / rat(2);
        if fiber_roots(g, &mid, &window.lo, &window.hi)?.len() != 1 {
            return Err(Error::certification("window does not hold exactly one sheet"));
        }
        let mut p = CurvePatch {
            axis,
            g: g.clone(),
            lo: RealAlg::rational(t0.clone()),
            hi: RealAlg::rational(t1.clone()),
            square: [RatInterval::new(t0, t1), window.clone()],
            branch: Branch::Window(window.clone()),
            f_bounded: window.lo >= rat(-1) && window.hi <= rat(1),
            fprime_bounded: false,
        };
        p.fprime_bounded = p.certify_slope_bound()?;
        Ok(p)
    }

    /// Decide `|f'| <= 1` on the whole interval: between consecutive zeros of
    /// `g_t^2 - g_u^2` on the sheet the sign is constant, so midpoints decide.
    fn certify_slope_bound(&self) -> Result<bool> {
        let gx = self.g.dx();
        let gy = self.g.dy();
        let steep = &(&gx * &gx) - &(&gy * &gy);
        let mut cuts = vec![self.lo.clone()];
        for h in [&gx - &gy, &gx + &gy] {
            if h.is_zero() {
                continue;
            }
            let r = resultant_y(&self.g, &h);
            if r.is_zero() {
                return Err(Error::certification("sheet lies on a slope-one locus"));
            }
            let (a, b) = (self.square[0].lo.clone(), self.square[0].hi.clone());
            for mut root in real_roots_in(&r, &a, &b) {
                if root.cmp_alg(&mut self.lo.clone()) == Ordering::Greater
                    && root.cmp_alg(&mut self.hi.clone()) == Ordering::Less
                {
                    cuts.push(root);
                }
            }
        }
        cuts.push(self.hi.clone());
        sort_alg(&mut cuts);
        for w in cuts.windows(2) {
            let (mut a, mut b) = (w[0].clone(), w[1].clone());
            if a.cmp_alg(&mut b) != Ordering::Less {
                continue;
            }
            let t = a.rational_between(&mut b);
            let mut u = self.value(&t)?;
            if sign_on_branch(&steep, &t, &mut u) > 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn contains(&self, t: &BigRational) -> bool {
        self.lo.clone().cmp_rational(t) != Ordering::Greater && self.hi.clone().cmp_rational(t) != Ordering::Less
    }

    fn strictly_inside(&self, t: &BigRational) -> bool {
        self.lo.clone().cmp_rational(t) == Ordering::Less && self.hi.clone().cmp_rational(t) == Ordering::Greater
    }

    /// `f(t)` as an algebraic number.
    pub fn value(&self, t: &BigRational) -> Result<RealAlg> {
        if !self.contains(t) {
            return Err(Error::precondition("point outside the patch interval"));
        }
        match &self.branch {
            Branch::Window(w) => {
                let mut r = fiber_roots(&self.g, t, &w.lo, &w.hi)?;
                if r.len() != 1 {
                    return Err(Error::certification("graph window lost its sheet"));
                }
                Ok(r.remove(0))
            }
            Branch::Index(j) => {
                if self.strictly_inside(t) {
                    let mut r = fiber_roots(&self.g, t, &rat(-1), &rat(1))?;
                    if *j >= r.len() {
                        return Err(Error::certification("branch index out of range"));
                    }
                    return Ok(r.swap_remove(*j));
                }
                self.value_at_endpoint(t)
            }
        }
    }

    /// At an endpoint the branch may touch the boundary or a neighbour; use
    /// `|f'| <= 1` from an interior point to localise it.
    fn value_at_endpoint(&self, t: &BigRational) -> Result<RealAlg> {
        let (mut lo, mut hi) = (self.lo.clone(), self.hi.clone());
        let m = lo.rational_between(&mut hi);
        let mut step = rat(1) / rat(2);
        for _ in 0..200 {
            let target = t + (&m - t) * &step;
            let mut fu = self.value(&target)?;
            let d = (&target - t).abs();
            fu.refine_to(&d);
            let e = fu.enclosure();
            let lo_w = (&e.lo - &d).max(rat(-1));
            let hi_w = (&e.hi + &d).min(rat(1));
            let mut r = fiber_roots(&self.g, t, &lo_w, &hi_w)?;
            if r.len() == 1 {
                return Ok(r.remove(0));
            }
            step /= rat(4);
        }
        Err(Error::certification("could not separate the branch at the patch endpoint"))
    }
}

fn sort_alg(v: &mut [RealAlg]) {
    // insertion sort: comparisons need &mut
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 {
            let (l, r) = v.split_at_mut(j);
            if l[j - 1].cmp_alg(&mut r[0]) == Ordering::Greater {
                v.swap(j - 1, j);
                j -= 1;
            } else {
                break;
            }
        }
    }
}

/// Numerators `P_l` with `f^(l) = P_l / g_y^(2l-1)` along the curve.
pub fn jet_numerators(g: &BiPoly, order: usize) -> Vec<BiPoly> {
    let gx = g.dx();
    let gy = g.dy();
    let gxy = gx.dy();
    let gyy = gy.dy();
    let tw = &(&gxy * &gy) - &(&gx * &gyy);
    let mut out = vec![BiPoly::zero(), -&gx];
    for l in 1..order {
        let p = out[l].clone();
        let a = &(&(&p.dx() * &gy) - &(&p.dy() * &gx)) * &gy;
        let b = (&p * &tw).scale(&rat(2 * l as i64 - 1));
        out.push(&a - &b);
    }
    out.truncate(order + 1);
    out
}

/// Enclosures of `f(t), f'(t), ..., f^(order)(t)`, each of width at most `tol`.
pub fn implicit_jet(patch: &CurvePatch, t: &BigRational, order: usize, tol: &BigRational) -> Result<Vec<RatInterval>> {
    let mut u = patch.value(t)?;
    let nums = jet_numerators(&patch.g, order);
    let gy = patch.g.dy();
    let tp = RatInterval::point(t.clone());
    let mut out = Vec::with_capacity(order + 1);
    u.refine_to(tol);
    out.push(u.enclosure());
    for (l, p) in nums.iter().enumerate().skip(1) {
        let mut guard = 0;
        loop {
            let ui = u.enclosure();
            let den = gy.eval_interval(&tp, &ui).pow(2 * l - 1);
            if let Some(inv) = den.recip() {
                let v = &p.eval_interval(&tp, &ui) * &inv;
                let w = v.width();
                if &w <= tol {
                    out.push(v);
                    break;
                }
                let deficit = (&w / tol).ceil().to_integer().bits() + 2;
                let target = u.width() / BigRational::from_integer(BigInt::one() << deficit);
                u.refine_to(&target);
            } else {
                u.refine_to(&(u.width() / rat(1 << 20)));
            }
            guard += 1;
            if guard > 64 || u.is_rational() && den_zero(&gy, t, &u) {
                return Err(Error::certification("g_y vanishes on the patch"));
            }
        }
    }
    Ok(out)
}

fn den_zero(gy: &BiPoly, t: &BigRational, u: &RealAlg) -> bool {
    u.as_rational().map(|v| gy.eval(t, v).is_zero()).unwrap_or(false)
}

/// Smallest order `1..=max_order` whose derivative has a certified nonzero enclosure.
pub fn nonvanishing_order(patch: &CurvePatch, t: &BigRational, max_order: usize) -> Result<Option<usize>> {
    let tol = BigRational::new(BigInt::one(), BigInt::one() << 80);
    let jet = implicit_jet(patch, t, max_order, &tol)?;
    Ok((1..=max_order).find(|&l| !jet[l].contains_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::upoly::ratio;

    fn circle() -> BiPoly {
        BiPoly::from_terms(&[(2, 0, rat(1)), (0, 2, rat(1)), (0, 0, ratio(-1, 2))])
    }

    #[test]
    fn circle_has_eight_patches() {
        let ps = subdivide_unit_square(&circle()).unwrap();
        assert_eq!(ps.len(), 8);
        assert_eq!(ps.iter().filter(|p| p.axis == Axis::X).count(), 4);
    }

    #[test]
    fn fermat_quintic_patches() {
        let g = BiPoly::from_terms(&[(5, 0, rat(1)), (0, 5, rat(1)), (0, 0, rat(-1))]);
        let ps = subdivide_unit_square(&g).unwrap();
        assert_eq!(ps.len(), 2);
        let p = ps.iter().find(|p| p.axis == Axis::X).unwrap();
        assert_eq!(p.lo.as_rational(), Some(&rat(0)));
        let tol = BigRational::new(BigInt::one(), BigInt::one() << 40);
        let jet = implicit_jet(p, &rat(0), 5, &tol).unwrap();
        assert!(jet[0].contains(&rat(1)));
        for l in 1..5 {
            assert!(jet[l].contains(&rat(0)));
        }
        assert!(jet[5].contains(&rat(-24)));
    }

    #[test]
    fn parabola_window_patch() {
        let g = BiPoly::from_terms(&[(0, 1, rat(1)), (2, 0, rat(-1))]);
        let p = CurvePatch::from_graph(&g, Axis::X, rat(0), rat(1), RatInterval::new(ratio(-1, 2), ratio(3, 2))).unwrap();
        assert!(!p.fprime_bounded);
        assert!(!p.f_bounded);
        let v = p.value(&ratio(1, 2)).unwrap();
        assert_eq!(v.as_rational(), Some(&ratio(1, 4)));
    }
}
