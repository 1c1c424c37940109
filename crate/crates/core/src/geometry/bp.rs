//! Splitting a patch interval where derivatives cross given thresholds.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use std::cmp::Ordering;

use super::patch::{implicit_jet, jet_numerators, CurvePatch};
use crate::error::{Error, Result};
use crate::poly::{real_roots_in, resultant_y, RealAlg};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// `|f^(l)| <= C_l` throughout.
    AtMost,
    /// `|f^(l)| >= C_l` throughout.
    AtLeast,
}

#[derive(Clone, Debug)]
pub struct BpPiece {
    pub lo: RealAlg,
    pub hi: RealAlg,
    /// Verdict for orders `1..=K`.
    pub verdicts: Vec<Verdict>,
}

impl BpPiece {
    pub fn bounds_f64(&self) -> (f64, f64) {
        (self.lo.to_f64(), self.hi.to_f64())
    }
}

/// Upper bound `2 d^2 K^2` on the number of pieces.
pub fn piece_bound(d: usize, k: usize) -> usize {
    2 * d * d * k * k
}

fn push_sorted(cuts: &mut Vec<RealAlg>, mut r: RealAlg) {
    let mut i = 0;
    while i < cuts.len() {
        match r.cmp_alg(&mut cuts[i]) {
            Ordering::Equal => return,
            Ordering::Less => break,
            Ordering::Greater => i += 1,
        }
    }
    cuts.insert(i, r);
}

/// Pieces of the patch interval on which each `|f^(l)| - C_l` keeps its sign.
/// Breakpoints are the zeros of `P_l -+ C_l g_y^(2l-1)` on the curve; adjacent
/// pieces with equal verdicts are merged.
pub fn bp_subdivide(patch: &CurvePatch, thresholds: &[BigRational]) -> Result<Vec<BpPiece>> {
    if thresholds.is_empty() || thresholds.iter().any(|c| !c.is_positive()) {
        return Err(Error::precondition("need K >= 1 positive thresholds"));
    }
    let k = thresholds.len();
    let nums = jet_numerators(&patch.g, k);
    let gy = patch.g.dy();
    let mut cuts: Vec<RealAlg> = Vec::new();
    let mut flat = vec![false; k + 1];
    let (a, b) = (patch.square[0].lo.clone(), patch.square[0].hi.clone());
    for l in 1..=k {
        let pw = gy.pow(2 * l - 1);
        for s in [1i64, -1] {
            let c = &thresholds[l - 1] * BigRational::from_integer(BigInt::from(s));
            let h = &nums[l] - &pw.scale(&c);
            let r = resultant_y(&patch.g, &h);
            if r.is_zero() {
                flat[l] = true;
                continue;
            }
            for mut root in real_roots_in(&r, &a, &b) {
                if root.cmp_alg(&mut patch.lo.clone()) == Ordering::Greater
                    && root.cmp_alg(&mut patch.hi.clone()) == Ordering::Less
                {
                    push_sorted(&mut cuts, root);
                }
            }
        }
    }
    let mut ends = vec![patch.lo.clone()];
    ends.extend(cuts);
    ends.push(patch.hi.clone());
    let mut pieces: Vec<BpPiece> = Vec::new();
    for w in ends.windows(2) {
        let (mut lo, mut hi) = (w[0].clone(), w[1].clone());
        let t = lo.rational_between(&mut hi);
        let verdicts = verdicts_at(patch, &t, thresholds, &flat)?;
        if let Some(last) = pieces.last_mut() {
            if last.verdicts == verdicts {
                last.hi = hi;
                continue;
            }
        }
        pieces.push(BpPiece { lo, hi, verdicts });
    }
    Ok(pieces)
}

fn verdicts_at(patch: &CurvePatch, t: &BigRational, thresholds: &[BigRational], flat: &[bool]) -> Result<Vec<Verdict>> {
    let k = thresholds.len();
    let mut bits = 64usize;
    loop {
        let tol = BigRational::new(BigInt::one(), BigInt::one() << bits);
        let jet = implicit_jet(patch, t, k, &tol)?;
        let mut out = Vec::with_capacity(k);
        let mut undecided = false;
        for l in 1..=k {
            let abs = jet[l].abs();
            let c = &thresholds[l - 1];
            if &abs.hi < c {
                out.push(Verdict::AtMost);
            } else if &abs.lo > c {
                out.push(Verdict::AtLeast);
            } else if flat[l] && bits >= 1024 {
                // identically on the threshold
                out.push(Verdict::AtMost);
            } else {
                undecided = true;
                break;
            }
        }
        if !undecided {
            return Ok(out);
        }
        bits *= 2;
        if bits > 4096 {
            return Err(Error::certification("derivative threshold undecided at precision cap"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::patch::{subdivide_unit_square, Axis};
    use crate::poly::upoly::rat;
    use crate::poly::BiPoly;

    #[test]
    fn parabola_second_derivative_constant() {
        let g = BiPoly::from_terms(&[(0, 1, rat(2)), (2, 0, rat(-1))]);
        let p = CurvePatch::from_graph(&g, Axis::X, rat(-1), rat(1), crate::poly::RatInterval::new(rat(-1), rat(1))).unwrap();
        // f = x^2/2, f'' = 1 >= 1/2
        let pieces = bp_subdivide(&p, &[rat(2), BigRational::new(1.into(), 2.into())]).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].verdicts, vec![Verdict::AtMost, Verdict::AtLeast]);
    }

    #[test]
    fn circle_within_bound() {
        let g = BiPoly::from_terms(&[(2, 0, rat(1)), (0, 2, rat(1)), (0, 0, BigRational::new(BigInt::from(-1), BigInt::from(2)))]);
        for p in subdivide_unit_square(&g).unwrap() {
            let pieces = bp_subdivide(&p, &[rat(1), rat(1)]).unwrap();
            assert!(pieces.len() <= piece_bound(2, 2));
        }
    }
}
