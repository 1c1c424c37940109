//! Lattice points in the simplices `x_i >= 0, x_1 + ... + x_{m-1} + alpha x_m <= nu`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexSpec {
    pub m: usize,
    pub alpha: BigRational,
    pub nu: BigRational,
}

impl SimplexSpec {
    pub fn new(m: usize, alpha: BigRational, nu: BigRational) -> Result<Self> {
        if m == 0 {
            return Err(Error::precondition("m must be positive"));
        }
        if alpha < BigRational::one() || nu < BigRational::one() {
            return Err(Error::precondition("alpha and nu must be at least 1"));
        }
        Ok(SimplexSpec { m, alpha, nu })
    }

    pub fn from_ints(m: usize, alpha: i64, nu: i64) -> Result<Self> {
        Self::new(m, BigRational::from_integer(alpha.into()), BigRational::from_integer(nu.into()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimplexStats {
    /// Volume of the real simplex.
    #[serde(serialize_with = "ser_rat")]
    pub v: BigRational,
    /// Integral of `x_1 + ... + x_{m-1} + alpha x_m` over the simplex.
    #[serde(serialize_with = "ser_rat")]
    pub c: BigRational,
    /// Number of lattice points.
    pub sigma: u64,
    /// Sum of `x_1 + ... + x_{m-1} + alpha x_m` over lattice points; an integer
    /// whenever alpha is.
    #[serde(serialize_with = "ser_rat")]
    pub phi: BigRational,
}

fn ser_rat<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, i| a * BigInt::from(i))
}

fn pow(r: &BigRational, e: usize) -> BigRational {
    (0..e).fold(BigRational::one(), |a, _| a * r)
}

pub fn simplex_volume(m: usize, alpha: &BigRational, nu: &BigRational) -> BigRational {
    pow(nu, m) / (alpha * BigRational::from_integer(factorial(m)))
}

pub fn simplex_moment(m: usize, alpha: &BigRational, nu: &BigRational) -> BigRational {
    pow(nu, m + 1) / (alpha * BigRational::from_integer(BigInt::from(m + 1) * factorial(m - 1)))
}

/// Walk all lattice points; the innermost coordinate is summed in closed form.
fn walk(dims_left: usize, budget: &BigRational, partial: &BigRational, sigma: &mut u64, phi: &mut BigRational) {
    if budget.is_negative() {
        return;
    }
    let top = budget.floor().to_integer().to_u64().expect("budget fits u64");
    if dims_left == 1 {
        // x_1 in 0..=top contributes partial + x_1
        let n = top + 1;
        *sigma += n;
        *phi += partial * BigRational::from_integer(n.into())
            + BigRational::from_integer(BigInt::from(top) * BigInt::from(top + 1) / 2);
        return;
    }
    for x in 0..=top {
        let xr = BigRational::from_integer(x.into());
        walk(dims_left - 1, &(budget - &xr), &(partial + &xr), sigma, phi);
    }
}

/// `V` and `C` in closed form; `Sigma` and `Phi` by enumeration.
pub fn simplex_stats(spec: &SimplexSpec) -> SimplexStats {
    let (m, alpha, nu) = (spec.m, &spec.alpha, &spec.nu);
    let mut sigma = 0u64;
    let mut phi = BigRational::zero();
    let top = (nu / alpha).floor().to_integer().to_u64().expect("nu/alpha fits u64");
    for xm in 0..=top {
        let used = alpha * BigRational::from_integer(xm.into());
        if m == 1 {
            sigma += 1;
            phi += used;
        } else {
            walk(m - 1, &(nu - &used), &used, &mut sigma, &mut phi);
        }
    }
    SimplexStats { v: simplex_volume(m, alpha, nu), c: simplex_moment(m, alpha, nu), sigma, phi }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_goldens() {
        let s = simplex_stats(&SimplexSpec::from_ints(2, 1, 2).unwrap());
        assert_eq!((s.v, s.c, s.sigma, s.phi), (r(2, 1), r(8, 3), 6, r(8, 1)));
        let s = simplex_stats(&SimplexSpec::from_ints(2, 2, 2).unwrap());
        assert_eq!((s.sigma, s.v), (4, r(1, 1)));
    }

    #[test]
    fn brute_force_agrees() {
        let spec = SimplexSpec::new(3, r(3, 2), r(13, 3)).unwrap();
        let s = simplex_stats(&spec);
        let (mut n, mut p) = (0u64, BigRational::zero());
        for a in 0..6i64 {
            for b in 0..6i64 {
                for c in 0..6i64 {
                    let g = r(a + b, 1) + r(3 * c, 2);
                    if g <= spec.nu {
                        n += 1;
                        p += g;
                    }
                }
            }
        }
        assert_eq!((s.sigma, s.phi), (n, p));
    }
}
