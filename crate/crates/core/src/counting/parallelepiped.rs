//! Zeros of a ternary form in a sheared box.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::zrange::sublevel_intervals;
use crate::error::{Error, Result};
use crate::forms::IntegerForm;

fn floor(r: &BigRational) -> BigInt {
    r.floor().to_integer()
}

fn ceil(r: &BigRational) -> BigInt {
    r.ceil().to_integer()
}

fn int(v: &BigInt) -> BigRational {
    BigRational::from_integer(v.clone())
}

/// Number of primitive zeros of `h` with `|x - alpha z| <= b1`,
/// `|y - (beta - zeta alpha) z - zeta x| <= b2` and `|z| <= b3`.
pub fn count_parallelepiped(
    h: &IntegerForm,
    b: [&BigRational; 3],
    alpha: &BigRational,
    beta: &BigRational,
    zeta: &BigRational,
) -> Result<u64> {
    if h.nvars() != 3 || h.is_zero() {
        return Err(Error::precondition("H must be a nonzero ternary form"));
    }
    if b.iter().any(|v| v.is_negative()) {
        return Err(Error::precondition("box sides must be non-negative"));
    }
    let k = h.degree() as usize;
    let shift = beta - zeta * alpha;
    let zmax = floor(b[2]);
    let mut count = 0u64;
    let mut z = -zmax.clone();
    while z <= zmax {
        let zr = int(&z);
        let cx = alpha * &zr;
        let mut x = ceil(&(&cx - b[0]));
        let xmax = floor(&(&cx + b[0]));
        while x <= xmax {
            let cy = &shift * &zr + zeta * int(&x);
            let ylo = ceil(&(&cy - b[1]));
            let yhi = floor(&(&cy + b[1]));
            if ylo <= yhi {
                // H(x, ., z) with integer coefficients, lowest first
                let mut c = vec![BigInt::zero(); k + 1];
                for (e, v) in h.terms() {
                    c[e.0[1] as usize] += v * x.pow(e.0[0]) * z.pow(e.0[2]);
                }
                for (s, t) in sublevel_intervals(&c, &BigInt::zero(), &ylo, &yhi) {
                    let mut y = s;
                    while y <= t {
                        if x.gcd(&y).gcd(&z).is_one() {
                            count += 1;
                        }
                        y += 1;
                    }
                }
            }
            x += 1;
        }
        z += 1;
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn slab_only_counts_z_zero() {
        let qp = IntegerForm::parse(3, "x^2 + y^2 - z^2").unwrap();
        let z0 = count_parallelepiped(&qp, [&r(5), &r(5), &r(0)], &r(0), &r(0), &r(0)).unwrap();
        // x^2 + y^2 = 0 has no primitive solution
        assert_eq!(z0, 0);
        let line = IntegerForm::parse(3, "x - y").unwrap();
        // (1,1,0), (-1,-1,0)
        assert_eq!(count_parallelepiped(&line, [&r(3), &r(3), &r(0)], &r(0), &r(0), &r(0)).unwrap(), 2);
    }
}
