//! Parameter choices for the approximate determinant method.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct DMParameters {
    pub n: usize,
    pub k: u32,
    pub gamma: String,
    pub tau: String,
    /// Exact exponent when `n = 3`, where it equals `9 / (4 tau)`.
    pub theta: Option<String>,
    pub theta_f64: f64,
    pub lambda: f64,
    pub alpha_tilde: f64,
    /// Solves `(M0 M)^alpha = 2^-k B^tau` for the chosen `M`.
    pub alpha: f64,
    pub b: u64,
    pub m: u64,
    pub m0: u64,
    pub m_window: (f64, f64),
    /// `M <= B^tau / (2^k M0)`.
    pub m_condition: bool,
    pub d: usize,
    pub s: usize,
}

pub fn binomial(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

fn to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap()
}

/// `(n-2) (n/(n-1))^((n-1)/(n-2)) tau^(-1/(n-2))`.
pub fn theta(n: usize, tau: &BigRational) -> (Option<BigRational>, f64) {
    let nf = n as f64;
    let t = to_f64(tau);
    let approx = (nf - 2.0) * (nf / (nf - 1.0)).powf((nf - 1.0) / (nf - 2.0)) * t.powf(-1.0 / (nf - 2.0));
    let exact = (n == 3).then(|| BigRational::new(BigInt::from(9), BigInt::from(4)) / tau);
    (exact, approx)
}

/// `alpha` with `(M0 M)^alpha = 2^-k B^tau`.
pub fn alpha_for(k: u32, tau: &BigRational, b: u64, m0m: u64) -> f64 {
    (to_f64(tau) * (b as f64).ln() - k as f64 * 2f64.ln()) / (m0m as f64).ln()
}

/// Parameters for a form in `n` variables of degree `k`. `M` follows the
/// proof's choice `ceil(B^(tau/alpha~) / 2^(k/alpha~))` with
/// `alpha~ = (1 - lambda) ((n-1) tau / n)^((n-1)/(n-2))`; boxes have side `1/(M0 M)`.
pub fn dm_parameters(n: usize, k: u32, gamma: &BigRational, b: u64, m0: u64, lambda: f64, d: usize) -> Result<DMParameters> {
    if n < 3 {
        return Err(Error::precondition("need at least three variables"));
    }
    let kr = BigRational::from_integer(k.into());
    let tau = &kr - gamma;
    let limit = BigRational::new(BigInt::from(n), BigInt::from(n - 1));
    if gamma < &BigRational::from_integer(0.into()) || tau <= limit {
        return Err(Error::precondition("gamma must lie in [0, k - n/(n-1))"));
    }
    if !(0.0..1.0).contains(&lambda) || b == 0 || m0 == 0 || d == 0 {
        return Err(Error::precondition("need 0 <= lambda < 1 and positive B, M0, D"));
    }
    let (theta_exact, theta_f64) = theta(n, &tau);
    let nf = n as f64;
    let t = to_f64(&tau);
    let alpha_tilde = (1.0 - lambda) * ((nf - 1.0) * t / nf).powf((nf - 1.0) / (nf - 2.0));
    if alpha_tilde <= 1.0 {
        return Err(Error::precondition("lambda too large: alpha~ must exceed 1"));
    }
    let bf = b as f64;
    let m = (bf.powf(t / alpha_tilde) / 2f64.powf(k as f64 / alpha_tilde)).ceil().max(1.0) as u64;
    let upper = bf.powf(t) / (2f64.powi(k as i32) * m0 as f64);
    let m_window = (bf.powf(theta_f64), upper);
    let alpha = if m * m0 > 1 { alpha_for(k, &tau, b, m * m0) } else { f64::INFINITY };
    Ok(DMParameters {
        n,
        k,
        gamma: gamma.to_string(),
        tau: tau.to_string(),
        theta: theta_exact.map(|r| r.to_string()),
        theta_f64,
        lambda,
        alpha_tilde,
        alpha,
        b,
        m,
        m0,
        m_window,
        m_condition: (m as f64) <= upper,
        d,
        s: binomial(d + n - 1, n - 1),
    })
}

pub const DEFAULT_LAMBDA: f64 = 0.05;


#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn theta_for_planar_curves() {
        let p = dm_parameters(3, 5, &r(1, 1), 1000, 1, 0.05, 6).unwrap();
        assert_eq!(p.theta.as_deref(), Some("9/16"));
        for (k, g) in [(4, r(1, 2)), (5, r(5, 2)), (7, r(3, 1))] {
            let tau = r(k, 1) - &g;
            let (e, a) = theta(3, &tau);
            assert_eq!(e.unwrap(), r(9, 4) / &tau);
            assert!((a - 9.0 / (4.0 * to_f64(&tau))).abs() < 1e-12);
        }
        assert_eq!(p.s, 28);
    }

    #[test]
    fn alpha_from_box_count() {
        assert!((alpha_for(5, &r(4, 1), 8, 16) - 1.75).abs() < 1e-12);
    }

    #[test]
    fn rejects_large_gamma() {
        assert!(dm_parameters(3, 5, &r(7, 2), 64, 1, 0.05, 6).is_err());
    }
}
