//! Regularity exponents `s(p)`, `d(p)` and `sigma(p)` in exact arithmetic.

use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExponentTable {
    pub n: i64,
    pub p: Rational64,
    pub s: Rational64,
    pub d: Rational64,
    pub sigma: Rational64,
    pub gap: Rational64,
}

impl ExponentTable {
    pub fn s_f64(&self) -> f64 {
        to_f64(self.s)
    }

    pub fn d_f64(&self) -> f64 {
        to_f64(self.d)
    }

    pub fn sigma_f64(&self) -> f64 {
        to_f64(self.sigma)
    }

    pub fn gap_f64(&self) -> f64 {
        to_f64(self.gap)
    }
}

pub fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Exact rational for `p`, accepting values like `6.0` or `3.5`.
pub fn rational_exponent(p: f64) -> Result<Rational64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    Rational64::approximate_float(p).filter(|r| (to_f64(*r) - p).abs() <= 1e-12 * p).ok_or(Error::InvalidExponent(p))
}

/// `s(p) = (n-1)/2 |1/p - 1/2|`.
pub fn s_exponent(n: i64, p: Rational64) -> Rational64 {
    let half = Rational64::new(1, 2);
    let diff = p.recip() - half;
    let abs = if diff < Rational64::from_integer(0) { -diff } else { diff };
    Rational64::new(n - 1, 2) * abs
}

pub fn exponents(n: usize, p: Rational64) -> Result<ExponentTable> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("dimension {n} < 2")));
    }
    let one = Rational64::from_integer(1);
    if p <= one {
        return Err(Error::InvalidExponent(to_f64(p)));
    }
    let n = n as i64;
    let two = Rational64::from_integer(2);
    let s = s_exponent(n, p);
    let stein_tomas = Rational64::new(2 * (n + 1), n - 1);
    let d = if p < stein_tomas { s } else { two * s - p.recip() };
    let sigma = if p <= Rational64::new(2 * n, n - 1) { Rational64::from_integer(0) } else { two * s - p.recip() };
    Ok(ExponentTable { n, p, s, d, sigma, gap: d - s })
}

pub fn exponents_f64(n: usize, p: f64) -> Result<ExponentTable> {
    exponents(n, rational_exponent(p)?)
}
