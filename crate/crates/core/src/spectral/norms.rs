use num_complex::Complex64;

use super::field::SampledField;
use super::multiplier::FourierMultiplier;
use crate::error::{Error, Result};

pub fn check_exponent(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

/// `sum |z|^p` over a slice, with integer fast paths for even `p`.
pub fn sum_abs_pow(data: &[Complex64], p: f64) -> f64 {
    let half = 0.5 * p;
    if half.fract() == 0.0 && half <= 8.0 {
        let e = half as i32;
        data.iter().map(|z| z.norm_sqr().powi(e)).sum()
    } else {
        data.iter().map(|z| z.norm_sqr().powf(half)).sum()
    }
}

/// Rectangle-rule `L^p` norm on the grid.
pub fn lp_norm(f: &SampledField, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok((sum_abs_pow(&f.data, p) * f.grid.cell_volume()).powf(p.recip()))
}

/// `|| <D>^s f ||_p`.
pub fn sobolev_norm(f: &SampledField, s: f64, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if s == 0.0 {
        return lp_norm(f, p);
    }
    lp_norm(&FourierMultiplier::japanese(s).apply(f), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::PeriodicGrid;
    use std::f64::consts::PI;

    #[test]
    fn constant_field() {
        let g = PeriodicGrid::new(2, 16, 3.0).unwrap();
        let f = SampledField::from_fn(g, |_| Complex64::new(0.0, 2.0));
        let v = lp_norm(&f, 3.0).unwrap();
        assert!((v - 2.0 * 3f64.powf(2.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn rejects_endpoint_exponents() {
        let g = PeriodicGrid::new(2, 8, 1.0).unwrap();
        let f = SampledField::zeros(g);
        assert!(lp_norm(&f, 1.0).is_err());
        assert!(lp_norm(&f, f64::INFINITY).is_err());
        assert!(sobolev_norm(&f, 1.0, 0.5).is_err());
    }

    #[test]
    fn plane_wave_sobolev() {
        let g = PeriodicGrid::new(2, 32, 2.0 * PI).unwrap();
        let f = SampledField::plane_wave(g, [1, 2, 0]);
        let v = sobolev_norm(&f, 1.5, 4.0).unwrap();
        let expect = 6f64.powf(0.75) * (2.0 * PI).powf(0.5);
        assert!((v - expect).abs() < 1e-10 * expect);
    }
}
