//! `(sum_nu ||chi_nu(D) f||_p^p)^{1/p}` for fields on a dyadic annulus.

use num_complex::Complex64;

use super::{bucket_lp_pow, Bucket};
use crate::decoupling::CapSystem;
use crate::error::{Error, Result};
use crate::spectral::grid::norm;
use crate::spectral::norms::check_exponent;
use crate::spectral::{SampledField, Spectrum};

/// Relative `sum |c|^2` mass tolerated outside the annulus.
pub const ANNULUS_TOLERANCE: f64 = 1e-10;

/// Rejects spectra with more than [`ANNULUS_TOLERANCE`] of their mass outside
/// `2^{k-1} <= |xi| <= 2^{k+1}`.
pub fn annulus_check(s: &Spectrum, k: u32) -> Result<()> {
    let (lo, hi) = ((k as f64 - 1.0).exp2(), (k as f64 + 1.0).exp2());
    let out = s.mass_outside(|xi| {
        let r = norm(xi);
        r >= lo && r <= hi
    });
    if out > ANNULUS_TOLERANCE {
        return Err(Error::Support(format!("{out:e} of the mass lies outside {lo} <= |xi| <= {hi}")));
    }
    Ok(())
}

/// Per-cap coefficient lists `(index, chi_nu(xi))`.
pub(crate) fn cap_buckets(s: &Spectrum, caps: &CapSystem) -> Vec<Bucket> {
    let mut buckets: Vec<Bucket> = vec![Vec::new(); caps.len()];
    let mut w = Vec::new();
    for (i, c) in s.coeffs.iter().enumerate() {
        if *c == Complex64::default() {
            continue;
        }
        caps.weights_at(&s.grid.freq(i), &mut w);
        for &(j, v) in &w {
            buckets[j].push((i as u32, v));
        }
    }
    buckets
}

pub(crate) fn check_caps(s: &Spectrum, k: u32, caps: &CapSystem) -> Result<()> {
    if caps.n != s.grid.dim() || caps.k != k {
        return Err(Error::InvalidArgument(format!(
            "cap system (n = {}, k = {}) does not match field (n = {}, k = {k})",
            caps.n,
            caps.k,
            s.grid.dim()
        )));
    }
    annulus_check(s, k)
}

pub fn discrete_annulus_norm(f: &SampledField, k: u32, p: f64, caps: &CapSystem) -> Result<f64> {
    check_exponent(p)?;
    let s = f.spectrum();
    check_caps(&s, k, caps)?;
    let pows = bucket_lp_pow(&s.grid, &s.coeffs, &cap_buckets(&s, caps), p);
    Ok(pows.iter().sum::<f64>().powf(p.recip()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{lp_norm, PeriodicGrid};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn single_cap_interior_is_plain_lp() {
        let g = PeriodicGrid::new(2, 64, 2.0 * PI).unwrap();
        let caps = CapSystem::build(4, 2).unwrap();
        // a mode on the first centre direction, where only that cap is active
        let c = caps.centers[0];
        let m = [(20.0 * c[0]).round() as i64, (20.0 * c[1]).round() as i64, 0];
        let f = SampledField::plane_wave(g, m);
        let mut w = Vec::new();
        caps.weights_at(&[m[0] as f64, m[1] as f64, 0.0], &mut w);
        assert_eq!(w.len(), 1);
        let v = discrete_annulus_norm(&f, 4, 5.0, &caps).unwrap();
        let lp = lp_norm(&f, 5.0).unwrap();
        assert!((v - lp).abs() < 1e-10 * lp);
    }

    #[test]
    fn l2_overlap_window() {
        let g = PeriodicGrid::new(2, 64, 2.0 * PI).unwrap();
        let caps = CapSystem::build(4, 2).unwrap();
        for seed in 0..3 {
            let f = SampledField::random_annulus(g, 8.0, 31.0, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let v = discrete_annulus_norm(&f, 4, 2.0, &caps).unwrap().powi(2);
            let l2 = lp_norm(&f, 2.0).unwrap().powi(2);
            assert!(v <= l2 * (1.0 + 1e-10) && v >= 0.5 * l2);
        }
    }

    #[test]
    fn rejects_off_annulus_and_mismatched_caps() {
        let g = PeriodicGrid::new(2, 64, 2.0 * PI).unwrap();
        let caps = CapSystem::build(4, 2).unwrap();
        let f = SampledField::plane_wave(g, [3, 0, 0]);
        assert!(matches!(discrete_annulus_norm(&f, 4, 4.0, &caps), Err(Error::Support(_))));
        let f = SampledField::plane_wave(g, [10, 0, 0]);
        assert!(discrete_annulus_norm(&f, 3, 4.0, &caps).is_err());
    }
}
