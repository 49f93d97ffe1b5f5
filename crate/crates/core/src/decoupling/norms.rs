//! Decoupling and square-function norms of `T chi_nu(D) f` over space-time.

use rayon::prelude::*;
use serde::Serialize;

use super::caps::CapSystem;
use crate::error::Result;
use crate::fio::StandardFormFIO;
use crate::norms::discrete::{cap_buckets, check_caps};
use crate::norms::Bucket;
use crate::spectral::norms::{check_exponent, sum_abs_pow};
use crate::spectral::{SampledField, Spectrum};

/// Space-time quantities for one field and one cap system.
#[derive(Debug, Clone, Serialize)]
pub struct CapNorms {
    /// `||Tf||_{L^p}`.
    pub lhs: f64,
    /// `(sum_nu ||T chi_nu(D) f||_p^p)^{1/p}`.
    pub decoupling: f64,
    /// `||(sum_nu |T chi_nu(D) f|^2)^{1/2}||_p`.
    pub square: f64,
    /// `||T chi_nu(D) f||_p^p` for each cap.
    pub per_cap: Vec<f64>,
}

fn restrict(s: &Spectrum, bucket: &Bucket) -> Spectrum {
    let mut out = Spectrum::zeros(s.grid);
    out.band_limit = s.band_limit;
    for &(i, w) in bucket {
        out.coeffs[i as usize] = s.coeffs[i as usize] * w;
    }
    out
}

pub fn cap_norms(t: &StandardFormFIO, f: &SampledField, k: u32, p: f64, caps: &CapSystem) -> Result<CapNorms> {
    check_exponent(p)?;
    let spec = f.spectrum();
    check_caps(&spec, k, caps)?;
    t.check_input(&spec)?;
    let buckets = cap_buckets(&spec, caps);
    let cell = t.grid.cell_volume();
    let len = t.grid.len();
    let mut per_cap = vec![0.0; caps.len()];
    let (mut lhs, mut square) = (0.0, 0.0);
    for it in 0..t.time.len() {
        let w = t.time.weights[it] * cell;
        lhs += w * sum_abs_pow(&t.slice(&spec, it).data, p);
        let (sq, pows) = buckets
            .par_iter()
            .enumerate()
            .filter(|(_, b)| !b.is_empty())
            .fold(
                || (vec![0.0f64; len], Vec::new()),
                |(mut sq, mut pows), (j, b)| {
                    let g = t.slice(&restrict(&spec, b), it);
                    for (a, v) in sq.iter_mut().zip(&g.data) {
                        *a += v.norm_sqr();
                    }
                    pows.push((j, sum_abs_pow(&g.data, p)));
                    (sq, pows)
                },
            )
            .reduce(
                || (vec![0.0f64; len], Vec::new()),
                |(mut a, mut pa), (b, pb)| {
                    a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                    pa.extend(pb);
                    (a, pa)
                },
            );
        for (j, v) in pows {
            per_cap[j] += w * v;
        }
        square += w * sq.iter().map(|a| a.powf(0.5 * p)).sum::<f64>();
    }
    let r = p.recip();
    Ok(CapNorms { lhs: lhs.powf(r), decoupling: per_cap.iter().sum::<f64>().powf(r), square: square.powf(r), per_cap })
}

pub fn decoupling_norm(t: &StandardFormFIO, f: &SampledField, k: u32, p: f64, caps: &CapSystem) -> Result<f64> {
    Ok(cap_norms(t, f, k, p, caps)?.decoupling)
}

pub fn square_function_norm(t: &StandardFormFIO, f: &SampledField, k: u32, p: f64, caps: &CapSystem) -> Result<f64> {
    Ok(cap_norms(t, f, k, p, caps)?.square)
}

/// `(sum_{nu in keep} ||T chi_nu(D) f||_p^p)^{1/p}` from precomputed cap norms.
pub fn partial_decoupling(norms: &CapNorms, keep: &[usize], p: f64) -> f64 {
    keep.iter().map(|&j| norms.per_cap[j]).sum::<f64>().powf(p.recip())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fio::TimeGrid;
    use crate::norms::discrete_annulus_norm;
    use crate::spectral::PeriodicGrid;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn setup(seed: u64) -> (StandardFormFIO, SampledField, CapSystem) {
        let g = PeriodicGrid::new(2, 128, 2.0 * PI).unwrap();
        let f = SampledField::random_annulus(g, 8.0, 32.0, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let t = StandardFormFIO::half_wave(g, TimeGrid::uniform(0.0, 0.75, 7).unwrap());
        (t, f, CapSystem::build(4, 2).unwrap())
    }

    #[test]
    fn l2_identities() {
        let (t, f, caps) = setup(1);
        let r = cap_norms(&t, &f, 4, 2.0, &caps).unwrap();
        assert!((r.square - r.decoupling).abs() < 1e-10 * r.decoupling);
        // Plancherel at every time, with the (2 pi)^n normalization of T
        let fixed = discrete_annulus_norm(&f, 4, 2.0, &caps).unwrap();
        let expect = (0.75f64).sqrt() * (2.0 * PI).powi(2) * fixed;
        assert!((r.decoupling - expect).abs() < 1e-10 * expect);
    }

    #[test]
    fn single_cap_data() {
        let g = PeriodicGrid::new(2, 128, 2.0 * PI).unwrap();
        let caps = CapSystem::build(4, 2).unwrap();
        let c = caps.centers[3];
        let m = [(24.0 * c[0]).round() as i64, (24.0 * c[1]).round() as i64, 0];
        let f = SampledField::plane_wave(g, m);
        let t = StandardFormFIO::half_wave(g, TimeGrid::uniform(0.0, 0.5, 5).unwrap());
        let r = cap_norms(&t, &f, 4, 6.0, &caps).unwrap();
        assert!((r.decoupling - r.lhs).abs() <= 1e-8 * r.lhs);
        assert!((r.square - r.lhs).abs() <= 1e-8 * r.lhs);
    }

    #[test]
    fn holder_sandwich_and_monotonicity() {
        let (t, f, caps) = setup(2);
        let p = 6.0;
        let r = cap_norms(&t, &f, 4, p, &caps).unwrap();
        let active = r.per_cap.iter().filter(|v| **v > 0.0).count() as f64;
        assert!(r.decoupling <= r.square * (1.0 + 1e-12));
        assert!(r.square <= active.powf(0.5 - 1.0 / p) * r.decoupling * (1.0 + 1e-12));
        let all: Vec<usize> = (0..caps.len()).collect();
        let mut prev = partial_decoupling(&r, &all, p);
        assert!((prev - r.decoupling).abs() < 1e-12 * prev);
        for drop in 0..caps.len() {
            let v = partial_decoupling(&r, &all[drop + 1..], p);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn rejects_off_annulus_data() {
        let (t, _, caps) = setup(3);
        let f = SampledField::plane_wave(t.grid, [40, 0, 0]);
        assert!(cap_norms(&t, &f, 4, 4.0, &caps).is_err());
    }
}
