//! `||q(D) <D>^s f||_p + (sum_i w_i ||phi_{omega_i}(D) <D>^s f||_p^p)^{1/p}`.

use num_complex::Complex64;
use serde::Serialize;

use super::{bucket_lp_pow, Bucket};
use crate::error::{Error, Result};
use crate::profile::BumpProfile;
use crate::spectral::grid::norm;
use crate::spectral::norms::check_exponent;
use crate::spectral::SampledField;
use crate::wavepacket::frame::chord;
use crate::wavepacket::{DirectionSet, WavePacketFrame};

/// Low-frequency cutoff: 1 on `|xi| <= 2`, 0 beyond 4.
#[inline]
pub fn low_cutoff(r: f64) -> f64 {
    BumpProfile::scaled(2.0, 4.0, r)
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadratureMeta {
    pub directions: usize,
    pub direction_spacing: f64,
    pub band: f64,
    pub grid_size: usize,
    pub period: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormRecord {
    pub norm_id: String,
    pub params: serde_json::Value,
    pub value: f64,
    /// `||q(D) <D>^s f||_p`.
    pub low: f64,
    /// Directional part.
    pub directional: f64,
    pub quadrature_meta: QuadratureMeta,
}

pub fn hfio_norm(f: &SampledField, s: f64, p: f64, frame: &WavePacketFrame, dirs: &DirectionSet) -> Result<f64> {
    Ok(hfio_norm_record(f, s, p, frame, dirs)?.value)
}

pub fn hfio_norm_record(f: &SampledField, s: f64, p: f64, frame: &WavePacketFrame, dirs: &DirectionSet) -> Result<NormRecord> {
    check_exponent(p)?;
    let grid = f.grid;
    let n = grid.dim();
    if frame.n != n || dirs.n != n {
        return Err(Error::InvalidArgument(format!("field dimension {n}, frame {}, directions {}", frame.n, dirs.n)));
    }
    let spec = f.spectrum();
    let band = f.band_limit.unwrap_or_else(|| spec.measured_band(1e-12));
    if band > 0.125 && dirs.spacing() > WavePacketFrame::chord_bound(band) {
        return Err(Error::Resolution(format!(
            "direction spacing {:.4} exceeds packet width {:.4} at |xi| = {band:.1}",
            dirs.spacing(),
            WavePacketFrame::chord_bound(band)
        )));
    }
    let mut coeffs = spec.coeffs;
    if s != 0.0 {
        for (i, c) in coeffs.iter_mut().enumerate() {
            let r = norm(&grid.freq(i));
            *c *= (1.0 + r * r).powf(0.5 * s);
        }
    }
    let mut low: Bucket = Vec::new();
    let mut per_dir: Vec<Bucket> = vec![Vec::new(); dirs.len()];
    let mut near = Vec::new();
    for (i, c) in coeffs.iter().enumerate() {
        if *c == Complex64::default() {
            continue;
        }
        let xi = grid.freq(i);
        let r = norm(&xi);
        let q = low_cutoff(r);
        if q > 0.0 {
            low.push((i as u32, q));
        }
        if r < 0.125 {
            continue;
        }
        let u = [xi[0] / r, xi[1] / r, xi[2] / r];
        dirs.near(&u, WavePacketFrame::chord_bound(r) * (1.0 + 1e-12), &mut near);
        for &j in &near {
            let v = frame.packet(r, chord(&xi, r, &dirs.nodes[j]));
            if v != 0.0 {
                per_dir[j].push((i as u32, v));
            }
        }
    }
    per_dir.push(low);
    let mut pows = bucket_lp_pow(&grid, &coeffs, &per_dir, p);
    let low = pows.pop().unwrap_or(0.0).powf(p.recip());
    let dir_sum: f64 = pows.iter().zip(&dirs.weights).map(|(v, w)| v * w).sum();
    let directional = dir_sum.powf(p.recip());
    Ok(NormRecord {
        norm_id: "hfio".into(),
        params: serde_json::json!({ "s": s, "p": p, "n": n }),
        value: low + directional,
        low,
        directional,
        quadrature_meta: QuadratureMeta {
            directions: dirs.len(),
            direction_spacing: dirs.spacing(),
            band,
            grid_size: grid.size(),
            period: grid.period(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{lp_norm, PeriodicGrid};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn frame2() -> std::sync::Arc<WavePacketFrame> {
        WavePacketFrame::standard(2).unwrap()
    }

    #[test]
    fn low_frequency_field_is_plain_lp() {
        let g = PeriodicGrid::new(2, 32, 64.0 * PI).unwrap();
        // |xi| = 1/32 and 2/32
        let mut f = SampledField::plane_wave(g, [1, 0, 0]);
        f.axpy(Complex64::new(0.5, 0.3), &SampledField::plane_wave(g, [0, -2, 0])).unwrap();
        let dirs = DirectionSet::for_level(2, 0).unwrap();
        let r = hfio_norm_record(&f, 0.0, 4.0, &frame2(), &dirs).unwrap();
        assert_eq!(r.directional, 0.0);
        let lp = lp_norm(&f, 4.0).unwrap();
        assert!((r.value - lp).abs() < 1e-12 * lp);
    }

    #[test]
    fn translation_invariance() {
        let g = PeriodicGrid::new(2, 64, 8.0 * PI).unwrap();
        let f = SampledField::random_annulus(g, 4.0, 7.0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let dirs = DirectionSet::for_level(2, 3).unwrap();
        let fr = frame2();
        let a = hfio_norm(&f, 0.0, 6.0, &fr, &dirs).unwrap();
        for shift in [[3, 0, 0], [-7, 11, 0]] {
            let b = hfio_norm(&f.shifted(shift), 0.0, 6.0, &fr, &dirs).unwrap();
            assert!((a - b).abs() < 1e-6 * a);
        }
    }

    #[test]
    fn smoothness_index_scales_single_mode() {
        let g = PeriodicGrid::new(2, 64, 2.0 * PI).unwrap();
        let f = SampledField::plane_wave(g, [12, 5, 0]);
        let dirs = DirectionSet::for_level(2, 4).unwrap();
        let fr = frame2();
        let a = hfio_norm(&f, 0.0, 3.0, &fr, &dirs).unwrap();
        let b = hfio_norm(&f, 1.5, 3.0, &fr, &dirs).unwrap();
        assert!((b / a - 170f64.powf(0.75)).abs() < 1e-10 * b / a);
    }

    #[test]
    fn coarse_directions_are_rejected() {
        let g = PeriodicGrid::new(2, 128, 2.0 * PI).unwrap();
        let f = SampledField::plane_wave(g, [60, 0, 0]);
        let dirs = DirectionSet::circle(8, 0.0);
        assert!(matches!(hfio_norm(&f, 0.0, 4.0, &frame2(), &dirs), Err(Error::Resolution(_))));
        assert!(hfio_norm(&f, 0.0, 1.0, &frame2(), &dirs).is_err());
    }
}
