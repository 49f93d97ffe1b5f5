//! `H^{s,p}_FIO` norm on the torus: the `l^p` sum of chart norms.

use super::atlas::TorusAtlas;
use crate::error::Result;
use crate::norms::hfio_norm;
use crate::spectral::norms::check_exponent;
use crate::spectral::SampledField;
use crate::wavepacket::{DirectionSet, WavePacketFrame};

pub fn hfio_norm_torus(
    u: &SampledField,
    s: f64,
    p: f64,
    atlas: &TorusAtlas,
    frame: &WavePacketFrame,
    dirs: &DirectionSet,
) -> Result<f64> {
    check_exponent(p)?;
    let q = atlas.q_restrict(u)?;
    let mut acc = 0.0;
    for e in &q.entries {
        if e.data.iter().all(|v| v.re == 0.0 && v.im == 0.0) {
            continue;
        }
        acc += hfio_norm(e, s, p, frame, dirs)?.powf(p);
    }
    Ok(acc.powf(p.recip()))
}

/// Direction set resolving the whole frequency range of the atlas's chart grid.
pub fn chart_directions(atlas: &TorusAtlas) -> Result<DirectionSet> {
    DirectionSet::for_band(atlas.spec.n, atlas.chart_grid.nyquist() * std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::lp_norm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn zero_field() {
        let a = TorusAtlas::uniform(2, 2.0 * PI, 32, 4).unwrap();
        let frame = WavePacketFrame::standard(2).unwrap();
        let dirs = chart_directions(&a).unwrap();
        assert_eq!(hfio_norm_torus(&SampledField::zeros(a.grid), 0.0, 4.0, &a, &frame, &dirs).unwrap(), 0.0);
    }

    #[test]
    fn l2_equivalence_window() {
        let frame = WavePacketFrame::standard(2).unwrap();
        let a = TorusAtlas::uniform(2, 2.0 * PI, 128, 4).unwrap();
        let dirs = chart_directions(&a).unwrap();
        let g = a.grid;
        let mut ratios = Vec::new();
        for k in 2..=4u32 {
            for seed in 0..2 {
                let lo = (k as f64 - 1.0).exp2();
                let f = SampledField::random_annulus(g, lo, 4.0 * lo, &mut ChaCha8Rng::seed_from_u64(seed + 10 * k as u64)).unwrap();
                let v = hfio_norm_torus(&f, 0.0, 2.0, &a, &frame, &dirs).unwrap();
                ratios.push(v / lp_norm(&f, 2.0).unwrap());
            }
        }
        let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(*r), b.max(*r)));
        assert!(hi / lo <= 4.0, "{ratios:?}");
    }
}
