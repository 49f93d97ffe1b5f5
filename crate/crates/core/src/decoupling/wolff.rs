//! Dyadic ladders comparing `||Tf||_p` with the decoupling norm and with
//! the `H^{s,p}_FIO` norm of the data.

use std::path::Path;

use serde::Serialize;

use super::caps::CapSystem;
use super::norms::cap_norms;
use crate::error::{Error, Result};
use crate::fio::StandardFormFIO;
use crate::fit::{log2_slope, LinearFit};
use crate::norms::{exponents_f64, hfio_norm};
use crate::spectral::{lp_norm, SampledField};
use crate::wavepacket::{DirectionSet, WavePacketFrame};

#[derive(Debug, Clone, Serialize)]
pub struct WolffLevel {
    pub k: u32,
    pub lhs: f64,
    pub dec_norm: f64,
    pub sq_norm: f64,
    pub hfio_norm: f64,
    pub l2_norm: f64,
    pub caps: usize,
    /// `lhs / dec_norm`, absent for vanishing data.
    pub dec_ratio: Option<f64>,
    /// `lhs / hfio_norm`, absent for vanishing data.
    pub hfio_ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecouplingReport {
    pub n: usize,
    pub p: f64,
    pub eps: f64,
    pub order: f64,
    pub d: f64,
    pub s: f64,
    /// Smoothness index `m + d(p) - s(p) + eps` of the data norm.
    pub data_index: f64,
    pub levels: Vec<WolffLevel>,
    pub degenerate: bool,
    pub dec_slope: Option<LinearFit>,
    pub hfio_slope: Option<LinearFit>,
    /// `d(p) + eps + 0.1`.
    pub slope_bound: f64,
    pub slope_pass: Option<bool>,
}

impl DecouplingReport {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["k", "lhs", "dec_norm", "sq_norm", "hfio_norm", "l2_norm"])?;
        for l in &self.levels {
            w.write_record(&[
                l.k.to_string(),
                l.lhs.to_string(),
                l.dec_norm.to_string(),
                l.sq_norm.to_string(),
                l.hfio_norm.to_string(),
                l.l2_norm.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs the ladder; `make(k)` supplies the operator and annulus data at level `k`.
pub fn wolff_experiment<F>(p: f64, ks: &[u32], eps: f64, frame: &WavePacketFrame, mut make: F) -> Result<DecouplingReport>
where
    F: FnMut(u32) -> Result<(StandardFormFIO, SampledField)>,
{
    if ks.len() < 3 {
        return Err(Error::InvalidArgument(format!("slope fit needs at least 3 levels, got {}", ks.len())));
    }
    if ks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("levels must be strictly increasing".into()));
    }
    let n = frame.n;
    let ex = exponents_f64(n, p)?;
    let mut levels = Vec::with_capacity(ks.len());
    let mut order = 0.0;
    for &k in ks {
        let (t, f) = make(k)?;
        order = t.symbol.order();
        let caps = CapSystem::build(k, n)?;
        let cn = cap_norms(&t, &f, k, p, &caps)?;
        let dirs = DirectionSet::for_level(n, k)?;
        let h = hfio_norm(&f, order + ex.gap_f64() + eps, p, frame, &dirs)?;
        let ratio = |den: f64| if cn.lhs > 0.0 && den > 0.0 { Some(cn.lhs / den) } else { None };
        levels.push(WolffLevel {
            k,
            lhs: cn.lhs,
            dec_norm: cn.decoupling,
            sq_norm: cn.square,
            hfio_norm: h,
            l2_norm: lp_norm(&f, 2.0)?,
            caps: caps.len(),
            dec_ratio: ratio(cn.decoupling),
            hfio_ratio: ratio(h),
        });
    }
    let degenerate = levels.iter().any(|l| l.dec_ratio.is_none() || l.hfio_ratio.is_none());
    let kf: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    let (dec_slope, hfio_slope) = if degenerate {
        (None, None)
    } else {
        let dr: Vec<f64> = levels.iter().filter_map(|l| l.dec_ratio).collect();
        let hr: Vec<f64> = levels.iter().filter_map(|l| l.hfio_ratio).collect();
        (Some(log2_slope(&kf, &dr)?), Some(log2_slope(&kf, &hr)?))
    };
    let slope_bound = ex.d_f64() + eps + 0.1;
    Ok(DecouplingReport {
        n,
        p,
        eps,
        order,
        d: ex.d_f64(),
        s: ex.s_f64(),
        data_index: order + ex.gap_f64() + eps,
        levels,
        degenerate,
        dec_slope,
        hfio_slope,
        slope_bound,
        slope_pass: dec_slope.map(|f| f.slope <= slope_bound),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fio::TimeGrid;
    use crate::spectral::PeriodicGrid;
    use std::f64::consts::PI;

    fn grid_for(k: u32) -> PeriodicGrid {
        PeriodicGrid::for_band(2, 2.0 * PI, (2.0f64).powi(k as i32 + 1), 0.05).unwrap()
    }

    #[test]
    fn vanishing_data_is_degenerate() {
        let frame = WavePacketFrame::standard(2).unwrap();
        let rep = wolff_experiment(6.0, &[2, 3, 4], 0.0, &frame, |k| {
            let g = grid_for(k);
            Ok((StandardFormFIO::half_wave(g, TimeGrid::uniform(0.0, 0.5, 3)?), SampledField::zeros(g)))
        })
        .unwrap();
        assert!(rep.degenerate && rep.dec_slope.is_none() && rep.slope_pass.is_none());
    }

    #[test]
    fn single_cap_family_has_unit_ratio() {
        let frame = WavePacketFrame::standard(2).unwrap();
        let rep = wolff_experiment(6.0, &[2, 3, 4], 0.0, &frame, |k| {
            let g = grid_for(k);
            let caps = CapSystem::build(k, 2)?;
            let c = caps.centers[0];
            let r = 1.5 * (k as f64).exp2();
            let f = SampledField::plane_wave(g, [(r * c[0]).round() as i64, (r * c[1]).round() as i64, 0]);
            Ok((StandardFormFIO::half_wave(g, TimeGrid::uniform(0.0, 0.5, 3)?), f))
        })
        .unwrap();
        for l in &rep.levels {
            assert!((l.dec_ratio.unwrap() - 1.0).abs() < 1e-8);
        }
        assert!(rep.dec_slope.unwrap().slope.abs() < 1e-8);
        assert_eq!(rep.slope_pass, Some(true));
    }

    #[test]
    fn needs_three_levels() {
        let frame = WavePacketFrame::standard(2).unwrap();
        let r = wolff_experiment(6.0, &[3, 4], 0.0, &frame, |_| unreachable!());
        assert!(r.is_err());
    }
}
