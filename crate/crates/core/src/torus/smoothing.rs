//! Space-time `L^p` norms of wave solutions against FIO and Sobolev norms of
//! the data, level by level.

use serde::Serialize;

use super::atlas::TorusAtlas;
use super::norm::{chart_directions, hfio_norm_torus};
use crate::error::{Error, Result};
use crate::fio::propagator::wave_solution_spectrum;
use crate::fit::{log2_slope, LinearFit};
use crate::norms::{exponents_f64, hfio_norm};
use crate::spectral::norms::sum_abs_pow;
use crate::spectral::{sobolev_norm, SampledField};
use crate::wavepacket::{DirectionSet, WavePacketFrame};

/// Initial data `(u0, u1)` at dyadic level `k`.
#[derive(Debug, Clone)]
pub struct SmoothingData {
    pub k: u32,
    pub u0: SampledField,
    pub u1: SampledField,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SmoothingConfig {
    pub p: f64,
    pub eps: f64,
    pub t0: f64,
    /// Uniform nodes on `[-t0, t0]`.
    pub nodes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SmoothingLevel {
    pub k: u32,
    /// `(int_{-t0}^{t0} ||u(t)||_p^p dt)^{1/p}`.
    pub lhs: f64,
    /// `||u0||_{FIO, d-s+eps} + ||u1||_{FIO, d-s-1+eps}`.
    pub fio_side: f64,
    /// `||u0||_{W^{d+eps,p}} + ||u1||_{W^{d-1+eps,p}}`.
    pub sobolev_side: f64,
    pub fio_ratio: f64,
    pub sobolev_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SmoothingReport {
    pub config: SmoothingConfig,
    pub d: f64,
    pub s: f64,
    pub levels: Vec<SmoothingLevel>,
    pub fio_slope: Option<LinearFit>,
    pub sobolev_slope: Option<LinearFit>,
}

pub fn space_time_lp(u0: &SampledField, u1: &SampledField, p: f64, t0: f64, nodes: usize) -> Result<f64> {
    if nodes < 2 {
        return Err(Error::InvalidArgument("need at least two time nodes".into()));
    }
    let (s0, s1) = (u0.spectrum(), u1.spectrum());
    let dt = 2.0 * t0 / (nodes - 1) as f64;
    let mut acc = 0.0;
    for i in 0..nodes {
        let t = -t0 + dt * i as f64;
        let mut s = wave_solution_spectrum(&s0, &s1, t);
        s.band_limit = None;
        let f = s.to_field();
        let w = if i == 0 || i == nodes - 1 { 0.5 * dt } else { dt };
        acc += w * sum_abs_pow(&f.data, p) * f.grid.cell_volume();
    }
    Ok(acc.powf(p.recip()))
}

/// With an atlas the FIO norms are taken through its charts; without one the
/// grid stands in for the whole space.
pub fn local_smoothing_probe(
    data: &[SmoothingData],
    cfg: SmoothingConfig,
    atlas: Option<&TorusAtlas>,
    frame: &WavePacketFrame,
) -> Result<SmoothingReport> {
    if !(cfg.p > 2.0 && cfg.p.is_finite()) {
        return Err(Error::InvalidExponent(cfg.p));
    }
    let n = frame.n;
    let ex = exponents_f64(n, cfg.p)?;
    let (d, s) = (ex.d_f64(), ex.s_f64());
    let fio_index = d - s + cfg.eps;
    let mut levels = Vec::with_capacity(data.len());
    for item in data {
        let lhs = space_time_lp(&item.u0, &item.u1, cfg.p, cfg.t0, cfg.nodes)?;
        let fio = |f: &SampledField, idx: f64| -> Result<f64> {
            if f.data.iter().all(|v| v.re == 0.0 && v.im == 0.0) {
                return Ok(0.0);
            }
            match atlas {
                Some(a) => hfio_norm_torus(f, idx, cfg.p, a, frame, &chart_directions(a)?),
                None => {
                    let band = f.band_limit.unwrap_or_else(|| f.spectrum().measured_band(1e-12));
                    hfio_norm(f, idx, cfg.p, frame, &DirectionSet::for_band(n, band)?)
                }
            }
        };
        let fio_side = fio(&item.u0, fio_index)? + fio(&item.u1, fio_index - 1.0)?;
        let sobolev_side = sobolev_norm(&item.u0, d + cfg.eps, cfg.p)? + sobolev_norm(&item.u1, d - 1.0 + cfg.eps, cfg.p)?;
        levels.push(SmoothingLevel {
            k: item.k,
            lhs,
            fio_side,
            sobolev_side,
            fio_ratio: lhs / fio_side,
            sobolev_ratio: lhs / sobolev_side,
        });
    }
    let ks: Vec<f64> = levels.iter().map(|l| l.k as f64).collect();
    let slope = |vals: Vec<f64>| if ks.len() >= 3 { log2_slope(&ks, &vals).ok() } else { None };
    let fio_slope = slope(levels.iter().map(|l| l.fio_ratio).collect());
    let sobolev_slope = slope(levels.iter().map(|l| l.sobolev_ratio).collect());
    Ok(SmoothingReport { config: cfg, d, s, levels, fio_slope, sobolev_slope })
}
