//! Half-wave propagation of the focusing family: FIO-norm invariance against
//! Lebesgue-norm growth, and the cap decoupling ladder.

use serde::{Deserialize, Serialize};

use super::families::{make_family, PacketFamilySpec};
use super::sharpness::SlopeReport;
use crate::decoupling::{wolff_experiment, DecouplingReport};
use crate::error::{Error, Result};
use crate::fio::{half_wave_propagator, StandardFormFIO, TimeGrid};
use crate::norms::hfio_norm;
use crate::spectral::lp_norm;
use crate::wavepacket::{DirectionSet, WavePacketFrame};

#[derive(Debug, Clone, Serialize)]
pub struct PropagationRow {
    pub p: f64,
    pub t: f64,
    pub k: u32,
    /// Norms of the data `e^{-it|D|} F`.
    pub hfio_data: f64,
    pub lp_data: f64,
    /// Norms of the focused field `F`.
    pub hfio_focused: f64,
    pub lp_focused: f64,
    pub hfio_ratio: f64,
    pub lp_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropagationCase {
    pub p: f64,
    pub t: f64,
    /// Largest over smallest FIO-norm ratio across levels.
    pub hfio_spread: f64,
    pub lp_slope: SlopeReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropagationReport {
    pub rows: Vec<PropagationRow>,
    pub cases: Vec<PropagationCase>,
    pub spread_cap: f64,
    pub min_lp_slope: f64,
    pub pass: bool,
}

/// For each `(p, t)`, data `f = e^{-it|D|} F` with `F` the focusing family,
/// compares `e^{it|D|} f = F` with `f` in the FIO norm and in `L^p`.
pub fn propagation_experiment(
    spec: &PacketFamilySpec,
    ps: &[f64],
    ts: &[f64],
    spread_cap: f64,
    min_lp_slope: f64,
    frame: &WavePacketFrame,
) -> Result<PropagationReport> {
    spec.validate()?;
    if ps.is_empty() || ts.is_empty() {
        return Err(Error::InvalidArgument("need at least one exponent and one time".into()));
    }
    let ks = spec.levels();
    let fams = ks.iter().map(|&k| make_family(spec, k)).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut cases = Vec::new();
    for &p in ps {
        for &t in ts {
            let mut hr = Vec::with_capacity(ks.len());
            let mut lr = Vec::with_capacity(ks.len());
            for fam in &fams {
                let dirs = DirectionSet::for_band(spec.n, spec.band(fam.k))?;
                let f = half_wave_propagator(&fam.field, -t);
                let row = PropagationRow {
                    p,
                    t,
                    k: fam.k,
                    hfio_data: hfio_norm(&f, 0.0, p, frame, &dirs)?,
                    lp_data: lp_norm(&f, p)?,
                    hfio_focused: hfio_norm(&fam.field, 0.0, p, frame, &dirs)?,
                    lp_focused: lp_norm(&fam.field, p)?,
                    hfio_ratio: 0.0,
                    lp_ratio: 0.0,
                };
                let row = PropagationRow {
                    hfio_ratio: row.hfio_focused / row.hfio_data,
                    lp_ratio: row.lp_focused / row.lp_data,
                    ..row
                };
                hr.push(row.hfio_ratio);
                lr.push(row.lp_ratio);
                rows.push(row);
            }
            let (lo, hi) = hr.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
            let quantity = format!("lp_ratio[p={p}, t={t}]");
            let mut lp_slope = SlopeReport::fit(&quantity, &ks, &lr, min_lp_slope, f64::INFINITY, f64::INFINITY)?;
            lp_slope.pass = lp_slope.slope >= min_lp_slope;
            cases.push(PropagationCase { p, t, hfio_spread: hi / lo, lp_slope });
        }
    }
    let pass = cases.iter().all(|c| c.hfio_spread <= spread_cap && c.lp_slope.pass);
    Ok(PropagationReport { rows, cases, spread_cap, min_lp_slope, pass })
}

/// Time window of the decoupling ladder, with nodes clustered around the focus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FocusTiming {
    pub t0: f64,
    pub t1: f64,
    /// The data focuses at this time.
    pub focus: f64,
    pub coarse: usize,
    /// Cluster half-width in units of `2^{-k/2} / c'`.
    pub width: f64,
    /// Cluster spacing in units of `2^{-k/2}`.
    pub fine: f64,
}

impl Default for FocusTiming {
    fn default() -> Self {
        Self { t0: 0.0, t1: 1.0, focus: 0.5, coarse: 17, width: 2.5, fine: 0.5 }
    }
}

impl FocusTiming {
    pub fn grid(&self, k: u32, cutoff: f64) -> Result<TimeGrid> {
        if !(self.t0 < self.focus && self.focus < self.t1) || self.coarse < 2 || !(self.width > 0.0 && self.fine > 0.0) {
            return Err(Error::InvalidArgument(format!("time window {self:?}")));
        }
        let h = (-0.5 * k as f64).exp2();
        TimeGrid::clustered(self.t0, self.t1, self.coarse, self.focus, self.width * h / cutoff, self.fine * h)
    }
}

/// Largest admissible slope of `||Tf||_p / ||f||_{H^{d-s+eps,p}_FIO}`.
pub const HFIO_SLOPE_BOUND: f64 = 0.1;

/// Decoupling ladder for the half-wave group on the focusing family.
pub fn focusing_wolff(spec: &PacketFamilySpec, p: f64, eps: f64, timing: &FocusTiming, frame: &WavePacketFrame) -> Result<DecouplingReport> {
    spec.validate()?;
    wolff_experiment(p, &spec.levels(), eps, frame, |k| {
        let fam = make_family(spec, k)?;
        let f = half_wave_propagator(&fam.field, -timing.focus);
        Ok((StandardFormFIO::half_wave(f.grid, timing.grid(k, spec.cutoff)?), f))
    })
}

/// Both slope conditions of the ladder.
pub fn wolff_verdict(r: &DecouplingReport) -> bool {
    r.slope_pass == Some(true) && r.hfio_slope.is_some_and(|f| f.slope <= HFIO_SLOPE_BOUND)
}
