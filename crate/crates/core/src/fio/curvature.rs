//! Cinematic curvature: rank of the mixed Hessian and of the Hessian of
//! `d_z Phi . G` along the Gauss map.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::phase::{PhaseFunction, Zpt};
use crate::error::{Error, Result};
use crate::spectral::grid::norm;

pub const DEFAULT_RANK_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureSample {
    pub z: Vec<f64>,
    pub eta: Vec<f64>,
    pub mixed_rank: usize,
    pub mixed_singular_values: Vec<f64>,
    pub gauss_map: Vec<f64>,
    /// `|G_0|` before normalization.
    pub gauss_norm: f64,
    pub second_rank: usize,
    pub second_singular_values: Vec<f64>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureReport {
    pub phase: String,
    pub threshold: f64,
    pub samples: Vec<CurvatureSample>,
    /// Smallest singular value counted toward the rank of the second Hessian.
    pub min_retained_singular_value: Option<f64>,
    pub degenerate_count: usize,
    pub cinematic: bool,
}

/// Wedge product of the `n` columns of an `(n+1) x n` matrix.
pub fn wedge(m: &DMatrix<f64>) -> DVector<f64> {
    let rows = m.nrows();
    DVector::from_fn(rows, |j, _| {
        let minor = m.clone().remove_row(j);
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sign * minor.determinant()
    })
}

fn rank(sv: &[f64], threshold: f64) -> usize {
    let top = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > threshold * top && s > 0.0).count()
}

fn sorted_sv(m: &DMatrix<f64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn curvature_check(phase: &dyn PhaseFunction, samples: &[(Zpt, [f64; 3])], threshold: f64) -> Result<CurvatureReport> {
    let n = phase.dim();
    let mut out = Vec::with_capacity(samples.len());
    let mut min_kept: Option<f64> = None;
    let mut cinematic = !samples.is_empty();
    let mut degenerate_count = 0;
    for (z, eta) in samples {
        if norm(eta) == 0.0 {
            return Err(Error::InvalidArgument("curvature sample with eta = 0".into()));
        }
        let mixed = phase.mixed_hessian(z, eta);
        let xeta = mixed.rows(0, n).into_owned();
        let sv1 = sorted_sv(&xeta);
        let r1 = rank(&sv1, threshold);
        let g0 = wedge(&mixed);
        let gn = g0.norm();
        let degenerate = gn < 1e-12;
        let (g, sv2, r2) = if degenerate {
            degenerate_count += 1;
            (g0.clone(), Vec::new(), 0)
        } else {
            let g = &g0 / gn;
            let h = phase.hessian_eta_along(z, eta, &g);
            let sv2 = sorted_sv(&h);
            let r2 = rank(&sv2, threshold);
            (g, sv2, r2)
        };
        if r1 == n && r2 == n - 1 && !degenerate {
            let top = sv2.first().copied().unwrap_or(0.0);
            for &s in &sv2 {
                if s > threshold * top && s > 0.0 {
                    min_kept = Some(min_kept.map_or(s, |m: f64| m.min(s)));
                }
            }
        } else {
            cinematic = false;
        }
        out.push(CurvatureSample {
            z: z[..=n].to_vec(),
            eta: eta[..n].to_vec(),
            mixed_rank: r1,
            mixed_singular_values: sv1,
            gauss_map: g.iter().copied().collect(),
            gauss_norm: gn,
            second_rank: r2,
            second_singular_values: sv2,
            degenerate,
        });
    }
    Ok(CurvatureReport {
        phase: phase.name(),
        threshold,
        samples: out,
        min_retained_singular_value: min_kept,
        degenerate_count,
        cinematic,
    })
}
