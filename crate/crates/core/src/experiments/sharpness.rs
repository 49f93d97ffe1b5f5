//! Dyadic slope laws of the FIO-adapted norm on the packet families.

use serde::Serialize;

use super::families::{make_family, FamilyKind, PacketFamilySpec};
use crate::error::Result;
use crate::fit::log2_slope;
use crate::norms::hfio_norm;
use crate::wavepacket::{DirectionSet, WavePacketFrame};

pub const SLOPE_TOLERANCE: f64 = 0.1;
pub const RESIDUAL_CAP: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct SlopeReport {
    pub quantity: String,
    pub ks: Vec<u32>,
    pub log2_values: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub predicted: f64,
    pub tolerance: f64,
    pub residual_cap: f64,
    pub pass: bool,
}

impl SlopeReport {
    /// Fits `log2 values` against `ks` and compares with `predicted`.
    pub fn fit(quantity: &str, ks: &[u32], values: &[f64], predicted: f64, tolerance: f64, residual_cap: f64) -> Result<Self> {
        let kf: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
        let fit = log2_slope(&kf, values)?;
        Ok(Self {
            quantity: quantity.into(),
            ks: ks.to_vec(),
            log2_values: values.iter().map(|v| v.log2()).collect(),
            slope: fit.slope,
            intercept: fit.intercept,
            residual: fit.residual,
            predicted,
            tolerance,
            residual_cap,
            pass: (fit.slope - predicted).abs() <= tolerance && fit.residual <= residual_cap,
        })
    }
}

/// Predicted growth exponent of the norm of the level-`k` family.
pub fn predicted_slope(kind: FamilyKind, n: usize, s: f64, p: f64) -> f64 {
    let m = (n as f64 - 1.0) / 2.0;
    match kind {
        FamilyKind::Focusing => s + m * (0.5 - 1.0 / p) - 1.0 / p,
        FamilyKind::UnitScale => s + m / 2.0,
        // a single packet of either kind
        FamilyKind::SinglePacket => s + m * (0.5 - 1.0 / p) - (n as f64 + 1.0) / (2.0 * p) + m / p,
        FamilyKind::SingleUnitPacket => s + m * (0.5 - 1.0 / p) + m / p,
    }
}

/// Norm of the family at each level of `spec`.
pub fn family_norms(spec: &PacketFamilySpec, s: f64, p: f64, frame: &WavePacketFrame) -> Result<Vec<f64>> {
    spec.levels()
        .into_iter()
        .map(|k| {
            let fam = make_family(spec, k)?;
            let dirs = DirectionSet::for_band(spec.n, spec.band(k))?;
            hfio_norm(&fam.field, s, p, frame, &dirs)
        })
        .collect()
}

pub fn sharpness_experiment(spec: &PacketFamilySpec, s: f64, p: f64, frame: &WavePacketFrame) -> Result<SlopeReport> {
    spec.validate()?;
    let values = family_norms(spec, s, p, frame)?;
    let quantity = format!("hfio_norm[{:?}, s={s}, p={p}]", spec.kind).to_lowercase();
    SlopeReport::fit(&quantity, &spec.levels(), &values, predicted_slope(spec.kind, spec.n, s, p), SLOPE_TOLERANCE, RESIDUAL_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predicted_values() {
        assert!(predicted_slope(FamilyKind::Focusing, 2, 0.0, 6.0).abs() < 1e-15);
        assert!((predicted_slope(FamilyKind::UnitScale, 2, 0.0, 6.0) - 0.25).abs() < 1e-15);
        assert!((predicted_slope(FamilyKind::UnitScale, 3, 1.0, 4.0) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn verdict_needs_slope_and_residual() {
        let ks = [3, 4, 5, 6];
        let v: Vec<f64> = ks.iter().map(|&k| (0.3 * k as f64).exp2()).collect();
        let r = SlopeReport::fit("x", &ks, &v, 0.25, 0.1, 0.05).unwrap();
        assert!(r.pass && r.residual < 1e-12);
        assert!(!SlopeReport::fit("x", &ks, &v, 0.1, 0.1, 0.05).unwrap().pass);
        let noisy = [1.0, 4.0, 1.0, 4.0];
        assert!(!SlopeReport::fit("x", &ks, &noisy, 0.0, 10.0, 0.05).unwrap().pass);
        assert!(SlopeReport::fit("x", &ks[..2], &v[..2], 0.0, 0.1, 0.05).is_err());
    }
}
