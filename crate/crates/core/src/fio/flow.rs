//! Comparison of `Th(z)` with `(2 pi)^n h(d_eta Phi(z, nu))` for data
//! concentrated near the direction `nu`.

use num_complex::Complex64;
use serde::Serialize;

use super::operator::StandardFormFIO;
use super::phase::{zpt, Zpt};
use crate::error::{Error, Result};
use crate::spectral::grid::norm;
use crate::spectral::{SampledField, Spectrum};

#[derive(Debug, Clone, Serialize)]
pub struct FlowPoint {
    pub z: Vec<f64>,
    pub discrepancy: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowReport {
    pub points: Vec<FlowPoint>,
    /// `sum |h^(eta)| d eta`.
    pub l1_norm: f64,
    /// `sup |eta^ - nu| |eta|` over the spectral support.
    pub gamma: f64,
    pub max_ratio: f64,
}

/// Spectral interpolation `sum_eta h^(eta) e^{i y.eta} d eta = (2 pi)^n h(y)`.
pub fn scaled_interpolant(s: &Spectrum, y: &[f64; 3]) -> Complex64 {
    let dv = s.grid.freq_step().powi(s.grid.dim() as i32);
    let mut acc = Complex64::default();
    for (i, c) in s.coeffs.iter().enumerate() {
        if c.re != 0.0 || c.im != 0.0 {
            let eta = s.grid.freq(i);
            acc += (c * dv) * Complex64::from_polar(1.0, y[0] * eta[0] + y[1] * eta[1] + y[2] * eta[2]);
        }
    }
    acc
}

pub fn flow_diagnostic(t: &StandardFormFIO, h: &SampledField, nu: &[f64; 3], zs: &[Zpt]) -> Result<FlowReport> {
    let n = t.grid.dim();
    if (norm(nu) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument("nu must be a unit vector".into()));
    }
    // transform round-off below 1e-14 relative is treated as exact zero
    let mut s = h.spectrum();
    let mx = s.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for c in s.coeffs.iter_mut() {
        if c.norm() <= 1e-14 * mx {
            *c = Complex64::default();
        }
    }
    t.check_input(&s)?;
    let dv = t.grid.freq_step().powi(n as i32);
    let origin = zpt(&[0.0; 3], 0.0, n);
    let mut l1 = 0.0;
    let mut gamma: f64 = 0.0;
    for (i, c) in s.coeffs.iter().enumerate() {
        if c.re == 0.0 && c.im == 0.0 {
            continue;
        }
        let eta = t.grid.freq(i);
        let r = norm(&eta);
        if r < 0.5 {
            return Err(Error::InvalidArgument(format!("spectral support reaches |eta| = {r:.3} < 1/2")));
        }
        let ph = t.phase.eval(&origin, &eta);
        let a = t.symbol.eval(&[0.0; 3], 0.0, &eta);
        if ph.abs() > 1e-12 * r || (a - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "normalization fails at eta = {:?}: Phi(0, eta) = {ph:e}, a(0, eta) = {a}",
                &eta[..n]
            )));
        }
        l1 += c.norm() * dv;
        let d = [eta[0] / r - nu[0], eta[1] / r - nu[1], eta[2] / r - nu[2]];
        gamma = gamma.max(norm(&d) * r);
    }
    let mut points = Vec::with_capacity(zs.len());
    let mut max_ratio: f64 = 0.0;
    for z in zs {
        let x = [z[0], z[1], if n == 3 { z[2] } else { 0.0 }];
        let th = t.eval_at(&s, &x, z[n]);
        let y = t.phase.grad_eta(z, nu);
        let flow = scaled_interpolant(&s, &y);
        let disc = (th - flow).norm();
        let zn = z[..=n].iter().map(|v| v * v).sum::<f64>().sqrt();
        let ratio = if zn == 0.0 { 0.0 } else { disc / (l1 * zn * (1.0 + gamma)) };
        max_ratio = max_ratio.max(ratio);
        points.push(FlowPoint { z: z[..=n].to_vec(), discrepancy: disc, ratio });
    }
    Ok(FlowReport { points, l1_norm: l1, gamma, max_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fio::operator::TimeGrid;
    use crate::fio::phase::PhaseSpec;
    use crate::spectral::PeriodicGrid;
    use std::f64::consts::PI;

    #[test]
    fn single_mode_closed_form() {
        let g = PeriodicGrid::new(2, 32, 2.0 * PI).unwrap();
        let h = SampledField::plane_wave(g, [4, 1, 0]);
        let t = StandardFormFIO::half_wave(g, TimeGrid::instant(0.0));
        let nu = [1.0, 0.0, 0.0];
        let zs = [zpt(&[0.0; 3], 0.0, 2), zpt(&[0.1, -0.05, 0.0], 0.2, 2), zpt(&[0.0, 0.3, 0.0], -0.1, 2)];
        let rep = flow_diagnostic(&t, &h, &nu, &zs).unwrap();
        assert_eq!(rep.points[0].discrepancy, 0.0);
        let xi = [4.0, 1.0, 0.0];
        let scale = rep.l1_norm;
        for (z, p) in zs.iter().zip(&rep.points) {
            let phi = t.phase.eval(z, &xi);
            let y = t.phase.grad_eta(z, &nu);
            let lin = y[0] * xi[0] + y[1] * xi[1];
            let expect = (Complex64::from_polar(1.0, phi - lin) - 1.0).norm() * scale;
            assert!((p.discrepancy - expect).abs() < 1e-10 * scale.max(1.0));
        }
    }

    #[test]
    fn normalization_is_checked() {
        let g = PeriodicGrid::new(2, 32, 2.0 * PI).unwrap();
        let h = SampledField::plane_wave(g, [4, 1, 0]);
        let mut t = StandardFormFIO::half_wave(g, TimeGrid::instant(0.0));
        t.symbol = std::sync::Arc::new(crate::fio::symbol::ProductSymbol { inner: 10.0, outer: 20.0, order: 1.0 });
        assert!(flow_diagnostic(&t, &h, &[1.0, 0.0, 0.0], &[]).is_err());
        t.phase = PhaseSpec::VariableSpeed { eps: 0.1 }.build(2).unwrap();
        let low = SampledField::plane_wave(g, [0, 0, 0]);
        assert!(flow_diagnostic(&t, &low, &[1.0, 0.0, 0.0], &[]).is_err());
    }
}
