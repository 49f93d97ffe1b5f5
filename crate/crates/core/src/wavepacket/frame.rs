use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use super::directions::DirectionSet;
use super::table::Table2;
use crate::error::{Error, Result};
use crate::profile::{smooth_step, AnnulusProfile, BumpProfile};
use crate::quadrature::GaussLegendre;
use crate::spectral::grid::norm;
use crate::spectral::{FourierMultiplier, MultiplierMeta};

const TABLE_RHO_MIN: f64 = 0.5;

/// Tunable numerics of the frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FrameConfig {
    /// Plateau radius of the mollifier profile.
    pub r0: f64,
    /// Panels of the composite Gauss-Legendre rule in `log sigma`.
    pub sigma_panels: usize,
    /// Largest `|xi|` covered by the interpolation table.
    pub table_rho_max: f64,
    pub table_rows: usize,
    pub table_cols: usize,
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self { r0: 0.5, sigma_panels: 64, table_rho_max: 8192.0, table_rows: 448, table_cols: 448 }
    }
}

/// The packet symbols `phi_omega` and their ingredients.
///
/// `phi_omega(xi) = int_0^4 Psi(sigma |xi|) c_sigma phi((xi^ - omega)/sqrt(sigma)) dsigma/sigma`
/// depends on `xi` and `omega` only through `rho = |xi|` and the chord
/// `d = |xi^ - omega|`; [`WavePacketFrame::packet`] evaluates it as a function
/// of `(rho, d)`.
#[derive(Debug)]
pub struct WavePacketFrame {
    pub n: usize,
    pub phi: BumpProfile,
    pub psi: AnnulusProfile,
    pub config: FrameConfig,
    c_table: CTable,
    table: OnceLock<Table2>,
}

impl WavePacketFrame {
    pub fn new(n: usize, config: FrameConfig) -> Result<Self> {
        if !(n == 2 || n == 3) {
            return Err(Error::InvalidArgument(format!("dimension {n}")));
        }
        let phi = BumpProfile::new(config.r0)?;
        let sigma_min = 0.25 / config.table_rho_max;
        let c_table = CTable::build(n, &phi, sigma_min);
        Ok(Self { n, phi, psi: AnnulusProfile::default(), config, c_table, table: OnceLock::new() })
    }

    pub fn standard(n: usize) -> Result<Arc<Self>> {
        Ok(Arc::new(Self::new(n, FrameConfig::default())?))
    }

    /// `c_sigma` by Gauss-Legendre quadrature of the zonal integral.
    pub fn c_sigma(&self, sigma: f64) -> f64 {
        c_sigma_zonal(self.n, &self.phi, sigma)
    }

    /// `c_sigma`, interpolated from a fine table in `log sigma`.
    #[inline]
    pub fn c_sigma_fast(&self, sigma: f64) -> f64 {
        self.c_table.eval(sigma)
    }

    /// `phi_omega` at `|xi| = rho`, chord `d`, by direct quadrature in `sigma`.
    pub fn packet_exact(&self, rho: f64, d: f64) -> f64 {
        self.packet_quadrature(rho, d, |s| self.c_sigma(s), self.config.sigma_panels, 8)
    }

    fn packet_quadrature<C: Fn(f64) -> f64>(&self, rho: f64, d: f64, c: C, panels: usize, order: usize) -> f64 {
        if rho < 0.125 {
            return 0.0;
        }
        let beta = d * rho.sqrt();
        let lo = 0.5f64.max(beta * beta);
        let hi = 2.0f64.min(4.0 * rho);
        if lo >= hi {
            return 0.0;
        }
        let gl = GaussLegendre::new(order);
        gl.composite(lo.ln(), hi.ln(), panels, |v| {
            let u = v.exp();
            self.psi.eval(u) * c(u / rho) * self.phi.eval(beta / u.sqrt())
        })
    }

    fn table(&self) -> &Table2 {
        self.table.get_or_init(|| {
            let cfg = &self.config;
            let gl = GaussLegendre::new(8);
            let exponent = -0.25 * (self.n as f64 - 1.0);
            Table2::build_rows(
                (TABLE_RHO_MIN.ln(), cfg.table_rho_max.ln(), cfg.table_rows),
                (0.0, 2f64.sqrt(), cfg.table_cols),
                |ell, betas, out| {
                    let rho = ell.exp();
                    let hi = 2.0f64.min(4.0 * rho);
                    if hi <= 0.5 {
                        out.fill(0.0);
                        return;
                    }
                    let (vs, ws) = gl.composite_rule(0.5f64.ln(), hi.ln(), 32);
                    let pre: Vec<(f64, f64)> = vs
                        .iter()
                        .zip(&ws)
                        .map(|(&v, &w)| {
                            let u = v.exp();
                            (u.sqrt().recip(), w * self.psi.eval(u) * self.c_sigma_fast(u / rho))
                        })
                        .collect();
                    let scale = rho.powf(exponent);
                    for (o, &b) in out.iter_mut().zip(betas) {
                        let s: f64 = pre.iter().map(|&(isq, c)| c * self.phi.eval(b * isq)).sum();
                        *o = s * scale;
                    }
                },
            )
        })
    }

    /// `phi_omega` at `|xi| = rho`, chord `d = |xi^ - omega|`.
    #[inline]
    pub fn packet(&self, rho: f64, d: f64) -> f64 {
        if rho < 0.125 {
            return 0.0;
        }
        let beta = d * rho.sqrt();
        if beta >= std::f64::consts::SQRT_2 {
            return 0.0;
        }
        if rho < TABLE_RHO_MIN {
            // sharp onset near |xi| = 1/8; integrate directly
            return self.packet_quadrature(rho, d, |s| self.c_sigma_fast(s), self.config.sigma_panels, 8);
        }
        if rho > self.config.table_rho_max {
            return self.packet_exact(rho, d);
        }
        let v = self.table().eval(rho.ln(), beta);
        v * rho.powf(0.25 * (self.n as f64 - 1.0))
    }

    /// Largest chord at which `phi_omega` can be nonzero for `|xi| = rho`.
    #[inline]
    pub fn chord_bound(rho: f64) -> f64 {
        (2.0 / rho).sqrt().min(2.0)
    }

    /// Pointwise `phi_omega(xi)`.
    pub fn phi_omega_at(&self, omega: &[f64; 3], xi: &[f64; 3]) -> f64 {
        let rho = norm(xi);
        if rho < 0.125 {
            return 0.0;
        }
        let d = chord(xi, rho, omega);
        self.packet(rho, d)
    }

    /// `sum_i w_i phi_{omega_i}(xi)`.
    pub fn direction_sum(&self, dirs: &DirectionSet, xi: &[f64; 3], scratch: &mut Vec<usize>) -> f64 {
        let rho = norm(xi);
        if rho < 0.125 {
            return 0.0;
        }
        let u = [xi[0] / rho, xi[1] / rho, xi[2] / rho];
        dirs.near(&u, Self::chord_bound(rho) * (1.0 + 1e-12), scratch);
        scratch.iter().map(|&i| dirs.weights[i] * self.packet(rho, chord(xi, rho, &dirs.nodes[i]))).sum()
    }
}

#[inline]
pub(crate) fn chord(xi: &[f64; 3], rho: f64, omega: &[f64; 3]) -> f64 {
    let a = xi[0] / rho - omega[0];
    let b = xi[1] / rho - omega[1];
    let c = xi[2] / rho - omega[2];
    (a * a + b * b + c * c).sqrt()
}

fn check_unit(omega: &[f64; 3]) -> Result<()> {
    if (norm(omega) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("direction {omega:?} is not a unit vector")));
    }
    Ok(())
}

/// The multiplier `phi_omega(D)`.
pub fn phi_omega(frame: &Arc<WavePacketFrame>, omega: [f64; 3]) -> Result<FourierMultiplier> {
    check_unit(&omega)?;
    let fr = frame.clone();
    Ok(FourierMultiplier::new(
        move |xi| Complex64::new(fr.phi_omega_at(&omega, xi), 0.0),
        MultiplierMeta { radial: false, support: Some((0.125, f64::INFINITY)), homogeneity: None },
    ))
}

/// `c_sigma` from a direction quadrature.
pub fn c_sigma(sigma: f64, phi: &BumpProfile, dirs: &DirectionSet) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("sigma = {sigma}")));
    }
    let s = sigma.sqrt();
    let v: f64 = dirs
        .nodes
        .iter()
        .zip(&dirs.weights)
        .map(|(w, &wt)| {
            let d = ((1.0 - w[0]).powi(2) + w[1] * w[1] + w[2] * w[2]).sqrt();
            let p = phi.eval(d / s);
            wt * p * p
        })
        .sum();
    if v <= 0.0 {
        return Err(Error::Resolution(format!("no direction node within reach of e1 at sigma = {sigma:e}")));
    }
    Ok(v.sqrt().recip())
}

/// `c_sigma` via the zonal reduction of the sphere integral.
pub fn c_sigma_zonal(n: usize, phi: &BumpProfile, sigma: f64) -> f64 {
    let s = sigma.sqrt();
    let angle = |chord: f64| 2.0 * (0.5 * chord).min(1.0).asin();
    let ta = angle(phi.r0 * s);
    let tb = angle(s);
    let gl = GaussLegendre::new(16);
    let integrand = |t: f64| {
        let p = phi.eval(2.0 * (0.5 * t).sin() / s);
        p * p
    };
    let v = if n == 2 {
        2.0 * (ta + gl.composite(ta, tb, 16, integrand))
    } else {
        2.0 * PI * ((1.0 - ta.cos()) + gl.composite(ta, tb, 16, |t| integrand(t) * t.sin()))
    };
    v.sqrt().recip()
}

/// Cubic interpolant of `log c_sigma` in `log sigma`; constant beyond the
/// point where the integrand is identically 1.
#[derive(Debug)]
struct CTable {
    lo: f64,
    hi: f64,
    step: f64,
    vals: Vec<f64>,
    top: f64,
}

impl CTable {
    fn build(n: usize, phi: &BumpProfile, sigma_min: f64) -> Self {
        let lo = sigma_min.ln() - 0.1;
        let hi = (4.0 / (phi.r0 * phi.r0)).ln() + 0.1;
        let m = 4096;
        let step = (hi - lo) / (m - 1) as f64;
        let vals = (0..m).map(|i| c_sigma_zonal(n, phi, (lo + step * i as f64).exp()).ln()).collect();
        let top = c_sigma_zonal(n, phi, hi.exp());
        Self { lo, hi, step, vals, top }
    }

    fn eval(&self, sigma: f64) -> f64 {
        let x = sigma.ln();
        if x >= self.hi {
            return self.top;
        }
        let t = (x - self.lo) / self.step;
        let m = self.vals.len();
        let i = (t.floor() as i64 - 1).clamp(0, m as i64 - 4) as usize;
        let u = t - i as f64;
        let w = [
            -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0,
            u * (u - 2.0) * (u - 3.0) / 2.0,
            -u * (u - 1.0) * (u - 3.0) / 2.0,
            u * (u - 1.0) * (u - 2.0) / 6.0,
        ];
        (w[0] * self.vals[i] + w[1] * self.vals[i + 1] + w[2] * self.vals[i + 2] + w[3] * self.vals[i + 3]).exp()
    }
}

/// Blend from 0 at `|xi| = 1/4` to 1 at `|xi| = 1/2`.
#[inline]
pub fn low_frequency_blend(r: f64) -> f64 {
    smooth_step(4.0 * r - 1.0)
}

/// The radial multiplier `m` with `sum_i w_i m(D) phi_{omega_i}(D) f = f`
/// for `f` supported in `1/2 <= |xi| <= band`.
pub fn reproducing_multiplier(frame: &Arc<WavePacketFrame>, dirs: &DirectionSet, band: f64) -> Result<FourierMultiplier> {
    if dirs.n != frame.n {
        return Err(Error::InvalidArgument("direction set dimension differs from frame".into()));
    }
    // certify the direction sum stays positive on a dense probe set
    let mut scratch = Vec::new();
    let radii = 200usize;
    // circle sets are invariant under rotation by one node spacing
    let probes: Vec<[f64; 3]> = match dirs.circle_offset {
        Some(off) => (0..8)
            .map(|j| {
                let a = off + 2.0 * PI * (j as f64 + 0.5) / (8 * dirs.len()) as f64;
                [a.cos(), a.sin(), 0.0]
            })
            .collect(),
        None => DirectionSet::fibonacci(4 * dirs.len()).nodes,
    };
    for j in 0..radii {
        let r = 0.5 * (band / 0.5).powf(j as f64 / (radii - 1) as f64);
        for u in &probes {
            let xi = [r * u[0], r * u[1], r * u[2]];
            let s = frame.direction_sum(dirs, &xi, &mut scratch);
            if s < 1e-10 {
                return Err(Error::Resolution(format!("direction sum {s:e} at |xi| = {r:.3}")));
            }
        }
    }
    let fr = frame.clone();
    let dirs = dirs.clone();
    Ok(FourierMultiplier::new(
        move |xi| {
            let r = norm(xi);
            let b = low_frequency_blend(r);
            if b == 0.0 {
                return Complex64::default();
            }
            let mut scratch = Vec::new();
            Complex64::new(b / fr.direction_sum(&dirs, xi, &mut scratch), 0.0)
        },
        MultiplierMeta { radial: true, support: Some((0.25, f64::INFINITY)), homogeneity: None },
    ))
}
