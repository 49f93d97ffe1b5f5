//! Support and weighted-norm checks for anisotropic atoms, and a generator
//! of atoms that pass them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::BumpProfile;
use crate::spectral::grid::{dot, norm};
use crate::spectral::{PeriodicGrid, SampledField};

/// Relative `sum |f|` mass tolerated outside the atom's support set.
pub const SUPPORT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomDescriptor {
    pub y: [f64; 3],
    pub nu: [f64; 3],
    pub tau: f64,
    pub s: f64,
}

impl AtomDescriptor {
    pub fn validate(&self) -> Result<()> {
        if (norm(&self.nu) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("nu = {:?} is not a unit vector", self.nu)));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::InvalidArgument(format!("tau = {} not in (0, 1]", self.tau)));
        }
        Ok(())
    }

    /// `|nu.(x - y)| + |x - y|^2`, using the nearest periodic image of `x - y`.
    pub fn anisotropic_distance(&self, grid: &PeriodicGrid, x: &[f64; 3]) -> f64 {
        let l = grid.period();
        let mut d = [0.0; 3];
        for j in 0..grid.dim() {
            let v = x[j] - self.y[j];
            d[j] = v - l * (v / l).round();
        }
        dot(&self.nu, &d).abs() + dot(&d, &d)
    }

    /// `M^nu_tau(xi)`, with `xi^` read as 0 at the origin.
    pub fn weight(&self, n: usize, xi: &[f64; 3]) -> f64 {
        let r = norm(xi);
        let ang = if r == 0.0 {
            1.0
        } else {
            let u = [xi[0] / r, xi[1] / r, xi[2] / r];
            let m = [u[0] - self.nu[0], u[1] - self.nu[1], u[2] - self.nu[2]];
            let p = [u[0] + self.nu[0], u[1] + self.nu[1], u[2] + self.nu[2]];
            dot(&m, &m).min(dot(&p, &p))
        };
        let inner = ((1.0 + r * r).sqrt().recip() + ang) / self.tau;
        (1.0 + inner * inner).powf(0.5 * n as f64)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AtomReport {
    pub atom: AtomDescriptor,
    /// Fraction of `sum |f|` outside `(|nu.(x-y)| + |x-y|^2)^{1/2} <= sqrt(tau)`.
    pub support_leakage: f64,
    pub support_pass: bool,
    /// `||<D>^s M^nu_tau(D) f||_2`.
    pub weighted_norm: f64,
    /// `tau^{-n/2}`.
    pub budget: f64,
    pub norm_pass: bool,
    pub pass: bool,
}

pub fn weighted_sobolev_norm(f: &SampledField, atom: &AtomDescriptor) -> f64 {
    let spec = f.spectrum();
    let n = f.grid.dim();
    let tot: f64 = spec
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let xi = f.grid.freq(i);
            let r2 = dot(&xi, &xi);
            c.norm_sqr() * (1.0 + r2).powf(atom.s) * atom.weight(n, &xi).powi(2)
        })
        .sum();
    (tot / f.grid.volume()).sqrt()
}

pub fn atom_check(f: &SampledField, atom: &AtomDescriptor) -> Result<AtomReport> {
    atom.validate()?;
    let grid = f.grid;
    let (mut out, mut tot) = (0.0, 0.0);
    for (i, v) in f.data.iter().enumerate() {
        let a = v.norm();
        tot += a;
        if atom.anisotropic_distance(&grid, &grid.point(i)) > atom.tau {
            out += a;
        }
    }
    let support_leakage = if tot == 0.0 { 0.0 } else { out / tot };
    let weighted_norm = weighted_sobolev_norm(f, atom);
    let budget = atom.tau.powf(-0.5 * grid.dim() as f64);
    let support_pass = support_leakage <= SUPPORT_TOLERANCE;
    let norm_pass = weighted_norm <= budget;
    Ok(AtomReport { atom: *atom, support_leakage, support_pass, weighted_norm, budget, norm_pass, pass: support_pass && norm_pass })
}

/// Tube-shaped packet `e^{i nu.(x-y)/tau} B(2 nu.(x-y)/tau) B(2|x-y|^2/tau)`,
/// scaled so that its weighted norm is `fraction * tau^{-n/2}`.
pub fn canonical_atom(grid: PeriodicGrid, atom: &AtomDescriptor, fraction: f64) -> Result<SampledField> {
    atom.validate()?;
    let l = grid.period();
    let n = grid.dim();
    let mut f = SampledField::from_fn(grid, |x| {
        let mut d = [0.0; 3];
        for j in 0..n {
            let v = x[j] - atom.y[j];
            d[j] = v - l * (v / l).round();
        }
        let a = dot(&atom.nu, &d);
        let env = BumpProfile::scaled(0.0, 1.0, 2.0 * a.abs() / atom.tau) * BumpProfile::scaled(0.0, 1.0, 2.0 * dot(&d, &d) / atom.tau);
        Complex64::from_polar(env, a / atom.tau)
    });
    if f.data.iter().all(|v| v.norm() == 0.0) {
        return Err(Error::Resolution(format!("grid spacing {} does not resolve tau = {}", grid.spacing(), atom.tau)));
    }
    let w = weighted_sobolev_norm(&f, atom);
    f.scale(Complex64::new(fraction * atom.tau.powf(-0.5 * n as f64) / w, 0.0));
    Ok(f)
}
