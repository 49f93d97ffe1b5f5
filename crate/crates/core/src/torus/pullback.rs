//! Weighted pullbacks `|det d chi(x)|^gamma f(chi(x))` by spectral interpolation.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral::SampledField;

pub trait Diffeomorphism: Send + Sync {
    fn map(&self, x: &[f64; 3]) -> [f64; 3];
    fn jacobian_det(&self, x: &[f64; 3]) -> f64;
}

#[derive(Debug, Clone, Copy)]
pub struct Identity;

impl Diffeomorphism for Identity {
    fn map(&self, x: &[f64; 3]) -> [f64; 3] {
        *x
    }
    fn jacobian_det(&self, _: &[f64; 3]) -> f64 {
        1.0
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Translation {
    pub a: [f64; 3],
}

impl Diffeomorphism for Translation {
    fn map(&self, x: &[f64; 3]) -> [f64; 3] {
        [x[0] + self.a[0], x[1] + self.a[1], x[2] + self.a[2]]
    }
    fn jacobian_det(&self, _: &[f64; 3]) -> f64 {
        1.0
    }
}

/// `x -> A x` for an invertible matrix acting on the first `n` coordinates.
#[derive(Debug, Clone, Copy)]
pub struct LinearMap {
    pub n: usize,
    pub a: [[f64; 3]; 3],
}

impl Diffeomorphism for LinearMap {
    fn map(&self, x: &[f64; 3]) -> [f64; 3] {
        let mut y = [0.0; 3];
        for i in 0..self.n {
            y[i] = (0..self.n).map(|j| self.a[i][j] * x[j]).sum();
        }
        y
    }
    fn jacobian_det(&self, _: &[f64; 3]) -> f64 {
        let a = &self.a;
        match self.n {
            2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
            _ => {
                a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                    + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
            }
        }
    }
}

/// Relative size below which a field counts as vanishing near the cell boundary.
const EDGE_TOLERANCE: f64 = 1e-12;

fn edge_is_negligible(f: &SampledField) -> bool {
    let g = f.grid;
    let n = g.size();
    let mx = f.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let edge = (0..g.len())
        .filter(|&i| {
            let mi = g.multi_index(i);
            (0..g.dim()).any(|a| mi[a] < 2 || mi[a] + 2 >= n)
        })
        .map(|i| f.data[i].norm())
        .fold(0.0, f64::max);
    edge <= EDGE_TOLERANCE * mx
}

pub fn half_density_pullback(f: &SampledField, chi: &dyn Diffeomorphism, gamma: f64) -> Result<SampledField> {
    let g = f.grid;
    let n = g.dim();
    let half = 0.5 * g.period();
    let spec = f.spectrum();
    // coefficients below 1e-16 of the largest are round-off
    let mx = spec.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let support: Vec<(usize, Complex64)> = (0..g.len())
        .filter(|&i| spec.coeffs[i].norm() > 1e-16 * mx)
        .map(|i| (i, spec.coeffs[i] / g.volume()))
        .collect();
    let freqs: Vec<f64> = (0..g.size()).map(|m| g.signed(m) as f64 * g.freq_step()).collect();
    let outside = (0..g.len()).any(|i| {
        let y = chi.map(&g.point(i));
        (0..n).any(|a| y[a] < -half || y[a] >= half)
    });
    if outside && !edge_is_negligible(f) {
        return Err(Error::Resolution("pullback samples outside the fundamental cell of a field that does not vanish there".into()));
    }
    let data = (0..g.len())
        .into_par_iter()
        .map_init(
            || vec![Complex64::default(); 3 * g.size()],
            |phases, i| {
                let x = g.point(i);
                let y = chi.map(&x);
                if (0..n).any(|a| y[a] < -half || y[a] >= half) {
                    return Complex64::default();
                }
                for a in 0..n {
                    for (m, xi) in freqs.iter().enumerate() {
                        phases[a * g.size() + m] = Complex64::from_polar(1.0, y[a] * xi);
                    }
                }
                let mut acc = Complex64::default();
                for &(j, c) in &support {
                    let mi = g.multi_index(j);
                    let mut e = phases[mi[0]] * phases[g.size() + mi[1]];
                    if n == 3 {
                        e *= phases[2 * g.size() + mi[2]];
                    }
                    acc += c * e;
                }
                acc * chi.jacobian_det(&x).abs().powf(gamma)
            },
        )
        .collect();
    SampledField::new(g, data, None)
}
