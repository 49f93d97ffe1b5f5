//! Picard iteration for `u_tt - Laplace u = sign |u|^{power-1} u` on a torus,
//! through the Duhamel formula on a uniform time grid.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fio::propagator::{wave_solution_spectrum, wave_velocity_spectrum};
use crate::spectral::grid::norm;
use crate::spectral::norms::sum_abs_pow;
use crate::spectral::{PeriodicGrid, SampledField, Spectrum};
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    /// `u_tt - Laplace u + |u|^{power-1} u = 0`.
    Defocusing,
    /// `u_tt - Laplace u = |u|^{power-1} u`.
    Focusing,
    /// Linear equation; the Duhamel term is dropped.
    Off,
}

impl Nonlinearity {
    pub fn sign(self) -> f64 {
        match self {
            Self::Defocusing => -1.0,
            Self::Focusing => 1.0,
            Self::Off => 0.0,
        }
    }
}

/// Space-time norm in the well-posedness reports: `L^q_t L^r_x` plus the
/// supremum in time of the `W^{1/2,2}` norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrichartzProfile {
    /// `L^4_t L^6_x`.
    L4L6,
    /// `L^{24/7}_t L^4_x`.
    L247L4,
}

impl StrichartzProfile {
    pub fn exponents(self) -> (f64, f64) {
        match self {
            Self::L4L6 => (4.0, 6.0),
            Self::L247L4 => (24.0 / 7.0, 4.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NlwConfig {
    pub t0: f64,
    pub nodes: usize,
    pub nonlinearity: Nonlinearity,
    pub power: u32,
    pub iterations: usize,
    /// Stop once an increment falls below this fraction of the iterate's norm.
    pub tolerance: f64,
    pub profile: StrichartzProfile,
}

impl Default for NlwConfig {
    fn default() -> Self {
        Self {
            t0: 0.5,
            nodes: 33,
            nonlinearity: Nonlinearity::Defocusing,
            power: 3,
            iterations: 10,
            tolerance: 1e-14,
            profile: StrichartzProfile::L4L6,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NlwReport {
    pub times: Vec<f64>,
    pub iterations: usize,
    /// `||u_{j+1} - u_j||_S`.
    pub increments: Vec<f64>,
    /// `||u_{j+1} - u_j||_S / ||u_j - u_{j-1}||_S`.
    pub contraction_factors: Vec<f64>,
    /// `||u - L - N(u, u, u)||_S` at the returned iterate.
    pub residual: f64,
    pub s_norm: f64,
    pub energy_series: Vec<f64>,
    /// `max_t |E(t) - E(0)| / E(0)`.
    pub energy_drift: f64,
    /// Largest `||u(t_{i+1}) - u(t_i)||_2` between adjacent nodes.
    pub max_adjacent_difference: f64,
    pub diverged: bool,
}

#[derive(Debug, Clone)]
pub struct NlwSolution {
    pub times: Vec<f64>,
    pub slices: Vec<SampledField>,
    pub report: NlwReport,
}

struct Iterate {
    u: Vec<Spectrum>,
    v: Vec<Spectrum>,
}

struct Solver<'a> {
    cfg: &'a NlwConfig,
    times: Vec<f64>,
    lin_u: Vec<Spectrum>,
    lin_v: Vec<Spectrum>,
    radii: Vec<f64>,
}

impl Solver<'_> {
    /// `L + N(w, w, w)` and its time derivative.
    fn step(&self, w: &[Spectrum]) -> Iterate {
        let sign = self.cfg.nonlinearity.sign();
        if sign == 0.0 {
            return Iterate { u: self.lin_u.clone(), v: self.lin_v.clone() };
        }
        let dt = self.times[1] - self.times[0];
        let len = self.radii.len();
        // running trapezoid sums of cos(s r) F^(s) and sin(s r) F^(s); at r = 0
        // they hold the integrals of F^ and s F^
        let mut a = vec![Complex64::default(); len];
        let mut b = vec![Complex64::default(); len];
        let mut prev: Option<Vec<Complex64>> = None;
        let mut u = Vec::with_capacity(self.times.len());
        let mut v = Vec::with_capacity(self.times.len());
        for (i, &t) in self.times.iter().enumerate() {
            let f = self.forcing(&w[i]);
            for j in 0..len {
                let r = self.radii[j];
                let (c, s) = if r == 0.0 { (1.0, t) } else { ((t * r).cos(), (t * r).sin()) };
                let cur = (f[j] * c, f[j] * s);
                if let Some(p) = &prev {
                    let r0 = self.radii[j];
                    let t0 = t - dt;
                    let (c0, s0) = if r0 == 0.0 { (1.0, t0) } else { ((t0 * r0).cos(), (t0 * r0).sin()) };
                    a[j] += 0.5 * dt * (p[j] * c0 + cur.0);
                    b[j] += 0.5 * dt * (p[j] * s0 + cur.1);
                }
            }
            prev = Some(f);
            let mut un = self.lin_u[i].clone();
            let mut vn = self.lin_v[i].clone();
            for j in 0..len {
                let r = self.radii[j];
                let (n, nd) = if r == 0.0 {
                    (t * a[j] - b[j], a[j])
                } else {
                    let (s, c) = (t * r).sin_cos();
                    ((s * a[j] - c * b[j]) / r, c * a[j] + s * b[j])
                };
                un.coeffs[j] += sign * n;
                vn.coeffs[j] += sign * nd;
            }
            u.push(un);
            v.push(vn);
        }
        Iterate { u, v }
    }

    fn forcing(&self, w: &Spectrum) -> Vec<Complex64> {
        let mut f = w.to_field();
        let e = (self.cfg.power - 1) as i32 / 2;
        for z in f.data.iter_mut() {
            *z *= z.norm_sqr().powi(e);
        }
        f.band_limit = None;
        f.spectrum().coeffs
    }

    fn s_norm(&self, u: &[Spectrum]) -> f64 {
        let (q, r) = self.cfg.profile.exponents();
        let dt = self.times[1] - self.times[0];
        let last = u.len() - 1;
        let mut strichartz = 0.0;
        let mut sup: f64 = 0.0;
        for (i, s) in u.iter().enumerate() {
            let f = s.to_field();
            let lr = (sum_abs_pow(&f.data, r) * f.grid.cell_volume()).powf(r.recip());
            let w = if i == 0 || i == last { 0.5 * dt } else { dt };
            strichartz += w * lr.powf(q);
            sup = sup.max(half_sobolev(s));
        }
        strichartz.powf(q.recip()) + sup
    }

    fn energy(&self, u: &Spectrum, v: &Spectrum) -> f64 {
        let vol = u.grid.volume();
        let kinetic: f64 = v.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() / vol;
        let grad: f64 = u.coeffs.iter().zip(&self.radii).map(|(c, r)| r * r * c.norm_sqr()).sum::<f64>() / vol;
        let q = (self.cfg.power + 1) as f64;
        let f = u.to_field();
        let pot = sum_abs_pow(&f.data, q) * f.grid.cell_volume();
        0.5 * kinetic + 0.5 * grad - self.cfg.nonlinearity.sign() * pot / q
    }
}

fn half_sobolev(s: &Spectrum) -> f64 {
    let v: f64 = s
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let r = norm(&s.grid.freq(i));
            (1.0 + r * r).sqrt() * c.norm_sqr()
        })
        .sum();
    (v / s.grid.volume()).sqrt()
}

fn difference(a: &[Spectrum], b: &[Spectrum]) -> Vec<Spectrum> {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let mut d = x.clone();
            d.coeffs.iter_mut().zip(&y.coeffs).for_each(|(p, q)| *p -= q);
            d
        })
        .collect()
}

/// Solves on `[0, t0]` with `u(0) = f1`, `u_t(0) = f2`.
pub fn nlw_picard(f1: &SampledField, f2: &SampledField, cfg: &NlwConfig) -> Result<NlwSolution> {
    f1.grid.same_as(&f2.grid)?;
    let grid = f1.grid;
    if grid.dim() != 2 {
        return Err(Error::InvalidArgument(format!("the cubic solver runs on the 2-torus, got dimension {}", grid.dim())));
    }
    if !(cfg.t0 > 0.0 && cfg.t0 <= 1.0) {
        return Err(Error::InvalidArgument(format!("t0 = {} not in (0, 1]", cfg.t0)));
    }
    if cfg.nodes < 17 {
        return Err(Error::InvalidArgument(format!("{} time nodes, need at least 17", cfg.nodes)));
    }
    if cfg.power < 3 || cfg.power % 2 == 0 {
        return Err(Error::InvalidArgument(format!("power {} must be odd and at least 3", cfg.power)));
    }
    let times: Vec<f64> = (0..cfg.nodes).map(|i| cfg.t0 * i as f64 / (cfg.nodes - 1) as f64).collect();
    let (s1, s2) = (f1.spectrum(), f2.spectrum());
    let mut lin_u: Vec<Spectrum> = times.iter().map(|&t| wave_solution_spectrum(&s1, &s2, t)).collect();
    let mut lin_v: Vec<Spectrum> = times.iter().map(|&t| wave_velocity_spectrum(&s1, &s2, t)).collect();
    for s in lin_u.iter_mut().chain(lin_v.iter_mut()) {
        s.band_limit = None;
    }
    let radii = (0..grid.len()).map(|i| norm(&grid.freq(i))).collect();
    let solver = Solver { cfg, times: times.clone(), lin_u, lin_v, radii };

    let mut cur = Iterate { u: solver.lin_u.clone(), v: solver.lin_v.clone() };
    let mut increments = Vec::new();
    let mut factors = Vec::new();
    let mut above = 0;
    let mut diverged = false;
    let mut done = 0;
    for _ in 0..cfg.iterations {
        let next = solver.step(&cur.u);
        let inc = solver.s_norm(&difference(&next.u, &cur.u));
        let size = solver.s_norm(&next.u);
        if let Some(&last) = increments.last() {
            let f: f64 = if last > 0.0 { inc / last } else { 0.0 };
            factors.push(f);
            above = if f <= 1.0 { 0 } else { above + 1 };
        }
        increments.push(inc);
        cur = next;
        done += 1;
        if above >= 3 {
            diverged = true;
            break;
        }
        if inc <= cfg.tolerance * size {
            break;
        }
    }
    let check = solver.step(&cur.u);
    let residual = solver.s_norm(&difference(&cur.u, &check.u));
    let energy_series: Vec<f64> = check.u.iter().zip(&check.v).map(|(u, v)| solver.energy(u, v)).collect();
    let e0 = energy_series[0];
    let energy_drift =
        if e0 == 0.0 { 0.0 } else { energy_series.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max) / e0.abs() };
    let slices: Vec<SampledField> = cur.u.iter().map(|s| s.to_field()).collect();
    let max_adjacent_difference = difference(&cur.u[1..], &cur.u[..cur.u.len() - 1])
        .iter()
        .map(|d| d.l2_norm())
        .fold(0.0, f64::max);
    let report = NlwReport {
        times: times.clone(),
        iterations: done,
        increments,
        contraction_factors: factors,
        residual,
        s_norm: solver.s_norm(&cur.u),
        energy_series,
        energy_drift,
        max_adjacent_difference,
        diverged,
    };
    Ok(NlwSolution { times, slices, report })
}

/// Random data on `|xi| <= band` with `||f1||_{H^{1/2}} + ||f2||_{H^{-1/2}} = size`,
/// split evenly between the two.
pub fn random_data<R: Rng>(grid: PeriodicGrid, band: f64, size: f64, rng: &mut R) -> Result<(SampledField, SampledField)> {
    let mut f1 = SampledField::random_annulus(grid, 0.0, band, rng)?;
    let mut f2 = SampledField::random_annulus(grid, 0.0, band, rng)?;
    let a = half_sobolev(&f1.spectrum());
    let s2 = f2.spectrum();
    let b = (s2.coeffs.iter().enumerate().map(|(i, c)| c.norm_sqr() / (1.0 + norm(&grid.freq(i)).powi(2)).sqrt()).sum::<f64>()
        / grid.volume())
    .sqrt();
    f1.scale(Complex64::new(0.5 * size / a, 0.0));
    f2.scale(Complex64::new(0.5 * size / b, 0.0));
    Ok((f1, f2))
}
