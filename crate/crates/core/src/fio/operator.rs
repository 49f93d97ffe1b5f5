use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use super::phase::{zpt, ConePhase, HalfWave, PhaseFunction};
use super::symbol::{ProductSymbol, SymbolFunction};
use crate::error::{Error, Result};
use crate::quadrature::trapezoid_weights;
use crate::spectral::norms::{check_exponent, sum_abs_pow};
use crate::spectral::{PeriodicGrid, SampledField, Spectrum};

/// Time samples with quadrature weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub times: Vec<f64>,
    pub weights: Vec<f64>,
}

impl TimeGrid {
    /// Single instant with unit weight.
    pub fn instant(t: f64) -> Self {
        Self { times: vec![t], weights: vec![1.0] }
    }

    /// Trapezoid rule on arbitrary increasing nodes.
    pub fn from_nodes(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("time nodes must be strictly increasing, at least two".into()));
        }
        let weights = trapezoid_weights(&times);
        Ok(Self { times, weights })
    }

    pub fn uniform(t0: f64, t1: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidArgument("need at least two time samples".into()));
        }
        Self::from_nodes((0..count).map(|i| t0 + (t1 - t0) * i as f64 / (count - 1) as f64).collect())
    }

    /// Uniform nodes on `[t0, t1]` merged with a finer uniform cluster of
    /// spacing `fine` on `[c - w, c + w]`.
    pub fn clustered(t0: f64, t1: f64, coarse: usize, c: f64, w: f64, fine: f64) -> Result<Self> {
        let mut t: Vec<f64> = (0..coarse).map(|i| t0 + (t1 - t0) * i as f64 / (coarse - 1) as f64).collect();
        let gap = 0.25 * fine.min((t1 - t0) / coarse as f64);
        let m = (2.0 * w / fine).ceil() as usize;
        // cluster nodes too close to a coarse node are dropped, so the endpoints survive
        for i in 0..=m {
            let s = c - w + 2.0 * w * i as f64 / m as f64;
            if s > t0 && s < t1 && t[..coarse].iter().all(|u| (u - s).abs() >= gap) {
                t.push(s);
            }
        }
        t.sort_by(|a, b| a.total_cmp(b));
        Self::from_nodes(t)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// `Tf(x, t) = int e^{i Phi(x, t, eta)} a(x, t, eta) f^(eta) d eta` sampled on
/// a spatial grid times a list of instants.
#[derive(Debug, Clone)]
pub struct StandardFormFIO {
    pub phase: Arc<dyn PhaseFunction>,
    pub symbol: Arc<dyn SymbolFunction>,
    pub grid: PeriodicGrid,
    pub time: TimeGrid,
}

/// Space-time samples: one field per instant.
#[derive(Debug, Clone)]
pub struct SpaceTimeField {
    pub time: TimeGrid,
    pub slices: Vec<SampledField>,
}

impl SpaceTimeField {
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        let mut acc = 0.0;
        for (f, w) in self.slices.iter().zip(&self.time.weights) {
            acc += w * sum_abs_pow(&f.data, p) * f.grid.cell_volume();
        }
        Ok(acc.powf(p.recip()))
    }
}

impl StandardFormFIO {
    pub fn new(
        phase: Arc<dyn PhaseFunction>,
        symbol: Arc<dyn SymbolFunction>,
        grid: PeriodicGrid,
        time: TimeGrid,
    ) -> Result<Self> {
        if phase.dim() != grid.dim() {
            return Err(Error::GridMismatch(format!("phase in dimension {} on a {}-d grid", phase.dim(), grid.dim())));
        }
        Ok(Self { phase, symbol, grid, time })
    }

    /// The half-wave group `e^{it|D|}` (times `(2 pi)^n`) with a unit symbol
    /// that is 1 on the whole fundamental cell.
    pub fn half_wave(grid: PeriodicGrid, time: TimeGrid) -> Self {
        Self {
            phase: Arc::new(ConePhase { n: grid.dim(), law: HalfWave }),
            symbol: Arc::new(ProductSymbol::everywhere(grid.period())),
            grid,
            time,
        }
    }

    pub fn uses_fast_path(&self) -> bool {
        let probe = [0.6, 0.8, 0.0];
        self.phase.dispersion(&probe).is_some()
            && self.symbol.frequency_factor(&probe).is_some()
            && self.symbol.spatial_factor(&[0.0; 3]).is_some()
    }

    pub fn check_input(&self, s: &Spectrum) -> Result<()> {
        self.grid.same_as(&s.grid)?;
        let band = match s.band_limit {
            Some(b) => b,
            None => s.measured_band(1e-14),
        };
        self.grid.check_band(band)?;
        if self.phase.singular_at_origin() {
            let mx = s.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            if s.coeffs[0].norm() > 1e-12 * mx {
                return Err(Error::InvalidArgument("zero-frequency coefficient must vanish for a cone phase".into()));
            }
        }
        Ok(())
    }

    /// `Tf(., t_i)` for one time index.
    pub fn slice(&self, s: &Spectrum, it: usize) -> SampledField {
        let t = self.time.times[it];
        let n = self.grid.dim();
        let dv = self.grid.freq_step().powi(n as i32);
        if self.uses_fast_path() {
            let mut c = s.clone();
            for (i, v) in c.coeffs.iter_mut().enumerate() {
                if v.re == 0.0 && v.im == 0.0 {
                    continue;
                }
                if i == 0 && self.phase.singular_at_origin() {
                    *v = Complex64::default();
                    continue;
                }
                let eta = self.grid.freq(i);
                let h = self.phase.dispersion(&eta).unwrap_or(0.0);
                let a2 = self.symbol.frequency_factor(&eta).unwrap_or(1.0);
                *v *= Complex64::from_polar(a2, t * h);
            }
            let mut f = c.to_field();
            let scale = (2.0 * PI).powi(n as i32);
            for (i, v) in f.data.iter_mut().enumerate() {
                let a1 = self.symbol.spatial_factor(&self.grid.point(i)).unwrap_or(1.0);
                *v *= scale * a1;
            }
            f.band_limit = None;
            f
        } else {
            let support: Vec<(usize, [f64; 3], Complex64)> = s
                .coeffs
                .iter()
                .enumerate()
                .filter(|(i, c)| (c.re != 0.0 || c.im != 0.0) && !(*i == 0 && self.phase.singular_at_origin()))
                .map(|(i, c)| (i, self.grid.freq(i), *c * dv))
                .collect();
            let data: Vec<Complex64> = (0..self.grid.len())
                .into_par_iter()
                .map(|j| {
                    let x = self.grid.point(j);
                    self.sum_at(&support, &x, t)
                })
                .collect();
            SampledField { grid: self.grid, data, band_limit: None }
        }
    }

    fn sum_at(&self, support: &[(usize, [f64; 3], Complex64)], x: &[f64; 3], t: f64) -> Complex64 {
        let z = zpt(x, t, self.grid.dim());
        let mut acc = Complex64::default();
        for (_, eta, c) in support {
            let a = self.symbol.eval(x, t, eta);
            if a != 0.0 {
                acc += c * Complex64::from_polar(a, self.phase.eval(&z, eta));
            }
        }
        acc
    }

    /// Direct coefficient sum at one space-time point.
    pub fn eval_at(&self, s: &Spectrum, x: &[f64; 3], t: f64) -> Complex64 {
        let dv = self.grid.freq_step().powi(self.grid.dim() as i32);
        let support: Vec<(usize, [f64; 3], Complex64)> = s
            .coeffs
            .iter()
            .enumerate()
            .filter(|(i, c)| (c.re != 0.0 || c.im != 0.0) && !(*i == 0 && self.phase.singular_at_origin()))
            .map(|(i, c)| (i, s.grid.freq(i), *c * dv))
            .collect();
        self.sum_at(&support, x, t)
    }

    /// Calls `f(i, slice_i)` for every time index, one slice in memory at a time.
    pub fn for_each_slice<F: FnMut(usize, &SampledField)>(&self, s: &Spectrum, mut f: F) -> Result<()> {
        self.check_input(s)?;
        for it in 0..self.time.len() {
            let slice = self.slice(s, it);
            f(it, &slice);
        }
        Ok(())
    }

    /// `||Tf||_{L^p}` over space-time without storing all slices.
    pub fn lp_norm(&self, s: &Spectrum, p: f64) -> Result<f64> {
        check_exponent(p)?;
        let mut acc = 0.0;
        let w = self.time.weights.clone();
        let cell = self.grid.cell_volume();
        self.for_each_slice(s, |it, g| acc += w[it] * sum_abs_pow(&g.data, p) * cell)?;
        Ok(acc.powf(p.recip()))
    }
}

/// Evaluates `Tf` on the operator's full space-time grid.
pub fn apply_fio(t: &StandardFormFIO, f: &SampledField) -> Result<SpaceTimeField> {
    let s = f.spectrum();
    let mut slices = Vec::with_capacity(t.time.len());
    t.for_each_slice(&s, |_, g| slices.push(g.clone()))?;
    Ok(SpaceTimeField { time: t.time.clone(), slices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fio::phase::PhaseSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid() -> PeriodicGrid {
        PeriodicGrid::new(2, 32, 2.0 * PI).unwrap()
    }

    fn field(seed: u64) -> SampledField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SampledField::random_annulus(grid(), 1.0, 8.0, &mut rng).unwrap()
    }

    #[test]
    fn flat_time_zero_is_scaled_inversion() {
        let f = field(1);
        let t = StandardFormFIO::half_wave(grid(), TimeGrid::instant(0.0));
        let out = apply_fio(&t, &f).unwrap();
        let scale = (2.0 * PI).powi(2);
        for (a, b) in f.data.iter().zip(&out.slices[0].data) {
            assert!((a * scale - b).norm() < 1e-9 * scale);
        }
    }

    #[test]
    fn direct_sum_matches_fast_path() {
        let f = field(2);
        let s = f.spectrum();
        let fast = StandardFormFIO::half_wave(grid(), TimeGrid::uniform(-0.5, 0.5, 3).unwrap());
        let phase = PhaseSpec::VariableSpeed { eps: 0.0 }.build(2).unwrap();
        let slow = StandardFormFIO::new(phase, fast.symbol.clone(), grid(), fast.time.clone()).unwrap();
        assert!(fast.uses_fast_path() && !slow.uses_fast_path());
        for it in 0..3 {
            let a = fast.slice(&s, it);
            let b = slow.slice(&s, it);
            let num: f64 = a.data.iter().zip(&b.data).map(|(x, y)| (x - y).norm_sqr()).sum();
            let den: f64 = a.data.iter().map(|x| x.norm_sqr()).sum();
            assert!((num / den).sqrt() < 1e-10);
        }
    }

    #[test]
    fn single_mode_output() {
        let g = grid();
        let f = SampledField::plane_wave(g, [3, -1, 0]);
        let s = f.spectrum();
        let phase = PhaseSpec::CubicPerturbedCone { eps: 0.1 }.build(2).unwrap();
        let sym = Arc::new(ProductSymbol::unit(1.0, 2.5));
        let t = StandardFormFIO::new(phase.clone(), sym.clone(), g, TimeGrid::instant(0.3)).unwrap();
        let out = t.slice(&s, 0);
        let xi = [3.0, -1.0, 0.0];
        let c = s.coeffs[g.flat_index([3, g.unsigned(-1), 0])] * g.freq_step().powi(2);
        for j in (0..g.len()).step_by(37) {
            let x = g.point(j);
            let expect = c * Complex64::from_polar(sym.eval(&x, 0.3, &xi), phase.eval(&zpt(&x, 0.3, 2), &xi));
            assert!((out.data[j] - expect).norm() < 1e-10);
        }
    }

    #[test]
    fn linearity() {
        let (f, g) = (field(3), field(4));
        let t = StandardFormFIO::half_wave(grid(), TimeGrid::instant(0.7));
        let mut h = f.clone();
        h.scale(Complex64::new(0.5, -1.0));
        h.axpy(Complex64::new(2.0, 0.0), &g).unwrap();
        let (tf, tg, th) = (t.slice(&f.spectrum(), 0), t.slice(&g.spectrum(), 0), t.slice(&h.spectrum(), 0));
        for i in 0..tf.data.len() {
            let lin = tf.data[i] * Complex64::new(0.5, -1.0) + tg.data[i] * 2.0;
            assert!((lin - th.data[i]).norm() < 1e-10 * (1.0 + lin.norm()));
        }
    }

    #[test]
    fn rejects_zero_mode_and_nyquist() {
        let g = grid();
        let t = StandardFormFIO::half_wave(g, TimeGrid::instant(0.0));
        let c = SampledField::from_fn(g, |_| Complex64::new(1.0, 0.0));
        assert!(t.check_input(&c.spectrum()).is_err());
        let mut s = field(5).spectrum();
        s.band_limit = Some(100.0);
        assert!(t.check_input(&s).is_err());
    }

    #[test]
    fn clustered_time_grid() {
        let tg = TimeGrid::clustered(-0.5, 0.5, 11, 0.0, 0.05, 0.01).unwrap();
        assert!((tg.duration() - 1.0).abs() < 1e-12);
        assert!(tg.times.windows(2).all(|w| w[1] > w[0]));
        assert!(tg.times.iter().filter(|t| t.abs() <= 0.05).count() >= 10);
    }
}
