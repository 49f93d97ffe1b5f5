use num_complex::Complex64;
use rand::Rng;

use super::fft::fft_nd;
use super::grid::{norm, PeriodicGrid};
use crate::error::{Error, Result};

/// Complex samples of a function on a periodic grid.
#[derive(Debug, Clone)]
pub struct SampledField {
    pub grid: PeriodicGrid,
    pub data: Vec<Complex64>,
    /// Largest `|xi|` carrying a nonzero coefficient, when known.
    pub band_limit: Option<f64>,
}

/// Fourier coefficients in FFT index order, scaled to approximate the
/// continuous transform `int f(x) e^{-i x.xi} dx`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub grid: PeriodicGrid,
    pub coeffs: Vec<Complex64>,
    pub band_limit: Option<f64>,
}

impl SampledField {
    pub fn new(grid: PeriodicGrid, data: Vec<Complex64>, band_limit: Option<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidGrid(format!("{} samples for {} grid points", data.len(), grid.len())));
        }
        if let Some(b) = band_limit {
            grid.check_band(b)?;
        }
        Ok(Self { grid, data, band_limit })
    }

    pub fn zeros(grid: PeriodicGrid) -> Self {
        Self { grid, data: vec![Complex64::default(); grid.len()], band_limit: Some(0.0) }
    }

    pub fn from_fn<F: Fn(&[f64; 3]) -> Complex64>(grid: PeriodicGrid, f: F) -> Self {
        let data = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self { grid, data, band_limit: None }
    }

    /// `e^{i x.xi}` for the lattice frequency with signed indices `m`.
    pub fn plane_wave(grid: PeriodicGrid, m: [i64; 3]) -> Self {
        let h = grid.freq_step();
        let xi = [h * m[0] as f64, h * m[1] as f64, h * m[2] as f64];
        let mut f = Self::from_fn(grid, |x| Complex64::from_polar(1.0, xi[0] * x[0] + xi[1] * x[1] + xi[2] * x[2]));
        f.band_limit = Some(norm(&xi));
        f
    }

    /// Random field with independent Gaussian coefficients on the lattice
    /// annulus `lo <= |xi| <= hi`.
    pub fn random_annulus<R: Rng>(grid: PeriodicGrid, lo: f64, hi: f64, rng: &mut R) -> Result<Self> {
        grid.check_band(hi)?;
        let mut coeffs = vec![Complex64::default(); grid.len()];
        for (i, c) in coeffs.iter_mut().enumerate() {
            let r = norm(&grid.freq(i));
            if r >= lo && r <= hi {
                *c = Complex64::new(gauss(rng), gauss(rng));
            }
        }
        Ok(Spectrum { grid, coeffs, band_limit: Some(hi) }.to_field())
    }

    pub fn spectrum(&self) -> Spectrum {
        let mut coeffs = self.data.clone();
        fft_nd(&self.grid, &mut coeffs, false);
        let v = self.grid.cell_volume();
        // a declared band limit is exact: round-off beyond it is dropped
        let cut = self.band_limit.map_or(f64::INFINITY, |b| b * (1.0 + 1e-9));
        for (i, c) in coeffs.iter_mut().enumerate() {
            *c = if norm(&self.grid.freq(i)) > cut { Complex64::default() } else { *c * (v * self.grid.parity(i)) };
        }
        Spectrum { grid: self.grid, coeffs, band_limit: self.band_limit }
    }

    pub fn scale(&mut self, a: Complex64) {
        self.data.iter_mut().for_each(|v| *v *= a);
    }

    /// `self + a * other`, on a shared grid.
    pub fn axpy(&mut self, a: Complex64, other: &SampledField) -> Result<()> {
        self.grid.same_as(&other.grid)?;
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += a * y;
        }
        self.band_limit = match (self.band_limit, other.band_limit) {
            (Some(p), Some(q)) => Some(p.max(q)),
            _ => None,
        };
        Ok(())
    }

    /// Shift by a whole number of grid cells: `g(x) = f(x - shift * h)`.
    pub fn shifted(&self, shift: [i64; 3]) -> Self {
        let g = self.grid;
        let mut data = vec![Complex64::default(); g.len()];
        for (i, v) in data.iter_mut().enumerate() {
            let mi = g.multi_index(i);
            let mut src = [0usize; 3];
            for a in 0..g.dim() {
                src[a] = (mi[a] as i64 - shift[a]).rem_euclid(g.size() as i64) as usize;
            }
            *v = self.data[g.flat_index(src)];
        }
        Self { grid: g, data, band_limit: self.band_limit }
    }

    /// Largest coefficient magnitude beyond `band`, relative to the largest overall.
    pub fn leakage_beyond(&self, band: f64) -> f64 {
        self.spectrum().leakage_beyond(band)
    }
}

impl Spectrum {
    pub fn zeros(grid: PeriodicGrid) -> Self {
        Self { grid, coeffs: vec![Complex64::default(); grid.len()], band_limit: Some(0.0) }
    }

    /// Builds coefficients by sampling a continuous transform on the lattice.
    pub fn from_fn<F: Fn(&[f64; 3]) -> Complex64>(grid: PeriodicGrid, f: F, band_limit: Option<f64>) -> Self {
        let coeffs = (0..grid.len()).map(|i| f(&grid.freq(i))).collect();
        Self { grid, coeffs, band_limit }
    }

    pub fn to_field(&self) -> SampledField {
        let mut data = self.coeffs.clone();
        for (i, c) in data.iter_mut().enumerate() {
            *c *= self.grid.parity(i);
        }
        fft_nd(&self.grid, &mut data, true);
        let s = self.grid.volume().recip();
        data.iter_mut().for_each(|v| *v *= s);
        SampledField { grid: self.grid, data, band_limit: self.band_limit }
    }

    /// `||f||_2` from the coefficients (Plancherel on the torus).
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        (s / self.grid.volume()).sqrt()
    }

    /// Largest `|xi|` with a coefficient above `tol` times the maximum.
    pub fn measured_band(&self, tol: f64) -> f64 {
        let mx = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut b: f64 = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.norm() > tol * mx {
                b = b.max(norm(&self.grid.freq(i)));
            }
        }
        b
    }

    pub fn leakage_beyond(&self, band: f64) -> f64 {
        let mut mx: f64 = 0.0;
        let mut out: f64 = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let a = c.norm();
            mx = mx.max(a);
            if norm(&self.grid.freq(i)) > band {
                out = out.max(a);
            }
        }
        if mx == 0.0 {
            0.0
        } else {
            out / mx
        }
    }

    /// Fraction of `sum |c|^2` carried by indices where `keep` is false.
    pub fn mass_outside<F: Fn(&[f64; 3]) -> bool>(&self, keep: F) -> f64 {
        let mut tot = 0.0;
        let mut out = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let a = c.norm_sqr();
            tot += a;
            if !keep(&self.grid.freq(i)) {
                out += a;
            }
        }
        if tot == 0.0 {
            0.0
        } else {
            out / tot
        }
    }

    /// Indices of nonzero coefficients.
    pub fn support(&self) -> Vec<usize> {
        self.coeffs.iter().enumerate().filter(|(_, c)| c.re != 0.0 || c.im != 0.0).map(|(i, _)| i).collect()
    }
}

pub(crate) fn gauss<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; avoids pulling in a distributions crate for one sampler
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
