use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform periodic grid on `[-L/2, L/2)^n` with `N` points per axis.
///
/// Sample `j` sits at `x_j = (j - N/2) L/N`; the frequency lattice is
/// `2 pi m / L` with `m` the signed FFT index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicGrid {
    n: usize,
    size: usize,
    period: f64,
}

impl PeriodicGrid {
    pub fn new(n: usize, size: usize, period: f64) -> Result<Self> {
        if !(n == 2 || n == 3) {
            return Err(Error::InvalidGrid(format!("dimension {n} not in {{2,3}}")));
        }
        if size < 8 || !size.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("N = {size} must be a power of two >= 8")));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidGrid(format!("period {period} must be positive")));
        }
        Ok(Self { n, size, period })
    }

    /// Smallest power-of-two grid of period `period` whose Nyquist frequency
    /// exceeds `band * (1 + margin)`.
    pub fn for_band(n: usize, period: f64, band: f64, margin: f64) -> Result<Self> {
        let need = band * (1.0 + margin) * period / PI;
        let mut size = 8usize;
        while (size as f64) <= need {
            size *= 2;
        }
        Self::new(n, size, period)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }
    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }
    #[inline]
    pub fn period(&self) -> f64 {
        self.period
    }
    #[inline]
    pub fn spacing(&self) -> f64 {
        self.period / self.size as f64
    }
    #[inline]
    pub fn len(&self) -> usize {
        self.size.pow(self.n as u32)
    }
    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.n as i32)
    }
    #[inline]
    pub fn volume(&self) -> f64 {
        self.period.powi(self.n as i32)
    }
    #[inline]
    pub fn nyquist(&self) -> f64 {
        PI * self.size as f64 / self.period
    }
    /// Spacing of the frequency lattice, `2 pi / L`.
    #[inline]
    pub fn freq_step(&self) -> f64 {
        2.0 * PI / self.period
    }

    #[inline]
    pub fn signed(&self, i: usize) -> i64 {
        if i < self.size / 2 {
            i as i64
        } else {
            i as i64 - self.size as i64
        }
    }

    /// Index along one axis for a signed frequency index.
    #[inline]
    pub fn unsigned(&self, m: i64) -> usize {
        m.rem_euclid(self.size as i64) as usize
    }

    /// Per-axis indices of a flat (row-major) index; unused axes are 0.
    #[inline]
    pub fn multi_index(&self, idx: usize) -> [usize; 3] {
        let s = self.size;
        if self.n == 2 {
            [idx / s, idx % s, 0]
        } else {
            [idx / (s * s), (idx / s) % s, idx % s]
        }
    }

    #[inline]
    pub fn flat_index(&self, mi: [usize; 3]) -> usize {
        let s = self.size;
        if self.n == 2 {
            mi[0] * s + mi[1]
        } else {
            (mi[0] * s + mi[1]) * s + mi[2]
        }
    }

    /// Frequency of a flat index.
    #[inline]
    pub fn freq(&self, idx: usize) -> [f64; 3] {
        let mi = self.multi_index(idx);
        let h = self.freq_step();
        let mut xi = [0.0; 3];
        for a in 0..self.n {
            xi[a] = h * self.signed(mi[a]) as f64;
        }
        xi
    }

    /// Physical coordinate of a flat index.
    #[inline]
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let mi = self.multi_index(idx);
        let h = self.spacing();
        let half = (self.size / 2) as f64;
        let mut x = [0.0; 3];
        for a in 0..self.n {
            x[a] = h * (mi[a] as f64 - half);
        }
        x
    }

    /// Parity `(-1)^(sum of indices)` relating FFT output to the centred transform.
    #[inline]
    pub fn parity(&self, idx: usize) -> f64 {
        let mi = self.multi_index(idx);
        if (mi[0] + mi[1] + mi[2]) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn check_band(&self, band: f64) -> Result<()> {
        if self.nyquist() > band {
            Ok(())
        } else {
            Err(Error::Nyquist { nyquist: self.nyquist(), band })
        }
    }

    pub fn same_as(&self, other: &PeriodicGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

#[inline]
pub fn norm(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[inline]
pub fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(PeriodicGrid::new(2, 12, 1.0).is_err());
        assert!(PeriodicGrid::new(2, 4, 1.0).is_err());
        assert!(PeriodicGrid::new(4, 16, 1.0).is_err());
        assert!(PeriodicGrid::new(2, 16, -1.0).is_err());
    }

    #[test]
    fn index_roundtrip() {
        let g = PeriodicGrid::new(3, 8, 2.0).unwrap();
        for idx in 0..g.len() {
            assert_eq!(g.flat_index(g.multi_index(idx)), idx);
        }
        assert_eq!(g.signed(4), -4);
        assert_eq!(g.unsigned(-1), 7);
    }

    #[test]
    fn for_band_picks_minimal_power() {
        let g = PeriodicGrid::for_band(2, 2.0 * PI, 100.0, 0.0).unwrap();
        assert!(g.nyquist() > 100.0);
        assert!(PI * (g.size() / 2) as f64 / g.period() <= 100.0);
    }
}
