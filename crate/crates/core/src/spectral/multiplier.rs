use num_complex::Complex64;
use serde::Serialize;
use std::fmt;
use std::sync::Arc;

use super::field::{SampledField, Spectrum};
use super::grid::norm;

pub type Symbol = Arc<dyn Fn(&[f64; 3]) -> Complex64 + Send + Sync>;

/// Descriptive metadata carried alongside a symbol.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct MultiplierMeta {
    pub radial: bool,
    /// Annulus `(inner, outer)` outside which the symbol vanishes.
    pub support: Option<(f64, f64)>,
    pub homogeneity: Option<f64>,
}

/// A Fourier multiplier `m(D)`, defined by its symbol on all of frequency space.
#[derive(Clone)]
pub struct FourierMultiplier {
    symbol: Symbol,
    pub meta: MultiplierMeta,
}

impl fmt::Debug for FourierMultiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierMultiplier").field("meta", &self.meta).finish()
    }
}

impl FourierMultiplier {
    pub fn new<F>(symbol: F, meta: MultiplierMeta) -> Self
    where
        F: Fn(&[f64; 3]) -> Complex64 + Send + Sync + 'static,
    {
        Self { symbol: Arc::new(symbol), meta }
    }

    /// Real radial symbol `xi -> profile(|xi|)`.
    pub fn radial<F>(profile: F, support: Option<(f64, f64)>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(
            move |xi| Complex64::new(profile(norm(xi)), 0.0),
            MultiplierMeta { radial: true, support, homogeneity: None },
        )
    }

    pub fn identity() -> Self {
        Self::new(|_| Complex64::new(1.0, 0.0), MultiplierMeta { radial: true, support: None, homogeneity: Some(0.0) })
    }

    /// Bessel potential symbol `<xi>^s = (1 + |xi|^2)^{s/2}`.
    pub fn japanese(s: f64) -> Self {
        Self::radial(move |r| (1.0 + r * r).powf(0.5 * s), None)
    }

    #[inline]
    pub fn eval(&self, xi: &[f64; 3]) -> Complex64 {
        (self.symbol)(xi)
    }

    pub fn support_bound(&self) -> Option<f64> {
        self.meta.support.map(|s| s.1)
    }

    /// Pointwise product of symbols.
    pub fn product(&self, other: &FourierMultiplier) -> FourierMultiplier {
        let (a, b) = (self.symbol.clone(), other.symbol.clone());
        let support = match (self.meta.support, other.meta.support) {
            (Some(p), Some(q)) => Some((p.0.max(q.0), p.1.min(q.1))),
            (s, None) | (None, s) => s,
        };
        let homogeneity = match (self.meta.homogeneity, other.meta.homogeneity) {
            (Some(p), Some(q)) => Some(p + q),
            _ => None,
        };
        FourierMultiplier {
            symbol: Arc::new(move |xi| a(xi) * b(xi)),
            meta: MultiplierMeta { radial: self.meta.radial && other.meta.radial, support, homogeneity },
        }
    }

    pub fn apply_spectrum(&self, s: &mut Spectrum) {
        for (i, c) in s.coeffs.iter_mut().enumerate() {
            if c.re != 0.0 || c.im != 0.0 {
                *c *= self.eval(&s.grid.freq(i));
            }
        }
        s.band_limit = min_band(s.band_limit, self.support_bound());
    }

    pub fn apply(&self, f: &SampledField) -> SampledField {
        let mut s = f.spectrum();
        self.apply_spectrum(&mut s);
        s.to_field()
    }
}

pub(crate) fn min_band(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) | (None, x) => x,
    }
}

/// `m(D) f`.
pub fn apply_multiplier(f: &SampledField, m: &FourierMultiplier) -> SampledField {
    m.apply(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::PeriodicGrid;

    #[test]
    fn identity_is_exact() {
        let g = PeriodicGrid::new(2, 16, 4.0).unwrap();
        let f = SampledField::from_fn(g, |x| Complex64::new(x[0].sin(), x[1] * 0.1));
        let h = apply_multiplier(&f, &FourierMultiplier::identity());
        for (a, b) in f.data.iter().zip(&h.data) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn plane_wave_eigenvalue() {
        let g = PeriodicGrid::new(2, 32, 2.0 * std::f64::consts::PI).unwrap();
        let f = SampledField::plane_wave(g, [3, 4, 0]);
        let h = apply_multiplier(&f, &FourierMultiplier::japanese(2.0));
        for (a, b) in f.data.iter().zip(&h.data) {
            assert!((a * 26.0 - b).norm() < 1e-10);
        }
    }

    #[test]
    fn product_meta_intersects_support() {
        let a = FourierMultiplier::radial(|_| 1.0, Some((1.0, 4.0)));
        let b = FourierMultiplier::radial(|_| 1.0, Some((2.0, 8.0)));
        assert_eq!(a.product(&b).meta.support, Some((2.0, 4.0)));
    }
}
