//! Flat wave propagators as Fourier multipliers.

use num_complex::Complex64;

use crate::spectral::grid::norm;
use crate::spectral::{SampledField, Spectrum};

/// `e^{it|D|} f`.
pub fn half_wave_propagator(f: &SampledField, t: f64) -> SampledField {
    let mut s = f.spectrum();
    half_wave_spectrum(&mut s, t);
    s.to_field()
}

pub fn half_wave_spectrum(s: &mut Spectrum, t: f64) {
    for (i, c) in s.coeffs.iter_mut().enumerate() {
        if c.re != 0.0 || c.im != 0.0 {
            *c *= Complex64::from_polar(1.0, t * norm(&s.grid.freq(i)));
        }
    }
}

/// `sin(t r)/r`, continuous at `r = 0`.
#[inline]
pub fn sinc_t(t: f64, r: f64) -> f64 {
    let x = t * r;
    if x.abs() < 1e-8 {
        t * (1.0 - x * x / 6.0)
    } else {
        x.sin() / r
    }
}

/// Spectral coefficients of `cos(t|D|) u0 + sin(t|D|)/|D| u1`.
pub fn wave_solution_spectrum(u0: &Spectrum, u1: &Spectrum, t: f64) -> Spectrum {
    let mut out = u0.clone();
    for (i, (o, b)) in out.coeffs.iter_mut().zip(&u1.coeffs).enumerate() {
        let r = norm(&u0.grid.freq(i));
        *o = *o * (t * r).cos() + *b * sinc_t(t, r);
    }
    out.band_limit = match (u0.band_limit, u1.band_limit) {
        (Some(a), Some(b)) => Some(a.max(b)),
        _ => None,
    };
    out
}

/// Spectral coefficients of `d/dt` of the wave solution.
pub fn wave_velocity_spectrum(u0: &Spectrum, u1: &Spectrum, t: f64) -> Spectrum {
    let mut out = u0.clone();
    for (i, (o, b)) in out.coeffs.iter_mut().zip(&u1.coeffs).enumerate() {
        let r = norm(&u0.grid.freq(i));
        *o = -*o * r * (t * r).sin() + *b * (t * r).cos();
    }
    out
}

/// Solution at time `t` of `u_tt = Laplace u`, `u(0) = u0`, `u_t(0) = u1`.
pub fn wave_solution(u0: &SampledField, u1: &SampledField, t: f64) -> SampledField {
    wave_solution_spectrum(&u0.spectrum(), &u1.spectrum(), t).to_field()
}

pub fn wave_velocity(u0: &SampledField, u1: &SampledField, t: f64) -> SampledField {
    wave_velocity_spectrum(&u0.spectrum(), &u1.spectrum(), t).to_field()
}

/// `||grad u||_2^2` from coefficients.
pub fn gradient_energy(s: &Spectrum) -> f64 {
    let v: f64 = s
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let r = norm(&s.grid.freq(i));
            r * r * c.norm_sqr()
        })
        .sum();
    v / s.grid.volume()
}
