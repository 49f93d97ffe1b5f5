//! Smooth radial profiles: plateau bumps and the dyadic annulus profile.

use std::f64::consts::LN_2;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// C-infinity step: 0 for `t <= 0`, 1 for `t >= 1`, strictly increasing between.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Radial bump equal to 1 on `[0, r0]`, 0 on `[1, inf)`, monotone between.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BumpProfile {
    pub r0: f64,
    /// Number of derivatives checked to be continuous across the transition
    /// endpoints by the test suite.
    pub smoothness_order: u32,
}

impl Default for BumpProfile {
    fn default() -> Self {
        Self { r0: 0.5, smoothness_order: 4 }
    }
}

impl BumpProfile {
    pub fn new(r0: f64) -> Result<Self> {
        if !(r0 > 0.0 && r0 < 1.0) {
            return Err(Error::InvalidArgument(format!("plateau radius {r0} not in (0,1)")));
        }
        Ok(Self { r0, ..Self::default() })
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        if r <= self.r0 {
            1.0
        } else if r >= 1.0 {
            0.0
        } else {
            1.0 - smooth_step((r - self.r0) / (1.0 - self.r0))
        }
    }

    /// Profile rescaled to equal 1 on `[0, a]` and vanish beyond `b`.
    #[inline]
    pub fn scaled(a: f64, b: f64, r: f64) -> f64 {
        if r <= a {
            1.0
        } else if r >= b {
            0.0
        } else {
            1.0 - smooth_step((r - a) / (b - a))
        }
    }
}

/// Seed bump `exp(1 - 1/(1 - t^2))` with `t = log2(r)`, supported in `[1/2, 2]`.
pub fn annulus_seed(r: f64) -> f64 {
    if r <= 0.5 || r >= 2.0 {
        return 0.0;
    }
    let t = r.log2();
    let d = 1.0 - t * t;
    if d <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / d).exp()
    }
}

/// Radial profile `Psi` supported in `[1/2, 2]` with `int Psi(s r)^2 ds/s = 1`.
#[derive(Clone)]
pub struct AnnulusProfile {
    theta: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    scale: f64,
    /// Value of `int theta(u)^2 du/u` before normalization.
    pub seed_mass: f64,
}

impl fmt::Debug for AnnulusProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnnulusProfile").field("seed_mass", &self.seed_mass).finish()
    }
}

impl Default for AnnulusProfile {
    fn default() -> Self {
        build_annulus_profile(annulus_seed).expect("standard seed is nondegenerate")
    }
}

impl AnnulusProfile {
    pub const SUPPORT: (f64, f64) = (0.5, 2.0);

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.5 || r >= 2.0 {
            0.0
        } else {
            (self.theta)(r) * self.scale
        }
    }

    /// `int_0^inf Psi(s r)^2 ds/s`, evaluated by quadrature in `log s`.
    pub fn partition_value(&self, r: f64) -> f64 {
        let gl = GaussLegendre::new(16);
        let (a, b) = ((0.5 / r).ln(), (2.0 / r).ln());
        gl.composite(a, b, 64, |v| {
            let x = self.eval(v.exp() * r);
            x * x
        })
    }
}

/// Normalizes an annulus seed `theta` supported in `[1/2, 2]`.
pub fn build_annulus_profile<F>(theta: F) -> Result<AnnulusProfile>
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    let gl = GaussLegendre::new(16);
    let mass = gl.composite(-LN_2, LN_2, 64, |v| {
        let x = theta(v.exp());
        x * x
    });
    if !(mass > 1e-12) {
        return Err(Error::InvalidArgument(format!("annulus seed mass {mass:e} too small")));
    }
    Ok(AnnulusProfile { theta: Arc::new(theta), scale: mass.sqrt().recip(), seed_mass: mass })
}
