use serde::{Deserialize, Serialize};
use std::fmt::Debug;

use crate::profile::BumpProfile;
use crate::spectral::grid::norm;

pub trait SymbolFunction: Send + Sync + Debug {
    fn eval(&self, x: &[f64; 3], t: f64, eta: &[f64; 3]) -> f64;
    fn order(&self) -> f64;
    /// Radius in `x` beyond which the symbol vanishes.
    fn support_radius(&self) -> f64;
    /// Factors `(a_1(x), a_2(eta))` when `a = a_1(x) a_2(eta)`.
    fn spatial_factor(&self, _x: &[f64; 3]) -> Option<f64> {
        None
    }
    fn frequency_factor(&self, _eta: &[f64; 3]) -> Option<f64> {
        None
    }
}

/// `a(z, eta) = a_1(x) <eta>^m` with a smooth radial spatial cutoff
/// `a_1 = 1` on `|x| <= inner`, `0` for `|x| >= outer`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductSymbol {
    pub inner: f64,
    pub outer: f64,
    pub order: f64,
}

impl ProductSymbol {
    pub fn unit(inner: f64, outer: f64) -> Self {
        Self { inner, outer, order: 0.0 }
    }

    /// Cutoff large enough to be 1 on the whole fundamental cell of period `l`.
    pub fn everywhere(l: f64) -> Self {
        Self::unit(l, 2.0 * l)
    }

    #[inline]
    fn a1(&self, x: &[f64; 3]) -> f64 {
        BumpProfile::scaled(self.inner, self.outer, norm(x))
    }

    #[inline]
    fn a2(&self, eta: &[f64; 3]) -> f64 {
        if self.order == 0.0 {
            1.0
        } else {
            (1.0 + eta[0] * eta[0] + eta[1] * eta[1] + eta[2] * eta[2]).powf(0.5 * self.order)
        }
    }
}

impl SymbolFunction for ProductSymbol {
    fn eval(&self, x: &[f64; 3], _t: f64, eta: &[f64; 3]) -> f64 {
        self.a1(x) * self.a2(eta)
    }
    fn order(&self) -> f64 {
        self.order
    }
    fn support_radius(&self) -> f64 {
        self.outer
    }
    fn spatial_factor(&self, x: &[f64; 3]) -> Option<f64> {
        Some(self.a1(x))
    }
    fn frequency_factor(&self, eta: &[f64; 3]) -> Option<f64> {
        Some(self.a2(eta))
    }
}
