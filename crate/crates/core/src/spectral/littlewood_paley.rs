//! Dyadic Littlewood-Paley partition built from a telescoping plateau bump.

use super::multiplier::FourierMultiplier;
use crate::profile::BumpProfile;

/// `beta(r)`: 1 for `r <= 1`, 0 for `r >= 2`.
#[inline]
fn beta(r: f64) -> f64 {
    BumpProfile::scaled(1.0, 2.0, r)
}

/// Radial profile of the `k`-th piece; `sum_{k<=K}` telescopes to `beta(r/2^K)`.
pub fn lp_profile(k: u32, r: f64) -> f64 {
    if k == 0 {
        beta(r)
    } else {
        let s = (k as f64).exp2();
        beta(r / s) - beta(2.0 * r / s)
    }
}

/// Widened companion: equals 1 on the support of piece `k`.
pub fn lp_widened_profile(k: u32, r: f64) -> f64 {
    let s = (k as f64).exp2();
    if k < 2 {
        beta(r / (2.0 * s))
    } else {
        beta(r / (2.0 * s)) - beta(4.0 * r / s)
    }
}

pub fn littlewood_paley(k: u32) -> FourierMultiplier {
    let s = (k as f64).exp2();
    let support = if k == 0 { (0.0, 2.0) } else { (0.5 * s, 2.0 * s) };
    FourierMultiplier::radial(move |r| lp_profile(k, r), Some(support))
}

pub fn littlewood_paley_widened(k: u32) -> FourierMultiplier {
    let s = (k as f64).exp2();
    let support = if k < 2 { (0.0, 4.0 * s) } else { (0.25 * s, 4.0 * s) };
    FourierMultiplier::radial(move |r| lp_widened_profile(k, r), Some(support))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_telescopes() {
        for big_k in 1..10u32 {
            let lim = (big_k as f64 - 1.0).exp2();
            for i in 0..=2000 {
                let r = lim * i as f64 / 2000.0;
                let s: f64 = (0..=big_k).map(|k| lp_profile(k, r)).sum();
                assert!((s - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn support_and_companion() {
        for k in 0..8u32 {
            let s = (k as f64).exp2();
            assert_eq!(lp_profile(k, 4.0 * s), 0.0);
            for i in 0..=4000 {
                let r = 8.0 * s * i as f64 / 4000.0;
                let v = lp_profile(k, r);
                assert_eq!(lp_widened_profile(k, r) * v, v);
                if k > 0 && (r < 0.5 * s || r > 2.0 * s) {
                    assert_eq!(v, 0.0);
                }
                let w = lp_widened_profile(k, r);
                if k >= 2 && (r < 0.25 * s || r > 4.0 * s) {
                    assert_eq!(w, 0.0);
                }
            }
        }
    }
}
