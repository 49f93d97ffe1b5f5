//! Modulated packet families summed over the caps inside a cone of directions.
//!
//! Packets are built on the frequency side: the profile transform is a smooth
//! bump of radius `c'`, and each packet is cut to the support of its cap.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::decoupling::CapSystem;
use crate::error::{Error, Result};
use crate::profile::BumpProfile;
use crate::spectral::grid::{dot, norm};
use crate::spectral::{PeriodicGrid, SampledField, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Anisotropically rescaled packets, all centred at the origin.
    Focusing,
    /// Unit-scale packets `e^{i 2^k nu.x} psi(x)`.
    UnitScale,
    /// One focusing packet, for the cap closest to the axis.
    SinglePacket,
    /// One unit-scale packet, for the cap closest to the axis.
    SingleUnitPacket,
}

impl FamilyKind {
    pub fn anisotropic(self) -> bool {
        matches!(self, Self::Focusing | Self::SinglePacket)
    }

    pub fn single(self) -> bool {
        matches!(self, Self::SinglePacket | Self::SingleUnitPacket)
    }
}

/// Largest half-aperture with `|(1-r) nu + r omega| >= 1/2` on the cone.
pub const MAX_APERTURE: f64 = PI / 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacketFamilySpec {
    pub kind: FamilyKind,
    pub n: usize,
    /// Half-angle of the cone about `axis`.
    #[serde(default = "default_aperture")]
    pub aperture: f64,
    #[serde(default = "default_axis")]
    pub axis: [f64; 3],
    pub k_min: u32,
    pub k_max: u32,
    /// Radius `c'` of the profile transform, in packet coordinates.
    pub cutoff: f64,
    /// Grid period at `k_max`.
    pub period: f64,
    /// The period at level `k` is `period * 2^{period_scaling (k_max - k)}`.
    pub period_scaling: f64,
    /// Relative Nyquist headroom over the family band.
    #[serde(default = "default_margin")]
    pub margin: f64,
}

fn default_aperture() -> f64 {
    MAX_APERTURE
}

fn default_axis() -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

fn default_margin() -> f64 {
    0.05
}

impl PacketFamilySpec {
    /// Focusing family; the period shrinks with the transverse packet scale.
    pub fn focusing(n: usize) -> Self {
        Self {
            kind: FamilyKind::Focusing,
            n,
            aperture: MAX_APERTURE,
            axis: default_axis(),
            k_min: 3,
            k_max: 7,
            cutoff: 0.4,
            period: 2.0 * PI,
            period_scaling: 0.5,
            margin: default_margin(),
        }
    }

    pub fn unit_scale(n: usize) -> Self {
        Self { kind: FamilyKind::UnitScale, cutoff: 1.0, period: 6.0 * PI, period_scaling: 0.0, ..Self::focusing(n) }
    }

    /// Default rule for `kind`: focusing shapes use the shrinking period.
    pub fn defaults(kind: FamilyKind, n: usize) -> Self {
        let base = if kind.anisotropic() { Self::focusing(n) } else { Self::unit_scale(n) };
        base.with_kind(kind)
    }

    pub fn with_kind(&self, kind: FamilyKind) -> Self {
        Self { kind, ..self.clone() }
    }

    pub fn levels(&self) -> Vec<u32> {
        (self.k_min..=self.k_max).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n == 2 || self.n == 3) {
            return Err(Error::InvalidArgument(format!("dimension {}", self.n)));
        }
        if self.k_max < self.k_min + 2 {
            return Err(Error::InvalidArgument(format!("level range {}..={} has fewer than 3 levels", self.k_min, self.k_max)));
        }
        if !(self.aperture > 0.0 && self.aperture <= MAX_APERTURE * (1.0 + 1e-12)) {
            return Err(Error::InvalidArgument(format!("aperture {} not in (0, pi/3]", self.aperture)));
        }
        if (norm(&self.axis) - 1.0).abs() > 1e-12 || (self.n == 2 && self.axis[2] != 0.0) {
            return Err(Error::InvalidArgument("cone axis must be a unit vector of the ambient space".into()));
        }
        let cap = if self.kind.anisotropic() { 0.5 } else { 0.5 * (self.k_min as f64).exp2() };
        if !(self.cutoff > 0.0 && self.cutoff < cap) {
            return Err(Error::InvalidArgument(format!("profile cutoff {}", self.cutoff)));
        }
        if !(self.period > 0.0 && self.period_scaling >= 0.0 && self.margin >= 0.0) {
            return Err(Error::InvalidArgument("grid rule needs a positive period and nonnegative scaling".into()));
        }
        Ok(())
    }

    /// Largest `|xi|` reached by the family at level `k`.
    pub fn band(&self, k: u32) -> f64 {
        let r = (k as f64).exp2();
        if self.kind.anisotropic() {
            r * (1.0 + self.cutoff)
        } else {
            r + self.cutoff
        }
    }

    pub fn grid(&self, k: u32) -> Result<PeriodicGrid> {
        let period = self.period * (self.period_scaling * (self.k_max as f64 - k as f64)).exp2();
        PeriodicGrid::for_band(self.n, period, self.band(k), self.margin)
    }
}

/// Profile transform: smooth, radial, vanishing beyond `cutoff`.
#[inline]
pub fn profile_transform(r: f64, cutoff: f64) -> f64 {
    BumpProfile::scaled(0.0, cutoff, r)
}

#[derive(Debug, Clone)]
pub struct PacketFamily {
    pub spec: PacketFamilySpec,
    pub k: u32,
    pub field: SampledField,
    pub caps: CapSystem,
    /// Caps in `V_k` carrying a packet.
    pub members: Vec<usize>,
    /// Lattice frequency at which each packet is centred.
    pub centers: Vec<[f64; 3]>,
}

/// Indices of caps whose support lies inside the cone.
pub fn caps_in_cone(caps: &CapSystem, axis: &[f64; 3], aperture: f64) -> Vec<usize> {
    let half = 2.0 * (0.5 * caps.bump_radius).min(1.0).asin();
    (0..caps.len())
        .filter(|&i| dot(&caps.centers[i], axis).clamp(-1.0, 1.0).acos() + half <= aperture)
        .collect()
}

fn closest_to_axis(caps: &CapSystem, members: &[usize], axis: &[f64; 3]) -> usize {
    let mut best = members[0];
    for &i in members {
        if dot(&caps.centers[i], axis) > dot(&caps.centers[best], axis) {
            best = i;
        }
    }
    best
}

fn snap(grid: &PeriodicGrid, v: [f64; 3]) -> [f64; 3] {
    let h = grid.freq_step();
    let mut out = [0.0; 3];
    for a in 0..grid.dim() {
        out[a] = (v[a] / h).round() * h;
    }
    out
}

/// The family at level `k` on the grid chosen by [`PacketFamilySpec::grid`].
pub fn make_family(spec: &PacketFamilySpec, k: u32) -> Result<PacketFamily> {
    spec.validate()?;
    make_family_on(spec, k, spec.grid(k)?)
}

/// The family at level `k` on a caller-supplied grid.
pub fn make_family_on(spec: &PacketFamilySpec, k: u32, grid: PeriodicGrid) -> Result<PacketFamily> {
    spec.validate()?;
    if grid.dim() != spec.n {
        return Err(Error::GridMismatch(format!("grid dimension {} for a family in dimension {}", grid.dim(), spec.n)));
    }
    grid.check_band(spec.band(k))?;
    let caps = CapSystem::build(k, spec.n)?;
    let mut members = caps_in_cone(&caps, &spec.axis, spec.aperture);
    if members.is_empty() {
        return Err(Error::Config(format!(
            "no cap of level {k} fits in a cone of half-aperture {:.3}; raise k_min or widen the aperture",
            spec.aperture
        )));
    }
    if spec.kind.single() {
        members = vec![closest_to_axis(&caps, &members, &spec.axis)];
    }
    let r = (k as f64).exp2();
    let centers: Vec<[f64; 3]> = members
        .iter()
        .map(|&i| {
            let c = caps.centers[i];
            snap(&grid, [r * c[0], r * c[1], r * c[2]])
        })
        .collect();
    let mut slot = vec![usize::MAX; caps.len()];
    for (j, &i) in members.iter().enumerate() {
        slot[i] = j;
    }
    let n = spec.n;
    let aniso = spec.kind.anisotropic();
    let amplitude = if aniso { (-(k as f64) * (n as f64 + 1.0) / 2.0).exp2() } else { 1.0 };
    let (lo, hi) = (0.5 * r, 2.0 * r);
    let mut weights = Vec::new();
    let mut coeffs = vec![Complex64::default(); grid.len()];
    let mut band: f64 = 0.0;
    for (idx, c) in coeffs.iter_mut().enumerate() {
        let xi = grid.freq(idx);
        let rho = norm(&xi);
        if rho < lo || rho > hi {
            continue;
        }
        // projection onto the support of the assigned cap
        caps.weights_at(&xi, &mut weights);
        let mut v = 0.0;
        for &(i, _) in &weights {
            let j = slot[i];
            if j == usize::MAX {
                continue;
            }
            let e = centers[j];
            let d = [xi[0] - e[0], xi[1] - e[1], xi[2] - e[2]];
            let t = if aniso {
                let nu = caps.centers[i];
                let a = dot(&d, &nu);
                let perp = [d[0] - a * nu[0], d[1] - a * nu[1], d[2] - a * nu[2]];
                ((a / r).powi(2) + norm(&perp).powi(2) / r).sqrt()
            } else {
                norm(&d)
            };
            v += profile_transform(t, spec.cutoff);
        }
        if v != 0.0 {
            *c = Complex64::new(amplitude * v, 0.0);
            band = band.max(rho);
        }
    }
    let field = Spectrum { grid, coeffs, band_limit: Some(band) }.to_field();
    Ok(PacketFamily { spec: spec.clone(), k, field, caps, members, centers })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::log2_slope;
    use crate::spectral::lp_norm;

    #[test]
    fn cone_membership_and_rejections() {
        let spec = PacketFamilySpec::focusing(2);
        for k in 3..=7 {
            let caps = CapSystem::build(k, 2).unwrap();
            let m = caps_in_cone(&caps, &spec.axis, spec.aperture);
            assert!(!m.is_empty());
            // symmetric about the axis
            assert_eq!(m.len() % 2, 1);
        }
        let mut bad = spec.clone();
        bad.aperture = 1.2;
        assert!(bad.validate().is_err());
        let mut narrow = spec.clone();
        narrow.aperture = 0.05;
        assert!(matches!(make_family(&narrow, 3), Err(Error::Config(_))));
        let mut short = spec.clone();
        short.k_max = 4;
        assert!(short.validate().is_err());
        let g = PeriodicGrid::new(2, 32, 2.0 * PI).unwrap();
        assert!(matches!(make_family_on(&spec, 5, g), Err(Error::Nyquist { .. })));
    }

    #[test]
    fn packets_stay_in_their_caps() {
        for kind in [FamilyKind::SinglePacket, FamilyKind::SingleUnitPacket] {
            let spec = PacketFamilySpec::focusing(2).with_kind(kind);
            let spec = if kind.anisotropic() { spec } else { PacketFamilySpec { cutoff: 1.0, ..spec } };
            let fam = make_family(&spec, 4).unwrap();
            let i = fam.members[0];
            let s = fam.field.spectrum();
            assert!(s.mass_outside(|xi| fam.caps.chi(i, xi) > 0.0) < 1e-20);
            assert!(s.leakage_beyond(fam.spec.band(4)) < 1e-8);
        }
    }

    #[test]
    fn single_packet_scaling_laws() {
        let ks: Vec<u32> = (3..=7).collect();
        let kf: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
        let spec = PacketFamilySpec::focusing(2).with_kind(FamilyKind::SinglePacket);
        let mut l1 = Vec::new();
        let mut lp = Vec::new();
        let p = 6.0;
        for &k in &ks {
            let fam = make_family(&spec, k).unwrap();
            let s = fam.field.spectrum();
            let dv = s.grid.freq_step().powi(2);
            l1.push(s.coeffs.iter().map(|c| c.norm()).sum::<f64>() * dv);
            lp.push(lp_norm(&fam.field, p).unwrap());
        }
        let (lo, hi) = l1.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        assert!(hi / lo < 2.0, "{l1:?}");
        let fit = log2_slope(&kf, &lp).unwrap();
        assert!((fit.slope + 3.0 / (2.0 * p)).abs() < 0.05, "{fit:?}");

        let spec = PacketFamilySpec::unit_scale(2).with_kind(FamilyKind::SingleUnitPacket);
        let lp: Vec<f64> = ks.iter().map(|&k| lp_norm(&make_family(&spec, k).unwrap().field, p).unwrap()).collect();
        let fit = log2_slope(&kf, &lp).unwrap();
        assert!(fit.slope.abs() < 0.05, "{fit:?}");
    }
}
