//! Translation charts on a flat torus with a squared partition of unity, and
//! the chart restriction `Q` and assembly `P` operators.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::BumpProfile;
use crate::spectral::{PeriodicGrid, SampledField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WindowParams {
    /// Window half-width in units of the lattice step; must exceed 1/2.
    pub radius: f64,
    /// Fraction of the half-width on which the seed bump equals 1.
    pub plateau: f64,
}

impl Default for WindowParams {
    fn default() -> Self {
        Self { radius: 1.0, plateau: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtlasSpec {
    pub n: usize,
    #[serde(rename = "L")]
    pub period: f64,
    /// Grid points per axis.
    pub size: usize,
    /// Chart-centre spacing in grid cells.
    pub lattice_step: usize,
    #[serde(default)]
    pub window_params: WindowParams,
}

/// Chart-local fields `psi_kappa u`, one per chart centre, each on the
/// atlas's chart grid centred at its chart centre.
#[derive(Debug, Clone)]
pub struct ChartSequence {
    pub entries: Vec<SampledField>,
}

#[derive(Debug, Clone)]
pub struct TorusAtlas {
    pub spec: AtlasSpec,
    pub grid: PeriodicGrid,
    pub chart_grid: PeriodicGrid,
    /// Grid multi-indices of the chart centres.
    pub centers: Vec<[usize; 3]>,
    /// Physical window half-width.
    pub radius: f64,
    /// Most windows nonzero at one grid point.
    pub max_overlap: usize,
    /// `psi` on the chart grid; every window is a translate of it.
    psi: Vec<f64>,
}

impl TorusAtlas {
    pub fn new(spec: AtlasSpec) -> Result<Self> {
        let grid = PeriodicGrid::new(spec.n, spec.size, spec.period)?;
        let step = spec.lattice_step;
        if step == 0 || spec.size % step != 0 {
            return Err(Error::InvalidArgument(format!("lattice step {step} does not divide {}", spec.size)));
        }
        let w = spec.window_params;
        if !(w.radius > 0.5) || !(w.plateau >= 0.0 && w.plateau < 1.0) {
            return Err(Error::InvalidArgument(format!("window parameters {w:?}")));
        }
        let h = grid.spacing();
        let radius = w.radius * step as f64 * h;
        if radius > spec.period / 3.0 {
            return Err(Error::InvalidArgument(format!("chart radius {radius} exceeds L/3")));
        }
        let reach = (radius / h).ceil() as usize;
        let mut m = 8usize;
        while m < 4 * reach + 2 {
            m *= 2;
        }
        let m = m.min(spec.size);
        let chart_grid = PeriodicGrid::new(spec.n, m, m as f64 * h)?;
        let per_axis = spec.size / step;
        let count = per_axis.pow(spec.n as u32);
        let centers: Vec<[usize; 3]> = (0..count)
            .map(|c| {
                let mut mi = [0usize; 3];
                let mut r = c;
                for a in (0..spec.n).rev() {
                    mi[a] = (r % per_axis) * step;
                    r /= per_axis;
                }
                mi
            })
            .collect();
        let mut atlas = Self { spec, grid, chart_grid, centers, radius, max_overlap: 0, psi: Vec::new() };
        let seed: Vec<f64> = (0..chart_grid.len()).map(|j| atlas.seed(&chart_grid.point(j))).collect();
        let mut sum = vec![0.0; grid.len()];
        let mut count = vec![0usize; grid.len()];
        for c in 0..atlas.centers.len() {
            for (j, b) in seed.iter().enumerate() {
                if *b > 0.0 {
                    let t = atlas.torus_index(c, j);
                    sum[t] += b * b;
                    count[t] += 1;
                }
            }
        }
        if let Some(i) = sum.iter().position(|s| *s <= 0.0) {
            return Err(Error::InvalidArgument(format!("windows do not cover grid point {i}")));
        }
        atlas.max_overlap = count.into_iter().max().unwrap_or(0);
        // sum is lattice periodic, so one window determines all of them
        atlas.psi = seed.iter().enumerate().map(|(j, b)| b / sum[atlas.torus_index(0, j)].sqrt()).collect();
        Ok(atlas)
    }

    /// The square `n`-cube atlas with `per_axis` charts along each axis.
    pub fn uniform(n: usize, period: f64, size: usize, per_axis: usize) -> Result<Self> {
        if per_axis == 0 {
            return Err(Error::InvalidArgument("need at least one chart per axis".into()));
        }
        Self::new(AtlasSpec { n, period, size, lattice_step: size / per_axis, window_params: WindowParams::default() })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    fn seed(&self, x: &[f64; 3]) -> f64 {
        let p = self.spec.window_params.plateau;
        (0..self.spec.n).map(|a| BumpProfile::scaled(p, 1.0, x[a].abs() / self.radius)).product()
    }

    /// Torus index of chart-grid index `j` in chart `c`.
    fn torus_index(&self, c: usize, j: usize) -> usize {
        let m = self.chart_grid.size() as i64;
        let n = self.grid.size() as i64;
        let local = self.chart_grid.multi_index(j);
        let mut mi = [0usize; 3];
        for a in 0..self.spec.n {
            // chart-local index m/2 sits at the centre
            mi[a] = (self.centers[c][a] as i64 + local[a] as i64 - m / 2).rem_euclid(n) as usize;
        }
        self.grid.flat_index(mi)
    }

    /// Physical position of chart centre `c`.
    pub fn center_point(&self, c: usize) -> [f64; 3] {
        self.grid.point(self.grid.flat_index(self.centers[c]))
    }

    /// `psi_kappa` sampled on the torus grid.
    pub fn window(&self, c: usize) -> SampledField {
        let mut out = SampledField::zeros(self.grid);
        out.band_limit = None;
        for (j, v) in self.psi.iter().enumerate() {
            out.data[self.torus_index(c, j)] = Complex64::new(*v, 0.0);
        }
        out
    }

    pub fn q_restrict(&self, u: &SampledField) -> Result<ChartSequence> {
        self.grid.same_as(&u.grid)?;
        let entries = (0..self.len())
            .map(|c| {
                let data = self.psi.iter().enumerate().map(|(j, v)| u.data[self.torus_index(c, j)] * *v).collect();
                SampledField { grid: self.chart_grid, data, band_limit: None }
            })
            .collect();
        Ok(ChartSequence { entries })
    }

    pub fn p_assemble(&self, f: &ChartSequence) -> Result<SampledField> {
        if f.entries.len() != self.len() {
            return Err(Error::GridMismatch(format!("{} entries for {} charts", f.entries.len(), self.len())));
        }
        let mut out = SampledField::zeros(self.grid);
        out.band_limit = None;
        for (c, e) in f.entries.iter().enumerate() {
            self.chart_grid.same_as(&e.grid)?;
            for (j, v) in self.psi.iter().enumerate() {
                if *v != 0.0 {
                    out.data[self.torus_index(c, j)] += e.data[j] * *v;
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random(g: PeriodicGrid, seed: u64) -> SampledField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..g.len()).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
        SampledField::new(g, data, None).unwrap()
    }

    #[test]
    fn squared_partition_and_overlap() {
        for n in [2usize, 3] {
            let size = if n == 2 { 64 } else { 16 };
            let a = TorusAtlas::uniform(n, 2.0 * PI, size, 4).unwrap();
            let mut s = vec![0.0; a.grid.len()];
            for c in 0..a.len() {
                for (i, v) in a.window(c).data.iter().enumerate() {
                    s[i] += v.norm_sqr();
                }
            }
            assert!(s.iter().all(|v| (v - 1.0).abs() < 1e-10));
            assert!(a.max_overlap <= 1 << n);
        }
    }

    #[test]
    fn constant_restricts_to_windows() {
        let a = TorusAtlas::uniform(2, 2.0 * PI, 32, 4).unwrap();
        let one = SampledField::from_fn(a.grid, |_| Complex64::new(1.0, 0.0));
        let q = a.q_restrict(&one).unwrap();
        let back = a.p_assemble(&q).unwrap();
        assert!(back.data.iter().all(|v| (v - 1.0).norm() < 1e-12));
        let mut w = ChartSequence { entries: vec![SampledField::zeros(a.chart_grid); a.len()] };
        w.entries[5] = q.entries[5].clone();
        let out = a.p_assemble(&w).unwrap();
        let win = a.window(5);
        assert!(out.data.iter().zip(&win.data).all(|(x, y)| (x - y * y).norm() < 1e-14));
    }

    #[test]
    fn locality() {
        let a = TorusAtlas::uniform(2, 2.0 * PI, 64, 4).unwrap();
        // supported near the centre of chart 0
        let mut u = SampledField::zeros(a.grid);
        u.band_limit = None;
        let c = a.centers[0];
        u.data[a.grid.flat_index(c)] = Complex64::new(1.0, 0.0);
        let q = a.q_restrict(&u).unwrap();
        let nonzero = q.entries.iter().filter(|e| e.data.iter().any(|v| v.norm() > 0.0)).count();
        assert_eq!(nonzero, 1);
        // on a window edge several charts see it, never more than the overlap bound
        u.data.iter_mut().for_each(|v| *v = Complex64::default());
        u.data[a.grid.flat_index([c[0] + 8, c[1] + 8, 0])] = Complex64::new(1.0, 0.0);
        let q = a.q_restrict(&u).unwrap();
        let nonzero = q.entries.iter().filter(|e| e.data.iter().any(|v| v.norm() > 0.0)).count();
        assert!(nonzero > 1 && nonzero <= a.max_overlap);
    }

    #[test]
    fn pq_is_identity_and_qp_is_a_projection() {
        for n in [2usize, 3] {
            let size = if n == 2 { 64 } else { 16 };
            let a = TorusAtlas::uniform(n, 2.0 * PI, size, 4).unwrap();
            let u = random(a.grid, 3);
            let back = a.p_assemble(&a.q_restrict(&u).unwrap()).unwrap();
            assert!(back.data.iter().zip(&u.data).all(|(x, y)| (x - y).norm() < 1e-10));
            let f = ChartSequence { entries: (0..a.len()).map(|c| random(a.chart_grid, 10 + c as u64)).collect() };
            let once = a.q_restrict(&a.p_assemble(&f).unwrap()).unwrap();
            let twice = a.q_restrict(&a.p_assemble(&once).unwrap()).unwrap();
            for (x, y) in once.entries.iter().zip(&twice.entries) {
                assert!(x.data.iter().zip(&y.data).all(|(p, q)| (p - q).norm() < 1e-10));
            }
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(TorusAtlas::uniform(2, 1.0, 32, 2).is_err());
        let spec = AtlasSpec { n: 2, period: 1.0, size: 32, lattice_step: 8, window_params: WindowParams { radius: 0.4, plateau: 0.5 } };
        assert!(TorusAtlas::new(spec).is_err());
        let spec = AtlasSpec { lattice_step: 7, window_params: WindowParams::default(), ..spec };
        assert!(TorusAtlas::new(spec).is_err());
    }
}
