use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Quadrature nodes on the unit sphere with weights summing to its measure.
#[derive(Debug, Clone)]
pub struct DirectionSet {
    pub n: usize,
    pub nodes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    /// Angle of node 0 for equispaced circle sets.
    pub(crate) circle_offset: Option<f64>,
}

impl DirectionSet {
    /// `m` equispaced nodes on the circle, starting at angle `offset`.
    pub fn circle(m: usize, offset: f64) -> Self {
        let nodes = (0..m)
            .map(|i| {
                let a = offset + 2.0 * PI * i as f64 / m as f64;
                [a.cos(), a.sin(), 0.0]
            })
            .collect();
        Self { n: 2, nodes, weights: vec![2.0 * PI / m as f64; m], circle_offset: Some(offset) }
    }

    /// Fibonacci lattice on the 2-sphere with equal weights `4 pi / m`.
    pub fn fibonacci(m: usize) -> Self {
        let golden = PI * (3.0 - 5f64.sqrt());
        let nodes = (0..m)
            .map(|i| {
                let z = 1.0 - (2 * i + 1) as f64 / m as f64;
                let r = (1.0 - z * z).max(0.0).sqrt();
                let a = golden * i as f64;
                [r * a.cos(), r * a.sin(), z]
            })
            .collect();
        Self { n: 3, nodes, weights: vec![4.0 * PI / m as f64; m], circle_offset: None }
    }

    /// Node count `>= 8 * 2^{k/2}` per great circle, for frequencies up to `2^{k+1}`.
    pub fn for_level(n: usize, k: u32) -> Result<Self> {
        let per_circle = (8.0 * (0.5 * k as f64).exp2()).ceil() as usize;
        match n {
            2 => Ok(Self::circle(per_circle.max(8), 0.0)),
            3 => {
                let m = ((per_circle * per_circle) as f64 / PI).ceil() as usize;
                Ok(Self::fibonacci(m.max(32)))
            }
            _ => Err(Error::InvalidArgument(format!("dimension {n}"))),
        }
    }

    /// The [`for_level`](Self::for_level) set resolving frequencies up to `band`.
    pub fn for_band(n: usize, band: f64) -> Result<Self> {
        let k = if band > 2.0 { (band.log2().ceil() - 1.0) as u32 } else { 0 };
        Self::for_level(n, k)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Typical chordal gap between neighbouring nodes.
    pub fn spacing(&self) -> f64 {
        match self.n {
            2 => 2.0 * PI / self.len() as f64,
            _ => (4.0 * PI / self.len() as f64).sqrt(),
        }
    }

    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Indices of nodes within chordal distance `chord` of the unit vector `u`.
    pub fn near(&self, u: &[f64; 3], chord: f64, out: &mut Vec<usize>) {
        out.clear();
        if let Some(off) = self.circle_offset {
            let m = self.nodes.len();
            let ang = 2.0 * (0.5 * chord.min(2.0)).asin();
            let step = 2.0 * PI / m as f64;
            let span = (ang / step).ceil() as i64 + 1;
            if 2 * span + 1 >= m as i64 {
                out.extend(0..m);
                return;
            }
            let theta = u[1].atan2(u[0]) - off;
            let c = (theta / step).round() as i64;
            for j in c - span..=c + span {
                out.push(j.rem_euclid(m as i64) as usize);
            }
        } else {
            let c2 = chord * chord;
            for (i, w) in self.nodes.iter().enumerate() {
                let d = [u[0] - w[0], u[1] - w[1], u[2] - w[2]];
                if d[0] * d[0] + d[1] * d[1] + d[2] * d[2] <= c2 {
                    out.push(i);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_sphere_measure() {
        assert!((DirectionSet::circle(37, 0.3).measure() - 2.0 * PI).abs() < 1e-10);
        assert!((DirectionSet::fibonacci(500).measure() - 4.0 * PI).abs() < 1e-10);
        for k in 0..8 {
            let d = DirectionSet::for_level(2, k).unwrap();
            assert!(d.len() as f64 >= 8.0 * (0.5 * k as f64).exp2());
        }
    }

    #[test]
    fn fibonacci_integrates_low_degree() {
        let d = DirectionSet::fibonacci(4000);
        let v: f64 = d.nodes.iter().zip(&d.weights).map(|(x, w)| w * x[2] * x[2]).sum();
        assert!((v - 4.0 * PI / 3.0).abs() < 1e-3);
    }

    #[test]
    fn near_covers_all_close_nodes() {
        let d = DirectionSet::circle(50, 0.1);
        let u = [0.6f64.cos(), 0.6f64.sin(), 0.0];
        let mut out = Vec::new();
        d.near(&u, 0.4, &mut out);
        for (i, w) in d.nodes.iter().enumerate() {
            let c = ((u[0] - w[0]).powi(2) + (u[1] - w[1]).powi(2)).sqrt();
            if c <= 0.4 {
                assert!(out.contains(&i));
            }
        }
    }
}
