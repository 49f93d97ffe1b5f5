use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::profile::BumpProfile;
use crate::spectral::grid::norm;
use crate::spectral::{FourierMultiplier, MultiplierMeta};

/// Maximal `2^{-k/2}`-separated direction set with its angular partition of unity.
#[derive(Debug, Clone)]
pub struct CapSystem {
    pub k: u32,
    pub n: usize,
    pub centers: Vec<[f64; 3]>,
    /// Required chordal separation `2^{-k/2}`.
    pub separation: f64,
    /// Chordal radius of each cap bump; `chi_nu` vanishes beyond it.
    pub bump_radius: f64,
    index: SphereIndex,
}

const SEP_TOL: f64 = 1e-12;

impl CapSystem {
    pub fn build(k: u32, n: usize) -> Result<Self> {
        let delta = (-0.5 * k as f64).exp2();
        match n {
            2 => {
                let m = circle_count(delta);
                let centers: Vec<[f64; 3]> = (0..m)
                    .map(|i| {
                        let a = 2.0 * PI * i as f64 / m as f64;
                        [a.cos(), a.sin(), 0.0]
                    })
                    .collect();
                // any direction lies within chord 2 sin(pi/(2m)) of a centre
                let cover = 2.0 * (PI / (2 * m) as f64).sin();
                let bump_radius = 1.4 * cover;
                Ok(Self { k, n, centers, separation: delta, bump_radius, index: SphereIndex::Circle { m } })
            }
            3 => {
                let centers = greedy_sphere(delta);
                let bump_radius = 1.9 * delta;
                let index = SphereIndex::hashed(&centers, bump_radius);
                Ok(Self { k, n, centers, separation: delta, bump_radius, index })
            }
            _ => Err(Error::InvalidArgument(format!("dimension {n}"))),
        }
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    #[inline]
    fn bump(&self, d: f64) -> f64 {
        BumpProfile::scaled(0.5 * self.bump_radius, self.bump_radius, d)
    }

    /// Nonzero `(index, chi_nu(xi))` pairs at `xi != 0`.
    pub fn weights_at(&self, xi: &[f64; 3], out: &mut Vec<(usize, f64)>) {
        out.clear();
        let r = norm(xi);
        if r == 0.0 {
            return;
        }
        let u = [xi[0] / r, xi[1] / r, xi[2] / r];
        let mut sum = 0.0;
        self.index.for_near(&self.centers, &u, self.bump_radius, |i, d| {
            let b = self.bump(d);
            if b > 0.0 {
                out.push((i, b));
                sum += b;
            }
        });
        for w in out.iter_mut() {
            w.1 /= sum;
        }
    }

    /// `chi_nu(xi)` for centre `i`.
    pub fn chi(&self, i: usize, xi: &[f64; 3]) -> f64 {
        let mut w = Vec::new();
        self.weights_at(xi, &mut w);
        w.iter().find(|(j, _)| *j == i).map_or(0.0, |x| x.1)
    }

    /// Widened companion, equal to 1 wherever `chi_nu` is nonzero.
    pub fn chi_widened(&self, i: usize, xi: &[f64; 3]) -> f64 {
        let r = norm(xi);
        if r == 0.0 {
            return 0.0;
        }
        let c = &self.centers[i];
        let d = ((xi[0] / r - c[0]).powi(2) + (xi[1] / r - c[1]).powi(2) + (xi[2] / r - c[2]).powi(2)).sqrt();
        BumpProfile::scaled(self.bump_radius, 2.0 * self.bump_radius, d)
    }

    pub fn chi_multiplier(self: &Arc<Self>, i: usize) -> FourierMultiplier {
        let caps = self.clone();
        FourierMultiplier::new(
            move |xi| Complex64::new(caps.chi(i, xi), 0.0),
            MultiplierMeta { radial: false, support: None, homogeneity: Some(0.0) },
        )
    }

    /// Smallest pairwise chord between centres.
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.centers.len() {
            self.index.for_near(&self.centers, &self.centers[i], 2.0 * self.separation, |j, d| {
                if j != i {
                    best = best.min(d);
                }
            });
        }
        best
    }

    /// Largest distance from `u` to its nearest centre, maximised over `samples`
    /// random directions; below the separation certifies maximality.
    pub fn sampled_covering_radius(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let u = random_unit(self.n, &mut rng);
            worst = worst.max(self.nearest_distance(&u));
        }
        worst
    }

    pub fn nearest_distance(&self, u: &[f64; 3]) -> f64 {
        let mut best = f64::INFINITY;
        self.index.for_near(&self.centers, u, 2.0 * self.separation, |_, d| best = best.min(d));
        if best.is_infinite() {
            best = self.centers.iter().map(|c| chord(c, u)).fold(f64::INFINITY, f64::min);
        }
        best
    }
}

/// `max{N : 2 sin(pi/N) >= delta}`.
pub fn circle_count(delta: f64) -> usize {
    let mut m = 2usize;
    while 2.0 * (PI / (m + 1) as f64).sin() >= delta * (1.0 - SEP_TOL) {
        m += 1;
    }
    m
}

#[inline]
fn chord(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

pub(crate) fn random_unit<R: Rng>(n: usize, rng: &mut R) -> [f64; 3] {
    loop {
        let mut v = [0.0; 3];
        for x in v.iter_mut().take(n) {
            *x = rng.gen_range(-1.0..1.0);
        }
        let r = norm(&v);
        if r > 1e-3 && r <= 1.0 {
            return [v[0] / r, v[1] / r, v[2] / r];
        }
    }
}

#[derive(Debug, Clone)]
enum SphereIndex {
    Circle { m: usize },
    Hashed { cell: f64, buckets: HashMap<(i32, i32, i32), Vec<usize>> },
}

impl SphereIndex {
    fn hashed(centers: &[[f64; 3]], cell: f64) -> Self {
        let mut buckets: HashMap<(i32, i32, i32), Vec<usize>> = HashMap::new();
        for (i, c) in centers.iter().enumerate() {
            buckets.entry(key(c, cell)).or_default().push(i);
        }
        SphereIndex::Hashed { cell, buckets }
    }

    /// Calls `f(i, chord)` for every centre within `radius` of `u`
    /// (`radius` must not exceed the cell size for hashed indices).
    fn for_near<F: FnMut(usize, f64)>(&self, centers: &[[f64; 3]], u: &[f64; 3], radius: f64, mut f: F) {
        match self {
            SphereIndex::Circle { m } => {
                let m = *m;
                let step = 2.0 * PI / m as f64;
                let ang = 2.0 * (0.5 * radius.min(2.0)).asin();
                let span = (ang / step).ceil() as i64 + 1;
                let c = (u[1].atan2(u[0]) / step).round() as i64;
                let (lo, hi) = if 2 * span + 1 >= m as i64 { (0, m as i64 - 1) } else { (c - span, c + span) };
                for j in lo..=hi {
                    let i = j.rem_euclid(m as i64) as usize;
                    let d = chord(&centers[i], u);
                    if d <= radius {
                        f(i, d);
                    }
                }
            }
            SphereIndex::Hashed { cell, buckets } => {
                let reach = (radius / cell).ceil() as i32;
                let k0 = key(u, *cell);
                for a in -reach..=reach {
                    for b in -reach..=reach {
                        for c in -reach..=reach {
                            if let Some(v) = buckets.get(&(k0.0 + a, k0.1 + b, k0.2 + c)) {
                                for &i in v {
                                    let d = chord(&centers[i], u);
                                    if d <= radius {
                                        f(i, d);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

fn key(v: &[f64; 3], cell: f64) -> (i32, i32, i32) {
    ((v[0] / cell).floor() as i32, (v[1] / cell).floor() as i32, (v[2] / cell).floor() as i32)
}

/// Greedy separated set on a subdivided icosahedron, topped up by random
/// candidates until a batch of `1e5` finds no admissible point.
fn greedy_sphere(delta: f64) -> Vec<[f64; 3]> {
    let level = ((4.4 / delta).log2().ceil().max(0.0)) as u32;
    let mesh = icosphere(level);
    let mut centers: Vec<[f64; 3]> = Vec::new();
    let mut grid: HashMap<(i32, i32, i32), Vec<usize>> = HashMap::new();
    let thresh = delta * (1.0 - SEP_TOL);
    let mut try_add = |p: [f64; 3], centers: &mut Vec<[f64; 3]>| -> bool {
        let k0 = key(&p, delta);
        for a in -1..=1 {
            for b in -1..=1 {
                for c in -1..=1 {
                    if let Some(v) = grid.get(&(k0.0 + a, k0.1 + b, k0.2 + c)) {
                        if v.iter().any(|&i| chord(&centers[i], &p) < thresh) {
                            return false;
                        }
                    }
                }
            }
        }
        grid.entry(k0).or_default().push(centers.len());
        centers.push(p);
        true
    };
    for p in mesh {
        try_add(p, &mut centers);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_ca95);
    loop {
        let mut added = false;
        for _ in 0..100_000 {
            let u = random_unit(3, &mut rng);
            added |= try_add(u, &mut centers);
        }
        if !added {
            break;
        }
    }
    centers
}

fn icosphere(level: u32) -> Vec<[f64; 3]> {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|v| {
        let r = norm(v);
        [v[0] / r, v[1] / r, v[2] / r]
    })
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut mid = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| -> usize {
            let key = (a.min(b), a.max(b));
            *mids.entry(key).or_insert_with(|| {
                let (p, q) = (verts[a], verts[b]);
                let m = [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
                let r = norm(&m);
                verts.push([m[0] / r, m[1] / r, m[2] / r]);
                verts.len() - 1
            })
        };
        for f in &faces {
            let a = mid(f[0], f[1], &mut verts);
            let b = mid(f[1], f[2], &mut verts);
            let c = mid(f[2], f[0], &mut verts);
            next.push([f[0], a, c]);
            next.push([f[1], b, a]);
            next.push([f[2], c, b]);
            next.push([a, b, c]);
        }
        faces = next;
    }
    verts
}
