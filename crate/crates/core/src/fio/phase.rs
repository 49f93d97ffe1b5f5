//! Phase functions `Phi(z, eta)`, `z = (x, t)`, positively homogeneous of
//! degree one in `eta`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::grid::{dot, norm};

/// Space-time point stored as `[x_1, .., x_n, t]` padded to length 4.
pub type Zpt = [f64; 4];

pub fn zpt(x: &[f64; 3], t: f64, n: usize) -> Zpt {
    let mut z = [0.0; 4];
    z[..n].copy_from_slice(&x[..n]);
    z[n] = t;
    z
}

pub trait PhaseFunction: Send + Sync + Debug {
    fn dim(&self) -> usize;
    fn name(&self) -> String;
    fn eval(&self, z: &Zpt, eta: &[f64; 3]) -> f64;
    /// `d_z Phi`, entries `0..=n`.
    fn grad_z(&self, z: &Zpt, eta: &[f64; 3]) -> Zpt;
    fn grad_eta(&self, z: &Zpt, eta: &[f64; 3]) -> [f64; 3];

    /// `(n+1) x n` matrix with entries `d_{z_a} d_{eta_i} Phi`; column `i` is `d_{eta_i} d_z Phi`.
    fn mixed_hessian(&self, z: &Zpt, eta: &[f64; 3]) -> DMatrix<f64> {
        let n = self.dim();
        let h = 1e-4 * norm(eta);
        let mut m = DMatrix::zeros(n + 1, n);
        for i in 0..n {
            let col = richardson(h, |s| {
                let mut e = *eta;
                e[i] += s;
                let g = self.grad_z(z, &e);
                DVector::from_iterator(n + 1, g[..=n].iter().copied())
            });
            m.set_column(i, &col);
        }
        m
    }

    /// `d^2_{eta eta} (d_z Phi . g)` at `(z, eta)`.
    fn hessian_eta_along(&self, z: &Zpt, eta: &[f64; 3], g: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let h = 1e-4 * norm(eta);
        let mut out = DMatrix::zeros(n, n);
        for i in 0..n {
            let col = richardson(h, |s| {
                let mut e = *eta;
                e[i] += s;
                self.mixed_hessian(z, &e).transpose() * g
            });
            out.set_column(i, &col);
        }
        0.5 * (&out + out.transpose())
    }

    /// `h(eta)` when `Phi = x.eta + t h(eta)`.
    fn dispersion(&self, _eta: &[f64; 3]) -> Option<f64> {
        None
    }

    /// Whether the phase fails to be smooth at `eta = 0`.
    fn singular_at_origin(&self) -> bool {
        true
    }
}

/// Central difference with one Richardson step, `O(h^4)`.
fn richardson<F: Fn(f64) -> DVector<f64>>(h: f64, f: F) -> DVector<f64> {
    let d1 = (f(h) - f(-h)) / (2.0 * h);
    let h2 = 0.5 * h;
    let d2 = (f(h2) - f(-h2)) / (2.0 * h2);
    (4.0 * d2 - d1) / 3.0
}

/// Temporal frequency `h(eta)` of a phase `x.eta + t h(eta)`.
pub trait Dispersion: Send + Sync + Debug {
    fn name(&self) -> String;
    fn h(&self, eta: &[f64; 3]) -> f64;
    fn grad(&self, eta: &[f64; 3]) -> [f64; 3];
    fn hessian(&self, _eta: &[f64; 3], _n: usize) -> Option<DMatrix<f64>> {
        None
    }
}

/// `Phi(x, t, eta) = x.eta + t h(eta)`.
#[derive(Debug, Clone)]
pub struct ConePhase<D> {
    pub n: usize,
    pub law: D,
}

impl<D: Dispersion> PhaseFunction for ConePhase<D> {
    fn dim(&self) -> usize {
        self.n
    }
    fn name(&self) -> String {
        self.law.name()
    }
    fn eval(&self, z: &Zpt, eta: &[f64; 3]) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for a in 0..n {
            s += z[a] * eta[a];
        }
        s + z[n] * self.law.h(eta)
    }
    fn grad_z(&self, _z: &Zpt, eta: &[f64; 3]) -> Zpt {
        let mut g = [0.0; 4];
        g[..self.n].copy_from_slice(&eta[..self.n]);
        g[self.n] = self.law.h(eta);
        g
    }
    fn grad_eta(&self, z: &Zpt, eta: &[f64; 3]) -> [f64; 3] {
        let gh = self.law.grad(eta);
        let mut g = [0.0; 3];
        for a in 0..self.n {
            g[a] = z[a] + z[self.n] * gh[a];
        }
        g
    }
    fn mixed_hessian(&self, _z: &Zpt, eta: &[f64; 3]) -> DMatrix<f64> {
        let n = self.n;
        let gh = self.law.grad(eta);
        let mut m = DMatrix::zeros(n + 1, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
            m[(n, i)] = gh[i];
        }
        m
    }
    fn hessian_eta_along(&self, z: &Zpt, eta: &[f64; 3], g: &DVector<f64>) -> DMatrix<f64> {
        let n = self.n;
        match self.law.hessian(eta, n) {
            Some(h) => h * g[n],
            None => {
                // d_z Phi . g = g_x . eta + g_t h(eta); only h is curved
                let step = 1e-4 * norm(eta);
                let mut out = DMatrix::zeros(n, n);
                for i in 0..n {
                    let col = richardson(step, |s| {
                        let mut e = *eta;
                        e[i] += s;
                        let gh = self.law.grad(&e);
                        DVector::from_iterator(n, gh[..n].iter().map(|v| v * g[n]))
                    });
                    out.set_column(i, &col);
                }
                let _ = z;
                0.5 * (&out + out.transpose())
            }
        }
    }
    fn dispersion(&self, eta: &[f64; 3]) -> Option<f64> {
        Some(self.law.h(eta))
    }
    fn singular_at_origin(&self) -> bool {
        self.law.name() != "flat"
    }
}

/// `h = 0`: the phase `x.eta`.
#[derive(Debug, Clone, Copy)]
pub struct Flat;

impl Dispersion for Flat {
    fn name(&self) -> String {
        "flat".into()
    }
    fn h(&self, _eta: &[f64; 3]) -> f64 {
        0.0
    }
    fn grad(&self, _eta: &[f64; 3]) -> [f64; 3] {
        [0.0; 3]
    }
    fn hessian(&self, _eta: &[f64; 3], n: usize) -> Option<DMatrix<f64>> {
        Some(DMatrix::zeros(n, n))
    }
}

/// `h = |eta|`: the half-wave group.
#[derive(Debug, Clone, Copy)]
pub struct HalfWave;

impl Dispersion for HalfWave {
    fn name(&self) -> String {
        "half_wave".into()
    }
    fn h(&self, eta: &[f64; 3]) -> f64 {
        norm(eta)
    }
    fn grad(&self, eta: &[f64; 3]) -> [f64; 3] {
        let r = norm(eta);
        [eta[0] / r, eta[1] / r, eta[2] / r]
    }
    fn hessian(&self, eta: &[f64; 3], n: usize) -> Option<DMatrix<f64>> {
        let r = norm(eta);
        Some(DMatrix::from_fn(n, n, |i, j| ((i == j) as u8 as f64 - eta[i] * eta[j] / (r * r)) / r))
    }
}

/// `h = sqrt(eta^T A eta)` with `A` symmetric positive definite.
#[derive(Debug, Clone)]
pub struct AnisotropicCone {
    pub a: [[f64; 3]; 3],
}

impl AnisotropicCone {
    fn a_eta(&self, eta: &[f64; 3]) -> [f64; 3] {
        let a = &self.a;
        [dot(&a[0], eta), dot(&a[1], eta), dot(&a[2], eta)]
    }
}

impl Dispersion for AnisotropicCone {
    fn name(&self) -> String {
        "anisotropic_cone".into()
    }
    fn h(&self, eta: &[f64; 3]) -> f64 {
        dot(eta, &self.a_eta(eta)).sqrt()
    }
    fn grad(&self, eta: &[f64; 3]) -> [f64; 3] {
        let ae = self.a_eta(eta);
        let h = dot(eta, &ae).sqrt();
        [ae[0] / h, ae[1] / h, ae[2] / h]
    }
    fn hessian(&self, eta: &[f64; 3], n: usize) -> Option<DMatrix<f64>> {
        let ae = self.a_eta(eta);
        let h = dot(eta, &ae).sqrt();
        Some(DMatrix::from_fn(n, n, |i, j| (self.a[i][j] - ae[i] * ae[j] / (h * h)) / h))
    }
}

/// `h = |eta| + eps eta_1^3 / |eta|^2`.
#[derive(Debug, Clone, Copy)]
pub struct CubicPerturbedCone {
    pub eps: f64,
}

impl Dispersion for CubicPerturbedCone {
    fn name(&self) -> String {
        "cubic_perturbed_cone".into()
    }
    fn h(&self, eta: &[f64; 3]) -> f64 {
        let r = norm(eta);
        r + self.eps * eta[0].powi(3) / (r * r)
    }
    fn grad(&self, eta: &[f64; 3]) -> [f64; 3] {
        let r = norm(eta);
        let r2 = r * r;
        let c = self.eps * eta[0].powi(3) / (r2 * r2);
        let mut g = [eta[0] / r - 2.0 * c * eta[0], eta[1] / r - 2.0 * c * eta[1], eta[2] / r - 2.0 * c * eta[2]];
        g[0] += 3.0 * self.eps * eta[0] * eta[0] / r2;
        g
    }
}

/// `Phi = x.eta + t c(x) |eta|` with `c(x) = 1 + eps exp(-|x|^2)`: a
/// variable-coefficient phase that has no multiplier fast path.
#[derive(Debug, Clone, Copy)]
pub struct VariableSpeed {
    pub n: usize,
    pub eps: f64,
}

impl VariableSpeed {
    fn speed(&self, z: &Zpt) -> (f64, [f64; 3]) {
        let mut r2 = 0.0;
        for a in 0..self.n {
            r2 += z[a] * z[a];
        }
        let e = self.eps * (-r2).exp();
        let mut g = [0.0; 3];
        for a in 0..self.n {
            g[a] = -2.0 * z[a] * e;
        }
        (1.0 + e, g)
    }
}

impl PhaseFunction for VariableSpeed {
    fn dim(&self) -> usize {
        self.n
    }
    fn name(&self) -> String {
        "variable_speed".into()
    }
    fn eval(&self, z: &Zpt, eta: &[f64; 3]) -> f64 {
        let mut s = 0.0;
        for a in 0..self.n {
            s += z[a] * eta[a];
        }
        s + z[self.n] * self.speed(z).0 * norm(eta)
    }
    fn grad_z(&self, z: &Zpt, eta: &[f64; 3]) -> Zpt {
        let (c, gc) = self.speed(z);
        let r = norm(eta);
        let mut g = [0.0; 4];
        for a in 0..self.n {
            g[a] = eta[a] + z[self.n] * gc[a] * r;
        }
        g[self.n] = c * r;
        g
    }
    fn grad_eta(&self, z: &Zpt, eta: &[f64; 3]) -> [f64; 3] {
        let (c, _) = self.speed(z);
        let r = norm(eta);
        let mut g = [0.0; 3];
        for a in 0..self.n {
            g[a] = z[a] + z[self.n] * c * eta[a] / r;
        }
        g
    }
}

/// Phase selection by name, as used in configuration files.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum PhaseSpec {
    Flat,
    HalfWave,
    AnisotropicCone { a: Vec<Vec<f64>> },
    CubicPerturbedCone { eps: f64 },
    VariableSpeed { eps: f64 },
}

impl PhaseSpec {
    pub fn build(&self, n: usize) -> Result<Arc<dyn PhaseFunction>> {
        Ok(match self {
            PhaseSpec::Flat => Arc::new(ConePhase { n, law: Flat }),
            PhaseSpec::HalfWave => Arc::new(ConePhase { n, law: HalfWave }),
            PhaseSpec::AnisotropicCone { a } => {
                let mut m = [[0.0; 3]; 3];
                if a.len() != n || a.iter().any(|r| r.len() != n) {
                    return Err(Error::Config(format!("anisotropic cone needs an {n}x{n} matrix")));
                }
                for i in 0..n {
                    for j in 0..n {
                        m[i][j] = a[i][j];
                    }
                }
                let dm = DMatrix::from_fn(n, n, |i, j| m[i][j]);
                if (&dm - dm.transpose()).amax() > 1e-12 || dm.symmetric_eigenvalues().min() <= 0.0 {
                    return Err(Error::Config("anisotropic cone matrix must be symmetric positive definite".into()));
                }
                Arc::new(ConePhase { n, law: AnisotropicCone { a: m } })
            }
            PhaseSpec::CubicPerturbedCone { eps } => Arc::new(ConePhase { n, law: CubicPerturbedCone { eps: *eps } }),
            PhaseSpec::VariableSpeed { eps } => Arc::new(VariableSpeed { n, eps: *eps }),
        })
    }
}

/// Largest relative homogeneity defect `|Phi(z, l eta) - l Phi(z, eta)|`
/// over `l in {2, 1/2}` at the given samples.
pub fn homogeneity_defect(phase: &dyn PhaseFunction, samples: &[(Zpt, [f64; 3])]) -> f64 {
    let mut worst: f64 = 0.0;
    for (z, eta) in samples {
        let base = phase.eval(z, eta);
        for l in [2.0, 0.5] {
            let e = [l * eta[0], l * eta[1], l * eta[2]];
            let v = phase.eval(z, &e);
            let scale = (l * base).abs().max(norm(eta));
            worst = worst.max((v - l * base).abs() / scale);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(n: usize) -> Vec<(Zpt, [f64; 3])> {
        (0..50)
            .map(|i| {
                let a = 0.3 + 0.41 * i as f64;
                let x = [a.sin(), (2.0 * a).cos(), if n == 3 { 0.3 * a.cos() } else { 0.0 }];
                let eta = [1.0 + a.cos(), 2.0 * a.sin(), if n == 3 { 0.5 } else { 0.0 }];
                (zpt(&x, 0.1 * i as f64 - 2.0, n), eta)
            })
            .collect()
    }

    #[test]
    fn library_phases_are_homogeneous() {
        let specs = [
            PhaseSpec::Flat,
            PhaseSpec::HalfWave,
            PhaseSpec::AnisotropicCone { a: vec![vec![2.0, 0.3], vec![0.3, 1.0]] },
            PhaseSpec::CubicPerturbedCone { eps: 0.1 },
            PhaseSpec::VariableSpeed { eps: 0.2 },
        ];
        for s in &specs {
            let p = s.build(2).unwrap();
            assert!(homogeneity_defect(p.as_ref(), &samples(2)) < 1e-9, "{s:?}");
        }
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let specs = [
            PhaseSpec::HalfWave,
            PhaseSpec::AnisotropicCone { a: vec![vec![2.0, 0.3], vec![0.3, 1.0]] },
            PhaseSpec::CubicPerturbedCone { eps: 0.1 },
            PhaseSpec::VariableSpeed { eps: 0.2 },
        ];
        for s in &specs {
            let p = s.build(2).unwrap();
            for (z, eta) in samples(2) {
                let ge = p.grad_eta(&z, &eta);
                let gz = p.grad_z(&z, &eta);
                let h = 1e-6;
                for i in 0..2 {
                    let mut e1 = eta;
                    e1[i] += h;
                    let mut e0 = eta;
                    e0[i] -= h;
                    let fd = (p.eval(&z, &e1) - p.eval(&z, &e0)) / (2.0 * h);
                    assert!((fd - ge[i]).abs() < 1e-6, "{s:?} eta {i}");
                }
                for a in 0..3 {
                    let mut z1 = z;
                    z1[a] += h;
                    let mut z0 = z;
                    z0[a] -= h;
                    let fd = (p.eval(&z1, &eta) - p.eval(&z0, &eta)) / (2.0 * h);
                    assert!((fd - gz[a]).abs() < 1e-6, "{s:?} z {a}");
                }
            }
        }
    }

    #[test]
    fn rejects_bad_anisotropy() {
        assert!(PhaseSpec::AnisotropicCone { a: vec![vec![1.0, 2.0], vec![2.0, 1.0]] }.build(2).is_err());
        assert!(PhaseSpec::AnisotropicCone { a: vec![vec![1.0]] }.build(2).is_err());
    }
}
