//! Uniform 2-D lookup table with 4x4 Lagrange (bicubic) interpolation.

#[derive(Debug, Clone)]
pub struct Table2 {
    x0: f64,
    dx: f64,
    nx: usize,
    y0: f64,
    dy: f64,
    ny: usize,
    values: Vec<f64>,
}

impl Table2 {
    /// Samples `f` at `nx x ny` points spanning `[x0, x1] x [y0, y1]`.
    pub fn build<F: Fn(f64, f64) -> f64>(x: (f64, f64, usize), y: (f64, f64, usize), f: F) -> Self {
        let (x0, x1, nx) = x;
        let (y0, y1, ny) = y;
        assert!(nx >= 4 && ny >= 4);
        let dx = (x1 - x0) / (nx - 1) as f64;
        let dy = (y1 - y0) / (ny - 1) as f64;
        let mut values = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            let xv = x0 + dx * i as f64;
            for j in 0..ny {
                values.push(f(xv, y0 + dy * j as f64));
            }
        }
        Self { x0, dx, nx, y0, dy, ny, values }
    }

    /// Builds row by row, letting the caller reuse per-row precomputation.
    pub fn build_rows<F: Fn(f64, &[f64], &mut [f64])>(x: (f64, f64, usize), y: (f64, f64, usize), f: F) -> Self {
        let (x0, x1, nx) = x;
        let (y0, y1, ny) = y;
        assert!(nx >= 4 && ny >= 4);
        let dx = (x1 - x0) / (nx - 1) as f64;
        let dy = (y1 - y0) / (ny - 1) as f64;
        let ys: Vec<f64> = (0..ny).map(|j| y0 + dy * j as f64).collect();
        let mut values = vec![0.0; nx * ny];
        for (i, row) in values.chunks_exact_mut(ny).enumerate() {
            f(x0 + dx * i as f64, &ys, row);
        }
        Self { x0, dx, nx, y0, dy, ny, values }
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.x0, self.x0 + self.dx * (self.nx - 1) as f64)
    }

    pub fn y_range(&self) -> (f64, f64) {
        (self.y0, self.y0 + self.dy * (self.ny - 1) as f64)
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let (ix, wx) = stencil((x - self.x0) / self.dx, self.nx);
        let (iy, wy) = stencil((y - self.y0) / self.dy, self.ny);
        let mut acc = 0.0;
        for a in 0..4 {
            let row = &self.values[(ix + a) * self.ny + iy..(ix + a) * self.ny + iy + 4];
            let r = row[0] * wy[0] + row[1] * wy[1] + row[2] * wy[2] + row[3] * wy[3];
            acc += wx[a] * r;
        }
        acc
    }
}

#[inline]
fn stencil(t: f64, n: usize) -> (usize, [f64; 4]) {
    let i = (t.floor() as i64 - 1).clamp(0, n as i64 - 4) as usize;
    let u = t - i as f64;
    // Lagrange weights for nodes 0,1,2,3 at position u
    let w0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    let w1 = u * (u - 2.0) * (u - 3.0) / 2.0;
    let w2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
    let w3 = u * (u - 1.0) * (u - 2.0) / 6.0;
    (i, [w0, w1, w2, w3])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics() {
        let f = |x: f64, y: f64| x * x * x - 2.0 * x * y * y + y - 1.0;
        let t = Table2::build((-1.0, 2.0, 13), (0.0, 1.0, 9), f);
        for &(x, y) in &[(0.3, 0.7), (-0.95, 0.01), (1.99, 0.5), (0.0, 1.0)] {
            assert!((t.eval(x, y) - f(x, y)).abs() < 1e-12);
        }
    }

    #[test]
    fn smooth_function_accuracy() {
        let f = |x: f64, y: f64| (x * 2.0).sin() * (-y * y).exp();
        let t = Table2::build((0.0, 3.0, 300), (0.0, 2.0, 200), f);
        for i in 0..100 {
            let x = 3.0 * i as f64 / 99.0 * 0.999;
            let y = 2.0 * ((i * 37) % 100) as f64 / 99.0 * 0.999;
            assert!((t.eval(x, y) - f(x, y)).abs() < 1e-7);
        }
    }
}
