//! Multidimensional FFT on row-major cubes, built from rustfft line transforms.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::grid::PeriodicGrid;

type Plan = Arc<dyn Fft<f64>>;

fn plans(size: usize) -> (Plan, Plan) {
    static CACHE: OnceLock<Mutex<HashMap<usize, (Plan, Plan)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(size)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(size), planner.plan_fft_inverse(size))
        })
        .clone()
}

const BLOCK: usize = 16;

/// Unnormalized in-place transform over every axis of the grid.
pub fn fft_nd(grid: &PeriodicGrid, data: &mut [Complex64], inverse: bool) {
    let size = grid.size();
    let n = grid.dim();
    assert_eq!(data.len(), grid.len());
    let (fwd, inv) = plans(size);
    let plan = if inverse { inv } else { fwd };
    let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];

    // contiguous last axis
    plan.process_with_scratch(data, &mut scratch);

    let mut buf = vec![Complex64::default(); BLOCK * size];
    for axis in 0..n - 1 {
        let stride = size.pow((n - 1 - axis) as u32);
        let outer = size.pow(axis as u32);
        for o in 0..outer {
            let base = o * size * stride;
            let mut j0 = 0;
            while j0 < stride {
                let b = BLOCK.min(stride - j0);
                for i in 0..size {
                    let row = &data[base + i * stride + j0..base + i * stride + j0 + b];
                    for (jj, v) in row.iter().enumerate() {
                        buf[jj * size + i] = *v;
                    }
                }
                plan.process_with_scratch(&mut buf[..b * size], &mut scratch);
                for i in 0..size {
                    let row = &mut data[base + i * stride + j0..base + i * stride + j0 + b];
                    for (jj, v) in row.iter_mut().enumerate() {
                        *v = buf[jj * size + i];
                    }
                }
                j0 += b;
            }
        }
    }
}
