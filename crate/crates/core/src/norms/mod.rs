//! `H^{s,p}_FIO` norms on grids: the continuous wave-packet characterization,
//! the discrete cap characterization, exponent formulas and atom checks.

pub mod atom;
pub mod discrete;
pub mod exponents;
pub mod hfio;

pub use atom::{atom_check, canonical_atom, AtomDescriptor, AtomReport};
pub use discrete::{annulus_check, discrete_annulus_norm};
pub use exponents::{exponents, exponents_f64, ExponentTable};
pub use hfio::{hfio_norm, hfio_norm_record, NormRecord};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::spectral::fft::fft_nd;
use crate::spectral::norms::sum_abs_pow;
use crate::spectral::PeriodicGrid;

/// Sparse multiplier restricted to a coefficient list: `(flat index, weight)`.
pub type Bucket = Vec<(u32, f64)>;

/// `int |g_b|^p dx` for each bucket `b`, where `g_b` has coefficients
/// `weight * coeffs[index]`.
pub(crate) fn bucket_lp_pow(grid: &PeriodicGrid, coeffs: &[Complex64], buckets: &[Bucket], p: f64) -> Vec<f64> {
    let scale = grid.volume().recip();
    let cell = grid.cell_volume();
    buckets
        .par_iter()
        .map_init(
            || vec![Complex64::default(); grid.len()],
            |buf, bucket| {
                if bucket.is_empty() {
                    return 0.0;
                }
                buf.iter_mut().for_each(|v| *v = Complex64::default());
                for &(i, w) in bucket {
                    let i = i as usize;
                    buf[i] = coeffs[i] * (w * grid.parity(i) * scale);
                }
                fft_nd(grid, buf, true);
                sum_abs_pow(buf, p) * cell
            },
        )
        .collect()
}
