//! Seeded random series for tests, verification and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fft::{C64, ONE, ZERO};
use crate::series::TruncatedSeries;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the closed unit disk.
pub fn unit_disk<R: Rng>(rng: &mut R) -> C64 {
    loop {
        let z = C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        if z.norm_sqr() <= 1.0 {
            return z;
        }
    }
}

/// Coefficients `1..order` uniform in the unit disk, with constant term `c0`.
pub fn disk_series<R: Rng>(rng: &mut R, order: usize, c0: C64) -> TruncatedSeries {
    let mut c: Vec<C64> = (0..order).map(|_| unit_disk(rng)).collect();
    if let Some(first) = c.first_mut() {
        *first = c0;
    }
    TruncatedSeries::new(c)
}

/// `1 + sum_i z_i x^i / (i + 1)^2` with `z_i` uniform in the unit disk. The
/// tail sums to less than 1 in absolute value on the closed disk, so the
/// series has no zero there and its inverse and powers stay bounded.
pub fn damped_series<R: Rng>(rng: &mut R, order: usize) -> TruncatedSeries {
    let c = (0..order)
        .map(|i| if i == 0 { ONE } else { unit_disk(rng) / ((i + 1) * (i + 1)) as f64 })
        .collect();
    TruncatedSeries::new(c)
}

/// Unit-disk coefficients with zero constant term, suitable for `exp`.
pub fn exp_input<R: Rng>(rng: &mut R, order: usize) -> TruncatedSeries {
    disk_series(rng, order, ZERO)
}
