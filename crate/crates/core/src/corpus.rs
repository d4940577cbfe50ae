//! Seeded corpora of band-limited periodic samples for the norm suites.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

/// `count` samples of length `len` with random Fourier coefficients on
/// `|n| ≤ band`, decaying like `(1 + |n|)^{-1}`.
pub fn band_limited(seed: u64, count: usize, len: usize, band: usize) -> Vec<Vec<Complex64>> {
    assert!(2 * band < len, "band {band} does not fit {len} samples");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inverse = FftPlanner::new().plan_fft_inverse(len);
    (0..count)
        .map(|_| {
            let mut c = vec![Complex64::new(0.0, 0.0); len];
            for n in -(band as i64)..=band as i64 {
                let amp = 1.0 / (1.0 + n.unsigned_abs() as f64);
                let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                c[n.rem_euclid(len as i64) as usize] = z * amp;
            }
            inverse.process(&mut c);
            c
        })
        .collect()
}

/// Uniform periodic samples `f(j / len)`.
pub fn periodic(len: usize, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
    (0..len).map(|j| f(j as f64 / len as f64)).collect()
}
