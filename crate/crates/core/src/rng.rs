//! Deterministic, splittable random streams.
//!
//! Every stream is a ChaCha8 generator keyed by SHA-256 of the run seed and a
//! stable label such as `"restart:3:17"`. Streams never depend on the order in
//! which parallel workers run.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64, label: &str) -> Stream {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    let digest = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

/// Uniformly distributed point on the sphere of the given radius in `ℂⁿ`.
pub fn sphere_point(rng: &mut Stream, n: usize, radius: f64) -> Vec<Complex64> {
    loop {
        let z: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = crate::real::norm(&z);
        if norm > 1e-8 {
            return z.into_iter().map(|c| c * (radius / norm)).collect();
        }
    }
}

/// Point with coordinates uniform in the square `[-1, 1]²` of each factor.
pub fn box_point(rng: &mut Stream, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// Unimodular complex number with uniform argument.
pub fn unit_complex(rng: &mut Stream) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}
