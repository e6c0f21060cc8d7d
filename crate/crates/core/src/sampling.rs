//! Deterministic sampling: a shifted Halton sequence for quasi-random
//! coverage and a seeded ChaCha stream for randomized oracle inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const PRIMES: [u32; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Default seed used when callers do not pass one.
pub const DEFAULT_SEED: u64 = 0x1c3_0e2f;

/// Knobs shared by every sampling-based predicate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub seed: u64,
    pub nsamples: usize,
    /// Euclidean radius cap for samples drawn from unbounded regions.
    pub radius: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, nsamples: 10_000, radius: 1e3 }
    }
}

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    r
}

/// Halton points in `[0,1)^D` with a seeded Cranley–Patterson rotation.
#[derive(Clone, Debug)]
pub struct Halton<const D: usize> {
    index: u64,
    shift: [f64; D],
}

impl<const D: usize> Halton<D> {
    pub fn new(seed: u64) -> Self {
        assert!(D <= PRIMES.len(), "Halton dimension limited to {}", PRIMES.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut shift = [0.0; D];
        for s in shift.iter_mut() {
            *s = rng.gen::<f64>();
        }
        // index 0 is the all-zero point; start at 1
        Self { index: 1, shift }
    }

    /// Unshifted sequence, used where exact reproducibility across seeds matters.
    pub fn unshifted() -> Self {
        Self { index: 1, shift: [0.0; D] }
    }
}

impl<const D: usize> Iterator for Halton<D> {
    type Item = [f64; D];

    fn next(&mut self) -> Option<[f64; D]> {
        let mut out = [0.0; D];
        for (k, o) in out.iter_mut().enumerate() {
            let v = radical_inverse(self.index, PRIMES[k]) + self.shift[k];
            *o = v - v.floor();
        }
        self.index += 1;
        Some(out)
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` evenly spaced values covering `[a, b]` inclusively.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let h = (b - a) / (n - 1) as f64;
            (0..n).map(|i| if i + 1 == n { b } else { a + h * i as f64 }).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base_two() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(1, 3) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn halton_is_deterministic_and_in_unit_cube() {
        let a: Vec<[f64; 3]> = Halton::<3>::new(7).take(100).collect();
        let b: Vec<[f64; 3]> = Halton::<3>::new(7).take(100).collect();
        assert_eq!(a, b);
        assert!(a.iter().flatten().all(|v| (0.0..1.0).contains(v)));
        let c: Vec<[f64; 3]> = Halton::<3>::new(8).take(100).collect();
        assert_ne!(a, c);
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(-1.0, 1.0, 5);
        assert_eq!(v, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
    }
}
