use rand_core::{Rng, SeedableRng};
use rand_pcg::Pcg64;

/// Seeded random source for the simulators.
///
/// The bit stream is PCG-XSL-RR 128/64 (`Pcg64`) seeded through
/// `SeedableRng::seed_from_u64`. Every derived draw is defined here so that
/// the simulation can be reproduced from the bit stream alone:
///
/// * `unit`: the top 53 bits of one `u64`, times 2^-53, in `[0, 1)`.
/// * `range(lo, hi)`: draws `u64`s until one falls below the largest
///   multiple of `hi - lo + 1`, then returns `lo + x % (hi - lo + 1)`.
/// * `chance(p)`: `unit() < p`.
#[derive(Debug, Clone)]
pub struct SimRng(Pcg64);

impl SimRng {
    pub fn new(seed: u64) -> Self {
        SimRng(Pcg64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    /// Uniform integer in `lo..=hi`.
    pub fn range(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi, "empty range {lo}..={hi}");
        let span = hi - lo;
        if span == u64::MAX {
            return self.next_u64();
        }
        let n = span + 1;
        let zone = u64::MAX - (u64::MAX % n + 1) % n;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return lo + x % n;
            }
        }
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.range(0, len as u64 - 1) as usize
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.index(items.len())]
    }

    /// `k` distinct indices below `n`, in draw order (partial Fisher-Yates).
    pub fn distinct(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut pool: Vec<usize> = (0..n).collect();
        let k = k.min(n);
        for i in 0..k {
            let j = i + self.index(n - i);
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}
