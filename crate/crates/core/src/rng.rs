//! Seeded random streams for reproducible Monte Carlo.
//!
//! Each worker owns one [`RandomStream`]. Streams are derived from a base
//! seed and a stream index through ChaCha's stream selector, so splitting
//! work into batches never changes the numbers a given batch sees.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct RandomStream(ChaCha8Rng);

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Independent stream `index` of the generator seeded with `seed`.
    pub fn for_worker(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self(rng)
    }

    /// Uniform draw in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        p > 0.0 && self.uniform() < p
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<u64> = (0..8).map({ let mut r = RandomStream::for_worker(7, 3); move |_| r.next_u64() }).collect();
        let b: Vec<u64> = (0..8).map({ let mut r = RandomStream::for_worker(7, 3); move |_| r.next_u64() }).collect();
        let c: Vec<u64> = (0..8).map({ let mut r = RandomStream::for_worker(7, 4); move |_| r.next_u64() }).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn bernoulli_edges() {
        let mut r = RandomStream::new(1);
        assert!((0..1000).all(|_| !r.bernoulli(0.0)));
        assert!((0..1000).all(|_| r.bernoulli(1.0)));
    }
}
