//! Counter-based normal deviates keyed by (seed, trajectory, step).
//!
//! Each trajectory owns a ChaCha8 stream and each step a fixed block of
//! words inside it, so the numbers drawn never depend on scheduling.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Clone, Debug)]
pub struct NoiseStream {
    rng: ChaCha8Rng,
    /// 32-bit words consumed per step.
    stride: u128,
    count: usize,
}

impl NoiseStream {
    /// A stream yielding `count` standard normals per step.
    pub fn new(seed: u64, trajectory: u64, count: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trajectory);
        let pairs = count.div_ceil(2) as u128;
        Self {
            rng,
            stride: pairs * 4,
            count,
        }
    }

    /// Fills `out` (length `count`) with the normals of `step`.
    pub fn normals(&mut self, step: u64, out: &mut [f64]) {
        assert_eq!(out.len(), self.count);
        self.rng.set_word_pos(step as u128 * self.stride);
        for chunk in out.chunks_mut(2) {
            // u1 ∈ (0, 1] keeps the logarithm finite.
            let u1 = ((self.rng.next_u64() >> 11) + 1) as f64 / (1u64 << 53) as f64;
            let u2 = (self.rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            let r = (-2.0 * u1.ln()).sqrt();
            let angle = std::f64::consts::TAU * u2;
            chunk[0] = r * angle.cos();
            if chunk.len() > 1 {
                chunk[1] = r * angle.sin();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steps_are_random_access() {
        let mut a = NoiseStream::new(7, 3, 5);
        let mut b = NoiseStream::new(7, 3, 5);
        let mut forward = [[0.0; 5]; 4];
        for (s, row) in forward.iter_mut().enumerate() {
            a.normals(s as u64, row);
        }
        for s in (0..4).rev() {
            let mut row = [0.0; 5];
            b.normals(s as u64, &mut row);
            assert_eq!(row, forward[s]);
        }
        let mut other = [0.0; 5];
        NoiseStream::new(7, 4, 5).normals(0, &mut other);
        assert_ne!(other, forward[0]);
    }

    #[test]
    fn moments() {
        let mut s = NoiseStream::new(1, 0, 4);
        let mut sum = 0.0;
        let mut sq = 0.0;
        let steps = 50_000;
        let mut row = [0.0; 4];
        for k in 0..steps {
            s.normals(k, &mut row);
            sum += row.iter().sum::<f64>();
            sq += row.iter().map(|z| z * z).sum::<f64>();
        }
        let n = (4 * steps) as f64;
        assert!((sum / n).abs() < 0.01);
        assert!((sq / n - 1.0).abs() < 0.01);
    }
}
