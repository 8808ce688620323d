use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Counter-based coins: the draw for coordinate `j` depends only on
/// `(seed, stream, j)`, never on how many other coins were flipped.
#[derive(Clone, Debug)]
pub struct Coins {
    rng: ChaCha8Rng,
}

impl Coins {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Coins { rng }
    }

    /// Uniform draw in [0, 1) for coordinate `j`.
    pub fn uniform(&mut self, j: usize) -> f64 {
        self.rng.set_word_pos(2 * j as u128);
        self.rng.gen::<f64>()
    }

    pub fn flip(&mut self, j: usize, p: f64) -> bool {
        p > 0.0 && self.uniform(j) < p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_independent() {
        let mut a = Coins::new(7, 0);
        let mut b = Coins::new(7, 0);
        let fwd: Vec<f64> = (0..10).map(|j| a.uniform(j)).collect();
        let bwd: Vec<f64> = (0..10).rev().map(|j| b.uniform(j)).collect();
        assert!(fwd.iter().eq(bwd.iter().rev()));
        assert_ne!(Coins::new(7, 1).uniform(0), fwd[0]);
    }
}
