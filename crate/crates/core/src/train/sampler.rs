//! Batch samplers: one-shot shuffled epochs over the weak set, uniform
//! draws with replacement from the full set.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Consumes a set in shuffled order, once, without replacement.
#[derive(Debug, Clone)]
pub struct EpochSampler {
    order: Vec<usize>,
    cursor: usize,
}

impl EpochSampler {
    /// Shuffle the index range once.
    pub fn new<R: Rng>(len: usize, rng: &mut R) -> Self {
        let mut order: Vec<usize> = (0..len).collect();
        order.shuffle(rng);
        Self { order, cursor: 0 }
    }

    /// Next batch of up to `batch` indices; None once the set is exhausted.
    pub fn next_batch(&mut self, batch: usize) -> Option<&[usize]> {
        if self.cursor >= self.order.len() {
            return None;
        }
        let end = (self.cursor + batch).min(self.order.len());
        let slice = &self.order[self.cursor..end];
        self.cursor = end;
        Some(slice)
    }

    pub fn remaining(&self) -> usize {
        self.order.len() - self.cursor
    }
}

/// Uniform i.i.d. draws with replacement.
pub fn sample_full_batch<R: Rng>(len: usize, batch: usize, rng: &mut R) -> Result<Vec<usize>> {
    if len == 0 {
        return Err(Error::Config("cannot sample from an empty full set".into()));
    }
    Ok((0..batch).map(|_| rng.random_range(0..len)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn batch_sizes_partition_the_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut sampler = EpochSampler::new(10, &mut rng);
        let sizes: Vec<usize> =
            std::iter::from_fn(|| sampler.next_batch(4).map(<[usize]>::len)).collect();
        assert_eq!(sizes, vec![4, 4, 2]);
        assert!(sampler.next_batch(4).is_none());
    }

    #[test]
    fn same_seed_same_order() {
        let a: Vec<usize> = EpochSampler::new(20, &mut ChaCha8Rng::seed_from_u64(7)).order;
        let b: Vec<usize> = EpochSampler::new(20, &mut ChaCha8Rng::seed_from_u64(7)).order;
        assert_eq!(a, b);
    }

    #[test]
    fn union_of_batches_is_the_set_exactly_once() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut sampler = EpochSampler::new(23, &mut rng);
        let mut seen = Vec::new();
        while let Some(batch) = sampler.next_batch(5) {
            seen.extend_from_slice(batch);
        }
        seen.sort_unstable();
        assert_eq!(seen, (0..23).collect::<Vec<_>>());
    }

    #[test]
    fn full_sampling_repeats_a_singleton() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let batch = sample_full_batch(1, 5, &mut rng).unwrap();
        assert_eq!(batch, vec![0; 5]);
    }

    #[test]
    fn full_sampling_is_seed_deterministic() {
        let a = sample_full_batch(50, 16, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let b = sample_full_batch(50, 16, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_full_set_is_a_config_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_full_batch(0, 4, &mut rng).is_err());
    }

    #[test]
    fn full_sampling_is_uniform_by_chi_square() {
        // frozen-seed chi-square oracle: 1e5 draws over 10 bins,
        // chi2 ~ chi2_9 so mean 9, sd sqrt(18); 3 sigma bound ~ 21.7
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let bins = 10usize;
        let draws = 100_000usize;
        let mut counts = vec![0usize; bins];
        for _ in 0..(draws / 1000) {
            for i in sample_full_batch(bins, 1000, &mut rng).unwrap() {
                counts[i] += 1;
            }
        }
        let expected = draws as f64 / bins as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&o| (o as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 21.7, "chi-square {chi2} too large: {counts:?}");
        // per-bin 3 sigma of Binomial(1e5, 1/10)
        let sigma = (draws as f64 * 0.1 * 0.9).sqrt();
        for &o in &counts {
            assert!((o as f64 - expected).abs() < 3.0 * sigma);
        }
    }
}
