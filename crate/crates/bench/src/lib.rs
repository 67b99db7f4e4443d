//! Shared fixtures for the criterion benchmarks.

use scsk::bitstream::{SngConfig, StreamFactory, TlbStream};
use scsk::harness::gen_problem;
use scsk::LinearProblem;

pub const DEFAULT_LEN: usize = (1 << 16) - 2;

/// `count` canonical two-line streams with values spread over `[-0.9, 0.9]`.
pub fn tlb_vector(count: usize, len: usize, seed: u64) -> Vec<TlbStream> {
    let mut f = StreamFactory::new(&SngConfig::default(), seed).expect("default SNG");
    (0..count)
        .map(|j| {
            let x = -0.9 + 1.8 * j as f64 / count.max(2).saturating_sub(1) as f64;
            f.tlb(x, len).expect("value in range")
        })
        .collect()
}

pub fn compressive_problem(z: usize, seed: u64) -> LinearProblem {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    gen_problem(16, 10, z, Some(30.0), &mut rng).expect("valid dimensions")
}
