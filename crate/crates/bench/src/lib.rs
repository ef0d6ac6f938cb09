//! Seeded inputs shared by the benchmarks.

use metrize::gen;
use metrize::invlim::InverseSequenceTruncation;
use metrize::{FiniteMetricSpace, FundamentalSequence, Scalar, Surjection};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random metric on `n` points together with a surjection onto `n / 2` classes.
pub fn quotient_input(n: usize) -> (FiniteMetricSpace, Surjection) {
    let mut r = rng(n as u64);
    let m = gen::metric(&mut r, n, 8);
    let f = gen::surjection(&mut r, n, (n / 2).max(1));
    (m, f)
}

pub fn sequence(ground: usize, depth: usize) -> FundamentalSequence {
    gen::fundamental_sequence(&mut rng(ground as u64), ground, depth)
}

/// A random metric of diameter at most 1.
pub fn unit_space(n: usize) -> FiniteMetricSpace {
    let m = gen::metric(&mut rng(n as u64), n, 8);
    let diam = m.diameter();
    if diam > Scalar::one() {
        m.scaled(&(Scalar::one() / diam))
    } else {
        m
    }
}

pub fn truncation(depth: usize, width: usize) -> InverseSequenceTruncation {
    gen::truncation(&mut rng(depth as u64), depth, width, true)
}
