//! Fixed-size subset enumeration over bitmasks.

use rand::Rng;

/// Iterates every `k`-subset of `{0, .., n-1}` as a bitmask, in increasing
/// numeric order (Gosper's hack).
#[derive(Debug, Clone)]
pub struct FixedSizeSubsets {
    next: Option<u128>,
    limit: u128,
}

impl FixedSizeSubsets {
    pub fn new(n: usize, k: usize) -> Self {
        assert!(n <= 127, "at most 127 elements are supported");
        let limit = 1u128 << n;
        let next = if k > n {
            None
        } else if k == 0 {
            Some(0)
        } else {
            Some((1u128 << k) - 1)
        };
        Self { next, limit }
    }
}

impl Iterator for FixedSizeSubsets {
    type Item = u128;

    fn next(&mut self) -> Option<u128> {
        let current = self.next?;
        self.next = if current == 0 {
            None
        } else {
            let lowest = current & current.wrapping_neg();
            let ripple = current + lowest;
            let successor = (((ripple ^ current) >> 2) / lowest) | ripple;
            (successor < self.limit).then_some(successor)
        };
        Some(current)
    }
}

/// Uniformly random `k`-subset of `{0, .., n-1}`.
pub fn random_subset<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> u128 {
    rand::seq::index::sample(rng, n, k)
        .iter()
        .fold(0u128, |acc, i| acc | (1u128 << i))
}
