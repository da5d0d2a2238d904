//! Seedable random markets with many ties.
//!
//! Valuations are uniform on `0..=max_value`. Each reserve is uniform on the
//! same range with probability 1/2 and 0 otherwise. Each maximum price is
//! `inf` with probability 0.6 and uniform on `1..=max_value` otherwise.

use rand::Rng;

use crate::market::{Ceiling, MarketInstance};
use crate::scalar::Scalar;

/// Probability that a drawn maximum price is `inf`.
pub const INFINITE_MAXIMUM_PROBABILITY: f64 = 0.6;

pub fn random_instance<S: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    bidders: usize,
    items: usize,
    max_value: i64,
) -> MarketInstance<S> {
    let max_value = max_value.max(1);
    let mut v = Vec::with_capacity(bidders);
    let mut r = Vec::with_capacity(bidders);
    let mut m = Vec::with_capacity(bidders);
    for _ in 0..bidders {
        let mut vr = Vec::with_capacity(items);
        let mut rr = Vec::with_capacity(items);
        let mut mr = Vec::with_capacity(items);
        for _ in 0..items {
            vr.push(S::from_i64(rng.random_range(0..=max_value)));
            rr.push(if rng.random_bool(0.5) {
                S::from_i64(rng.random_range(0..=max_value))
            } else {
                S::zero()
            });
            mr.push(if rng.random_bool(INFINITE_MAXIMUM_PROBABILITY) {
                Ceiling::Infinite
            } else {
                Ceiling::Finite(S::from_i64(rng.random_range(1..=max_value)))
            });
        }
        v.push(vr);
        r.push(rr);
        m.push(mr);
    }
    MarketInstance::new(items, v, r, m).expect("generated rows have the declared shape")
}

/// A market whose dimensions are drawn uniformly from `1..=max_bidders` and
/// `1..=max_items`.
pub fn random_sized_instance<S: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    max_bidders: usize,
    max_items: usize,
    max_value: i64,
) -> MarketInstance<S> {
    let n = rng.random_range(1..=max_bidders.max(1));
    let k = rng.random_range(1..=max_items.max(1));
    random_instance(rng, n, k, max_value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn seeded_generation_is_reproducible() {
        let a: MarketInstance<i64> = random_instance(&mut ChaCha8Rng::seed_from_u64(7), 4, 3, 9);
        let b: MarketInstance<i64> = random_instance(&mut ChaCha8Rng::seed_from_u64(7), 4, 3, 9);
        assert_eq!(a, b);
        assert!(a.is_integral());
        assert!(a.max_finite_entry() <= 9);
    }

    #[test]
    fn entries_stay_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let inst: MarketInstance<i64> = random_sized_instance(&mut rng, 5, 4, 6);
            for i in 0..inst.num_bidders() {
                for j in 1..=inst.num_items() {
                    assert!((0..=6).contains(inst.valuation(i, j)));
                    assert!((0..=6).contains(inst.reserve(i, j)));
                    if let Ceiling::Finite(m) = inst.maximum(i, j) {
                        assert!((1..=6).contains(m));
                    }
                }
            }
        }
    }
}
