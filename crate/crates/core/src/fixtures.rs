//! The two small markets that show relaxed stability can lack a bidder
//! optimum. Pairs that are not mentioned keep `v = 0, r = 0, m = inf`.

use crate::market::MarketInstance;
use crate::Rat;

fn int(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// Three bidders, two items. Bidder 2 (index 1) values both items at 4 with
/// reserve 2 on each; bidders 1 and 3 each want one item at value 1.
pub fn example_one() -> MarketInstance<Rat> {
    MarketInstance::builder(3, 2)
        .valuation(0, 1, int(1))
        .valuation(1, 1, int(4))
        .valuation(1, 2, int(4))
        .valuation(2, 2, int(1))
        .reserve(1, 1, int(2))
        .reserve(1, 2, int(2))
        .build()
        .expect("fixture is well formed")
}

/// Two bidders, one item, both valuing it at 10 with maximum price 5.
pub fn example_two() -> MarketInstance<Rat> {
    MarketInstance::builder(2, 1)
        .valuation(0, 1, int(10))
        .valuation(1, 1, int(10))
        .maximum(0, 1, int(5))
        .maximum(1, 1, int(5))
        .build()
        .expect("fixture is well formed")
}
