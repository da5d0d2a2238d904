//! Bidder-optimal stable outcomes for two-sided markets in which every
//! bidder-item pair has its own reserve price and maximum price.
//!
//! The market core ([`market`]) is generic over an exact [`Scalar`]; the
//! aliases below fix it to arbitrary-precision rationals.
//!
//! ```
//! use stable_market::{fixtures, solve_simple, check_stable};
//!
//! let market = fixtures::example_one();
//! let outcome = solve_simple(&market).unwrap();
//! assert!(check_stable(&market, &outcome).unwrap().is_clean());
//! assert_eq!(outcome.assignment(), &[0, 1, 0]);
//! ```

pub mod choice;
pub mod error;
pub mod fixtures;
pub mod gen;
pub mod market;
pub mod oracle;
pub mod reduction;
pub mod scalar;
pub mod solver;
pub mod strategy;

pub use choice::{
    augment, build_choice_graphs, is_strictly_overdemanded, maximal_alternating_tree, AlternatingPath, AlternatingTree,
    ChoiceGraphs, Matching,
};
pub use error::{Error, Result};
pub use market::{
    check_feasible, check_relaxed_stable, check_stable, compare_profiles, dominates, relaxed_utilities, Ceiling,
    Dominance, ExtendedUtility, MarketBuilder, MarketInstance, Outcome, Report, Violation, DUMMY,
};
pub use scalar::{Field, Scalar};
pub use solver::{
    audit_trace, solve, solve_fast, solve_simple, solver_trace, Counters, DeltaBreakdown, DeltaKind, DropReason,
    Engine, Solution, TraceEvent,
};

/// Exact rational numbers with arbitrary precision.
pub type Rat = num_rational::BigRational;
pub type Market = MarketInstance<Rat>;
pub type MarketOutcome = Outcome<Rat>;
