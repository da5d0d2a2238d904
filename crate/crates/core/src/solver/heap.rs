use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::scalar::Scalar;

/// A min-heap whose keys are read relative to one shared additive offset.
///
/// An entry pushed with value `x` is stored as `x + offset`; its effective
/// value is always `stored - offset`. [`advance`](Self::advance) lowers the
/// effective value of every entry at once in O(1).
#[derive(Debug, Clone)]
pub struct OffsetHeap<S, P = (usize, usize)> {
    entries: BinaryHeap<Reverse<(S, P)>>,
    offset: S,
}

impl<S: Scalar, P: Ord> Default for OffsetHeap<S, P> {
    fn default() -> Self {
        OffsetHeap {
            entries: BinaryHeap::new(),
            offset: S::zero(),
        }
    }
}

impl<S: Scalar, P: Ord> OffsetHeap<S, P> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, value: S, payload: P) {
        self.entries.push(Reverse((value + self.offset.clone(), payload)));
    }

    /// The smallest effective value and its payload.
    pub fn peek(&self) -> Option<(S, &P)> {
        self.entries
            .peek()
            .map(|Reverse((key, p))| (key.clone() - self.offset.clone(), p))
    }

    pub fn pop(&mut self) -> Option<(S, P)> {
        self.entries
            .pop()
            .map(|Reverse((key, p))| (key - self.offset.clone(), p))
    }

    /// Subtracts `amount` from every effective value.
    pub fn advance(&mut self, amount: &S) {
        self.offset = self.offset.clone() + amount.clone();
    }

    pub fn offset(&self) -> &S {
        &self.offset
    }

    pub fn clear(&mut self) {
        self.entries.clear();
        self.offset = S::zero();
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
