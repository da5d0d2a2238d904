//! First-choice graphs, alternating trees and augmenting paths.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::market::{ExtendedUtility, MarketInstance, DUMMY};
use crate::scalar::Scalar;

/// Largest item set [`is_strictly_overdemanded`] will enumerate.
pub const OVERDEMAND_CAPACITY: usize = 20;

/// `F_p` and `F~_p` at a fixed price vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceGraphs<S> {
    first_choice: Vec<Vec<usize>>,
    feasible: Vec<Vec<usize>>,
    best_utility: Vec<S>,
}

impl<S: Scalar> ChoiceGraphs<S> {
    /// Items maximizing bidder `i`'s utility, ascending.
    pub fn first_choice(&self, bidder: usize) -> &[usize] {
        &self.first_choice[bidder]
    }

    /// First-choice items whose price has reached the bidder's reserve.
    pub fn feasible(&self, bidder: usize) -> &[usize] {
        &self.feasible[bidder]
    }

    /// `max_j u_ij(p_j)`. Always finite and nonnegative: the dummy offers 0.
    pub fn best_utility(&self, bidder: usize) -> &S {
        &self.best_utility[bidder]
    }

    pub fn best_utilities(&self) -> &[S] {
        &self.best_utility
    }

    pub fn num_bidders(&self) -> usize {
        self.first_choice.len()
    }

    pub fn is_first_choice(&self, bidder: usize, item: usize) -> bool {
        self.first_choice[bidder].binary_search(&item).is_ok()
    }

    pub fn is_feasible(&self, bidder: usize, item: usize) -> bool {
        self.feasible[bidder].binary_search(&item).is_ok()
    }

    /// `F_p(T)`: union of first-choice items over `bidders`, ascending.
    pub fn first_choice_of_set(&self, bidders: &[usize]) -> Vec<usize> {
        let set: BTreeSet<usize> = bidders
            .iter()
            .flat_map(|&i| self.first_choice[i].iter().copied())
            .collect();
        set.into_iter().collect()
    }
}

pub fn build_choice_graphs<S: Scalar>(inst: &MarketInstance<S>, prices: &[S]) -> Result<ChoiceGraphs<S>> {
    inst.check_prices(prices)?;
    let n = inst.num_bidders();
    let mut first_choice = Vec::with_capacity(n);
    let mut feasible = Vec::with_capacity(n);
    let mut best_utility = Vec::with_capacity(n);
    for i in 0..n {
        let utilities: Vec<ExtendedUtility<S>> = inst.items().map(|j| inst.pair_utility(i, j, &prices[j])).collect();
        let best = utilities
            .iter()
            .max()
            .and_then(ExtendedUtility::finite)
            .cloned()
            .ok_or_else(|| Error::internal("dummy item missing from utility scan"))?;
        let fp: Vec<usize> = inst.items().filter(|&j| utilities[j].finite() == Some(&best)).collect();
        let ffp = fp
            .iter()
            .copied()
            .filter(|&j| prices[j] >= *inst.reserve(i, j))
            .collect();
        first_choice.push(fp);
        feasible.push(ffp);
        best_utility.push(best);
    }
    Ok(ChoiceGraphs {
        first_choice,
        feasible,
        best_utility,
    })
}

/// A matching between bidders and items. A bidder is either unassigned
/// (`None`), on the dummy (`Some(0)`), or holds one real item.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    bidder_item: Vec<Option<usize>>,
    item_bidder: Vec<Option<usize>>,
}

impl Matching {
    pub fn empty(bidders: usize, items: usize) -> Self {
        Matching {
            bidder_item: vec![None; bidders],
            item_bidder: vec![None; items + 1],
        }
    }

    /// From a total assignment (`0` = dummy).
    pub fn from_assignment(assignment: &[usize], items: usize) -> Result<Self> {
        let mut m = Matching::empty(assignment.len(), items);
        for (i, &j) in assignment.iter().enumerate() {
            if j > items {
                return Err(Error::IndexOutOfRange {
                    what: "item",
                    index: j,
                    limit: items + 1,
                });
            }
            if j != DUMMY && m.item_bidder[j].is_some() {
                return Err(Error::usage(format!("item {j} assigned twice")));
            }
            m.assign(i, j);
        }
        Ok(m)
    }

    pub fn num_bidders(&self) -> usize {
        self.bidder_item.len()
    }

    pub fn item_of(&self, bidder: usize) -> Option<usize> {
        self.bidder_item[bidder]
    }

    /// The bidder holding a real item. The dummy never has an owner.
    pub fn owner_of(&self, item: usize) -> Option<usize> {
        if item == DUMMY {
            None
        } else {
            self.item_bidder[item]
        }
    }

    /// Bidders with any assignment, dummy included.
    pub fn assigned_count(&self) -> usize {
        self.bidder_item.iter().filter(|x| x.is_some()).count()
    }

    pub fn first_unassigned(&self) -> Option<usize> {
        self.bidder_item.iter().position(Option::is_none)
    }

    pub(crate) fn assign(&mut self, bidder: usize, item: usize) {
        self.unassign(bidder);
        if item != DUMMY {
            if let Some(prev) = self.item_bidder[item] {
                self.bidder_item[prev] = None;
            }
            self.item_bidder[item] = Some(bidder);
        }
        self.bidder_item[bidder] = Some(item);
    }

    pub(crate) fn unassign(&mut self, bidder: usize) -> Option<usize> {
        let old = self.bidder_item[bidder].take();
        if let Some(j) = old {
            if j != DUMMY {
                self.item_bidder[j] = None;
            }
        }
        old
    }

    /// The assignment vector, or `None` while a bidder is unassigned.
    pub fn to_assignment(&self) -> Option<Vec<usize>> {
        self.bidder_item.iter().copied().collect()
    }

    /// Flips the path in place. The matching is untouched on error.
    pub fn augment_along(&mut self, path: &AlternatingPath) -> Result<()> {
        self.validate_path(path)?;
        for &(bidder, item) in &path.hops {
            self.assign(bidder, item);
        }
        Ok(())
    }

    fn validate_path(&self, path: &AlternatingPath) -> Result<()> {
        let hops = &path.hops;
        let Some(&(root, _)) = hops.first() else {
            return Err(Error::usage("empty alternating path"));
        };
        let n = self.bidder_item.len();
        let k = self.item_bidder.len() - 1;
        for &(i, j) in hops {
            if i >= n || j > k {
                return Err(Error::usage(format!("path edge ({i}, {j}) out of range")));
            }
        }
        if !matches!(self.bidder_item[root], None | Some(DUMMY)) {
            return Err(Error::usage("path must start at an unmatched bidder"));
        }
        let mut seen_items = BTreeSet::new();
        let mut seen_bidders = BTreeSet::new();
        for (t, &(i, j)) in hops.iter().enumerate() {
            if !seen_bidders.insert(i) || !seen_items.insert(j) {
                return Err(Error::usage("path revisits a vertex"));
            }
            if let Some(&(next, _)) = hops.get(t + 1) {
                if j == DUMMY || self.item_bidder[j] != Some(next) {
                    return Err(Error::usage(format!(
                        "path item {j} is not matched to the next bidder {next}"
                    )));
                }
            } else if j != DUMMY && self.item_bidder[j].is_some() {
                return Err(Error::usage("path must end at the dummy or an unmatched item"));
            }
        }
        Ok(())
    }
}

/// Returns `matching` augmented along `path`.
pub fn augment(matching: &Matching, path: &AlternatingPath) -> Result<Matching> {
    let mut out = matching.clone();
    out.augment_along(path)?;
    Ok(out)
}

/// An alternating path, stored as its unmatched edges `(bidder, item)`.
///
/// Consecutive hops are joined by matched edges: the item of hop `t` is
/// matched to the bidder of hop `t + 1`. The last item is the dummy or an
/// unmatched item.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlternatingPath {
    pub hops: Vec<(usize, usize)>,
}

impl AlternatingPath {
    pub fn root(&self) -> usize {
        self.hops[0].0
    }

    pub fn end_item(&self) -> usize {
        self.hops[self.hops.len() - 1].1
    }
}

/// An alternating tree in `F~_p` rooted at an unmatched bidder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternatingTree {
    pub root: usize,
    /// Bidders in discovery order, root first.
    pub bidders: Vec<usize>,
    /// Items in discovery order. All matched when there is no augmenting path.
    pub items: Vec<usize>,
    /// `(item, bidder that reached it)` for every item in `items`.
    pub item_parent: Vec<(usize, usize)>,
    pub augmenting_path: Option<AlternatingPath>,
}

impl AlternatingTree {
    pub fn sorted_bidders(&self) -> Vec<usize> {
        let mut v = self.bidders.clone();
        v.sort_unstable();
        v
    }

    pub fn sorted_items(&self) -> Vec<usize> {
        let mut v = self.items.clone();
        v.sort_unstable();
        v
    }
}

/// Breadth-first growth from `root`. Bidders are expanded in discovery order
/// and each bidder's feasible items in ascending order; the first dummy or
/// unmatched item reached ends the search and yields the augmenting path.
///
/// `feasible_items(b)` must return `F~_p(b)` in ascending order.
pub(crate) fn grow_tree(
    root: usize,
    matching: &Matching,
    mut feasible_items: impl FnMut(usize) -> Vec<usize>,
) -> AlternatingTree {
    let mut bidders = vec![root];
    let mut items: Vec<usize> = Vec::new();
    let mut item_parent: Vec<(usize, usize)> = Vec::new();
    let mut in_tree_item = BTreeSet::new();
    let mut bidder_via: Vec<(usize, Option<usize>)> = vec![(root, None)];
    let mut queue = VecDeque::from([root]);

    while let Some(b) = queue.pop_front() {
        for j in feasible_items(b) {
            if in_tree_item.contains(&j) {
                continue;
            }
            match matching.owner_of(j) {
                Some(owner) if owner != b => {
                    in_tree_item.insert(j);
                    items.push(j);
                    item_parent.push((j, b));
                    bidders.push(owner);
                    bidder_via.push((owner, Some(j)));
                    queue.push_back(owner);
                }
                Some(_) => {}
                None => {
                    // The dummy or an unmatched item: walk back to the root.
                    let mut hops = vec![(b, j)];
                    let mut cur = b;
                    while let Some(&(_, Some(via))) = bidder_via.iter().find(|(x, _)| *x == cur) {
                        let parent = item_parent
                            .iter()
                            .find(|(it, _)| *it == via)
                            .map(|&(_, p)| p)
                            .expect("tree item has a parent");
                        hops.push((parent, via));
                        cur = parent;
                    }
                    hops.reverse();
                    return AlternatingTree {
                        root,
                        bidders,
                        items,
                        item_parent,
                        augmenting_path: Some(AlternatingPath { hops }),
                    };
                }
            }
        }
    }
    AlternatingTree {
        root,
        bidders,
        items,
        item_parent,
        augmenting_path: None,
    }
}

/// The maximal alternating tree rooted at `root` in `F~_p`, or the shortest
/// augmenting path found while growing it.
pub fn maximal_alternating_tree<S: Scalar>(
    graphs: &ChoiceGraphs<S>,
    matching: &Matching,
    root: usize,
) -> Result<AlternatingTree> {
    if root >= graphs.num_bidders() {
        return Err(Error::IndexOutOfRange {
            what: "bidder",
            index: root,
            limit: graphs.num_bidders(),
        });
    }
    if !matches!(matching.item_of(root), None | Some(DUMMY)) {
        return Err(Error::usage("tree root must be unmatched"));
    }
    Ok(grow_tree(root, matching, |b| graphs.feasible(b).to_vec()))
}

/// Whether `items` is strictly overdemanded with respect to `bidders`:
/// (i) `F~_p(T) ⊆ S`, and (ii) every nonempty `R ⊆ S` has more than `|R|`
/// demanders in `T`. Exhaustive over subsets; meant for small test instances.
pub fn is_strictly_overdemanded<S: Scalar>(
    graphs: &ChoiceGraphs<S>,
    items: &[usize],
    bidders: &[usize],
) -> Result<bool> {
    if items.len() > OVERDEMAND_CAPACITY {
        return Err(Error::Capacity(format!(
            "{} items exceeds the subset-enumeration limit of {OVERDEMAND_CAPACITY}",
            items.len()
        )));
    }
    if items.contains(&DUMMY) {
        return Err(Error::usage("overdemanded sets exclude the dummy item"));
    }
    let s: BTreeSet<usize> = items.iter().copied().collect();
    let t: BTreeSet<usize> = bidders.iter().copied().collect();
    if t.iter().any(|&i| i >= graphs.num_bidders()) {
        return Err(Error::usage("bidder out of range"));
    }
    if t.iter().any(|&i| graphs.feasible(i).iter().any(|j| !s.contains(j))) {
        return Ok(false);
    }
    let s: Vec<usize> = s.into_iter().collect();
    // demand_mask[i]: which members of S bidder i feasibly demands
    let demand_masks: Vec<u32> = t
        .iter()
        .map(|&i| {
            s.iter()
                .enumerate()
                .filter(|(_, &j)| graphs.is_feasible(i, j))
                .fold(0u32, |acc, (pos, _)| acc | (1 << pos))
        })
        .collect();
    let full = if s.is_empty() { 0 } else { (1u64 << s.len()) - 1 };
    for subset in 1..=full {
        let subset = subset as u32;
        let demanders = demand_masks.iter().filter(|&&m| m & subset != 0).count();
        if demanders <= subset.count_ones() as usize {
            return Ok(false);
        }
    }
    Ok(true)
}
