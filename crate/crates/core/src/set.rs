//! Small agent sets backed by a 64-bit mask.
//!
//! Every market in this crate indexes agents on each side as `0..n` with
//! `n <= 64`, so a set of agents on one side is a single machine word.

use std::cmp::Ordering;
use std::fmt;

/// Largest number of agents allowed on one side of a market.
pub const MAX_AGENTS: usize = 64;

/// A set of agent indices drawn from one side of a market.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct AgentSet(u64);

impl AgentSet {
    pub const EMPTY: AgentSet = AgentSet(0);

    #[inline]
    pub const fn from_bits(bits: u64) -> Self {
        AgentSet(bits)
    }

    #[inline]
    pub const fn bits(self) -> u64 {
        self.0
    }

    /// The set `{0, 1, ..., n - 1}`.
    #[inline]
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_AGENTS);
        if n >= 64 {
            AgentSet(u64::MAX)
        } else {
            AgentSet((1u64 << n) - 1)
        }
    }

    #[inline]
    pub fn singleton(i: usize) -> Self {
        debug_assert!(i < MAX_AGENTS);
        AgentSet(1u64 << i)
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        i < MAX_AGENTS && self.0 & (1u64 << i) != 0
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u64 << i;
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1u64 << i);
    }

    #[inline]
    #[must_use]
    pub fn with(self, i: usize) -> Self {
        AgentSet(self.0 | (1u64 << i))
    }

    #[inline]
    #[must_use]
    pub fn union(self, other: Self) -> Self {
        AgentSet(self.0 | other.0)
    }

    #[inline]
    #[must_use]
    pub fn intersection(self, other: Self) -> Self {
        AgentSet(self.0 & other.0)
    }

    #[inline]
    #[must_use]
    pub fn difference(self, other: Self) -> Self {
        AgentSet(self.0 & !other.0)
    }

    #[inline]
    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Lowest index in the set.
    #[inline]
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    /// Every subset of `self`, starting with `self` and ending with the empty set.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(self.0),
        }
    }

    /// Lexicographic comparison of the sorted index lists; the empty set
    /// sorts first.
    pub fn lex_cmp(self, other: Self) -> Ordering {
        let (mut a, mut b) = (self.iter(), other.iter());
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(x), Some(y)) if x != y => return x.cmp(&y),
                _ => {}
            }
        }
    }
}

impl FromIterator<usize> for AgentSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = AgentSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl IntoIterator for AgentSet {
    type Item = usize;
    type IntoIter = Iter;
    fn into_iter(self) -> Iter {
        self.iter()
    }
}

impl fmt::Debug for AgentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Ascending iterator over the members of an [`AgentSet`].
#[derive(Clone)]
pub struct Iter(u64);

impl Iterator for Iter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Iter {}

/// Submask enumeration in decreasing numeric order.
#[derive(Clone)]
pub struct Subsets {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = AgentSet;

    fn next(&mut self) -> Option<AgentSet> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            Some((cur - 1) & self.mask)
        };
        Some(AgentSet(cur))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_visits_each_submask_once() {
        let s: AgentSet = [0, 2, 5].into_iter().collect();
        let all: Vec<_> = s.subsets().collect();
        assert_eq!(all.len(), 8);
        assert_eq!(all.first(), Some(&s));
        assert_eq!(all.last(), Some(&AgentSet::EMPTY));
        assert!(all.iter().all(|t| t.is_subset(s)));
        let mut dedup = all.clone();
        dedup.sort_by_key(|t| t.bits());
        dedup.dedup();
        assert_eq!(dedup.len(), 8);
    }

    #[test]
    fn lex_order_matches_sorted_vectors() {
        let sets: Vec<AgentSet> = AgentSet::full(4).subsets().collect();
        for &a in &sets {
            for &b in &sets {
                let va: Vec<_> = a.iter().collect();
                let vb: Vec<_> = b.iter().collect();
                assert_eq!(a.lex_cmp(b), va.cmp(&vb));
            }
        }
    }

    #[test]
    fn full_handles_edge_widths() {
        assert_eq!(AgentSet::full(0), AgentSet::EMPTY);
        assert_eq!(AgentSet::full(64).len(), 64);
        assert_eq!(AgentSet::full(3).bits(), 0b111);
    }
}
