//! Matchings, stability notions, and the partial orders on matchings.

mod order;
mod stability;

use std::cmp::Ordering;
use std::fmt;

pub use order::{blair_geq, blair_geq_firms, blair_geq_workers, unanimous_geq_workers};
pub use stability::{
    b_set, b_set_of_firm, b_set_of_worker, blocked_by_firm, blocked_by_worker, blocking_pairs,
    f_set_of_worker, is_firm_quasi_stable, is_individually_rational, is_quasi_stable,
    is_quasi_stable_general, is_stable, is_worker_quasi_stable, w_set_of_firm, willing_set,
    BlockReason, BlockingPair, QuasiOptions,
};

use crate::error::{Error, Result};
use crate::market::{Market, Side};
use crate::set::AgentSet;

/// A bipartite assignment, stored from both sides.
///
/// `w ∈ firms[f]` holds exactly when `f ∈ workers[w]`; every constructor
/// rebuilds one side from the other, so the two views never disagree.
/// Equality is per-agent set equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    firms: Vec<AgentSet>,
    workers: Vec<AgentSet>,
}

impl Matching {
    pub fn empty(n_firms: usize, n_workers: usize) -> Self {
        Matching {
            firms: vec![AgentSet::EMPTY; n_firms],
            workers: vec![AgentSet::EMPTY; n_workers],
        }
    }

    pub fn empty_for(market: &Market) -> Self {
        Self::empty(market.n_firms(), market.n_workers())
    }

    /// Build from one side's partner sets without checking variant limits.
    pub fn from_side(side: Side, sets: Vec<AgentSet>, n_other: usize) -> Self {
        let mut other = vec![AgentSet::EMPTY; n_other];
        for (a, s) in sets.iter().enumerate() {
            for b in s.iter() {
                other[b].insert(a);
            }
        }
        match side {
            Side::Firms => Matching {
                firms: sets,
                workers: other,
            },
            Side::Workers => Matching {
                firms: other,
                workers: sets,
            },
        }
    }

    /// Build from firm-side sets and check the market's variant constraints.
    pub fn from_firm_sets(market: &Market, sets: Vec<AgentSet>) -> Result<Self> {
        Self::for_market(market, Side::Firms, sets)
    }

    pub fn from_worker_sets(market: &Market, sets: Vec<AgentSet>) -> Result<Self> {
        Self::for_market(market, Side::Workers, sets)
    }

    /// Build from `side`'s sets and check the market's variant constraints.
    pub fn for_market(market: &Market, side: Side, sets: Vec<AgentSet>) -> Result<Self> {
        if sets.len() != market.size(side) {
            return Err(Error::Schema(format!(
                "matching lists {} {side}, market has {}",
                sets.len(),
                market.size(side)
            )));
        }
        let ground = AgentSet::full(market.size(side.other()));
        if let Some(a) = sets.iter().position(|s| !s.is_subset(ground)) {
            return Err(Error::Schema(format!(
                "{} is matched to an agent outside the market",
                market.name(side, a)
            )));
        }
        let m = Self::from_side(side, sets, market.size(side.other()));
        m.check_variant(market)?;
        Ok(m)
    }

    /// `|μ(w)| ≤ 1` in many-to-one, `|μ(w)| ≤ q_w` in the responsive variant.
    pub fn check_variant(&self, market: &Market) -> Result<()> {
        if self.firms.len() != market.n_firms() || self.workers.len() != market.n_workers() {
            return Err(Error::Schema("matching does not fit the market".into()));
        }
        for (w, s) in self.workers.iter().enumerate() {
            let cap = market.capacity(Side::Workers, w);
            if s.len() > cap {
                return Err(Error::VariantViolation {
                    variant: market.variant(),
                    detail: format!(
                        "worker {} holds {} firms, at most {cap} allowed",
                        market.name(Side::Workers, w),
                        s.len()
                    ),
                });
            }
        }
        Ok(())
    }

    pub fn n_firms(&self) -> usize {
        self.firms.len()
    }

    pub fn n_workers(&self) -> usize {
        self.workers.len()
    }

    /// `μ(a)` for agent `a` on `side`.
    #[inline]
    pub fn partners(&self, side: Side, agent: usize) -> AgentSet {
        match side {
            Side::Firms => self.firms[agent],
            Side::Workers => self.workers[agent],
        }
    }

    #[inline]
    pub fn firm(&self, f: usize) -> AgentSet {
        self.firms[f]
    }

    #[inline]
    pub fn worker(&self, w: usize) -> AgentSet {
        self.workers[w]
    }

    pub fn side(&self, side: Side) -> &[AgentSet] {
        match side {
            Side::Firms => &self.firms,
            Side::Workers => &self.workers,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.firms.iter().all(|s| s.is_empty())
    }

    /// Enumeration order: workers in index order, each compared by the
    /// lexicographic order of its firm set.
    pub fn enumeration_cmp(&self, other: &Self) -> Ordering {
        self.workers
            .iter()
            .zip(&other.workers)
            .map(|(a, b)| a.lex_cmp(*b))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }

    /// Two-row rendering: each firm over its workers, then unmatched workers
    /// under `∅`.
    pub fn display<'a>(&'a self, market: &'a Market) -> Display<'a> {
        Display {
            matching: self,
            market,
        }
    }
}

impl fmt::Debug for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.firms.iter().enumerate().filter(|(_, s)| !s.is_empty()))
            .finish()
    }
}

pub struct Display<'a> {
    matching: &'a Matching,
    market: &'a Market,
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.market;
        let mut top = Vec::new();
        let mut bottom = Vec::new();
        for (i, s) in self.matching.firms.iter().enumerate() {
            top.push(m.name(Side::Firms, i).to_string());
            bottom.push(if s.is_empty() {
                "∅".to_string()
            } else {
                m.format_set(Side::Workers, *s)
            });
        }
        let unmatched: crate::set::AgentSet = self
            .matching
            .workers
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_empty())
            .map(|(w, _)| w)
            .collect();
        if !unmatched.is_empty() {
            top.push("∅".to_string());
            bottom.push(m.format_set(Side::Workers, unmatched));
        }
        let widths: Vec<usize> = top
            .iter()
            .zip(&bottom)
            .map(|(a, b)| a.chars().count().max(b.chars().count()))
            .collect();
        let row = |cells: &[String]| -> String {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        writeln!(f, "{}", row(&top))?;
        write!(f, "{}", row(&bottom))
    }
}
