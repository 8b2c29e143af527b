use crate::error::{Error, Result};
use crate::market::{Market, Side, Variant};
use crate::matching::{is_quasi_stable, is_stable, Matching, QuasiOptions};
use crate::set::AgentSet;

/// Limits on brute-force enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationBudget {
    /// Most matchings (or search nodes) visited.
    pub max_matchings: u64,
    /// Side sizes accepted by [`enumerate_matchings`].
    pub max_firms: usize,
    pub max_workers: usize,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_matchings: 10_000_000,
            max_firms: 6,
            max_workers: 7,
        }
    }
}

impl EnumerationBudget {
    pub fn with_max_matchings(max_matchings: u64) -> Self {
        EnumerationBudget {
            max_matchings,
            ..Self::default()
        }
    }
}

/// Firm sets a worker may hold under the variant, in lexicographic order.
fn worker_options(market: &Market, w: usize) -> Vec<AgentSet> {
    let all = AgentSet::full(market.n_firms());
    let cap = market.capacity(Side::Workers, w);
    let mut v: Vec<AgentSet> = all.subsets().filter(|s| s.len() <= cap).collect();
    v.sort_by(|a, b| a.lex_cmp(*b));
    v
}

/// Number of variant-valid matchings, or `None` on overflow.
pub fn count_matchings(market: &Market) -> Option<u64> {
    (0..market.n_workers()).try_fold(1u64, |acc, w| {
        acc.checked_mul(worker_options(market, w).len() as u64)
    })
}

/// Every variant-valid matching exactly once.
///
/// Workers are the digits of an odometer in index order, the first worker
/// most significant; each runs through its possible firm sets in
/// lexicographic order. The output is therefore sorted by
/// [`Matching::enumeration_cmp`].
#[derive(Clone, Debug)]
pub struct Matchings {
    options: Vec<Vec<AgentSet>>,
    digits: Vec<usize>,
    n_firms: usize,
    done: bool,
}

impl Iterator for Matchings {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        if self.done {
            return None;
        }
        let sets = self
            .digits
            .iter()
            .zip(&self.options)
            .map(|(&d, opts)| opts[d])
            .collect();
        let out = Matching::from_side(Side::Workers, sets, self.n_firms);
        self.done = true;
        for i in (0..self.digits.len()).rev() {
            self.digits[i] += 1;
            if self.digits[i] < self.options[i].len() {
                self.done = false;
                break;
            }
            self.digits[i] = 0;
        }
        Some(out)
    }
}

pub fn enumerate_matchings(market: &Market, budget: EnumerationBudget) -> Result<Matchings> {
    if market.n_firms() > budget.max_firms || market.n_workers() > budget.max_workers {
        return Err(Error::BudgetExceeded(format!(
            "{}×{} market exceeds the {}×{} enumeration limit",
            market.n_firms(),
            market.n_workers(),
            budget.max_firms,
            budget.max_workers
        )));
    }
    match count_matchings(market) {
        Some(n) if n <= budget.max_matchings => {}
        _ => {
            return Err(Error::BudgetExceeded(format!(
                "more than {} matchings",
                budget.max_matchings
            )))
        }
    }
    let options: Vec<Vec<AgentSet>> = (0..market.n_workers())
        .map(|w| worker_options(market, w))
        .collect();
    Ok(Matchings {
        digits: vec![0; options.len()],
        options,
        n_firms: market.n_firms(),
        done: false,
    })
}

/// Every individually rational matching, sorted by
/// [`Matching::enumeration_cmp`].
///
/// Searches firm by firm over the sets each firm would keep, pruning as
/// soon as some worker's partial set is no longer contained in a set it
/// would keep. Agent limits do not apply; the node count is bounded by
/// `budget.max_matchings`.
pub fn enumerate_individually_rational(
    market: &Market,
    budget: EnumerationBudget,
) -> Result<Vec<Matching>> {
    let cap = crate::market::validate::DEFAULT_CAP;
    let firm_sets: Vec<Vec<AgentSet>> = (0..market.n_firms())
        .map(|f| market.choice(Side::Firms, f).self_chosen_sets(cap))
        .collect::<Result<_>>()?;
    let worker_kept: Vec<Vec<AgentSet>> = (0..market.n_workers())
        .map(|w| worker_kept_sets(market, w))
        .collect::<Result<_>>()?;

    let mut search = Search {
        market,
        firm_sets: &firm_sets,
        worker_kept: &worker_kept,
        chosen: vec![AgentSet::EMPTY; market.n_firms()],
        loads: vec![AgentSet::EMPTY; market.n_workers()],
        visited: 0,
        budget: budget.max_matchings,
        out: Vec::new(),
    };
    search.run(0)?;
    let mut out = search.out;
    out.sort_by(Matching::enumeration_cmp);
    Ok(out)
}

fn worker_kept_sets(market: &Market, w: usize) -> Result<Vec<AgentSet>> {
    let c = market.choice(Side::Workers, w);
    match market.variant() {
        // A many-to-one worker keeps at most one acceptable firm.
        Variant::ManyToOne => {
            let acc = c.acceptable();
            Ok(std::iter::once(AgentSet::EMPTY)
                .chain(acc.iter().map(AgentSet::singleton))
                .collect())
        }
        _ => c.self_chosen_sets(crate::market::validate::DEFAULT_CAP),
    }
}

struct Search<'a> {
    market: &'a Market,
    firm_sets: &'a [Vec<AgentSet>],
    worker_kept: &'a [Vec<AgentSet>],
    chosen: Vec<AgentSet>,
    loads: Vec<AgentSet>,
    visited: u64,
    budget: u64,
    out: Vec<Matching>,
}

impl Search<'_> {
    fn run(&mut self, f: usize) -> Result<()> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(Error::BudgetExceeded(format!(
                "search visited more than {} nodes",
                self.budget
            )));
        }
        if f == self.chosen.len() {
            let ok = self
                .loads
                .iter()
                .zip(self.worker_kept)
                .all(|(l, kept)| kept.contains(l));
            if ok {
                let mu = Matching::from_side(Side::Firms, self.chosen.clone(), self.loads.len());
                debug_assert!(mu.check_variant(self.market).is_ok());
                self.out.push(mu);
            }
            return Ok(());
        }
        for &a in &self.firm_sets[f] {
            let fits = a.iter().all(|w| {
                let next = self.loads[w].with(f);
                self.worker_kept[w].iter().any(|k| next.is_subset(*k))
            });
            if !fits {
                continue;
            }
            for w in a.iter() {
                self.loads[w].insert(f);
            }
            self.chosen[f] = a;
            self.run(f + 1)?;
            for w in a.iter() {
                self.loads[w].remove(f);
            }
        }
        self.chosen[f] = AgentSet::EMPTY;
        Ok(())
    }
}

/// The stable set, sorted by [`Matching::enumeration_cmp`].
pub fn enumerate_stable(market: &Market, budget: EnumerationBudget) -> Result<Vec<Matching>> {
    Ok(enumerate_individually_rational(market, budget)?
        .into_iter()
        .filter(|m| is_stable(market, m))
        .collect())
}

/// `Q^W` (`protected = Workers`) or `Q^F` (`protected = Firms`).
pub fn enumerate_quasi_stable(
    market: &Market,
    protected: Side,
    opts: QuasiOptions,
    budget: EnumerationBudget,
) -> Result<Vec<Matching>> {
    let mut out = Vec::new();
    for m in enumerate_individually_rational(market, budget)? {
        if is_quasi_stable(market, &m, protected, opts)? {
            out.push(m);
        }
    }
    Ok(out)
}
