use serde::Serialize;

use super::Matching;
use crate::error::{Error, Result};
use crate::market::{validate::DEFAULT_CAP, Market, Side, Variant};
use crate::set::AgentSet;

/// How the universal quantifier in quasi-stability is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuasiOptions {
    /// Largest willing set checked subset by subset.
    pub cap: usize,
    /// Check only `T = willing ∖ μ(a)` and singletons, which is enough
    /// when choice functions are substitutable.
    pub assume_substitutable: bool,
}

impl Default for QuasiOptions {
    fn default() -> Self {
        QuasiOptions {
            cap: DEFAULT_CAP,
            assume_substitutable: false,
        }
    }
}

/// Which clause made the worker willing to add the firm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockReason {
    /// Many-to-one: `f P_w μ(w)`.
    Prefers,
    /// Responsive, `|μ(w)| = q_w`: `f` beats some current partner.
    Replaces,
    /// Responsive, `|μ(w)| < q_w`: `f` is acceptable.
    Vacancy,
    /// Substitutable: `f ∈ C_w(μ(w) ∪ {f})`.
    Chosen,
}

/// A firm-worker pair that would both rather add each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BlockingPair {
    pub firm: usize,
    pub worker: usize,
    pub reason: BlockReason,
}

/// `μ(f) ≠ C_f(μ(f))`.
pub fn blocked_by_firm(market: &Market, mu: &Matching, f: usize) -> bool {
    let s = mu.firm(f);
    market.choose(Side::Firms, f, s) != s
}

/// Whether `w` would rather drop some of its partners.
///
/// Many-to-one: the partner is ranked below `∅`. Responsive: more partners
/// than the quota, or an unacceptable partner. Substitutable:
/// `μ(w) ≠ C_w(μ(w))`.
pub fn blocked_by_worker(market: &Market, mu: &Matching, w: usize) -> bool {
    let s = mu.worker(w);
    match market.variant() {
        Variant::ManyToOne | Variant::ManyToManyResponsive => {
            let pref = market.worker_linear(w).expect("linear worker");
            let cap = if market.variant() == Variant::ManyToOne {
                1
            } else {
                pref.quota()
            };
            s.len() > cap || !s.is_subset(pref.acceptable())
        }
        Variant::ManyToManySub => market.choose(Side::Workers, w, s) != s,
    }
}

/// No agent on either side wants to drop a partner.
pub fn is_individually_rational(market: &Market, mu: &Matching) -> bool {
    (0..market.n_firms()).all(|f| !blocked_by_firm(market, mu, f))
        && (0..market.n_workers()).all(|w| !blocked_by_worker(market, mu, w))
}

/// The worker-side half of the blocking condition, if it holds.
fn worker_wants(market: &Market, mu: &Matching, f: usize, w: usize) -> Option<BlockReason> {
    let held = mu.worker(w);
    match market.variant() {
        Variant::ManyToOne => {
            let pref = market.worker_linear(w).expect("linear worker");
            let rf = pref.rank(f)?;
            match held.first() {
                None => Some(BlockReason::Prefers),
                Some(g) => match pref.rank(g) {
                    Some(rg) if rg <= rf => None,
                    _ => Some(BlockReason::Prefers),
                },
            }
        }
        Variant::ManyToManyResponsive => {
            let pref = market.worker_linear(w).expect("linear worker");
            let rf = pref.rank(f)?;
            if held.len() >= pref.quota() {
                let displaced = held.iter().any(|g| pref.rank(g).is_none_or(|rg| rf < rg));
                (held.len() == pref.quota() && displaced).then_some(BlockReason::Replaces)
            } else {
                Some(BlockReason::Vacancy)
            }
        }
        Variant::ManyToManySub => market
            .choose(Side::Workers, w, held.with(f))
            .contains(f)
            .then_some(BlockReason::Chosen),
    }
}

fn firm_wants(market: &Market, mu: &Matching, f: usize, w: usize) -> bool {
    market
        .choose(Side::Firms, f, mu.firm(f).with(w))
        .contains(w)
}

/// All blocking pairs, sorted by `(firm, worker)`.
pub fn blocking_pairs(market: &Market, mu: &Matching) -> Vec<BlockingPair> {
    let mut out = Vec::new();
    for f in 0..market.n_firms() {
        let held = mu.firm(f);
        for w in 0..market.n_workers() {
            if held.contains(w) || !firm_wants(market, mu, f, w) {
                continue;
            }
            if let Some(reason) = worker_wants(market, mu, f, w) {
                out.push(BlockingPair {
                    firm: f,
                    worker: w,
                    reason,
                });
            }
        }
    }
    out
}

fn has_blocking_pair(market: &Market, mu: &Matching) -> bool {
    (0..market.n_firms()).any(|f| {
        (0..market.n_workers()).any(|w| {
            !mu.firm(f).contains(w)
                && firm_wants(market, mu, f, w)
                && worker_wants(market, mu, f, w).is_some()
        })
    })
}

/// Individually rational and free of blocking pairs.
pub fn is_stable(market: &Market, mu: &Matching) -> bool {
    is_individually_rational(market, mu) && !has_blocking_pair(market, mu)
}

/// Agents `a` on `chooser` with `b ∈ C_a(μ(a) ∪ {b})`.
///
/// With `chooser = Firms` this is `F̃_w^μ` for worker `b`; with
/// `chooser = Workers` it is `W̃_f^μ` for firm `b`.
pub fn willing_set(market: &Market, mu: &Matching, chooser: Side, b: usize) -> AgentSet {
    (0..market.size(chooser))
        .filter(|&a| {
            market
                .choose(chooser, a, mu.partners(chooser, a).with(b))
                .contains(b)
        })
        .collect()
}

/// `F_w^μ = {f : w ∈ C_f(μ(f) ∪ {w})}`.
pub fn f_set_of_worker(market: &Market, mu: &Matching, w: usize) -> AgentSet {
    willing_set(market, mu, Side::Firms, w)
}

/// `W_f^μ = {w : f ∈ C_w(μ(w) ∪ {f})}`.
pub fn w_set_of_firm(market: &Market, mu: &Matching, f: usize) -> AgentSet {
    willing_set(market, mu, Side::Workers, f)
}

/// `B̃_a^μ`: partners on the other side that would pick `a` out of their
/// willing set, together with `μ(a)`.
pub fn b_set(market: &Market, mu: &Matching, side: Side, a: usize) -> AgentSet {
    let other = side.other();
    let mut out = mu.partners(side, a);
    for b in 0..market.size(other) {
        let willing = willing_set(market, mu, side, b);
        if market.choose(other, b, willing).contains(a) {
            out.insert(b);
        }
    }
    out
}

/// `B̃_f^μ = {w : f ∈ C_w(F̃_w^μ)} ∪ μ(f)`.
pub fn b_set_of_firm(market: &Market, mu: &Matching, f: usize) -> AgentSet {
    b_set(market, mu, Side::Firms, f)
}

/// `B̃_w^μ = {f : w ∈ C_f(W̃_f^μ)} ∪ μ(w)`; the option `∅` is implicit.
pub fn b_set_of_worker(market: &Market, mu: &Matching, w: usize) -> AgentSet {
    b_set(market, mu, Side::Workers, w)
}

/// Quasi-stability protecting the agents on `protected`: individually
/// rational, and `μ(a) ⊆ C_a(μ(a) ∪ T)` for every `a` on that side and
/// every `T` in its willing set.
///
/// `protected = Workers` is worker-quasi-stability, `Firms` is
/// firm-quasi-stability.
pub fn is_quasi_stable(
    market: &Market,
    mu: &Matching,
    protected: Side,
    opts: QuasiOptions,
) -> Result<bool> {
    if !is_individually_rational(market, mu) {
        return Ok(false);
    }
    if protected == Side::Workers && market.variant() == Variant::ManyToOne {
        return Ok(blocking_pairs(market, mu)
            .iter()
            .all(|p| mu.worker(p.worker).is_empty()));
    }
    for a in 0..market.size(protected) {
        let held = mu.partners(protected, a);
        let extra = willing_set(market, mu, protected.other(), a).difference(held);
        let keeps = |t: AgentSet| held.is_subset(market.choose(protected, a, held.union(t)));
        let ok = if opts.assume_substitutable {
            keeps(extra) && extra.iter().all(|b| keeps(AgentSet::singleton(b)))
        } else {
            if extra.len() > opts.cap {
                return Err(Error::CapExceeded {
                    size: extra.len(),
                    cap: opts.cap,
                });
            }
            extra.subsets().all(keeps)
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Quasi-stability with the general many-to-many test even in the
/// many-to-one variant. Exposed for cross-checking the direct definition.
pub fn is_quasi_stable_general(
    market: &Market,
    mu: &Matching,
    protected: Side,
    opts: QuasiOptions,
) -> Result<bool> {
    if !is_individually_rational(market, mu) {
        return Ok(false);
    }
    for a in 0..market.size(protected) {
        let held = mu.partners(protected, a);
        let willing = willing_set(market, mu, protected.other(), a);
        if willing.len() > opts.cap {
            return Err(Error::CapExceeded {
                size: willing.len(),
                cap: opts.cap,
            });
        }
        if !willing
            .subsets()
            .all(|t| held.is_subset(market.choose(protected, a, held.union(t))))
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every blocking pair leaves the worker's current partners in place
/// (many-to-one: blocking workers are unmatched).
pub fn is_worker_quasi_stable(market: &Market, mu: &Matching, opts: QuasiOptions) -> Result<bool> {
    is_quasi_stable(market, mu, Side::Workers, opts)
}

/// No blocking pair forces a firm to let go of a current worker.
pub fn is_firm_quasi_stable(market: &Market, mu: &Matching, opts: QuasiOptions) -> Result<bool> {
    is_quasi_stable(market, mu, Side::Firms, opts)
}
