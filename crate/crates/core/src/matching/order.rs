use super::Matching;
use crate::error::{Error, Result};
use crate::market::{Market, Side, Variant};

/// Blair's order for `side`: every agent `a` on that side has
/// `C_a(μ(a) ∪ μ'(a)) = μ(a)`.
pub fn blair_geq(market: &Market, side: Side, mu: &Matching, mu2: &Matching) -> bool {
    (0..market.size(side)).all(|a| {
        let own = mu.partners(side, a);
        market.choose(side, a, own.union(mu2.partners(side, a))) == own
    })
}

/// `μ ≽_F μ'`.
pub fn blair_geq_firms(market: &Market, mu: &Matching, mu2: &Matching) -> bool {
    blair_geq(market, Side::Firms, mu, mu2)
}

/// `μ ≽_W μ'`.
pub fn blair_geq_workers(market: &Market, mu: &Matching, mu2: &Matching) -> bool {
    blair_geq(market, Side::Workers, mu, mu2)
}

/// `μ ≥_W μ'`: every worker weakly prefers its `μ` partner under `P_w`.
///
/// Defined for many-to-one markets only. Unacceptable firms rank below `∅`
/// and tie with each other.
pub fn unanimous_geq_workers(market: &Market, mu: &Matching, mu2: &Matching) -> Result<bool> {
    if market.variant() != Variant::ManyToOne {
        return Err(Error::VariantMismatch {
            expected: Variant::ManyToOne.as_str(),
            found: market.variant(),
        });
    }
    Ok((0..market.n_workers()).all(|w| {
        let pref = market.worker_linear(w).expect("linear worker");
        let rank = |s: crate::set::AgentSet| match s.first() {
            None => pref.order().len(),
            Some(f) => pref.rank(f).unwrap_or(usize::MAX),
        };
        rank(mu.worker(w)) <= rank(mu2.worker(w))
    }))
}
