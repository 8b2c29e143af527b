//! Ground truth by exhaustive enumeration, and seeded random markets.

mod enumerate;
mod random;

use serde::Serialize;

pub use enumerate::{
    count_matchings, enumerate_individually_rational, enumerate_matchings, enumerate_quasi_stable,
    enumerate_stable, EnumerationBudget, Matchings,
};
pub use random::{random_market, AgentKind, RandomSpec};

use crate::error::Result;
use crate::market::{Market, Side};
use crate::matching::{blair_geq, Matching};
use crate::tarski::{self, improvement_geq};

fn unique_extreme(
    market: &Market,
    order: Side,
    universe: &[Matching],
    mu: &Matching,
    mu2: &Matching,
    upper: bool,
) -> Option<Matching> {
    let geq = |a: &Matching, b: &Matching| improvement_geq(market, order, a, b);
    let bounds: Vec<&Matching> = universe
        .iter()
        .filter(|t| {
            if upper {
                geq(t, mu) && geq(t, mu2)
            } else {
                geq(mu, t) && geq(mu2, t)
            }
        })
        .collect();
    let mut found: Option<&Matching> = None;
    for &x in &bounds {
        let extreme = bounds
            .iter()
            .all(|t| if upper { geq(t, x) } else { geq(x, t) });
        if extreme {
            match found {
                Some(y) if y != x => return None,
                _ => found = Some(x),
            }
        }
    }
    found.cloned()
}

/// The unique least upper bound of `mu` and `mu2` within `universe` under
/// `order`, if there is one.
///
/// `order = Firms` is `≽_F`; `order = Workers` is `≥_W` in many-to-one
/// markets and `≽_W` otherwise.
pub fn brute_join(
    market: &Market,
    order: Side,
    mu: &Matching,
    mu2: &Matching,
    universe: &[Matching],
) -> Option<Matching> {
    unique_extreme(market, order, universe, mu, mu2, true)
}

/// The unique greatest lower bound within `universe`, if there is one.
pub fn brute_meet(
    market: &Market,
    order: Side,
    mu: &Matching,
    mu2: &Matching,
    universe: &[Matching],
) -> Option<Matching> {
    unique_extreme(market, order, universe, mu, mu2, false)
}

/// Pairwise join and meet tables over an enumerated stable set.
///
/// Table entries index into `stable`; `None` marks a missing bound.
#[derive(Clone, Debug, Serialize)]
pub struct LatticeReport {
    pub stable_size: usize,
    #[serde(skip)]
    pub stable: Vec<Matching>,
    pub firm_join: Vec<Vec<Option<usize>>>,
    pub firm_meet: Vec<Vec<Option<usize>>>,
    pub worker_join: Vec<Vec<Option<usize>>>,
    pub worker_meet: Vec<Vec<Option<usize>>>,
    /// Every pair has a join and a meet in both orders.
    pub bounds_exist: bool,
    /// Idempotence, commutativity, associativity and absorption.
    pub axioms_hold: bool,
    /// Firm join equals worker meet and vice versa, and `μ ≽_F μ'` exactly
    /// when `μ' ≽_W μ`.
    pub duality_holds: bool,
    /// The Tarski-computed operations equal the brute-force tables.
    pub tarski_agrees: bool,
}

impl LatticeReport {
    pub fn passed(&self) -> bool {
        self.stable_size > 0
            && self.bounds_exist
            && self.axioms_hold
            && self.duality_holds
            && self.tarski_agrees
    }
}

type Table = Vec<Vec<Option<usize>>>;

fn table(stable: &[Matching], op: impl Fn(&Matching, &Matching) -> Option<Matching>) -> Table {
    stable
        .iter()
        .map(|a| {
            stable
                .iter()
                .map(|b| op(a, b).and_then(|m| stable.iter().position(|s| *s == m)))
                .collect()
        })
        .collect()
}

fn axioms(join: &Table, meet: &Table) -> bool {
    let n = join.len();
    let idx = 0..n;
    for i in idx.clone() {
        if join[i][i] != Some(i) || meet[i][i] != Some(i) {
            return false;
        }
        for j in idx.clone() {
            if join[i][j] != join[j][i] || meet[i][j] != meet[j][i] {
                return false;
            }
            // a ∨ (a ∧ b) = a and a ∧ (a ∨ b) = a
            if meet[i][j].and_then(|m| join[i][m]) != Some(i)
                || join[i][j].and_then(|m| meet[i][m]) != Some(i)
            {
                return false;
            }
            for k in idx.clone() {
                for t in [join, meet] {
                    let left = t[i][j].and_then(|x| t[x][k]);
                    let right = t[j][k].and_then(|x| t[i][x]);
                    if left.is_none() || left != right {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Check that the stable set is a lattice in both orders, that the orders
/// are dual, and that the Tarski operations agree with brute force.
pub fn verify_lattice(market: &Market, budget: EnumerationBudget) -> Result<LatticeReport> {
    let stable = enumerate_stable(market, budget)?;
    let firm_join = table(&stable, |a, b| {
        brute_join(market, Side::Firms, a, b, &stable)
    });
    let firm_meet = table(&stable, |a, b| {
        brute_meet(market, Side::Firms, a, b, &stable)
    });
    let worker_join = table(&stable, |a, b| {
        brute_join(market, Side::Workers, a, b, &stable)
    });
    let worker_meet = table(&stable, |a, b| {
        brute_meet(market, Side::Workers, a, b, &stable)
    });

    let all_some = |t: &Table| t.iter().flatten().all(Option::is_some);
    let bounds_exist = [&firm_join, &firm_meet, &worker_join, &worker_meet]
        .into_iter()
        .all(all_some);
    let axioms_hold =
        bounds_exist && axioms(&firm_join, &firm_meet) && axioms(&worker_join, &worker_meet);

    let mut duality_holds = firm_join == worker_meet && firm_meet == worker_join;
    let mut tarski_agrees = true;
    for (i, a) in stable.iter().enumerate() {
        for (j, b) in stable.iter().enumerate() {
            if blair_geq(market, Side::Firms, a, b) != blair_geq(market, Side::Workers, b, a) {
                duality_holds = false;
            }
            let pos =
                |r: Result<Matching>| r.ok().and_then(|m| stable.iter().position(|s| *s == m));
            let computed = [
                pos(tarski::stable_join_firms(market, a, b)),
                pos(tarski::stable_meet_firms(market, a, b)),
                pos(tarski::stable_join_workers(market, a, b)),
                pos(tarski::stable_meet_workers(market, a, b)),
            ];
            let expected = [
                firm_join[i][j],
                firm_meet[i][j],
                worker_join[i][j],
                worker_meet[i][j],
            ];
            if computed != expected || computed.contains(&None) {
                tarski_agrees = false;
            }
        }
    }
    Ok(LatticeReport {
        stable_size: stable.len(),
        stable,
        firm_join,
        firm_meet,
        worker_join,
        worker_meet,
        bounds_exist,
        axioms_hold,
        duality_holds,
        tarski_agrees,
    })
}
