//! The q-replica of a responsive many-to-many market and the natural
//! morphism `Φ` between its stable matchings and those of the related
//! many-to-one market.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::market::{ChoiceFunction, Market, QExtendedChoice, Side, Variant};
use crate::matching::{blair_geq_firms, is_stable, Matching};
use crate::set::AgentSet;
use crate::tarski;

/// Bookkeeping for `W^q` and the natural projection `π: W^q → W`.
///
/// The replicas of base worker `w` occupy a contiguous index block in copy
/// order `w^1, …, w^{q_w}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplicaMap {
    quotas: Vec<usize>,
    offsets: Vec<usize>,
    projection: Arc<[usize]>,
}

impl ReplicaMap {
    pub fn new(quotas: Vec<usize>) -> Result<Self> {
        let mut offsets = Vec::with_capacity(quotas.len());
        let mut projection = Vec::new();
        for (w, &q) in quotas.iter().enumerate() {
            if q == 0 {
                return Err(Error::Schema(format!("worker #{w} has quota 0")));
            }
            offsets.push(projection.len());
            projection.extend(std::iter::repeat_n(w, q));
        }
        if projection.len() > crate::set::MAX_AGENTS {
            return Err(Error::TooManyAgents(projection.len()));
        }
        Ok(ReplicaMap {
            quotas,
            offsets,
            projection: projection.into(),
        })
    }

    pub fn n_base(&self) -> usize {
        self.quotas.len()
    }

    pub fn n_replicas(&self) -> usize {
        self.projection.len()
    }

    pub fn quota(&self, w: usize) -> usize {
        self.quotas[w]
    }

    /// `π(r)`.
    pub fn project(&self, r: usize) -> usize {
        self.projection[r]
    }

    /// `π(S)`.
    pub fn project_set(&self, s: AgentSet) -> AgentSet {
        s.iter().map(|r| self.projection[r]).collect()
    }

    /// The copy number `t` of replica `r`, starting at 1.
    pub fn copy(&self, r: usize) -> usize {
        r - self.offsets[self.projection[r]] + 1
    }

    /// Index of `w^t`, if `1 ≤ t ≤ q_w`.
    pub fn replica(&self, w: usize, t: usize) -> Option<usize> {
        (t >= 1 && t <= *self.quotas.get(w)?).then(|| self.offsets[w] + t - 1)
    }

    /// `π^{-1}({w})`.
    pub fn replicas_of(&self, w: usize) -> AgentSet {
        (self.offsets[w]..self.offsets[w] + self.quotas[w]).collect()
    }

    pub fn projection(&self) -> &Arc<[usize]> {
        &self.projection
    }
}

/// `C_f^q(S)`: for each worker in `C_f(π(S))`, its lowest-indexed replica in
/// `S`.
pub fn q_extended_choose(c: &ChoiceFunction, map: &ReplicaMap, s: AgentSet) -> AgentSet {
    let chosen = c.pick(map.project_set(s));
    let mut out = AgentSet::EMPTY;
    let mut seen = AgentSet::EMPTY;
    for r in s {
        let w = map.project(r);
        if chosen.contains(w) && !seen.contains(w) {
            seen.insert(w);
            out.insert(r);
        }
    }
    out
}

/// The related many-to-one market together with its source.
#[derive(Clone, Debug)]
pub struct RelatedMarket {
    pub source: Market,
    pub market: Market,
    pub map: ReplicaMap,
}

/// Replicate each worker `q_w` times, give every replica its worker's
/// order over single firms, and give every firm the q-extension of its
/// choice function.
pub fn build_related_market(source: &Market) -> Result<RelatedMarket> {
    if source.variant() != Variant::ManyToManyResponsive {
        return Err(Error::VariantMismatch {
            expected: Variant::ManyToManyResponsive.as_str(),
            found: source.variant(),
        });
    }
    let nw = source.n_workers();
    let prefs: Vec<_> = (0..nw)
        .map(|w| source.worker_linear(w).expect("responsive worker"))
        .collect();
    let map = ReplicaMap::new(prefs.iter().map(|p| p.quota()).collect())?;
    let firms = source
        .choices(Side::Firms)
        .iter()
        .map(|c| {
            QExtendedChoice::new(c.clone(), map.projection().clone()).map(ChoiceFunction::QExtended)
        })
        .collect::<Result<Vec<_>>>()?;
    let nf = source.n_firms();
    let mut workers = Vec::with_capacity(map.n_replicas());
    let mut names = Vec::with_capacity(map.n_replicas());
    for r in 0..map.n_replicas() {
        let w = map.project(r);
        workers.push(ChoiceFunction::quota_linear(
            nf,
            prefs[w].order().to_vec(),
            1,
        )?);
        names.push(format!("{}#{}", source.name(Side::Workers, w), map.copy(r)));
    }
    let market = Market::new(
        Variant::ManyToOne,
        source.names(Side::Firms).to_vec(),
        names,
        firms,
        workers,
    )?;
    Ok(RelatedMarket {
        source: source.clone(),
        market,
        map,
    })
}

/// `Φ[μ](w) = ⋃_t μ(w^t)`.
pub fn phi(rm: &RelatedMarket, mu: &Matching) -> Matching {
    let sets = (0..rm.map.n_base())
        .map(|w| {
            rm.map
                .replicas_of(w)
                .iter()
                .fold(AgentSet::EMPTY, |acc, r| acc.union(mu.worker(r)))
        })
        .collect();
    Matching::from_side(Side::Workers, sets, rm.source.n_firms())
}

/// The canonical preimage: the firms of `ν(w)` sorted best first under
/// `P_w` go to `w^1, w^2, …` in turn.
///
/// Unacceptable firms follow the acceptable ones, by index.
pub fn phi_preimage(rm: &RelatedMarket, nu: &Matching) -> Result<Matching> {
    let mut sets = vec![AgentSet::EMPTY; rm.map.n_replicas()];
    for w in 0..rm.map.n_base() {
        let pref = rm.source.worker_linear(w).expect("responsive worker");
        let mut firms: Vec<usize> = nu.worker(w).iter().collect();
        if firms.len() > rm.map.quota(w) {
            return Err(Error::VariantViolation {
                variant: rm.source.variant(),
                detail: format!(
                    "worker {} holds more firms than its quota",
                    rm.source.name(Side::Workers, w)
                ),
            });
        }
        firms.sort_by_key(|&f| (pref.rank(f).unwrap_or(usize::MAX), f));
        for (i, f) in firms.into_iter().enumerate() {
            let r = rm.map.replica(w, i + 1).expect("within quota");
            sets[r] = AgentSet::singleton(f);
        }
    }
    Ok(Matching::from_side(
        Side::Workers,
        sets,
        rm.source.n_firms(),
    ))
}

/// `Φ|_S^{-1}[ν]` for a stable `ν`.
pub fn phi_inverse_stable(rm: &RelatedMarket, nu: &Matching) -> Result<Matching> {
    if !is_stable(&rm.source, nu) {
        return Err(Error::NotStable);
    }
    let mu = phi_preimage(rm, nu)?;
    if !is_stable(&rm.market, &mu) {
        return Err(Error::PreimageNotStable);
    }
    Ok(mu)
}

fn lifted(
    rm: &RelatedMarket,
    nu: &Matching,
    nu2: &Matching,
    op: fn(&Market, &Matching, &Matching) -> Result<Matching>,
) -> Result<Matching> {
    let a = phi_inverse_stable(rm, nu)?;
    let b = phi_inverse_stable(rm, nu2)?;
    Ok(phi(rm, &op(&rm.market, &a, &b)?))
}

/// `ν ⋎_F^q ν' = Φ[Φ^{-1}[ν] ⋎_F Φ^{-1}[ν']]`.
pub fn lifted_join_firms(rm: &RelatedMarket, nu: &Matching, nu2: &Matching) -> Result<Matching> {
    lifted(rm, nu, nu2, tarski::stable_join_firms)
}

pub fn lifted_meet_firms(rm: &RelatedMarket, nu: &Matching, nu2: &Matching) -> Result<Matching> {
    lifted(rm, nu, nu2, tarski::stable_meet_firms)
}

pub fn lifted_join_workers(rm: &RelatedMarket, nu: &Matching, nu2: &Matching) -> Result<Matching> {
    lifted(rm, nu, nu2, tarski::stable_join_workers)
}

pub fn lifted_meet_workers(rm: &RelatedMarket, nu: &Matching, nu2: &Matching) -> Result<Matching> {
    lifted(rm, nu, nu2, tarski::stable_meet_workers)
}

/// `ν ≽_F^q ν'`, evaluated with the source firms' choice functions.
pub fn blair_geq_firms_q(source: &Market, nu: &Matching, nu2: &Matching) -> bool {
    blair_geq_firms(source, nu, nu2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> AgentSet {
        v.iter().copied().collect()
    }

    /// Two firms and one worker with quota 2 ranking `f1` over `f2`.
    fn micro() -> Market {
        let firms = vec![
            ChoiceFunction::quota_linear(1, vec![0], 1).unwrap(),
            ChoiceFunction::quota_linear(1, vec![0], 1).unwrap(),
        ];
        let workers = vec![ChoiceFunction::quota_linear(2, vec![0, 1], 2).unwrap()];
        Market::new(
            Variant::ManyToManyResponsive,
            vec!["f1".into(), "f2".into()],
            vec!["w".into()],
            firms,
            workers,
        )
        .unwrap()
    }

    #[test]
    fn replica_layout() {
        let map = ReplicaMap::new(vec![2, 1, 3]).unwrap();
        assert_eq!(map.n_replicas(), 6);
        assert_eq!(map.replica(2, 1), Some(3));
        assert_eq!(map.replica(2, 4), None);
        assert_eq!(map.copy(5), 3);
        assert_eq!(map.replicas_of(0), set(&[0, 1]));
        assert_eq!(map.project_set(set(&[1, 4])), set(&[0, 2]));
    }

    #[test]
    fn q_extension_keeps_lowest_copy() {
        let map = ReplicaMap::new(vec![1])
            .and_then(|_| ReplicaMap::new(vec![2, 3]))
            .unwrap();
        let c = ChoiceFunction::set_list(2, vec![set(&[0, 1])]).unwrap();
        // a^2 = 1, b^1 = 2, b^3 = 4
        assert_eq!(q_extended_choose(&c, &map, set(&[1, 2, 4])), set(&[1, 2]));
    }

    #[test]
    fn micro_market_round_trip() {
        let rm = build_related_market(&micro()).unwrap();
        assert_eq!(rm.market.names(Side::Workers), ["w#1", "w#2"]);
        let nu = Matching::from_firm_sets(&rm.source, vec![set(&[0]), set(&[0])]).unwrap();
        let mu = phi_preimage(&rm, &nu).unwrap();
        assert_eq!(mu.firm(0), set(&[0]));
        assert_eq!(mu.firm(1), set(&[1]));
        assert_eq!(phi(&rm, &mu), nu);
        let swapped = Matching::from_firm_sets(&rm.market, vec![set(&[1]), set(&[0])]).unwrap();
        assert_eq!(phi(&rm, &swapped), nu);
        assert_eq!(phi_inverse_stable(&rm, &nu).unwrap(), mu);
    }
}
