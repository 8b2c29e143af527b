//! Choice functions over the opposite side of the market.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::set::AgentSet;

/// An agent's rule for selecting partners out of any offered set.
///
/// All variants are over a ground set `{0, ..., ground_size - 1}` of agents
/// on the opposite side, and always satisfy `choose(S) ⊆ S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChoiceFunction {
    SetList(SetListChoice),
    QuotaLinear(QuotaLinearChoice),
    QExtended(QExtendedChoice),
}

/// Preference over sets given as an ordered list of acceptable sets.
///
/// `C(S)` is the first listed set contained in `S`, or `∅` when none is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetListChoice {
    ground_size: usize,
    list: Vec<AgentSet>,
}

/// Responsive-derived choice: the `quota` best acceptable members of `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotaLinearChoice {
    ground_size: usize,
    order: Vec<usize>,
    quota: usize,
}

/// The q-extension of a base choice function to a replicated ground set.
///
/// Replicas are indexed so that the copies of each base agent appear in
/// ascending replica order; `projection[r]` names the base agent of replica
/// `r`. Evaluation projects the offered replicas, applies the base choice,
/// and keeps the lowest-indexed replica of each chosen base agent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QExtendedChoice {
    base: Box<ChoiceFunction>,
    projection: Arc<[usize]>,
}

impl SetListChoice {
    pub fn new(ground_size: usize, list: Vec<AgentSet>) -> Result<Self> {
        let ground = AgentSet::full(ground_size);
        for (i, s) in list.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::Schema(format!("listed set #{i} is empty")));
            }
            if !s.is_subset(ground) {
                return Err(Error::Schema(format!(
                    "listed set #{i} leaves the ground set of {ground_size} agents"
                )));
            }
            if list[..i].contains(s) {
                return Err(Error::Schema(format!("listed set #{i} is a duplicate")));
            }
        }
        Ok(SetListChoice { ground_size, list })
    }

    pub fn list(&self) -> &[AgentSet] {
        &self.list
    }

    #[inline]
    pub fn pick(&self, s: AgentSet) -> AgentSet {
        self.list
            .iter()
            .copied()
            .find(|a| a.is_subset(s))
            .unwrap_or(AgentSet::EMPTY)
    }
}

impl QuotaLinearChoice {
    pub fn new(ground_size: usize, order: Vec<usize>, quota: usize) -> Result<Self> {
        if quota == 0 {
            return Err(Error::Schema("quota must be at least 1".into()));
        }
        let mut seen = AgentSet::EMPTY;
        for &a in &order {
            if a >= ground_size {
                return Err(Error::Schema(format!(
                    "agent #{a} leaves the ground set of {ground_size} agents"
                )));
            }
            if seen.contains(a) {
                return Err(Error::Schema(format!("agent #{a} is listed twice")));
            }
            seen.insert(a);
        }
        Ok(QuotaLinearChoice {
            ground_size,
            order,
            quota,
        })
    }

    /// Acceptable agents, best first.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn quota(&self) -> usize {
        self.quota
    }

    pub fn acceptable(&self) -> AgentSet {
        self.order.iter().copied().collect()
    }

    /// Position of `a` in the order; `None` when `a` is unacceptable.
    pub fn rank(&self, a: usize) -> Option<usize> {
        self.order.iter().position(|&x| x == a)
    }

    #[inline]
    pub fn pick(&self, s: AgentSet) -> AgentSet {
        let mut out = AgentSet::EMPTY;
        let mut left = self.quota;
        for &a in &self.order {
            if left == 0 {
                break;
            }
            if s.contains(a) {
                out.insert(a);
                left -= 1;
            }
        }
        out
    }
}

impl QExtendedChoice {
    /// `projection` must list replicas grouped by base agent in ascending
    /// copy order, and every entry must index the base ground set.
    pub fn new(base: ChoiceFunction, projection: Arc<[usize]>) -> Result<Self> {
        if projection.len() > crate::set::MAX_AGENTS {
            return Err(Error::TooManyAgents(projection.len()));
        }
        if let Some(&bad) = projection.iter().find(|&&b| b >= base.ground_size()) {
            return Err(Error::Schema(format!(
                "replica projects to agent #{bad}, outside the base ground set"
            )));
        }
        Ok(QExtendedChoice {
            base: Box::new(base),
            projection,
        })
    }

    pub fn base(&self) -> &ChoiceFunction {
        &self.base
    }

    pub fn projection(&self) -> &[usize] {
        &self.projection
    }

    /// `π(S)`.
    pub fn project(&self, s: AgentSet) -> AgentSet {
        s.iter().map(|r| self.projection[r]).collect()
    }

    #[inline]
    pub fn pick(&self, s: AgentSet) -> AgentSet {
        let chosen = self.base.pick(self.project(s));
        let mut taken = AgentSet::EMPTY;
        let mut out = AgentSet::EMPTY;
        for r in s {
            let b = self.projection[r];
            if chosen.contains(b) && !taken.contains(b) {
                taken.insert(b);
                out.insert(r);
            }
        }
        out
    }
}

impl ChoiceFunction {
    pub fn set_list(ground_size: usize, list: Vec<AgentSet>) -> Result<Self> {
        SetListChoice::new(ground_size, list).map(ChoiceFunction::SetList)
    }

    pub fn quota_linear(ground_size: usize, order: Vec<usize>, quota: usize) -> Result<Self> {
        QuotaLinearChoice::new(ground_size, order, quota).map(ChoiceFunction::QuotaLinear)
    }

    /// Number of agents on the opposite side.
    pub fn ground_size(&self) -> usize {
        match self {
            ChoiceFunction::SetList(c) => c.ground_size,
            ChoiceFunction::QuotaLinear(c) => c.ground_size,
            ChoiceFunction::QExtended(c) => c.projection.len(),
        }
    }

    pub fn ground(&self) -> AgentSet {
        AgentSet::full(self.ground_size())
    }

    /// `C(S)`, rejecting sets that leave the ground set.
    pub fn choose(&self, s: AgentSet) -> Result<AgentSet> {
        let outside = s.difference(self.ground());
        if let Some(a) = outside.first() {
            return Err(Error::UnknownAgent(format!("#{a}")));
        }
        Ok(self.pick(s))
    }

    /// `C(S)` for a set already known to lie in the ground set.
    #[inline]
    pub fn pick(&self, s: AgentSet) -> AgentSet {
        debug_assert!(s.is_subset(self.ground()));
        match self {
            ChoiceFunction::SetList(c) => c.pick(s),
            ChoiceFunction::QuotaLinear(c) => c.pick(s),
            ChoiceFunction::QExtended(c) => c.pick(s),
        }
    }

    /// Length of the underlying preference list.
    pub fn list_len(&self) -> usize {
        match self {
            ChoiceFunction::SetList(c) => c.list.len(),
            ChoiceFunction::QuotaLinear(c) => c.order.len(),
            ChoiceFunction::QExtended(c) => c.base.list_len(),
        }
    }

    pub fn as_quota_linear(&self) -> Option<&QuotaLinearChoice> {
        match self {
            ChoiceFunction::QuotaLinear(c) => Some(c),
            _ => None,
        }
    }

    /// Agents that are chosen from some offered set.
    pub fn acceptable(&self) -> AgentSet {
        match self {
            ChoiceFunction::SetList(c) => c.list.iter().fold(AgentSet::EMPTY, |a, &s| a.union(s)),
            ChoiceFunction::QuotaLinear(c) => c.acceptable(),
            ChoiceFunction::QExtended(c) => {
                let base = c.base.acceptable();
                (0..c.projection.len())
                    .filter(|&r| base.contains(c.projection[r]))
                    .collect()
            }
        }
    }

    /// All sets `A` with `C(A) = A`, including `∅`, in lexicographic order.
    ///
    /// Set lists and quota-linear choices are handled from their structure;
    /// other representations are scanned exhaustively up to `cap` elements.
    pub fn self_chosen_sets(&self, cap: usize) -> Result<Vec<AgentSet>> {
        let mut out = match self {
            ChoiceFunction::SetList(c) => {
                let mut v: Vec<_> = c.list.iter().copied().filter(|&a| c.pick(a) == a).collect();
                v.push(AgentSet::EMPTY);
                v
            }
            ChoiceFunction::QuotaLinear(c) => c
                .acceptable()
                .subsets()
                .filter(|a| a.len() <= c.quota)
                .collect(),
            ChoiceFunction::QExtended(_) => {
                let acc = self.acceptable();
                if acc.len() > cap {
                    return Err(Error::CapExceeded {
                        size: acc.len(),
                        cap,
                    });
                }
                acc.subsets().filter(|&a| self.pick(a) == a).collect()
            }
        };
        out.sort_by(|a, b| a.lex_cmp(*b));
        out.dedup();
        Ok(out)
    }

    /// Equivalent set-list representation, built from the full choice table.
    ///
    /// The sets `C(S)` are ordered so that `A` precedes `B` whenever
    /// `C(A ∪ B) = A`; for a path-independent choice function that order is
    /// acyclic and the resulting list reproduces `C` on every subset. Fails
    /// with a schema error when no faithful list exists.
    pub fn to_set_list(&self, cap: usize) -> Result<SetListChoice> {
        let n = self.ground_size();
        if n > cap {
            return Err(Error::CapExceeded { size: n, cap });
        }
        let table = choice_table(self);
        let mut image: Vec<AgentSet> = table.iter().copied().filter(|s| !s.is_empty()).collect();
        image.sort_by(|a, b| a.lex_cmp(*b));
        image.dedup();

        let mut list = Vec::with_capacity(image.len());
        let mut remaining = image;
        while !remaining.is_empty() {
            // First remaining set not beaten by any other remaining set.
            let pos = remaining
                .iter()
                .position(|&a| {
                    remaining
                        .iter()
                        .all(|&b| b == a || table[a.union(b).bits() as usize] != b)
                })
                .ok_or_else(|| {
                    Error::Schema("choice function has no faithful set-list form".into())
                })?;
            list.push(remaining.remove(pos));
        }
        let out = SetListChoice::new(n, list)?;
        let faithful = (0..table.len()).all(|bits| {
            let s = AgentSet::from_bits(bits as u64);
            out.pick(s) == table[bits]
        });
        if !faithful {
            return Err(Error::Schema(
                "choice function has no faithful set-list form".into(),
            ));
        }
        Ok(out)
    }
}

/// `C(S)` for every `S` in the ground set, indexed by `S.bits()`.
pub(crate) fn choice_table(c: &ChoiceFunction) -> Vec<AgentSet> {
    let n = c.ground_size();
    (0..1u64 << n)
        .map(|bits| c.pick(AgentSet::from_bits(bits)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> AgentSet {
        v.iter().copied().collect()
    }

    #[test]
    fn set_list_picks_first_contained() {
        let c = ChoiceFunction::set_list(3, vec![set(&[0, 1]), set(&[0]), set(&[2])]).unwrap();
        assert_eq!(c.pick(set(&[0, 1, 2])), set(&[0, 1]));
        assert_eq!(c.pick(set(&[0, 2])), set(&[0]));
        assert_eq!(c.pick(set(&[1, 2])), set(&[2]));
        assert_eq!(c.pick(set(&[1])), AgentSet::EMPTY);
        assert_eq!(c.pick(AgentSet::EMPTY), AgentSet::EMPTY);
    }

    #[test]
    fn set_list_rejects_bad_lists() {
        assert!(SetListChoice::new(2, vec![AgentSet::EMPTY]).is_err());
        assert!(SetListChoice::new(2, vec![set(&[2])]).is_err());
        assert!(SetListChoice::new(2, vec![set(&[0]), set(&[0])]).is_err());
    }

    #[test]
    fn quota_linear_takes_best_up_to_quota() {
        let c = ChoiceFunction::quota_linear(4, vec![3, 0, 2], 2).unwrap();
        assert_eq!(c.pick(set(&[0, 1, 2, 3])), set(&[3, 0]));
        assert_eq!(c.pick(set(&[1, 2])), set(&[2]));
        assert_eq!(c.pick(set(&[1])), AgentSet::EMPTY);
        assert!(QuotaLinearChoice::new(2, vec![0], 0).is_err());
        assert!(QuotaLinearChoice::new(2, vec![0, 0], 1).is_err());
    }

    #[test]
    fn choose_rejects_outside_agents() {
        let c = ChoiceFunction::quota_linear(2, vec![0, 1], 1).unwrap();
        assert!(matches!(c.choose(set(&[2])), Err(Error::UnknownAgent(_))));
        assert_eq!(c.choose(set(&[1])).unwrap(), set(&[1]));
    }

    #[test]
    fn q_extension_keeps_lowest_replica() {
        // Base agents a = 0, b = 1; replicas a^1 a^2 b^1 b^2 b^3.
        let base = ChoiceFunction::set_list(2, vec![set(&[0, 1]), set(&[0]), set(&[1])]).unwrap();
        let proj: Arc<[usize]> = vec![0, 0, 1, 1, 1].into();
        let c = ChoiceFunction::QExtended(QExtendedChoice::new(base, proj).unwrap());
        // {a^2, b^1, b^3} -> {a^2, b^1}
        assert_eq!(c.pick(set(&[1, 2, 4])), set(&[1, 2]));
        assert_eq!(c.pick(set(&[0, 1])), set(&[0]));
        assert_eq!(c.pick(set(&[1])), set(&[1]));
    }

    #[test]
    fn materialized_list_reproduces_quota_linear() {
        let c = ChoiceFunction::quota_linear(4, vec![2, 0, 3], 2).unwrap();
        let list = ChoiceFunction::SetList(c.to_set_list(14).unwrap());
        for s in AgentSet::full(4).subsets() {
            assert_eq!(list.pick(s), c.pick(s));
        }
    }

    #[test]
    fn self_chosen_sets_of_set_list() {
        // {0} is listed after {0,1} but C({0}) = {0}; {0,1} is self-chosen too.
        let c = ChoiceFunction::set_list(2, vec![set(&[0, 1]), set(&[0])]).unwrap();
        let got = c.self_chosen_sets(14).unwrap();
        assert_eq!(got, vec![AgentSet::EMPTY, set(&[0]), set(&[0, 1])]);
    }
}
