//! Exhaustive checks of the structural axioms on choice functions.
//!
//! Every check tabulates `C` on all subsets of the ground set, so it is
//! refused above [`ValidationOptions::cap`] elements unless the caller opts
//! into assuming the axioms hold.
//!
//! Witness search order is fixed: the outer set ascends by bitmask, the
//! inner set ascends by bitmask, and the reported agent is the lowest
//! offending index.

use serde::Serialize;

use super::choice::{choice_table, ChoiceFunction};
use crate::error::{Error, Result};
use crate::set::AgentSet;

pub const DEFAULT_CAP: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValidationOptions {
    pub cap: usize,
    pub assume_substitutable: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            cap: DEFAULT_CAP,
            assume_substitutable: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Substitutability,
    Consistency,
    PathIndependence,
}

/// A counterexample to one axiom.
///
/// * substitutability: `set = S`, `other = S' ⊆ S`, and `agent ∈ C(S) ∩ S'`
///   is missing from `C(S')`;
/// * consistency: `C(set) ⊆ other ⊆ set` yet `C(other) ≠ C(set)`, and
///   `agent` lies in the symmetric difference;
/// * path independence: `C(set ∪ other) ≠ C(C(set) ∪ other)`, and `agent`
///   lies in the symmetric difference.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Witness {
    pub set: AgentSet,
    pub other: AgentSet,
    pub agent: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(Witness),
    /// Ground set above the cap; the axiom was assumed, not checked.
    Assumed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub axiom: Axiom,
    pub verdict: Verdict,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        !matches!(self.verdict, Verdict::Fail(_))
    }

    pub fn witness(&self) -> Option<Witness> {
        match self.verdict {
            Verdict::Fail(w) => Some(w),
            _ => None,
        }
    }
}

fn table_or_cap(
    c: &ChoiceFunction,
    axiom: Axiom,
    opts: ValidationOptions,
) -> Result<std::result::Result<Vec<AgentSet>, ValidationReport>> {
    let n = c.ground_size();
    if n > opts.cap {
        if opts.assume_substitutable {
            return Ok(Err(ValidationReport {
                axiom,
                verdict: Verdict::Assumed,
            }));
        }
        return Err(Error::CapExceeded {
            size: n,
            cap: opts.cap,
        });
    }
    Ok(Ok(choice_table(c)))
}

fn report(axiom: Axiom, witness: Option<Witness>) -> ValidationReport {
    ValidationReport {
        axiom,
        verdict: witness.map_or(Verdict::Pass, Verdict::Fail),
    }
}

/// Ascending submasks of `s`.
fn ascending_subsets(s: AgentSet) -> impl Iterator<Item = AgentSet> {
    let mask = s.bits();
    let mut cur = Some(0u64);
    std::iter::from_fn(move || {
        let c = cur?;
        cur = if c == mask {
            None
        } else {
            Some(((c | !mask).wrapping_add(1)) & mask)
        };
        Some(AgentSet::from_bits(c))
    })
}

/// `C(S) ∩ S' ⊆ C(S')` for all `S' ⊆ S`.
pub fn validate_substitutable(
    c: &ChoiceFunction,
    opts: ValidationOptions,
) -> Result<ValidationReport> {
    let table = match table_or_cap(c, Axiom::Substitutability, opts)? {
        Ok(t) => t,
        Err(r) => return Ok(r),
    };
    Ok(report(
        Axiom::Substitutability,
        substitutability_witness(&table),
    ))
}

/// First substitutability violation in a full choice table indexed by
/// `S.bits()`.
pub fn substitutability_witness(table: &[AgentSet]) -> Option<Witness> {
    for (bits, &chosen) in table.iter().enumerate() {
        let s = AgentSet::from_bits(bits as u64);
        for t in ascending_subsets(s) {
            let missing = chosen.intersection(t).difference(table[t.bits() as usize]);
            if let Some(agent) = missing.first() {
                return Some(Witness {
                    set: s,
                    other: t,
                    agent: Some(agent),
                });
            }
        }
    }
    None
}

/// The pointwise form: `w ∈ C(S)` implies `w ∈ C(S' ∪ {w})` for `S' ⊆ S`.
///
/// Equivalent to [`validate_substitutable`]; kept as an independent route.
pub fn validate_substitutable_pointwise(
    c: &ChoiceFunction,
    opts: ValidationOptions,
) -> Result<ValidationReport> {
    let table = match table_or_cap(c, Axiom::Substitutability, opts)? {
        Ok(t) => t,
        Err(r) => return Ok(r),
    };
    for (bits, &chosen) in table.iter().enumerate() {
        let s = AgentSet::from_bits(bits as u64);
        for t in ascending_subsets(s) {
            for w in chosen {
                let with_w = t.with(w);
                if !table[with_w.bits() as usize].contains(w) {
                    return Ok(report(
                        Axiom::Substitutability,
                        Some(Witness {
                            set: s,
                            other: with_w,
                            agent: Some(w),
                        }),
                    ));
                }
            }
        }
    }
    Ok(report(Axiom::Substitutability, None))
}

/// `C(S') = C(S)` whenever `C(S) ⊆ S' ⊆ S`.
pub fn validate_consistent(
    c: &ChoiceFunction,
    opts: ValidationOptions,
) -> Result<ValidationReport> {
    let table = match table_or_cap(c, Axiom::Consistency, opts)? {
        Ok(t) => t,
        Err(r) => return Ok(r),
    };
    Ok(report(Axiom::Consistency, consistency_witness(&table)))
}

/// First consistency violation in a full choice table.
pub fn consistency_witness(table: &[AgentSet]) -> Option<Witness> {
    for (bits, &chosen) in table.iter().enumerate() {
        let s = AgentSet::from_bits(bits as u64);
        for t in ascending_subsets(s) {
            if !chosen.is_subset(t) {
                continue;
            }
            let ct = table[t.bits() as usize];
            if ct != chosen {
                let diff = ct.union(chosen).difference(ct.intersection(chosen));
                return Some(Witness {
                    set: s,
                    other: t,
                    agent: diff.first(),
                });
            }
        }
    }
    None
}

/// `C(S ∪ S') = C(C(S) ∪ S')` for every pair of subsets.
pub fn validate_path_independent(
    c: &ChoiceFunction,
    opts: ValidationOptions,
) -> Result<ValidationReport> {
    let table = match table_or_cap(c, Axiom::PathIndependence, opts)? {
        Ok(t) => t,
        Err(r) => return Ok(r),
    };
    Ok(report(
        Axiom::PathIndependence,
        path_independence_witness(&table),
    ))
}

/// First path-independence violation in a full choice table.
pub fn path_independence_witness(table: &[AgentSet]) -> Option<Witness> {
    let n = table.len();
    for (bits, &chosen) in table.iter().enumerate() {
        for other_bits in 0..n {
            let lhs = table[bits | other_bits];
            let rhs = table[(chosen.bits() as usize) | other_bits];
            if lhs != rhs {
                let diff = lhs.union(rhs).difference(lhs.intersection(rhs));
                return Some(Witness {
                    set: AgentSet::from_bits(bits as u64),
                    other: AgentSet::from_bits(other_bits as u64),
                    agent: diff.first(),
                });
            }
        }
    }
    None
}

/// Substitutability, consistency and path independence, in that order.
pub fn validate_all(c: &ChoiceFunction, opts: ValidationOptions) -> Result<[ValidationReport; 3]> {
    Ok([
        validate_substitutable(c, opts)?,
        validate_consistent(c, opts)?,
        validate_path_independent(c, opts)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> AgentSet {
        v.iter().copied().collect()
    }

    const OPTS: ValidationOptions = ValidationOptions {
        cap: DEFAULT_CAP,
        assume_substitutable: false,
    };

    #[test]
    fn ascending_subsets_in_order() {
        let got: Vec<u64> = ascending_subsets(set(&[0, 2])).map(|s| s.bits()).collect();
        assert_eq!(got, vec![0, 1, 4, 5]);
        let got: Vec<u64> = ascending_subsets(AgentSet::EMPTY)
            .map(|s| s.bits())
            .collect();
        assert_eq!(got, vec![0]);
    }

    #[test]
    fn nested_pair_list_fails_on_dropped_partner() {
        // [{a,b}, {a}]: C({a,b}) ∩ {b} = {b} but C({b}) = ∅.
        let c = ChoiceFunction::set_list(2, vec![set(&[0, 1]), set(&[0])]).unwrap();
        let r = validate_substitutable(&c, OPTS).unwrap();
        assert_eq!(
            r.verdict,
            Verdict::Fail(Witness {
                set: set(&[0, 1]),
                other: set(&[1]),
                agent: Some(1)
            })
        );
    }

    #[test]
    fn consistency_holds_for_any_set_list() {
        let c = ChoiceFunction::set_list(3, vec![set(&[0, 1]), set(&[2]), set(&[1, 2])]).unwrap();
        assert!(validate_consistent(&c, OPTS).unwrap().passed());
    }

    #[test]
    fn inconsistent_table_detected() {
        // C(S) = S except C({0,1,2}) = {0}: substitutable, yet
        // C({0,1,2}) ⊆ {0,1} ⊆ {0,1,2} with C({0,1}) = {0,1}.
        let mut table: Vec<AgentSet> = (0..8u64).map(AgentSet::from_bits).collect();
        table[7] = set(&[0]);
        assert_eq!(substitutability_witness(&table), None);
        assert_eq!(
            consistency_witness(&table),
            Some(Witness {
                set: set(&[0, 1, 2]),
                other: set(&[0, 1]),
                agent: Some(1)
            })
        );
        assert!(path_independence_witness(&table).is_some());
    }

    #[test]
    fn cap_is_enforced_unless_assumed() {
        let c = ChoiceFunction::set_list(2, vec![set(&[0, 1])]).unwrap();
        let tight = ValidationOptions {
            cap: 1,
            assume_substitutable: false,
        };
        assert!(matches!(
            validate_consistent(&c, tight),
            Err(Error::CapExceeded { size: 2, cap: 1 })
        ));
        let assumed = ValidationOptions {
            cap: 1,
            assume_substitutable: true,
        };
        assert_eq!(
            validate_consistent(&c, assumed).unwrap().verdict,
            Verdict::Assumed
        );
    }

    #[test]
    fn quota_one_linear_is_path_independent() {
        let c = ChoiceFunction::quota_linear(2, vec![0, 1], 1).unwrap();
        for r in validate_all(&c, OPTS).unwrap() {
            assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.axiom);
        }
    }
}
