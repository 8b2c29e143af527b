//! Join candidates, Tarski operators, and the lattice operations on the
//! stable set.
//!
//! Sides name the agents whose choice functions drive a construction:
//! `Side::Firms` selects `λ` and `T^F`, `Side::Workers` selects `γ` and
//! `T^W`. The many-to-one and responsive variants run through the same
//! engine, with each worker's choice being the top of its linear order up
//! to its quota.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::market::{Market, Side, Variant};
use crate::matching::{
    b_set, blair_geq, blocking_pairs, is_quasi_stable, is_stable, unanimous_geq_workers, Matching,
    QuasiOptions,
};
use crate::oracle::{self, EnumerationBudget};
use crate::set::AgentSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TarskiOptions {
    pub quasi: QuasiOptions,
    /// Refuse inputs outside the operator's quasi-stable domain.
    pub check_preconditions: bool,
}

impl Default for TarskiOptions {
    fn default() -> Self {
        TarskiOptions {
            quasi: QuasiOptions::default(),
            check_preconditions: true,
        }
    }
}

impl TarskiOptions {
    pub fn unchecked() -> Self {
        TarskiOptions {
            check_preconditions: false,
            ..Self::default()
        }
    }
}

/// The domain of the operator driven by `side`: `T^F` acts on
/// worker-quasi-stable matchings and `T^W` on firm-quasi-stable ones.
fn require_domain(market: &Market, mu: &Matching, side: Side, opts: TarskiOptions) -> Result<()> {
    if !opts.check_preconditions {
        return Ok(());
    }
    if is_quasi_stable(market, mu, side.other(), opts.quasi)? {
        Ok(())
    } else {
        Err(match side {
            Side::Firms => Error::NotWorkerQuasiStable,
            Side::Workers => Error::NotFirmQuasiStable,
        })
    }
}

fn rebuild(market: &Market, side: Side, sets: Vec<AgentSet>) -> Result<Matching> {
    let m = Matching::from_side(side, sets, market.size(side.other()));
    m.check_variant(market)?;
    Ok(m)
}

/// `a ↦ C_a(μ(a) ∪ μ'(a))` for every agent on `side`, with the other side
/// read off.
pub fn join_candidate(
    market: &Market,
    side: Side,
    mu: &Matching,
    mu2: &Matching,
    opts: TarskiOptions,
) -> Result<Matching> {
    require_domain(market, mu, side, opts)?;
    require_domain(market, mu2, side, opts)?;
    let sets = (0..market.size(side))
        .map(|a| market.choose(side, a, mu.partners(side, a).union(mu2.partners(side, a))))
        .collect();
    rebuild(market, side, sets)
}

/// `λ_{μ,μ'}(f) = C_f(μ(f) ∪ μ'(f))`; inputs must be worker-quasi-stable.
pub fn lambda_join(
    market: &Market,
    mu: &Matching,
    mu2: &Matching,
    opts: TarskiOptions,
) -> Result<Matching> {
    join_candidate(market, Side::Firms, mu, mu2, opts)
}

/// `γ_{μ,μ'}(w) = C_w(μ(w) ∪ μ'(w))`; inputs must be firm-quasi-stable.
pub fn gamma_join(
    market: &Market,
    mu: &Matching,
    mu2: &Matching,
    opts: TarskiOptions,
) -> Result<Matching> {
    join_candidate(market, Side::Workers, mu, mu2, opts)
}

/// One application of the operator driven by `side`:
/// `T[μ](a) = C_a(B̃_a^μ)` for every agent `a` on that side.
pub fn tarski_step(
    market: &Market,
    mu: &Matching,
    side: Side,
    opts: TarskiOptions,
) -> Result<Matching> {
    require_domain(market, mu, side, opts)?;
    step_unchecked(market, mu, side)
}

fn step_unchecked(market: &Market, mu: &Matching, side: Side) -> Result<Matching> {
    let sets = (0..market.size(side))
        .map(|a| market.choose(side, a, b_set(market, mu, side, a)))
        .collect();
    rebuild(market, side, sets)
}

/// `T^F`, defined on worker-quasi-stable matchings.
pub fn tarski_firm_step(market: &Market, mu: &Matching, opts: TarskiOptions) -> Result<Matching> {
    tarski_step(market, mu, Side::Firms, opts)
}

/// `T^W`, defined on firm-quasi-stable matchings.
pub fn tarski_worker_step(market: &Market, mu: &Matching, opts: TarskiOptions) -> Result<Matching> {
    tarski_step(market, mu, Side::Workers, opts)
}

/// Most operator applications before giving up: `2·|F|·|W|·L + 1`.
pub fn iteration_cap(market: &Market) -> usize {
    2 * market.n_firms() * market.n_workers() * market.max_list_len() + 1
}

/// The order an operator improves: Blair's order for its side, or the
/// unanimous order for workers in the many-to-one variant.
pub fn improvement_geq(market: &Market, side: Side, mu: &Matching, mu2: &Matching) -> bool {
    match (side, market.variant()) {
        (Side::Workers, Variant::ManyToOne) => {
            unanimous_geq_workers(market, mu, mu2).expect("many-to-one market")
        }
        _ => blair_geq(market, side, mu, mu2),
    }
}

/// The matchings visited while iterating one operator, start included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorTrace {
    pub side: Side,
    pub steps: Vec<Matching>,
}

/// Per-step facts reported alongside a trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StepDiagnostic {
    pub step: usize,
    pub blocking_pairs: usize,
    pub stable: bool,
    /// This matching weakly improves on the previous one.
    pub improves: bool,
    /// ... and differs from it.
    pub strict: bool,
}

impl OperatorTrace {
    /// Number of operator applications that changed the matching.
    pub fn step_count(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn fixed_point(&self) -> &Matching {
        self.steps.last().expect("trace is never empty")
    }

    pub fn into_fixed_point(mut self) -> Matching {
        self.steps.pop().expect("trace is never empty")
    }

    pub fn diagnostics(&self, market: &Market) -> Vec<StepDiagnostic> {
        self.steps
            .iter()
            .enumerate()
            .map(|(i, mu)| {
                let prev = i.checked_sub(1).map(|j| &self.steps[j]);
                StepDiagnostic {
                    step: i,
                    blocking_pairs: blocking_pairs(market, mu).len(),
                    stable: is_stable(market, mu),
                    improves: prev.is_none_or(|p| improvement_geq(market, self.side, mu, p)),
                    strict: prev.is_some_and(|p| p != mu),
                }
            })
            .collect()
    }
}

/// Iterate the operator driven by `side` from `mu` until it stops moving.
pub fn iterate_to_fixed_point(
    market: &Market,
    mu: &Matching,
    side: Side,
    opts: TarskiOptions,
) -> Result<OperatorTrace> {
    require_domain(market, mu, side, opts)?;
    let cap = iteration_cap(market);
    let mut steps = vec![mu.clone()];
    for _ in 0..cap {
        let cur = steps.last().expect("nonempty");
        let next = step_unchecked(market, cur, side)?;
        if &next == cur {
            return Ok(OperatorTrace { side, steps });
        }
        steps.push(next);
    }
    Err(Error::NonConvergence { cap })
}

fn require_stable(market: &Market, mu: &Matching, mu2: &Matching) -> Result<()> {
    if is_stable(market, mu) && is_stable(market, mu2) {
        Ok(())
    } else {
        Err(Error::NotStable)
    }
}

/// Join or meet through the candidate built by `side` and re-equilibrated by
/// that side's operator.
fn lattice_op(market: &Market, mu: &Matching, mu2: &Matching, side: Side) -> Result<OperatorTrace> {
    require_stable(market, mu, mu2)?;
    let start = join_candidate(market, side, mu, mu2, TarskiOptions::unchecked())?;
    iterate_to_fixed_point(market, &start, side, TarskiOptions::unchecked())
}

/// Least upper bound under `≽_F`: `F^F(λ_{μ,μ'})`.
pub fn stable_join_firms(market: &Market, mu: &Matching, mu2: &Matching) -> Result<Matching> {
    lattice_op(market, mu, mu2, Side::Firms).map(OperatorTrace::into_fixed_point)
}

/// Greatest lower bound under `≽_F`: `F^W(γ_{μ,μ'})`.
pub fn stable_meet_firms(market: &Market, mu: &Matching, mu2: &Matching) -> Result<Matching> {
    lattice_op(market, mu, mu2, Side::Workers).map(OperatorTrace::into_fixed_point)
}

/// Least upper bound in the worker order; equals the firm meet.
pub fn stable_join_workers(market: &Market, mu: &Matching, mu2: &Matching) -> Result<Matching> {
    stable_meet_firms(market, mu, mu2)
}

/// Greatest lower bound in the worker order; equals the firm join.
pub fn stable_meet_workers(market: &Market, mu: &Matching, mu2: &Matching) -> Result<Matching> {
    stable_join_firms(market, mu, mu2)
}

/// The join (`join = true`) or meet for `order`, together with the trace
/// that produced it.
pub fn stable_op_traced(
    market: &Market,
    order: Side,
    join: bool,
    mu: &Matching,
    mu2: &Matching,
) -> Result<OperatorTrace> {
    // Firm join and worker meet run T^F from λ; the other two run T^W from γ.
    let driver = if (order == Side::Firms) == join {
        Side::Firms
    } else {
        Side::Workers
    };
    lattice_op(market, mu, mu2, driver)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimality {
    /// Matches the fold of joins over the enumerated stable set.
    Verified,
    /// Disagrees with that fold.
    NotOptimal,
    /// The stable set was too large to enumerate.
    Unverified,
}

#[derive(Clone, Debug)]
pub struct Extremal {
    pub matching: Matching,
    pub trace: OperatorTrace,
    pub optimality: Optimality,
}

/// The stable matching best for `side`, reached from the empty matching.
///
/// The opposite side's operator runs from `∅`: `T^W` climbs the worker
/// order from its bottom and lands on the firm-optimal matching, and `T^F`
/// symmetrically lands on the worker-optimal one. When the stable set fits
/// `budget`, the answer is compared with the fold of joins over it.
pub fn extremal_stable(market: &Market, side: Side, budget: EnumerationBudget) -> Result<Extremal> {
    let trace = iterate_to_fixed_point(
        market,
        &Matching::empty_for(market),
        side.other(),
        TarskiOptions::unchecked(),
    )?;
    let matching = trace.fixed_point().clone();
    let optimality = match oracle::enumerate_stable(market, budget) {
        Ok(stable) => {
            let mut best = matching.clone();
            for nu in &stable {
                best = match side {
                    Side::Firms => stable_join_firms(market, &best, nu)?,
                    Side::Workers => stable_join_workers(market, &best, nu)?,
                };
            }
            if best == matching && stable.contains(&matching) {
                Optimality::Verified
            } else {
                Optimality::NotOptimal
            }
        }
        Err(Error::BudgetExceeded(_)) => Optimality::Unverified,
        Err(e) => return Err(e),
    };
    Ok(Extremal {
        matching,
        trace,
        optimality,
    })
}
