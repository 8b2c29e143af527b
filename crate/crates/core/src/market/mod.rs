//! Agents, choice functions, and the three market variants.

pub mod choice;
pub mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use choice::{ChoiceFunction, QExtendedChoice, QuotaLinearChoice, SetListChoice};
pub use validate::{Axiom, ValidationOptions, ValidationReport, Verdict, Witness};

use crate::error::{Error, Result};
use crate::set::{AgentSet, MAX_AGENTS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Firms choose sets of workers; workers rank individual firms.
    ManyToOne,
    /// Workers hold a linear order over firms and a quota.
    ManyToManyResponsive,
    /// Both sides hold substitutable choice functions.
    ManyToManySub,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::ManyToOne => "many_to_one",
            Variant::ManyToManyResponsive => "many_to_many_responsive",
            Variant::ManyToManySub => "many_to_many_sub",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Firms,
    Workers,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Firms => Side::Workers,
            Side::Workers => Side::Firms,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Firms => "firms",
            Side::Workers => "workers",
        })
    }
}

/// A two-sided market.
///
/// Workers in the linear variants are stored as quota-linear choice
/// functions (quota 1 for many-to-one), which is the choice rule their
/// preferences induce; the variant tag keeps the original semantics for
/// individual rationality and blocking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Market {
    variant: Variant,
    firm_names: Vec<String>,
    worker_names: Vec<String>,
    firms: Vec<ChoiceFunction>,
    workers: Vec<ChoiceFunction>,
}

impl Market {
    pub fn new(
        variant: Variant,
        firm_names: Vec<String>,
        worker_names: Vec<String>,
        firms: Vec<ChoiceFunction>,
        workers: Vec<ChoiceFunction>,
    ) -> Result<Self> {
        for names in [&firm_names, &worker_names] {
            if names.len() > MAX_AGENTS {
                return Err(Error::TooManyAgents(names.len()));
            }
        }
        if firm_names.len() != firms.len() || worker_names.len() != workers.len() {
            return Err(Error::Schema(
                "one choice function per agent is required".into(),
            ));
        }
        let mut all: Vec<&String> = firm_names.iter().chain(&worker_names).collect();
        all.sort();
        if let Some(w) = all.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Schema(format!("agent id {} is not unique", w[0])));
        }
        for (name, c) in firm_names.iter().zip(&firms) {
            if c.ground_size() != worker_names.len() {
                return Err(Error::Schema(format!(
                    "firm {name} chooses over {} agents, market has {} workers",
                    c.ground_size(),
                    worker_names.len()
                )));
            }
        }
        for (name, c) in worker_names.iter().zip(&workers) {
            if c.ground_size() != firm_names.len() {
                return Err(Error::Schema(format!(
                    "worker {name} chooses over {} agents, market has {} firms",
                    c.ground_size(),
                    firm_names.len()
                )));
            }
            match (variant, c) {
                (Variant::ManyToOne, ChoiceFunction::QuotaLinear(q)) if q.quota() == 1 => {}
                (Variant::ManyToManyResponsive, ChoiceFunction::QuotaLinear(_)) => {}
                (
                    Variant::ManyToManySub,
                    ChoiceFunction::SetList(_) | ChoiceFunction::QuotaLinear(_),
                ) => {}
                _ => {
                    return Err(Error::Schema(format!(
                        "worker {name} has a preference kind not allowed in a {variant} market"
                    )))
                }
            }
        }
        Ok(Market {
            variant,
            firm_names,
            worker_names,
            firms,
            workers,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn size(&self, side: Side) -> usize {
        match side {
            Side::Firms => self.firms.len(),
            Side::Workers => self.workers.len(),
        }
    }

    pub fn n_firms(&self) -> usize {
        self.firms.len()
    }

    pub fn n_workers(&self) -> usize {
        self.workers.len()
    }

    pub fn names(&self, side: Side) -> &[String] {
        match side {
            Side::Firms => &self.firm_names,
            Side::Workers => &self.worker_names,
        }
    }

    pub fn name(&self, side: Side, agent: usize) -> &str {
        &self.names(side)[agent]
    }

    pub fn index_of(&self, side: Side, name: &str) -> Option<usize> {
        self.names(side).iter().position(|n| n == name)
    }

    pub fn choice(&self, side: Side, agent: usize) -> &ChoiceFunction {
        match side {
            Side::Firms => &self.firms[agent],
            Side::Workers => &self.workers[agent],
        }
    }

    pub fn choices(&self, side: Side) -> &[ChoiceFunction] {
        match side {
            Side::Firms => &self.firms,
            Side::Workers => &self.workers,
        }
    }

    /// `C_a(S)` for agent `a` on `side`.
    #[inline]
    pub fn choose(&self, side: Side, agent: usize, set: AgentSet) -> AgentSet {
        self.choice(side, agent).pick(set)
    }

    /// Worker's linear order and quota in the many-to-one and responsive
    /// variants.
    pub fn worker_linear(&self, w: usize) -> Option<&QuotaLinearChoice> {
        match self.variant {
            Variant::ManyToOne | Variant::ManyToManyResponsive => self.workers[w].as_quota_linear(),
            Variant::ManyToManySub => None,
        }
    }

    /// Most partners an agent may hold under the variant constraints.
    pub fn capacity(&self, side: Side, agent: usize) -> usize {
        match (side, self.variant) {
            (Side::Firms, _) | (Side::Workers, Variant::ManyToManySub) => self.size(side.other()),
            (Side::Workers, Variant::ManyToOne) => 1,
            (Side::Workers, Variant::ManyToManyResponsive) => self.workers[agent]
                .as_quota_linear()
                .map_or(usize::MAX, QuotaLinearChoice::quota),
        }
    }

    /// Longest preference list in the market, at least 1.
    pub fn max_list_len(&self) -> usize {
        self.firms
            .iter()
            .chain(&self.workers)
            .map(ChoiceFunction::list_len)
            .max()
            .unwrap_or(0)
            .max(1)
    }

    pub fn format_set(&self, side: Side, set: AgentSet) -> String {
        let names: Vec<&str> = set.iter().map(|a| self.name(side, a)).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// Validation verdicts for one agent's choice function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgentReport {
    pub side: Side,
    pub agent: usize,
    pub checks: Vec<ValidationReport>,
}

impl AgentReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(ValidationReport::passed)
    }
}

/// Aggregated market validation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MarketReport {
    /// Dangling references found while resolving agent ids.
    pub referential: Vec<String>,
    pub agents: Vec<AgentReport>,
}

impl MarketReport {
    pub fn passed(&self) -> bool {
        self.referential.is_empty() && self.agents.iter().all(AgentReport::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = (&AgentReport, &ValidationReport)> {
        self.agents
            .iter()
            .flat_map(|a| a.checks.iter().filter(|c| !c.passed()).map(move |c| (a, c)))
    }
}

/// Check every choice function in the market against the three axioms.
///
/// Quota-linear choices are responsive-derived and pass by construction;
/// they are still checked exhaustively when small enough, since the check
/// is cheap and guards the representation.
pub fn validate_market(market: &Market, opts: ValidationOptions) -> Result<MarketReport> {
    let mut agents = Vec::new();
    for side in [Side::Firms, Side::Workers] {
        for (agent, c) in market.choices(side).iter().enumerate() {
            // Responsive-derived choices need no check above the cap.
            let opts = match c {
                ChoiceFunction::QuotaLinear(_) => ValidationOptions {
                    assume_substitutable: true,
                    ..opts
                },
                _ => opts,
            };
            let checks = validate::validate_all(c, opts)?.to_vec();
            agents.push(AgentReport {
                side,
                agent,
                checks,
            });
        }
    }
    Ok(MarketReport {
        referential: Vec::new(),
        agents,
    })
}
