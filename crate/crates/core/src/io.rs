//! JSON encodings of markets and matchings.
//!
//! Agent order is file order: the first firm listed under `"firms"` is
//! firm 0, and so on.

use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::market::{ChoiceFunction, Market, MarketReport, Side, ValidationOptions, Variant};
use crate::matching::Matching;
use crate::set::AgentSet;

/// Largest ground set a q-extended choice is written out for.
const EXPORT_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FirmSpec {
    SetList { list: Vec<Vec<String>> },
    QuotaLinear { order: Vec<String>, quota: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WorkerSpec {
    Linear { order: Vec<String> },
    LinearQuota { order: Vec<String>, quota: usize },
    SetList { list: Vec<Vec<String>> },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchingSpec {
    pub assignments: IndexMap<String, Vec<String>>,
}

/// A market file as written, before ids are resolved.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketSpec {
    pub variant: Variant,
    pub firms: IndexMap<String, FirmSpec>,
    pub workers: IndexMap<String, WorkerSpec>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub matchings: IndexMap<String, MatchingSpec>,
}

/// A market together with the named matchings bundled in its file.
#[derive(Clone, Debug)]
pub struct LoadedMarket {
    pub market: Market,
    pub matchings: IndexMap<String, Matching>,
}

impl LoadedMarket {
    pub fn matching(&self, name: &str) -> Result<&Matching> {
        self.matchings
            .get(name)
            .ok_or_else(|| Error::ReferentialIntegrity(format!("no matching named {name}")))
    }
}

fn firm_refs(spec: &FirmSpec) -> Vec<&String> {
    match spec {
        FirmSpec::SetList { list } => list.iter().flatten().collect(),
        FirmSpec::QuotaLinear { order, .. } => order.iter().collect(),
    }
}

fn worker_refs(spec: &WorkerSpec) -> Vec<&String> {
    match spec {
        WorkerSpec::SetList { list } => list.iter().flatten().collect(),
        WorkerSpec::Linear { order } | WorkerSpec::LinearQuota { order, .. } => {
            order.iter().collect()
        }
    }
}

impl MarketSpec {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// References to agents that do not exist on the opposite side.
    pub fn referential_issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (f, spec) in &self.firms {
            for w in firm_refs(spec) {
                if !self.workers.contains_key(w) {
                    out.push(format!("firm {f} lists unknown worker {w}"));
                }
            }
        }
        for (w, spec) in &self.workers {
            for f in worker_refs(spec) {
                if !self.firms.contains_key(f) {
                    out.push(format!("worker {w} lists unknown firm {f}"));
                }
            }
        }
        for (name, m) in &self.matchings {
            for (f, ws) in &m.assignments {
                if !self.firms.contains_key(f) {
                    out.push(format!("matching {name} assigns unknown firm {f}"));
                }
                for w in ws {
                    if !self.workers.contains_key(w) {
                        out.push(format!("matching {name} assigns unknown worker {w}"));
                    }
                }
            }
        }
        out
    }

    pub fn build(&self) -> Result<LoadedMarket> {
        if let Some(issue) = self.referential_issues().into_iter().next() {
            return Err(Error::ReferentialIntegrity(issue));
        }
        let firm_names: Vec<String> = self.firms.keys().cloned().collect();
        let worker_names: Vec<String> = self.workers.keys().cloned().collect();
        let nw = worker_names.len();
        let nf = firm_names.len();
        if nf > crate::set::MAX_AGENTS || nw > crate::set::MAX_AGENTS {
            return Err(Error::TooManyAgents(nf.max(nw)));
        }
        let firms = self
            .firms
            .iter()
            .map(|(name, spec)| {
                match spec {
                    FirmSpec::SetList { list } => ChoiceFunction::set_list(
                        nw,
                        list.iter().map(|s| set_of(&self.workers, s)).collect(),
                    ),
                    FirmSpec::QuotaLinear { order, quota } => {
                        ChoiceFunction::quota_linear(nw, order_of(&self.workers, order), *quota)
                    }
                }
                .map_err(|e| annotate(e, "firm", name))
            })
            .collect::<Result<Vec<_>>>()?;
        let workers = self
            .workers
            .iter()
            .map(|(name, spec)| {
                match spec {
                    WorkerSpec::SetList { list } => ChoiceFunction::set_list(
                        nf,
                        list.iter().map(|s| set_of(&self.firms, s)).collect(),
                    ),
                    WorkerSpec::Linear { order } => {
                        ChoiceFunction::quota_linear(nf, order_of(&self.firms, order), 1)
                    }
                    WorkerSpec::LinearQuota { order, quota } => {
                        ChoiceFunction::quota_linear(nf, order_of(&self.firms, order), *quota)
                    }
                }
                .map_err(|e| annotate(e, "worker", name))
            })
            .collect::<Result<Vec<_>>>()?;
        let market = Market::new(self.variant, firm_names, worker_names, firms, workers)?;
        let matchings = self
            .matchings
            .iter()
            .map(|(name, m)| Ok((name.clone(), matching_from_spec(&market, m)?)))
            .collect::<Result<_>>()?;
        Ok(LoadedMarket { market, matchings })
    }
}

fn idx<V>(names: &IndexMap<String, V>, n: &String) -> usize {
    names.get_index_of(n).expect("references checked")
}

fn set_of<V>(names: &IndexMap<String, V>, s: &[String]) -> AgentSet {
    s.iter().map(|n| idx(names, n)).collect()
}

fn order_of<V>(names: &IndexMap<String, V>, o: &[String]) -> Vec<usize> {
    o.iter().map(|n| idx(names, n)).collect()
}

fn annotate(e: Error, side: &str, name: &str) -> Error {
    match e {
        Error::Schema(msg) => Error::Schema(format!("{side} {name}: {msg}")),
        e => e,
    }
}

pub fn market_from_json(text: &str) -> Result<LoadedMarket> {
    MarketSpec::parse(text)?.build()
}

pub fn load_market(path: impl AsRef<Path>) -> Result<LoadedMarket> {
    market_from_json(&std::fs::read_to_string(path)?)
}

/// Validate a market file: referential integrity first, then the choice
/// axioms for every agent.
pub fn validate_market_json(text: &str, opts: ValidationOptions) -> Result<MarketReport> {
    let spec = MarketSpec::parse(text)?;
    let referential = spec.referential_issues();
    if !referential.is_empty() {
        return Ok(MarketReport {
            referential,
            agents: Vec::new(),
        });
    }
    let loaded = spec.build()?;
    crate::market::validate_market(&loaded.market, opts)
}

pub fn matching_from_spec(market: &Market, spec: &MatchingSpec) -> Result<Matching> {
    let mut sets = vec![AgentSet::EMPTY; market.n_firms()];
    for (f, ws) in &spec.assignments {
        let fi = market
            .index_of(Side::Firms, f)
            .ok_or_else(|| Error::ReferentialIntegrity(format!("unknown firm {f}")))?;
        for w in ws {
            let wi = market
                .index_of(Side::Workers, w)
                .ok_or_else(|| Error::ReferentialIntegrity(format!("unknown worker {w}")))?;
            sets[fi].insert(wi);
        }
    }
    Matching::from_firm_sets(market, sets)
}

pub fn matching_from_json(market: &Market, text: &str) -> Result<Matching> {
    let spec: MatchingSpec = serde_json::from_str(text)?;
    matching_from_spec(market, &spec)
}

pub fn load_matching(path: impl AsRef<Path>, market: &Market) -> Result<Matching> {
    matching_from_json(market, &std::fs::read_to_string(path)?)
}

fn names(market: &Market, side: Side, s: AgentSet) -> Vec<String> {
    s.iter().map(|a| market.name(side, a).to_string()).collect()
}

pub fn matching_to_spec(market: &Market, mu: &Matching) -> MatchingSpec {
    let assignments = (0..market.n_firms())
        .filter(|&f| !mu.firm(f).is_empty())
        .map(|f| {
            (
                market.name(Side::Firms, f).to_string(),
                names(market, Side::Workers, mu.firm(f)),
            )
        })
        .collect();
    MatchingSpec { assignments }
}

/// `{"assignments": {"f1": ["w4"], …}}` with unmatched firms omitted.
pub fn matching_to_json(market: &Market, mu: &Matching) -> Value {
    serde_json::to_value(matching_to_spec(market, mu)).expect("plain data")
}

fn list_of(market: &Market, side: Side, list: &[AgentSet]) -> Vec<Vec<String>> {
    list.iter().map(|s| names(market, side, *s)).collect()
}

/// The market in the file schema. Q-extended firms are written out as the
/// equivalent set list.
pub fn market_to_spec(market: &Market) -> Result<MarketSpec> {
    let mut firms = IndexMap::new();
    for (f, c) in market.choices(Side::Firms).iter().enumerate() {
        let spec = match c {
            ChoiceFunction::QuotaLinear(q) => FirmSpec::QuotaLinear {
                order: q
                    .order()
                    .iter()
                    .map(|&w| market.name(Side::Workers, w).to_string())
                    .collect(),
                quota: q.quota(),
            },
            ChoiceFunction::SetList(s) => FirmSpec::SetList {
                list: list_of(market, Side::Workers, s.list()),
            },
            ChoiceFunction::QExtended(_) => FirmSpec::SetList {
                list: list_of(market, Side::Workers, c.to_set_list(EXPORT_CAP)?.list()),
            },
        };
        firms.insert(market.name(Side::Firms, f).to_string(), spec);
    }
    let mut workers = IndexMap::new();
    for (w, c) in market.choices(Side::Workers).iter().enumerate() {
        let order = |o: &[usize]| {
            o.iter()
                .map(|&f| market.name(Side::Firms, f).to_string())
                .collect()
        };
        let spec = match (market.variant(), c) {
            (Variant::ManyToOne, ChoiceFunction::QuotaLinear(q)) => WorkerSpec::Linear {
                order: order(q.order()),
            },
            (_, ChoiceFunction::QuotaLinear(q)) => WorkerSpec::LinearQuota {
                order: order(q.order()),
                quota: q.quota(),
            },
            (_, ChoiceFunction::SetList(s)) => WorkerSpec::SetList {
                list: list_of(market, Side::Firms, s.list()),
            },
            (_, ChoiceFunction::QExtended(_)) => WorkerSpec::SetList {
                list: list_of(market, Side::Firms, c.to_set_list(EXPORT_CAP)?.list()),
            },
        };
        workers.insert(market.name(Side::Workers, w).to_string(), spec);
    }
    Ok(MarketSpec {
        variant: market.variant(),
        firms,
        workers,
        matchings: IndexMap::new(),
    })
}

pub fn market_to_json(market: &Market) -> Result<Value> {
    Ok(serde_json::to_value(market_to_spec(market)?)?)
}

/// Matching encodings of a sequence, for traces and enumerations.
pub fn matchings_to_json<'a>(market: &Market, ms: impl IntoIterator<Item = &'a Matching>) -> Value {
    Value::Array(
        ms.into_iter()
            .map(|m| matching_to_json(market, m))
            .collect(),
    )
}

/// `{"firm": "f3", "worker": "w1", "reason": …}`.
pub fn blocking_pair_to_json(market: &Market, p: &crate::matching::BlockingPair) -> Value {
    json!({
        "firm": market.name(Side::Firms, p.firm),
        "worker": market.name(Side::Workers, p.worker),
        "reason": p.reason,
    })
}
