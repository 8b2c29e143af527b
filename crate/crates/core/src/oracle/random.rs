use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::market::validate::{validate_substitutable, ValidationOptions};
use crate::market::{ChoiceFunction, Market, Variant};
use crate::set::AgentSet;

/// How substitutable choice functions are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AgentKind {
    /// Top `q` of a random linear order.
    QuotaLinear,
    /// A random list of sets, redrawn until substitutable.
    SetList,
    /// The union of the maxima of a few random linear orders, written out
    /// as a set list.
    UnionOfMaxima,
    /// Each agent picks one of the above at random.
    Mixed,
}

/// Shape of a random market.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomSpec {
    pub variant: Variant,
    pub n_firms: usize,
    pub n_workers: usize,
    /// Largest quota drawn for quota-linear agents.
    pub max_quota: usize,
    /// Probability that an agent finds a given partner acceptable.
    pub density: f64,
    pub firm_kind: AgentKind,
    /// Used for workers of the substitutable variant only.
    pub worker_kind: AgentKind,
    /// Redraws allowed per set-list agent.
    pub max_attempts: usize,
}

impl RandomSpec {
    pub fn new(variant: Variant, n_firms: usize, n_workers: usize) -> Self {
        RandomSpec {
            variant,
            n_firms,
            n_workers,
            max_quota: 2,
            density: 0.75,
            firm_kind: AgentKind::Mixed,
            worker_kind: AgentKind::Mixed,
            max_attempts: 10_000,
        }
    }
}

fn acceptable_order(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).filter(|_| rng.gen_bool(density)).collect();
    order.shuffle(rng);
    order
}

fn quota_linear(rng: &mut ChaCha8Rng, n: usize, spec: &RandomSpec) -> Result<ChoiceFunction> {
    let order = acceptable_order(rng, n, spec.density);
    let quota = rng.gen_range(1..=spec.max_quota.max(1));
    ChoiceFunction::quota_linear(n, order, quota)
}

fn set_list(rng: &mut ChaCha8Rng, n: usize, spec: &RandomSpec) -> Result<ChoiceFunction> {
    let acc: AgentSet = acceptable_order(rng, n, spec.density).into_iter().collect();
    let mut candidates: Vec<AgentSet> = acc.subsets().filter(|s| !s.is_empty()).collect();
    if candidates.is_empty() {
        return ChoiceFunction::set_list(n, Vec::new());
    }
    let strict = ValidationOptions::default();
    for _ in 0..spec.max_attempts {
        candidates.shuffle(rng);
        let len = rng.gen_range(1..=candidates.len().min(6));
        let c = ChoiceFunction::set_list(n, candidates[..len].to_vec())?;
        if validate_substitutable(&c, strict)?.passed() {
            return Ok(c);
        }
    }
    Err(Error::GenerationFailed {
        attempts: spec.max_attempts,
    })
}

fn union_of_maxima(rng: &mut ChaCha8Rng, n: usize, spec: &RandomSpec) -> Result<ChoiceFunction> {
    let acc = acceptable_order(rng, n, spec.density);
    let k = rng.gen_range(1..=spec.max_quota.max(1));
    let orders: Vec<Vec<usize>> = (0..k)
        .map(|_| {
            let mut o = acc.clone();
            o.shuffle(rng);
            o
        })
        .collect();
    let pick = |s: AgentSet| -> AgentSet {
        orders
            .iter()
            .filter_map(|o| o.iter().copied().find(|&a| s.contains(a)))
            .collect()
    };
    let mut list: Vec<AgentSet> = (0..1u64 << n)
        .map(|bits| pick(AgentSet::from_bits(bits)))
        .filter(|s| !s.is_empty())
        .collect();
    list.sort_by(|a, b| a.lex_cmp(*b));
    list.dedup();
    // A is listed before B whenever A is picked from A ∪ B.
    let mut ordered = Vec::with_capacity(list.len());
    while !list.is_empty() {
        let pos = list
            .iter()
            .position(|&a| list.iter().all(|&b| b == a || pick(a.union(b)) != b))
            .expect("union of maxima is path independent");
        ordered.push(list.remove(pos));
    }
    ChoiceFunction::set_list(n, ordered)
}

fn draw(
    rng: &mut ChaCha8Rng,
    kind: AgentKind,
    n: usize,
    spec: &RandomSpec,
) -> Result<ChoiceFunction> {
    let kind = match kind {
        AgentKind::Mixed => *[
            AgentKind::QuotaLinear,
            AgentKind::SetList,
            AgentKind::UnionOfMaxima,
        ]
        .choose(rng)
        .expect("nonempty"),
        k => k,
    };
    match kind {
        AgentKind::QuotaLinear => quota_linear(rng, n, spec),
        AgentKind::SetList => set_list(rng, n, spec),
        AgentKind::UnionOfMaxima => union_of_maxima(rng, n, spec),
        AgentKind::Mixed => unreachable!(),
    }
}

/// A market drawn deterministically from `seed`.
///
/// Firms follow `spec.firm_kind`. Workers hold a linear order (quota 1 in
/// the many-to-one variant, up to `max_quota` in the responsive one) or,
/// in the substitutable variant, a choice function of `spec.worker_kind`.
pub fn random_market(seed: u64, spec: &RandomSpec) -> Result<Market> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (nf, nw) = (spec.n_firms, spec.n_workers);
    let firms = (0..nf)
        .map(|_| draw(&mut rng, spec.firm_kind, nw, spec))
        .collect::<Result<Vec<_>>>()?;
    let workers = (0..nw)
        .map(|_| match spec.variant {
            Variant::ManyToOne => {
                ChoiceFunction::quota_linear(nf, acceptable_order(&mut rng, nf, spec.density), 1)
            }
            Variant::ManyToManyResponsive => quota_linear(&mut rng, nf, spec),
            Variant::ManyToManySub => draw(&mut rng, spec.worker_kind, nf, spec),
        })
        .collect::<Result<Vec<_>>>()?;
    Market::new(
        spec.variant,
        (1..=nf).map(|i| format!("f{i}")).collect(),
        (1..=nw).map(|i| format!("w{i}")).collect(),
        firms,
        workers,
    )
}
