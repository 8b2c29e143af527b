use std::fmt::Write as _;

use matching_lattice::io::{blocking_pair_to_json, matching_to_json};
use matching_lattice::market::validate::{Axiom, ValidationReport, Verdict};
use matching_lattice::market::MarketReport;
use matching_lattice::matching::{blocking_pairs, BlockingPair};
use matching_lattice::tarski::OperatorTrace;
use matching_lattice::{AgentSet, Error, Market, Matching, Side};
use serde_json::{json, Value};

/// What a subcommand produced: a JSON value, its text rendering, and
/// whether the command counts as a failure.
pub struct Report {
    pub value: Value,
    pub text: String,
    pub failure: Option<Failure>,
}

pub struct Failure {
    pub kind: String,
    pub message: String,
}

impl From<&Error> for Failure {
    fn from(e: &Error) -> Self {
        Failure {
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

impl Report {
    pub fn ok(value: Value, text: String) -> Self {
        Report {
            value,
            text,
            failure: None,
        }
    }

    pub fn failed(value: Value, text: String, kind: &str, message: String) -> Self {
        Report {
            value,
            text,
            failure: Some(Failure {
                kind: kind.to_string(),
                message,
            }),
        }
    }
}

pub fn envelope(result: Value, failure: Option<&Failure>) -> Value {
    json!({
        "ok": failure.is_none(),
        "result": result,
        "error": failure.map(|f| json!({"kind": f.kind, "message": f.message})),
    })
}

pub fn names(market: &Market, side: Side, s: AgentSet) -> Vec<&str> {
    s.iter().map(|a| market.name(side, a)).collect()
}

pub fn pair_text(market: &Market, p: &BlockingPair) -> String {
    format!(
        "({}, {})",
        market.name(Side::Firms, p.firm),
        market.name(Side::Workers, p.worker)
    )
}

pub fn pairs_json(market: &Market, mu: &Matching) -> Value {
    Value::Array(
        blocking_pairs(market, mu)
            .iter()
            .map(|p| blocking_pair_to_json(market, p))
            .collect(),
    )
}

pub fn pairs_text(market: &Market, mu: &Matching) -> String {
    let pairs = blocking_pairs(market, mu);
    if pairs.is_empty() {
        "none".to_string()
    } else {
        pairs
            .iter()
            .map(|p| pair_text(market, p))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

pub fn trace_json(market: &Market, trace: &OperatorTrace) -> Value {
    let diags = trace.diagnostics(market);
    Value::Array(
        trace
            .steps
            .iter()
            .zip(diags)
            .map(|(mu, d)| {
                json!({
                    "step": d.step,
                    "matching": matching_to_json(market, mu),
                    "blocking_pairs": d.blocking_pairs,
                    "stable": d.stable,
                    "improves": d.improves,
                    "strict": d.strict,
                })
            })
            .collect(),
    )
}

pub fn trace_text(market: &Market, trace: &OperatorTrace) -> String {
    let mut out = String::new();
    for (mu, d) in trace.steps.iter().zip(trace.diagnostics(market)) {
        let _ = writeln!(
            out,
            "step {}: {} blocking pair(s), stable: {}, improves: {}",
            d.step, d.blocking_pairs, d.stable, d.improves
        );
        let _ = writeln!(out, "{}", mu.display(market));
    }
    out
}

pub fn axiom_name(a: Axiom) -> &'static str {
    match a {
        Axiom::Substitutability => "substitutability",
        Axiom::Consistency => "consistency",
        Axiom::PathIndependence => "path independence",
    }
}

fn witness_json(market: &Market, side: Side, r: &ValidationReport) -> Value {
    match r.verdict {
        Verdict::Pass => json!({"axiom": r.axiom, "verdict": "pass"}),
        Verdict::Assumed => json!({"axiom": r.axiom, "verdict": "assumed"}),
        Verdict::Fail(w) => {
            let other = side.other();
            json!({
                "axiom": r.axiom,
                "verdict": "fail",
                "witness": {
                    "set": names(market, other, w.set),
                    "other": names(market, other, w.other),
                    "agent": w.agent.map(|a| market.name(other, a)),
                },
            })
        }
    }
}

pub fn validation_json(market: &Market, report: &MarketReport) -> Value {
    let agents: Vec<Value> = report
        .agents
        .iter()
        .map(|a| {
            json!({
                "side": a.side,
                "agent": market.name(a.side, a.agent),
                "passed": a.passed(),
                "checks": a.checks.iter().map(|c| witness_json(market, a.side, c)).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({"passed": report.passed(), "agents": agents})
}

pub fn validation_text(market: &Market, report: &MarketReport) -> String {
    let mut out = String::new();
    for a in &report.agents {
        let verdicts: Vec<String> = a
            .checks
            .iter()
            .map(|c| {
                let v = match c.verdict {
                    Verdict::Pass => "pass".to_string(),
                    Verdict::Assumed => "assumed".to_string(),
                    Verdict::Fail(w) => {
                        let other = a.side.other();
                        format!(
                            "FAIL S={} S'={} agent={}",
                            market.format_set(other, w.set),
                            market.format_set(other, w.other),
                            w.agent.map_or("-", |x| market.name(other, x))
                        )
                    }
                };
                format!("{}: {v}", axiom_name(c.axiom))
            })
            .collect();
        let _ = writeln!(
            out,
            "{} {}: {}",
            a.side,
            market.name(a.side, a.agent),
            verdicts.join("; ")
        );
    }
    let _ = writeln!(
        out,
        "{}",
        if report.passed() {
            "all choice functions pass"
        } else {
            "validation failed"
        }
    );
    out
}
