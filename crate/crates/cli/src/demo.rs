//! End-to-end replay of a bundled example market.

use std::fmt::Write as _;

use matching_lattice::assets;
use matching_lattice::io::{matching_to_json, LoadedMarket};
use matching_lattice::matching::{is_quasi_stable, is_stable, QuasiOptions};
use matching_lattice::oracle::{self, EnumerationBudget};
use matching_lattice::tarski::{self, OperatorTrace, Optimality, TarskiOptions};
use matching_lattice::{Error, Matching, Side};
use serde_json::{json, Value};

use crate::report::{pairs_json, pairs_text, Report};
use crate::Example;

fn label<'a>(l: &'a LoadedMarket, mu: &Matching) -> Option<&'a str> {
    l.matchings
        .iter()
        .find(|(_, m)| *m == mu)
        .map(|(name, _)| name.as_str())
}

struct Transcript<'a> {
    l: &'a LoadedMarket,
    text: String,
}

impl<'a> Transcript<'a> {
    fn show(&mut self, title: &str, mu: &Matching) -> Value {
        let mk = &self.l.market;
        let name = label(self.l, mu);
        let _ = writeln!(
            self.text,
            "{title}{}:",
            name.map_or(String::new(), |n| format!(" = {n}"))
        );
        let _ = writeln!(self.text, "{}", mu.display(mk));
        let _ = writeln!(
            self.text,
            "  stable: {}, blocking pairs: {}",
            is_stable(mk, mu),
            pairs_text(mk, mu)
        );
        json!({
            "name": name,
            "matching": matching_to_json(mk, mu),
            "stable": is_stable(mk, mu),
            "blocking_pairs": pairs_json(mk, mu),
        })
    }

    fn trace(&mut self, op: &str, start: &str, t: &OperatorTrace) -> Value {
        let _ = writeln!(
            self.text,
            "\n{op} from {start}: fixed point after {} step(s)",
            t.step_count()
        );
        if t.step_count() == 0 {
            let _ = writeln!(self.text, "{start} is already stable");
        }
        let steps: Vec<Value> = t
            .steps
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, mu)| self.show(&format!("step {i}"), mu))
            .collect();
        json!({"operator": op, "from": start, "step_count": t.step_count(), "steps": steps})
    }
}

pub fn run(example: Example) -> Result<Report, Error> {
    let (name, l) = match example {
        Example::Example1 => ("example1", assets::example1()?),
        Example::Example2 => ("example2", assets::example2()?),
    };
    let mk = &l.market;
    let mut t = Transcript {
        l: &l,
        text: String::new(),
    };
    let _ = writeln!(
        t.text,
        "{name}: {} market, {} firms, {} workers\n",
        mk.variant(),
        mk.n_firms(),
        mk.n_workers()
    );
    let (a, b) = (l.matching("mu_under")?, l.matching("mu_over")?);
    let inputs = [t.show("input", a), t.show("input", b)];

    let o = TarskiOptions::default();
    let q = QuasiOptions::default();
    let _ = writeln!(t.text);
    let lambda = tarski::lambda_join(mk, a, b, o)?;
    let mut lambda_v = t.show("lambda (firm-wise choice from both)", &lambda);
    let wq = is_quasi_stable(mk, &lambda, Side::Workers, q)?;
    lambda_v["worker_quasi_stable"] = json!(wq);
    let _ = writeln!(t.text, "  worker-quasi-stable: {wq}");
    let gamma = tarski::gamma_join(mk, a, b, o)?;
    let mut gamma_v = t.show("gamma (worker-wise choice from both)", &gamma);
    let fq = is_quasi_stable(mk, &gamma, Side::Firms, q)?;
    gamma_v["firm_quasi_stable"] = json!(fq);
    let _ = writeln!(t.text, "  firm-quasi-stable: {fq}");

    let tf = tarski::iterate_to_fixed_point(mk, &lambda, Side::Firms, o)?;
    let tf_v = t.trace("T^F", "lambda", &tf);
    let tw = tarski::iterate_to_fixed_point(mk, &gamma, Side::Workers, o)?;
    let tw_v = t.trace("T^W", "gamma", &tw);

    let _ = writeln!(t.text, "\nlattice operations in the firm order:");
    let join = tarski::stable_join_firms(mk, a, b)?;
    let meet = tarski::stable_meet_firms(mk, a, b)?;
    let join_v = t.show("join", &join);
    let meet_v = t.show("meet", &meet);

    let _ = writeln!(t.text, "\nextremal stable matchings:");
    let budget = EnumerationBudget::default();
    let mut extremal = Vec::new();
    for side in [Side::Firms, Side::Workers] {
        let ex = tarski::extremal_stable(mk, side, budget)?;
        let title = match side {
            Side::Firms => "firm-optimal",
            Side::Workers => "worker-optimal",
        };
        let mut v = t.show(title, &ex.matching);
        let verified = ex.optimality == Optimality::Verified;
        let _ = writeln!(t.text, "  verified against the stable set: {verified}");
        v["optimality"] = json!(ex.optimality);
        extremal.push(v);
    }

    let r = oracle::verify_lattice(mk, budget)?;
    let _ = writeln!(
        t.text,
        "\nstable set: {} matching(s), lattice verified: {}",
        r.stable_size,
        r.passed()
    );
    let value = json!({
        "example": name,
        "variant": mk.variant(),
        "inputs": inputs,
        "lambda": lambda_v,
        "gamma": gamma_v,
        "firm_operator": tf_v,
        "worker_operator": tw_v,
        "join": join_v,
        "meet": meet_v,
        "firm_optimal": extremal[0],
        "worker_optimal": extremal[1],
        "stable_set_size": r.stable_size,
        "lattice_verified": r.passed(),
    });
    Ok(Report::ok(value, t.text))
}
