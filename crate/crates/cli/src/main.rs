//! `mlat`: stable-matching lattice operations from the command line.
//!
//! Exit codes: 0 on success, 1 on domain errors and failed validations, 2
//! on usage errors.

mod demo;
mod report;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use matching_lattice::io::{self, LoadedMarket, MarketSpec};
use matching_lattice::market::{validate_market, ValidationOptions};
use matching_lattice::matching::*;
use matching_lattice::oracle::{self, EnumerationBudget, RandomSpec};
use matching_lattice::replica;
use matching_lattice::tarski::{self, TarskiOptions};
use matching_lattice::{Error, Matching, Side, Variant};
use serde_json::{json, Value};

use report::{envelope, Report};

#[derive(Parser)]
#[command(name = "mlat", version, about = "Joins and meets of stable matchings")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Firms,
    Workers,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Firms => Side::Firms,
            SideArg::Workers => Side::Workers,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
#[allow(clippy::enum_variant_names)]
enum VariantArg {
    ManyToOne,
    ManyToManyResponsive,
    ManyToManySub,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::ManyToOne => Variant::ManyToOne,
            VariantArg::ManyToManyResponsive => Variant::ManyToManyResponsive,
            VariantArg::ManyToManySub => Variant::ManyToManySub,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    Example1,
    Example2,
}

/// A market file. Matching arguments next to it are paths, or `@name` for
/// a matching bundled in the market file.
#[derive(Args)]
struct MarketArg {
    market: PathBuf,
}

#[derive(Args)]
struct Checks {
    /// Skip exhaustive subset checks and rely on substitutability.
    #[arg(long)]
    assume_substitutable: bool,
}

#[derive(Args)]
struct BudgetArg {
    /// Most matchings or search nodes an enumeration may visit.
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
}

impl BudgetArg {
    fn get(&self) -> EnumerationBudget {
        EnumerationBudget::with_max_matchings(self.budget)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check every choice function for substitutability, consistency and
    /// path independence.
    Validate {
        #[command(flatten)]
        m: MarketArg,
        #[command(flatten)]
        checks: Checks,
    },
    /// Individual rationality, stability and blocking pairs.
    StableCheck {
        #[command(flatten)]
        m: MarketArg,
        matching: String,
    },
    /// Worker- and firm-quasi-stability.
    QuasiCheck {
        #[command(flatten)]
        m: MarketArg,
        matching: String,
        /// The protected side; both are reported when omitted.
        #[arg(long, value_enum)]
        side: Option<SideArg>,
        #[command(flatten)]
        checks: Checks,
    },
    /// Least upper bound of two stable matchings.
    Join(OpArgs),
    /// Greatest lower bound of two stable matchings.
    Meet(OpArgs),
    /// Apply one side's operator until it reaches a fixed point.
    Iterate {
        #[command(flatten)]
        m: MarketArg,
        matching: String,
        /// The operator: `firms` runs T^F from a worker-quasi-stable
        /// matching, `workers` runs T^W from a firm-quasi-stable one.
        #[arg(long, value_enum, default_value_t = SideArg::Firms)]
        side: SideArg,
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        checks: Checks,
    },
    /// The stable matching best for one side, reached from the empty
    /// matching.
    Extremal {
        #[command(flatten)]
        m: MarketArg,
        #[arg(long, value_enum, default_value_t = SideArg::Firms)]
        side: SideArg,
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        budget: BudgetArg,
    },
    /// List matchings as JSON lines with predicate flags.
    Enumerate {
        #[command(flatten)]
        m: MarketArg,
        /// Only stable matchings, found by a pruned search that also works
        /// above the raw enumeration limits.
        #[arg(long)]
        stable: bool,
        #[command(flatten)]
        budget: BudgetArg,
    },
    /// Check that the stable set is a lattice and that the Tarski
    /// operations agree with brute force.
    VerifyLattice {
        #[command(flatten)]
        m: MarketArg,
        #[command(flatten)]
        budget: BudgetArg,
    },
    /// Move between a responsive many-to-many market and its related
    /// many-to-one market.
    Replica {
        #[command(subcommand)]
        command: ReplicaCommand,
    },
    /// A seeded random market with substitutable choice functions.
    Random {
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[arg(long)]
        firms: usize,
        #[arg(long)]
        workers: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.75)]
        density: f64,
        #[arg(long, default_value_t = 2)]
        max_quota: usize,
    },
    /// Replay a bundled example end to end.
    Demo {
        #[arg(value_enum)]
        example: Example,
    },
}

#[derive(Args)]
struct OpArgs {
    #[command(flatten)]
    m: MarketArg,
    first: String,
    second: String,
    /// The order: `firms` for the firms' Blair order, `workers` for the
    /// workers' order.
    #[arg(long, value_enum, default_value_t = SideArg::Firms)]
    side: SideArg,
    /// Include the candidate and every operator step.
    #[arg(long)]
    trace: bool,
}

#[derive(Subcommand)]
enum ReplicaCommand {
    /// The related many-to-one market, in the market file schema.
    Build {
        #[command(flatten)]
        m: MarketArg,
    },
    /// Bundle a related-market matching back into the source market.
    Phi {
        #[command(flatten)]
        m: MarketArg,
        /// A matching of the related market (replica ids such as `w1#2`).
        matching: PathBuf,
    },
    /// The related-market matching of a stable source matching.
    PhiInverse {
        #[command(flatten)]
        m: MarketArg,
        matching: String,
        /// Accept any matching and return its canonical preimage.
        #[arg(long)]
        preimage: bool,
    },
    /// Join computed in the related market and carried back.
    Join(OpArgs),
    /// Meet computed in the related market and carried back.
    Meet(OpArgs),
}

type Outcome = Result<Report, Error>;

fn load(m: &MarketArg) -> Result<LoadedMarket, Error> {
    io::load_market(&m.market)
}

fn resolve(l: &LoadedMarket, arg: &str) -> Result<Matching, Error> {
    match arg.strip_prefix('@') {
        Some(name) => l.matching(name).cloned(),
        None => io::load_matching(arg, &l.market),
    }
}

fn matching_value(l: &LoadedMarket, mu: &Matching) -> Value {
    io::matching_to_json(&l.market, mu)
}

fn validate(m: &MarketArg, checks: &Checks) -> Outcome {
    let text = std::fs::read_to_string(&m.market)?;
    let spec = MarketSpec::parse(&text)?;
    let referential = spec.referential_issues();
    if !referential.is_empty() {
        let mut out = String::new();
        for issue in &referential {
            let _ = writeln!(out, "{issue}");
        }
        let message = referential[0].clone();
        return Ok(Report::failed(
            json!({"passed": false, "referential": referential}),
            out,
            "ReferentialIntegrity",
            message,
        ));
    }
    let l = spec.build()?;
    let opts = ValidationOptions {
        assume_substitutable: checks.assume_substitutable,
        ..ValidationOptions::default()
    };
    let r = validate_market(&l.market, opts)?;
    let value = report::validation_json(&l.market, &r);
    let text = report::validation_text(&l.market, &r);
    let first = r.failures().next().map(|(a, c)| {
        format!(
            "{} {} fails {}",
            a.side,
            l.market.name(a.side, a.agent),
            report::axiom_name(c.axiom)
        )
    });
    Ok(match first {
        None => Report::ok(value, text),
        Some(message) => Report::failed(value, text, "ValidationFailed", message),
    })
}

fn stable_check(m: &MarketArg, matching: &str) -> Outcome {
    let l = load(m)?;
    let mk = &l.market;
    let mu = resolve(&l, matching)?;
    let ir = is_individually_rational(mk, &mu);
    let stable = is_stable(mk, &mu);
    let value = json!({
        "matching": matching_value(&l, &mu),
        "individually_rational": ir,
        "stable": stable,
        "blocking_pairs": report::pairs_json(mk, &mu),
    });
    let text = format!(
        "{}\nindividually rational: {ir}\nstable: {stable}\nblocking pairs: {}\n",
        mu.display(mk),
        report::pairs_text(mk, &mu)
    );
    Ok(Report::ok(value, text))
}

fn quasi_opts(checks: &Checks) -> QuasiOptions {
    QuasiOptions {
        assume_substitutable: checks.assume_substitutable,
        ..QuasiOptions::default()
    }
}

fn quasi_check(m: &MarketArg, matching: &str, side: Option<SideArg>, checks: &Checks) -> Outcome {
    let l = load(m)?;
    let mu = resolve(&l, matching)?;
    let opts = quasi_opts(checks);
    let sides: Vec<Side> = match side {
        Some(s) => vec![s.into()],
        None => vec![Side::Workers, Side::Firms],
    };
    let mut value = json!({"matching": matching_value(&l, &mu)});
    let mut text = format!("{}\n", mu.display(&l.market));
    for s in sides {
        let q = is_quasi_stable(&l.market, &mu, s, opts)?;
        let key = match s {
            Side::Workers => "worker_quasi_stable",
            Side::Firms => "firm_quasi_stable",
        };
        value[key] = json!(q);
        let _ = writeln!(
            text,
            "{}: {q}",
            key.replace("_quasi_", "-quasi-").replace('_', " ")
        );
    }
    Ok(Report::ok(value, text))
}

fn op_report(l: &LoadedMarket, args: &OpArgs, trace: tarski::OperatorTrace) -> Report {
    let mk = &l.market;
    let result = trace.fixed_point().clone();
    let mut value = json!({"matching": matching_value(l, &result)});
    let mut text = format!("{}\n", result.display(mk));
    if args.trace {
        value["candidate"] = matching_value(l, &trace.steps[0]);
        value["operator"] = json!(trace.side);
        value["trace"] = report::trace_json(mk, &trace);
        let _ = write!(
            text,
            "candidate ({} operator follows):\n{}",
            trace.side,
            report::trace_text(mk, &trace)
        );
    }
    Report::ok(value, text)
}

fn lattice_op(args: &OpArgs, join: bool) -> Outcome {
    let l = load(&args.m)?;
    let (a, b) = (resolve(&l, &args.first)?, resolve(&l, &args.second)?);
    let trace = tarski::stable_op_traced(&l.market, args.side.into(), join, &a, &b)?;
    Ok(op_report(&l, args, trace))
}

fn iterate(m: &MarketArg, matching: &str, side: SideArg, trace: bool, checks: &Checks) -> Outcome {
    let l = load(m)?;
    let mk = &l.market;
    let mu = resolve(&l, matching)?;
    let opts = TarskiOptions {
        quasi: quasi_opts(checks),
        check_preconditions: true,
    };
    let t = tarski::iterate_to_fixed_point(mk, &mu, side.into(), opts)?;
    let fixed = t.fixed_point();
    let mut value = json!({
        "matching": matching_value(&l, fixed),
        "steps": t.step_count(),
        "stable": is_stable(mk, fixed),
    });
    let mut text = format!(
        "{}\nsteps: {}\nstable: {}\n",
        fixed.display(mk),
        t.step_count(),
        is_stable(mk, fixed)
    );
    if trace {
        value["trace"] = report::trace_json(mk, &t);
        text.push_str(&report::trace_text(mk, &t));
    }
    Ok(Report::ok(value, text))
}

fn extremal(m: &MarketArg, side: SideArg, trace: bool, budget: &BudgetArg) -> Outcome {
    let l = load(m)?;
    let mk = &l.market;
    let ex = tarski::extremal_stable(mk, side.into(), budget.get())?;
    let mut value = json!({
        "matching": matching_value(&l, &ex.matching),
        "steps": ex.trace.step_count(),
        "optimality": ex.optimality,
    });
    let mut text = format!(
        "{}\nsteps: {}\noptimality: {:?}\n",
        ex.matching.display(mk),
        ex.trace.step_count(),
        ex.optimality
    )
    .replace("Verified", "verified")
    .replace("NotOptimal", "not optimal")
    .replace("Unverified", "unverified");
    if trace {
        value["trace"] = report::trace_json(mk, &ex.trace);
        text.push_str(&report::trace_text(mk, &ex.trace));
    }
    Ok(Report::ok(value, text))
}

/// Streams one line per matching, then a closing summary.
fn enumerate(
    m: &MarketArg,
    stable_only: bool,
    budget: &BudgetArg,
    format: Format,
) -> Result<ExitCode, Error> {
    let l = load(m)?;
    let mk = &l.market;
    let q = QuasiOptions::default();
    let all: Box<dyn Iterator<Item = Matching>> = if stable_only {
        Box::new(oracle::enumerate_stable(mk, budget.get())?.into_iter())
    } else {
        Box::new(oracle::enumerate_matchings(mk, budget.get())?)
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut count = 0usize;
    for mu in all {
        let ir = is_individually_rational(mk, &mu);
        let wq = is_quasi_stable(mk, &mu, Side::Workers, q)?;
        let fq = is_quasi_stable(mk, &mu, Side::Firms, q)?;
        let stable = is_stable(mk, &mu);
        let line = match format {
            Format::Json => json!({
                "index": count,
                "matching": matching_value(&l, &mu),
                "individually_rational": ir,
                "stable": stable,
                "worker_quasi_stable": wq,
                "firm_quasi_stable": fq,
            })
            .to_string(),
            Format::Text => format!(
                "#{count} ir={ir} stable={stable} worker_quasi_stable={wq} firm_quasi_stable={fq}\n{}\n",
                mu.display(mk)
            ),
        };
        if writeln!(out, "{line}").is_err() {
            return Ok(ExitCode::SUCCESS);
        }
        count += 1;
    }
    let _ = match format {
        Format::Json => writeln!(out, "{}", envelope(json!({"count": count}), None)),
        Format::Text => writeln!(out, "{count} matching(s)"),
    };
    Ok(ExitCode::SUCCESS)
}

fn verify_lattice(m: &MarketArg, budget: &BudgetArg) -> Outcome {
    let l = load(m)?;
    let r = oracle::verify_lattice(&l.market, budget.get())?;
    let mut value = serde_json::to_value(&r).expect("plain data");
    value["passed"] = json!(r.passed());
    value["stable"] = io::matchings_to_json(&l.market, &r.stable);
    let text = format!(
        "stable matchings: {}\nbounds exist: {}\nlattice axioms: {}\nduality: {}\ntarski agrees: {}\n{}\n",
        r.stable_size,
        r.bounds_exist,
        r.axioms_hold,
        r.duality_holds,
        r.tarski_agrees,
        if r.passed() { "lattice verified" } else { "lattice check failed" }
    );
    Ok(if r.passed() {
        Report::ok(value, text)
    } else {
        Report::failed(
            value,
            text,
            "LatticeCheckFailed",
            "lattice check failed".into(),
        )
    })
}

fn replica_cmd(cmd: &ReplicaCommand) -> Outcome {
    match cmd {
        ReplicaCommand::Build { m } => {
            let l = load(m)?;
            let rm = replica::build_related_market(&l.market)?;
            let value = io::market_to_json(&rm.market)?;
            let text = pretty(&value);
            Ok(Report::ok(value, text))
        }
        ReplicaCommand::Phi { m, matching } => {
            let l = load(m)?;
            let rm = replica::build_related_market(&l.market)?;
            let nu = io::load_matching(matching, &rm.market)?;
            let mu = replica::phi(&rm, &nu);
            Ok(Report::ok(
                matching_value(&l, &mu),
                format!("{}\n", mu.display(&l.market)),
            ))
        }
        ReplicaCommand::PhiInverse {
            m,
            matching,
            preimage,
        } => {
            let l = load(m)?;
            let rm = replica::build_related_market(&l.market)?;
            let mu = resolve(&l, matching)?;
            let nu = if *preimage {
                replica::phi_preimage(&rm, &mu)?
            } else {
                replica::phi_inverse_stable(&rm, &mu)?
            };
            Ok(Report::ok(
                io::matching_to_json(&rm.market, &nu),
                format!("{}\n", nu.display(&rm.market)),
            ))
        }
        ReplicaCommand::Join(args) | ReplicaCommand::Meet(args) => {
            let join = matches!(cmd, ReplicaCommand::Join(_));
            let l = load(&args.m)?;
            let rm = replica::build_related_market(&l.market)?;
            let (a, b) = (resolve(&l, &args.first)?, resolve(&l, &args.second)?);
            let mu = match (Side::from(args.side), join) {
                (Side::Firms, true) => replica::lifted_join_firms(&rm, &a, &b)?,
                (Side::Firms, false) => replica::lifted_meet_firms(&rm, &a, &b)?,
                (Side::Workers, true) => replica::lifted_join_workers(&rm, &a, &b)?,
                (Side::Workers, false) => replica::lifted_meet_workers(&rm, &a, &b)?,
            };
            Ok(Report::ok(
                matching_value(&l, &mu),
                format!("{}\n", mu.display(&l.market)),
            ))
        }
    }
}

fn random(
    variant: VariantArg,
    firms: usize,
    workers: usize,
    seed: u64,
    density: f64,
    max_quota: usize,
) -> Outcome {
    let mut spec = RandomSpec::new(variant.into(), firms, workers);
    spec.density = density;
    spec.max_quota = max_quota;
    let mk = oracle::random_market(seed, &spec)?;
    let value = io::market_to_json(&mk)?;
    let text = pretty(&value);
    Ok(Report::ok(value, text))
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Validate { m, checks } => validate(m, checks),
        Command::StableCheck { m, matching } => stable_check(m, matching),
        Command::QuasiCheck {
            m,
            matching,
            side,
            checks,
        } => quasi_check(m, matching, *side, checks),
        Command::Join(args) => lattice_op(args, true),
        Command::Meet(args) => lattice_op(args, false),
        Command::Iterate {
            m,
            matching,
            side,
            trace,
            checks,
        } => iterate(m, matching, *side, *trace, checks),
        Command::Extremal {
            m,
            side,
            trace,
            budget,
        } => extremal(m, *side, *trace, budget),
        Command::Enumerate { .. } => unreachable!("streamed"),
        Command::VerifyLattice { m, budget } => verify_lattice(m, budget),
        Command::Replica { command } => replica_cmd(command),
        Command::Random {
            variant,
            firms,
            workers,
            seed,
            density,
            max_quota,
        } => random(*variant, *firms, *workers, *seed, *density, *max_quota),
        Command::Demo { example } => demo::run(*example),
    }
}

/// Write to stdout, ignoring a closed pipe.
fn out(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("plain data") + "\n"
}

fn emit(format: Format, report: &Report) {
    match format {
        Format::Json => out(&pretty(&envelope(
            report.value.clone(),
            report.failure.as_ref(),
        ))),
        Format::Text => {
            out(&report.text);
            if let Some(f) = &report.failure {
                eprintln!("error: {}", f.message);
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let outcome = match &cli.command {
        Command::Enumerate { m, stable, budget } => match enumerate(m, *stable, budget, cli.format)
        {
            Ok(code) => return code,
            Err(e) => Err(e),
        },
        _ => run(&cli),
    };
    match outcome {
        Ok(report) => {
            emit(cli.format, &report);
            if report.failure.is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            let failure = report::Failure::from(&e);
            match cli.format {
                Format::Json => out(&pretty(&envelope(Value::Null, Some(&failure)))),
                Format::Text => eprintln!("error: {}", failure.message),
            }
            ExitCode::from(1)
        }
    }
}
