//! One function per subcommand. Each returns a JSON report and whether the
//! checks passed; exit codes are decided by the caller.

use l0check::concat::{relative_cc_check, GlueResult};
use l0check::error::Error;
use l0check::evidence::{verify_base, SCHEMA};
use l0check::gauge::{roundtrip_check, RoundtripTarget};
use l0check::measure::{build_countable_partition, tail_cell_masses};
use l0check::seminorm::{axioms_check, AxiomFailure};
use l0check::syntax::Parser;
use l0check::topology::base_axiom_witnesses;
use l0check::{expr, Partition};
use serde_json::{json, Value};

use crate::config::RunConfig;

pub struct Outcome {
    pub report: Value,
    pub pass: bool,
    pub summary: String,
}

/// Failures that are not check results: bad input or unsupported requests.
#[derive(Debug)]
pub struct UsageError(pub String);

impl From<Error> for UsageError {
    fn from(e: Error) -> Self {
        UsageError(e.to_string())
    }
}

type CmdResult = Result<Outcome, UsageError>;

pub fn verify_counterexample(cfg: &RunConfig) -> CmdResult {
    let report = verify_base(&cfg.base, &cfg.params)?;
    let passed = report.steps.iter().filter(|s| s.pass).count();
    let summary = format!(
        "verdict {:?}: {passed}/{} steps pass",
        report.verdict,
        report.steps.len()
    );
    Ok(Outcome {
        pass: report.pass,
        report: serde_json::to_value(&report).expect("report serializes"),
        summary,
    })
}

pub fn eval(cfg: &RunConfig, expression: &str) -> CmdResult {
    let value = expr::eval(&cfg.space, expression).map_err(|e| UsageError(e.to_string()))?;
    let text = value.to_string();
    Ok(Outcome {
        report: json!({ "schema": SCHEMA, "command": "eval", "expr": expression, "value": text }),
        pass: true,
        summary: text,
    })
}

fn require<'a, T>(v: &'a Option<T>, what: &str, target: &str) -> Result<&'a T, UsageError> {
    v.as_ref()
        .ok_or_else(|| UsageError(format!("check {target} needs `{what}` in the config")))
}

pub fn check_axioms(cfg: &RunConfig) -> CmdResult {
    let s = require(&cfg.seminorm, "seminorm", "axioms")?;
    let r = axioms_check(s, cfg.params.samples, cfg.params.seed);
    let witnesses: Vec<Value> = r
        .witnesses
        .iter()
        .map(|w| match w {
            AxiomFailure::Homogeneity { xi, x } => {
                json!({ "kind": "homogeneity", "xi": xi.to_string(), "x": x.to_string() })
            }
            AxiomFailure::Triangle { x, y } => {
                json!({ "kind": "triangle", "x": x.to_string(), "y": y.to_string() })
            }
        })
        .collect();
    Ok(Outcome {
        pass: r.passed(),
        summary: format!(
            "axioms for {s}: {} homogeneity and {} triangle failures in {} samples",
            r.homogeneity_failures, r.triangle_failures, r.samples
        ),
        report: json!({
            "schema": SCHEMA,
            "command": "check",
            "target": "axioms",
            "seminorm": s.to_string(),
            "seed": cfg.params.seed,
            "samples": r.samples,
            "homogeneity_failures": r.homogeneity_failures,
            "triangle_failures": r.triangle_failures,
            "witnesses": witnesses,
            "pass": r.passed(),
        }),
    })
}

pub fn check_roundtrip(cfg: &RunConfig) -> CmdResult {
    let (target, label) = match (&cfg.seminorm, &cfg.set) {
        (Some(p), _) => (RoundtripTarget::Seminorm(p.clone()), json!({ "seminorm": p.to_string() })),
        (None, Some(u)) => (RoundtripTarget::Set(u.clone()), json!({ "set": u.to_string() })),
        (None, None) => return Err(UsageError("check roundtrip needs `seminorm` or `set` in the config".into())),
    };
    let r = roundtrip_check(&target, cfg.params.samples, cfg.params.seed)?;
    Ok(Outcome {
        pass: r.passed(),
        summary: format!(
            "roundtrip: {} gauge mismatches, {} membership disagreements, {} strict-inclusion failures",
            r.gauge_mismatches, r.membership_disagreements, r.strict_inclusion_failures
        ),
        report: json!({
            "schema": SCHEMA,
            "command": "check",
            "target": "roundtrip",
            "object": label,
            "seed": cfg.params.seed,
            "report": r,
            "witnesses": r.witnesses.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "pass": r.passed(),
        }),
    })
}

pub fn check_cc(cfg: &RunConfig) -> CmdResult {
    let set = require(&cfg.set, "set", "cc")?;
    let part = require(&cfg.partition, "part", "cc")?;
    if cfg.sequences.is_empty() {
        return Err(UsageError("check cc needs `seq.ec` or `seq.diag` in the config".into()));
    }
    let r = relative_cc_check(set, part, &cfg.sequences, cfg.params.horizon)?;
    let outcomes: Vec<Value> = r
        .outcomes
        .iter()
        .map(|o| {
            json!({
                "sequence": o.sequence.to_string(),
                "outside_at": o.outside_at,
                "glue": match &o.glue {
                    GlueResult::Representable(x) => json!(x.to_string()),
                    GlueResult::NotRepresentable(why) => json!({ "not_representable": why }),
                },
                "glue_check": o.glue_check,
                "glue_contained": o.glue_contained,
                "seminorm_identity": o.seminorm_identity,
                "cc_failure": o.is_cc_failure(),
            })
        })
        .collect();
    Ok(Outcome {
        pass: r.holds(),
        summary: format!(
            "relative countable concatenation: {} failures, {} precondition failures, {} identity failures",
            r.cc_failures, r.precondition_failures, r.identity_failures
        ),
        report: json!({
            "schema": SCHEMA,
            "command": "check",
            "target": "cc",
            "set": set.to_string(),
            "partition": part.to_string(),
            "horizon": cfg.params.horizon,
            "outcomes": outcomes,
            "cc_failures": r.cc_failures,
            "precondition_failures": r.precondition_failures,
            "identity_failures": r.identity_failures,
            "glue_failures": r.glue_failures,
            "pass": r.holds(),
        }),
    })
}

pub fn check_base(cfg: &RunConfig) -> CmdResult {
    let p = &cfg.params;
    let r = base_axiom_witnesses(&cfg.base, &p.epsilon, &p.delta, p.samples, p.seed)?;
    let checks: Vec<Value> = r
        .checks()
        .iter()
        .map(|c| {
            json!({
                "inclusion": c.name,
                "witness_radius": c.witness.to_string(),
                "samples": c.samples,
                "failures": c.failures,
                "counterexample": c.counterexample.as_ref().map(|pts| pts.iter().map(ToString::to_string).collect::<Vec<_>>()),
            })
        })
        .collect();
    Ok(Outcome {
        pass: r.passed(),
        summary: format!(
            "base axioms: {} failures over {} samples per inclusion",
            r.checks().iter().map(|c| c.failures).sum::<usize>(),
            p.samples
        ),
        report: json!({
            "schema": SCHEMA,
            "command": "check",
            "target": "base",
            "base": base_label(cfg),
            "epsilon": p.epsilon.to_string(),
            "delta": p.delta.to_string(),
            "seed": p.seed,
            "inclusions": checks,
            "pass": r.passed(),
        }),
    })
}

fn base_label(cfg: &RunConfig) -> Value {
    match &cfg.base {
        l0check::NeighborhoodBase::CounterexampleFamily => json!("m_plus_ball"),
        l0check::NeighborhoodBase::FromSeminorms(f) => {
            json!({ "from_seminorms": f.iter().map(ToString::to_string).collect::<Vec<_>>() })
        }
    }
}

/// Builds a singleton-tail partition and checks `P(C_n) = P(Ω')/2^n` for
/// `n ≤ horizon`.
pub fn partition(cfg: &RunConfig, spec: &str) -> CmdResult {
    let mut parser = Parser::new(spec);
    let part = parser
        .partition()
        .and_then(|p| parser.finish().map(|_| p))
        .map_err(|e| UsageError(format!("partition spec {e}")))?;
    let Partition::SingletonTail { prefix, tail_start } = part else {
        return Err(UsageError("partition spec must be singletons_from(...)".into()));
    };
    let part = build_countable_partition(&cfg.space, prefix, tail_start)?;
    let horizon = u32::try_from(cfg.params.horizon).unwrap_or(u32::MAX);
    let rows = tail_cell_masses(&cfg.space, &part, horizon);
    let pass = rows.iter().all(|r| r.holds());
    let prefix_cells = match &part {
        Partition::SingletonTail { prefix, .. } => prefix
            .iter()
            .map(|c| json!({ "cell": c.to_string(), "mass": cfg.space.probability(c).to_string() }))
            .collect::<Vec<_>>(),
        Partition::Finite(_) => Vec::new(),
    };
    Ok(Outcome {
        pass,
        summary: format!(
            "{part}: P(C_n) = P(Ω')/2^n {} for n ≤ {horizon}",
            if pass { "holds" } else { "fails" }
        ),
        report: json!({
            "schema": SCHEMA,
            "command": "partition",
            "partition": part.to_string(),
            "remainder_mass": cfg.space.probability(&l0check::EventSet::from_atom(tail_start)).to_string(),
            "prefix_cells": prefix_cells,
            "tail_cells": rows.iter().map(|r| json!({
                "n": r.n,
                "cell": r.cell.to_string(),
                "mass": r.mass.to_string(),
                "expected": r.expected.to_string(),
                "holds": r.holds(),
            })).collect::<Vec<_>>(),
            "pass": pass,
        }),
    })
}
