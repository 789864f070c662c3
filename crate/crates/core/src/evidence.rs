//! Evidence reports: named steps, each carrying `eval` expressions that
//! re-check it from membership, order and probability alone.
//!
//! Reports are deterministic given the parameters; every sampled step draws
//! from its own seeded stream.

use serde::Serialize;
use serde_json::{json, Value};

use crate::concat::cc_failure_witness;
use crate::error::Result;
use crate::expr;
use crate::gauge::{default_tolerance, gauge_closed_form, gauge_upper_certificate, probe_range, unit_ball_of};
use crate::measure::{AtomId, DiscreteSpace, EventSet};
use crate::rv::EcRv;
use crate::sample::Sampler;
use crate::scalar::{self, Scalar};
use crate::seminorm::{axioms_check, Seminorm};
use crate::sets::{confirm_flags, SetDescriptor};
use crate::topology::{
    base_axiom_witnesses, closure_membership, hausdorff_report, separation_holds, separation_witness,
    NeighborhoodBase, SeedSet,
};

pub const SCHEMA: u32 = 1;

/// Random `(ε, δ)` pairs added to the configured one in the base-axiom step.
pub const RANDOM_BASE_PAIRS: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunParams {
    pub seed: u64,
    pub horizon: u64,
    pub samples: usize,
    pub tolerance: Scalar,
    pub epsilon: EcRv,
    pub delta: EcRv,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            seed: 42,
            horizon: 32,
            samples: 200,
            tolerance: default_tolerance(),
            epsilon: EcRv::one(),
            delta: EcRv::constant(scalar::ratio(1, 2)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Recheck {
    pub expr: String,
    pub expected: String,
}

impl Recheck {
    fn new(expr: String, expected: impl ToString) -> Self {
        Recheck {
            expr,
            expected: expected.to_string(),
        }
    }

    /// Evaluates the expression and compares the printed result.
    pub fn holds(&self, space: &DiscreteSpace) -> bool {
        expr::eval(space, &self.expr).is_ok_and(|v| v.to_string() == self.expected)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvidenceStep {
    pub name: String,
    pub inputs: Value,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
    pub rechecks: Vec<Recheck>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Induced,
    NotInduced,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvidenceReport {
    pub schema: u32,
    pub base: Value,
    pub verdict: Verdict,
    /// The inducing family, for `Induced`.
    pub family: Option<Vec<String>>,
    pub seed: u64,
    pub horizon: u64,
    pub samples: usize,
    pub tolerance: String,
    pub pass: bool,
    pub steps: Vec<EvidenceStep>,
}

impl EvidenceReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn rechecks(&self) -> impl Iterator<Item = (&str, &Recheck)> {
        self.steps
            .iter()
            .flat_map(|s| s.rechecks.iter().map(move |r| (s.name.as_str(), r)))
    }
}

fn base_json(base: &NeighborhoodBase) -> Value {
    match base {
        NeighborhoodBase::CounterexampleFamily => json!("m_plus_ball"),
        NeighborhoodBase::FromSeminorms(family) => json!({ "from_seminorms": family_strings(family) }),
    }
}

fn family_strings(family: &[Seminorm]) -> Vec<String> {
    family.iter().map(ToString::to_string).collect()
}

fn step(name: &str, inputs: Value, expected: &str, observed: String, pass: bool, rechecks: Vec<Recheck>) -> EvidenceStep {
    EvidenceStep {
        name: name.into(),
        inputs,
        expected: expected.into(),
        observed,
        pass,
        rechecks,
    }
}

fn contains_check(set: &SetDescriptor, x: &EcRv, expected: bool) -> Recheck {
    Recheck::new(format!("contains {set} {x}"), expected)
}

// Stream labels keep every step's randomness independent of the others.
const STREAM_BASE: u64 = 1;
const STREAM_FLAGS: u64 = 2;
const STREAM_GAUGE: u64 = 3;
const STREAM_MONOTONE: u64 = 4;
const STREAM_SEPARATION: u64 = 5;
const STREAM_CLOSURE: u64 = 6;
const STREAM_HAUSDORFF: u64 = 7;
const STREAM_CC: u64 = 8;
const STREAM_SEMINORM: u64 = 9;

fn sub_seed(seed: u64, stream: u64, k: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream << 32)
        .wrapping_add(k)
}

pub fn base_axioms_step(base: &NeighborhoodBase, params: &RunParams) -> Result<EvidenceStep> {
    let mut rng = Sampler::derived(params.seed, STREAM_BASE);
    let mut pairs = vec![(params.epsilon.clone(), params.delta.clone())];
    pairs.extend((0..RANDOM_BASE_PAIRS).map(|_| (rng.rv_positive(), rng.rv_positive())));
    let mut pass = true;
    let mut rows = Vec::new();
    let mut rechecks = Vec::new();
    for (k, (eps, delta)) in pairs.iter().enumerate() {
        let r = base_axiom_witnesses(base, eps, delta, params.samples, sub_seed(params.seed, STREAM_BASE, k as u64))?;
        pass &= r.passed();
        rows.push(json!({
            "epsilon": eps.to_string(),
            "delta": delta.to_string(),
            "witnesses": r.checks().map(|c| json!({
                "inclusion": c.name,
                "radius": c.witness.to_string(),
                "samples": c.samples,
                "failures": c.failures,
            })),
        }));
        let (u_eps, u_delta) = (base.set(eps)?, base.set(delta)?);
        if let Some(s) = &r.intersection.first_sample {
            rechecks.push(contains_check(&base.set(&r.intersection.witness)?, &s[0], true));
            rechecks.push(contains_check(&u_eps, &s[0], true));
            rechecks.push(contains_check(&u_delta, &s[0], true));
        }
        if let Some(s) = &r.sum.first_sample {
            let half = base.set(&r.sum.witness)?;
            rechecks.push(contains_check(&half, &s[0], true));
            rechecks.push(contains_check(&half, &s[1], true));
            rechecks.push(contains_check(&u_eps, &(&s[0] + &s[1]), true));
        }
        if let Some(s) = &r.scaling.first_sample {
            rechecks.push(contains_check(&base.set(&r.scaling.witness)?, &s[0], true));
            rechecks.push(contains_check(&u_delta, &(eps * &s[0]), true));
        }
    }
    let observed = format!(
        "{} radius pairs, {} samples per inclusion, {}",
        pairs.len(),
        params.samples,
        if pass { "no failures" } else { "failures found" }
    );
    Ok(step(
        "base_axioms",
        json!({ "pairs": rows }),
        "witness radii (ε∧δ, ε/2, δ/ε) satisfy the three base inclusions on every sample",
        observed,
        pass,
        rechecks,
    ))
}

pub fn structural_flags_step(base: &NeighborhoodBase, params: &RunParams) -> Result<EvidenceStep> {
    let set = base.set(&params.epsilon)?;
    let flags = set.structural_flags();
    let n = (params.samples / 4).max(1);
    let conf = confirm_flags(&set, n, sub_seed(params.seed, STREAM_FLAGS, 0));
    let all = flags.l0_convex && flags.l0_absorbent && flags.l0_balanced;
    let pass = all && conf.consistent_with(&flags);
    Ok(step(
        "structural_flags",
        json!({ "set": set.to_string(), "flags": flags, "samples": n }),
        "base set is L⁰-convex, L⁰-absorbent and L⁰-balanced",
        format!(
            "convex/balanced/absorbent sample failures: {}/{}/{}",
            conf.convex_failures, conf.balanced_failures, conf.absorbent_failures
        ),
        pass,
        Vec::new(),
    ))
}

/// `p_{U_ε} = θ`, each value certified by a witness `W` with `x ∈ W·U_ε` and
/// `W ≤ tol` on the probe atoms.
pub fn gauge_degeneracy_step(params: &RunParams) -> Result<EvidenceStep> {
    let mut rng = Sampler::derived(params.seed, STREAM_GAUGE);
    let probes = probe_range(params.horizon);
    let probe_event = EventSet::finite(probes.iter().copied());
    let tol = EcRv::constant(params.tolerance.clone());
    let mut pass = true;
    let mut rechecks = Vec::new();
    for _ in 0..params.samples {
        let set = SetDescriptor::m_plus_ball(rng.rv_positive())?;
        let x = rng.rv();
        let g = gauge_closed_form(&set, &x)?;
        let cert = gauge_upper_certificate(&set, &x, &probes, &params.tolerance)?;
        pass &= g.is_zero() && cert.verify().passed() && cert.witness.le_on(&tol, &probe_event);
        rechecks.push(Recheck::new(format!("gauge {set} {x}"), &g));
        rechecks.push(contains_check(
            &SetDescriptor::Scale(cert.witness.clone(), Box::new(set)),
            &x,
            true,
        ));
        rechecks.push(Recheck::new(format!("leq_on {probe_event} {} {tol}", cert.witness), true));
    }
    Ok(step(
        "gauge_degeneracy",
        json!({ "samples": params.samples, "probe_atoms": params.horizon, "tolerance": params.tolerance.to_string() }),
        "gauge of M + B_ε is θ; certified below tolerance at every probe atom",
        format!("{} (ε, x) pairs {}", params.samples, if pass { "certified" } else { "not all certified" }),
        pass,
        rechecks,
    ))
}

/// A point `m ∈ M` with `p(m) > 1`, for a nonzero seminorm `p`.
pub fn escape_point(p: &Seminorm) -> Option<EcRv> {
    let w = p.effective_weight();
    let support = w.support();
    if support.is_empty() {
        return None;
    }
    let j = (1..).map(AtomId::new).find(|&j| support.contains(j))?;
    let scale = scalar::int(2) / w.value_at(j);
    Some(EcRv::indicator(&EventSet::singleton(j)).scale(&scale))
}

/// A seminorm `p` of an inducing family would need `V_p = {p ≤ 1}` to contain
/// some `U_ε`, forcing `p = p_{V_p} ≤ p_{U_ε} = θ`. Sampled nonzero `p` fail
/// the containment through a point of `M` lying in every `U_ε`.
pub fn monotonicity_step(params: &RunParams) -> Result<EvidenceStep> {
    let mut rng = Sampler::derived(params.seed, STREAM_MONOTONE);
    let mut pass = true;
    let mut zero = 0;
    let mut rechecks = Vec::new();
    for _ in 0..params.samples {
        let p = rng.seminorm();
        let v = unit_ball_of(&p);
        let u = SetDescriptor::m_plus_ball(rng.rv_positive())?;
        match escape_point(&p) {
            None => {
                zero += 1;
                let x = rng.rv();
                let g = gauge_closed_form(&v, &x)?;
                pass &= g.is_zero() && v.contains(&x)?;
                rechecks.push(Recheck::new(format!("gauge {v} {x}"), &g));
            }
            Some(m) => {
                pass &= m.in_m() && u.contains(&m)? && !v.contains(&m)?;
                rechecks.push(Recheck::new(format!("in_m {m}"), true));
                rechecks.push(contains_check(&u, &m, true));
                rechecks.push(contains_check(&v, &m, false));
            }
        }
    }
    Ok(step(
        "monotonicity",
        json!({ "samples": params.samples }),
        "every sampled seminorm is θ or its unit ball misses a point of M ⊆ U_ε",
        format!(
            "{zero} zero seminorms with θ gauge; {} nonzero seminorms escaped by a point of M",
            params.samples - zero
        ),
        pass,
        rechecks,
    ))
}

/// `M` is closed and proper, and contains nonzero points.
pub fn nontriviality_step(params: &RunParams) -> Result<EvidenceStep> {
    let mut rng = Sampler::derived(params.seed, STREAM_SEPARATION);
    let mut pass = true;
    let mut rechecks = Vec::new();
    for _ in 0..params.samples {
        let x = rng.rv_not_in_m();
        let eps = separation_witness(&x)?;
        pass &= separation_holds(&x, &eps);
        rechecks.push(Recheck::new(format!("separation {x}"), &eps));
        rechecks.push(contains_check(&SetDescriptor::MPlusBall(eps), &x, false));
    }
    let m = EcRv::indicator(&EventSet::singleton(AtomId::new(1)));
    pass &= m.in_m() && !m.is_zero() && !EcRv::one().in_m();
    rechecks.push(Recheck::new(format!("in_m {m}"), true));
    rechecks.push(Recheck::new(format!("eq {m} {}", EcRv::zero()), false));
    rechecks.push(Recheck::new(format!("in_m {}", EcRv::one()), false));
    Ok(step(
        "nontriviality",
        json!({ "samples": params.samples, "nonzero_point_of_m": m.to_string() }),
        "M is closed (every sampled x ∉ M is separated) and proper, with a nonzero point",
        format!("{} separation witnesses {}", params.samples, if pass { "verified" } else { "failed" }),
        pass,
        rechecks,
    ))
}

pub fn closure_step(base: &NeighborhoodBase, params: &RunParams) -> EvidenceStep {
    let mut rng = Sampler::derived(params.seed, STREAM_CLOSURE);
    let mut pass = true;
    let mut rechecks = Vec::new();
    for i in 0..params.samples {
        let (x, seed_set) = if i % 2 == 0 {
            (rng.rv_in_m(), SeedSet::ZeroSingleton)
        } else {
            (rng.rv_not_in_m(), SeedSet::SubmoduleM)
        };
        let v = closure_membership(base, seed_set, &x);
        pass &= v.member == x.in_m();
        rechecks.push(Recheck::new(format!("in_m {x}"), v.member));
        if let Some(eps) = v.witness {
            pass &= separation_holds(&x, &eps);
            rechecks.push(contains_check(&SetDescriptor::MPlusBall(eps), &x, false));
        }
    }
    step(
        "closure",
        json!({ "samples": params.samples }),
        "closure of {θ} and of M is exactly M",
        format!("{} points classified", params.samples),
        pass,
        rechecks,
    )
}

pub fn hausdorff_step(base: &NeighborhoodBase, params: &RunParams) -> Result<EvidenceStep> {
    let r = hausdorff_report(base, params.samples, sub_seed(params.seed, STREAM_HAUSDORFF, 0))?;
    let expected_hausdorff = match base {
        NeighborhoodBase::CounterexampleFamily => false,
        NeighborhoodBase::FromSeminorms(f) => crate::seminorm::separates_points(f),
    };
    let rechecks = r
        .probes
        .iter()
        .map(|p| contains_check(&p.set, &p.point, p.expected))
        .collect();
    Ok(step(
        "hausdorff",
        json!({
            "samples": params.samples,
            "witness": r.witness.as_ref().map(ToString::to_string),
        }),
        if expected_hausdorff {
            "Hausdorff: sampled distinct pairs are separated"
        } else {
            "not Hausdorff: a nonzero point lies in every sampled base set"
        },
        format!("hausdorff={}, {} failed probes", r.hausdorff, r.failures),
        r.consistent() && r.hausdorff == expected_hausdorff,
        rechecks,
    ))
}

pub fn cc_failure_step(params: &RunParams) -> Result<EvidenceStep> {
    let mut rng = Sampler::derived(params.seed, STREAM_CC);
    let mut pass = true;
    let mut rechecks = Vec::new();
    for _ in 0..params.samples {
        let eps = rng.rv_positive();
        let w = cc_failure_witness(&eps, params.horizon)?;
        pass &= w.validates();
        rechecks.push(Recheck::new(format!("glue {} {}", w.sequence, w.partition), &w.glue));
        rechecks.push(contains_check(&w.set, &w.glue, false));
        let far = w.sequence.element(&w.partition, w.pieces_checked);
        rechecks.push(Recheck::new(format!("in_m {far}"), true));
        rechecks.push(contains_check(&w.set, &far, true));
    }
    Ok(step(
        "cc_failure",
        json!({ "samples": params.samples }),
        "pieces 2ε·Ĩ_{n} lie in M ⊆ U_ε but their glue 2ε does not",
        format!("{} witnesses {}", params.samples, if pass { "validated" } else { "not validated" }),
        pass,
        rechecks,
    ))
}

fn conclusion(verdict: Verdict, steps: &[EvidenceStep], family: Option<&[Seminorm]>) -> EvidenceStep {
    let pass = steps.iter().all(|s| s.pass);
    let (expected, observed) = match verdict {
        Verdict::NotInduced => (
            "no family of L⁰-seminorms induces the topology",
            "an inducing family could only contain θ, whose topology is trivial; \
             but M is a proper closed submodule, so the topology is not trivial",
        ),
        Verdict::Induced => (
            "the family induces the topology generated by its balls",
            "the base consists of the family's balls U_{Q,ε}",
        ),
    };
    step(
        "conclusion",
        json!({
            "from_steps": steps.iter().map(|s| s.name.clone()).collect::<Vec<_>>(),
            "family": family.map(family_strings),
        }),
        expected,
        observed.to_string(),
        pass,
        Vec::new(),
    )
}

pub fn seminorm_axioms_step(family: &[Seminorm], params: &RunParams) -> EvidenceStep {
    let mut pass = true;
    let mut rows = Vec::new();
    for (k, s) in family.iter().enumerate() {
        let r = axioms_check(s, params.samples, sub_seed(params.seed, STREAM_SEMINORM, k as u64));
        pass &= r.passed();
        rows.push(json!({
            "seminorm": s.to_string(),
            "homogeneity_failures": r.homogeneity_failures,
            "triangle_failures": r.triangle_failures,
        }));
    }
    step(
        "seminorm_axioms",
        json!({ "samples": params.samples, "members": rows }),
        "every member is an L⁰-seminorm",
        format!("{} members checked", family.len()),
        pass,
        Vec::new(),
    )
}

pub fn roundtrip_step(family: &[Seminorm], params: &RunParams) -> Result<EvidenceStep> {
    let mut rng = Sampler::derived(params.seed, STREAM_SEMINORM);
    let mut pass = true;
    let mut rechecks = Vec::new();
    for s in family {
        let v = unit_ball_of(s);
        for _ in 0..params.samples {
            let x = rng.rv();
            let g = gauge_closed_form(&v, &x)?;
            let norm = s.evaluate(&x);
            pass &= g == norm;
            if rechecks.len() < 2 * family.len() {
                rechecks.push(Recheck::new(format!("gauge {v} {x}"), &g));
                rechecks.push(Recheck::new(format!("norm {s} {x}"), &norm));
            }
        }
    }
    Ok(step(
        "roundtrip",
        json!({ "samples": params.samples }),
        "the gauge of each unit ball {p ≤ 1} is p",
        format!("{} points per member", params.samples),
        pass,
        rechecks,
    ))
}

fn report(base: &NeighborhoodBase, verdict: Verdict, params: &RunParams, steps: Vec<EvidenceStep>) -> EvidenceReport {
    let family = match base {
        NeighborhoodBase::FromSeminorms(f) => Some(family_strings(f)),
        NeighborhoodBase::CounterexampleFamily => None,
    };
    EvidenceReport {
        schema: SCHEMA,
        base: base_json(base),
        verdict,
        family,
        seed: params.seed,
        horizon: params.horizon,
        samples: params.samples,
        tolerance: params.tolerance.to_string(),
        pass: steps.iter().all(|s| s.pass),
        steps,
    }
}

/// The verdict alone: `Induced` for a seminorm base, otherwise `NotInduced`
/// backed by gauge degeneracy, monotonicity and nontriviality.
pub fn seminorm_induction_verdict(base: &NeighborhoodBase, params: &RunParams) -> Result<EvidenceReport> {
    let (verdict, mut steps) = verdict_steps(base, params)?;
    steps.push(conclusion(verdict, &steps, family_of(base)));
    Ok(report(base, verdict, params, steps))
}

fn family_of(base: &NeighborhoodBase) -> Option<&[Seminorm]> {
    match base {
        NeighborhoodBase::FromSeminorms(f) => Some(f),
        NeighborhoodBase::CounterexampleFamily => None,
    }
}

fn verdict_steps(base: &NeighborhoodBase, params: &RunParams) -> Result<(Verdict, Vec<EvidenceStep>)> {
    Ok(match base {
        NeighborhoodBase::CounterexampleFamily => (
            Verdict::NotInduced,
            vec![
                gauge_degeneracy_step(params)?,
                monotonicity_step(params)?,
                nontriviality_step(params)?,
            ],
        ),
        NeighborhoodBase::FromSeminorms(family) => (
            Verdict::Induced,
            vec![seminorm_axioms_step(family, params), roundtrip_step(family, params)?],
        ),
    })
}

/// Every check on the base followed by the verdict.
pub fn verify_base(base: &NeighborhoodBase, params: &RunParams) -> Result<EvidenceReport> {
    let mut steps = vec![base_axioms_step(base, params)?, structural_flags_step(base, params)?];
    if matches!(base, NeighborhoodBase::CounterexampleFamily) {
        steps.push(closure_step(base, params));
    }
    steps.push(hausdorff_step(base, params)?);
    if matches!(base, NeighborhoodBase::CounterexampleFamily) {
        steps.push(cc_failure_step(params)?);
    }
    let (verdict, verdict_steps) = verdict_steps(base, params)?;
    steps.extend(verdict_steps);
    steps.push(conclusion(verdict, &steps, family_of(base)));
    Ok(report(base, verdict, params, steps))
}
