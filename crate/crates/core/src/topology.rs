//! Neighborhood bases at `θ` and the questions asked of the topologies they
//! generate, all answered through base-set membership.

use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::measure::{DiscreteSpace, EventSet};
use crate::rv::EcRv;
use crate::sample::Sampler;
use crate::scalar::{self, Scalar};
use crate::seminorm::{family_norm, family_weight, separates_points, Seminorm};
use crate::sets::SetDescriptor;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NeighborhoodBase {
    /// `{U_{Q,ε} : ε ∈ L⁰₊₊}` for a finite family `Q`.
    FromSeminorms(Vec<Seminorm>),
    /// `{U_ε = M + B_ε : ε ∈ L⁰₊₊}`.
    CounterexampleFamily,
}

impl NeighborhoodBase {
    /// The base set for radius `ε`.
    pub fn set(&self, epsilon: &EcRv) -> Result<SetDescriptor> {
        match self {
            NeighborhoodBase::FromSeminorms(family) => SetDescriptor::ball(family.clone(), epsilon.clone()),
            NeighborhoodBase::CounterexampleFamily => SetDescriptor::m_plus_ball(epsilon.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InclusionCheck {
    pub name: &'static str,
    /// The radius of the witness base set.
    pub witness: EcRv,
    pub samples: usize,
    pub failures: usize,
    /// First sampled points of the witness side that left the target.
    pub counterexample: Option<Vec<EcRv>>,
    /// First sampled points, kept for re-checking.
    pub first_sample: Option<Vec<EcRv>>,
}

impl InclusionCheck {
    fn new(name: &'static str, witness: EcRv, samples: usize) -> Self {
        InclusionCheck {
            name,
            witness,
            samples,
            failures: 0,
            counterexample: None,
            first_sample: None,
        }
    }

    fn record(&mut self, points: Vec<EcRv>, ok: bool) {
        if self.first_sample.is_none() {
            self.first_sample = Some(points.clone());
        }
        if !ok {
            self.failures += 1;
            self.counterexample.get_or_insert(points);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseAxiomReport {
    pub epsilon: EcRv,
    pub delta: EcRv,
    /// `U_{ε∧δ} ⊆ U_ε ∩ U_δ`.
    pub intersection: InclusionCheck,
    /// `U_{ε/2} + U_{ε/2} ⊆ U_ε`.
    pub sum: InclusionCheck,
    /// `ε·U_{δ/ε} ⊆ U_δ`.
    pub scaling: InclusionCheck,
}

impl BaseAxiomReport {
    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.failures == 0)
    }

    pub fn checks(&self) -> [&InclusionCheck; 3] {
        [&self.intersection, &self.sum, &self.scaling]
    }
}

/// Witness radii for the three base axioms, each inclusion verified on
/// `samples` points drawn from the witness side.
pub fn base_axiom_witnesses(
    base: &NeighborhoodBase,
    epsilon: &EcRv,
    delta: &EcRv,
    samples: usize,
    seed: u64,
) -> Result<BaseAxiomReport> {
    let u_eps = base.set(epsilon)?;
    let u_delta = base.set(delta)?;
    let meet = epsilon.min(delta);
    let halved = epsilon.scale(&scalar::ratio(1, 2));
    let quotient = delta * &epsilon.reciprocal()?;
    let u_meet = base.set(&meet)?;
    let u_half = base.set(&halved)?;
    let u_quot = base.set(&quotient)?;

    let mut rng = Sampler::new(seed);
    let mut intersection = InclusionCheck::new("intersection", meet, samples);
    let mut sum = InclusionCheck::new("sum", halved, samples);
    let mut scaling = InclusionCheck::new("scaling", quotient, samples);
    for _ in 0..samples {
        let u = draw(&u_meet, &mut rng);
        let ok = u_eps.contains(&u)? && u_delta.contains(&u)?;
        intersection.record(vec![u], ok);

        let (v, w) = (draw(&u_half, &mut rng), draw(&u_half, &mut rng));
        let ok = u_eps.contains(&(&v + &w))?;
        sum.record(vec![v, w], ok);

        let z = draw(&u_quot, &mut rng);
        let ok = u_delta.contains(&(epsilon * &z))?;
        scaling.record(vec![z], ok);
    }
    Ok(BaseAxiomReport {
        epsilon: epsilon.clone(),
        delta: delta.clone(),
        intersection,
        sum,
        scaling,
    })
}

fn draw(set: &SetDescriptor, rng: &mut Sampler) -> EcRv {
    set.sample_member(rng).expect("base sets always yield members")
}

/// `ε = |x|/2` on the support of `x` and `1` elsewhere, for `x ∉ M`.
pub fn separation_witness(x: &EcRv) -> Result<EcRv> {
    if x.in_m() {
        return Err(Error::PointInM);
    }
    Ok(half_or_one(&x.abs()))
}

fn half_or_one(v: &EcRv) -> EcRv {
    v.map(|a| if a.is_zero() { Scalar::one() } else { scalar::half(a) })
}

/// Re-checks a separation witness: `ε ∈ L⁰₊₊` and `x ∉ M + B_ε`.
pub fn separation_holds(x: &EcRv, epsilon: &EcRv) -> bool {
    epsilon.is_strictly_positive()
        && SetDescriptor::MPlusBall(epsilon.clone())
            .contains(x)
            .is_ok_and(|inside| !inside)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedSet {
    ZeroSingleton,
    SubmoduleM,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureVerdict {
    pub member: bool,
    /// For non-members: a radius `ε` with `(x + U_ε) ∩ seed = ∅`.
    pub witness: Option<EcRv>,
}

/// Whether `x` lies in the closure of `{θ}` or of `M`.
///
/// For the counterexample base both closures equal `M`. For a seminorm
/// family with combined weight `w`, the closure of `{θ}` is `{w·|x| = 0}` and
/// the closure of `M` is `{w·|x| vanishes at the tail}`.
pub fn closure_membership(base: &NeighborhoodBase, seed: SeedSet, x: &EcRv) -> ClosureVerdict {
    let weighted = match base {
        NeighborhoodBase::CounterexampleFamily => x.abs(),
        NeighborhoodBase::FromSeminorms(family) => family_norm(family, x),
    };
    let member = match (base, seed) {
        (NeighborhoodBase::FromSeminorms(_), SeedSet::ZeroSingleton) => weighted.is_zero(),
        _ => weighted.in_m(),
    };
    ClosureVerdict {
        member,
        witness: (!member).then(|| half_or_one(&weighted)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HausdorffReport {
    pub hausdorff: bool,
    /// A nonzero point in every sampled base set, when not Hausdorff.
    pub witness: Option<EcRv>,
    pub probes: Vec<MembershipProbe>,
    pub failures: usize,
}

/// A sampled membership fact: `contains(set, point) == expected`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipProbe {
    pub set: SetDescriptor,
    pub point: EcRv,
    pub expected: bool,
}

impl MembershipProbe {
    pub fn holds(&self) -> Result<bool> {
        Ok(self.set.contains(&self.point)? == self.expected)
    }
}

impl HausdorffReport {
    pub fn consistent(&self) -> bool {
        self.failures == 0
    }
}

/// Decides whether the generated topology is Hausdorff and backs the answer
/// with sampled checks: a nonzero point inside sampled base sets, or sampled
/// distinct pairs `x ≠ y` with `y ∉ x + U_ε` for `ε = w·|x − y|/2` (1 where
/// that vanishes).
pub fn hausdorff_report(base: &NeighborhoodBase, samples: usize, seed: u64) -> Result<HausdorffReport> {
    let mut rng = Sampler::new(seed);
    let witness = match base {
        NeighborhoodBase::CounterexampleFamily => {
            Some(EcRv::indicator(&EventSet::singleton(crate::measure::AtomId::new(1))))
        }
        NeighborhoodBase::FromSeminorms(family) if !separates_points(family) => {
            Some(EcRv::indicator(&family_weight(family).event_where(|v| v.is_zero())))
        }
        NeighborhoodBase::FromSeminorms(_) => None,
    };
    let mut report = HausdorffReport {
        hausdorff: witness.is_none(),
        witness: witness.clone(),
        probes: Vec::with_capacity(samples),
        failures: 0,
    };
    for _ in 0..samples {
        let probe = match (&witness, base) {
            (Some(m), _) => MembershipProbe {
                set: base.set(&rng.rv_positive())?,
                point: m.clone(),
                expected: true,
            },
            (None, NeighborhoodBase::FromSeminorms(family)) => {
                let (x, y) = distinct_pair(&mut rng);
                let eps = pair_separation_radius(family, &x, &y);
                MembershipProbe {
                    set: SetDescriptor::translate(x, base.set(&eps)?),
                    point: y,
                    expected: false,
                }
            }
            (None, NeighborhoodBase::CounterexampleFamily) => unreachable!("witness is always set"),
        };
        if !probe.holds()? {
            report.failures += 1;
        }
        report.probes.push(probe);
    }
    Ok(report)
}

/// The radius used to separate `y` from `x` under a seminorm family.
pub fn pair_separation_radius(family: &[Seminorm], x: &EcRv, y: &EcRv) -> EcRv {
    half_or_one(&family_norm(family, &(x - y)))
}

fn distinct_pair(rng: &mut Sampler) -> (EcRv, EcRv) {
    loop {
        let x = rng.rv();
        // near pairs matter most: half the time y differs from x at one atom
        let y = if rng.rng().gen_bool(0.5) {
            let j = rng.atom();
            let v = rng.rational();
            EcRv::new(x.overrides().clone().into_iter().chain([(j, v)]), x.tail().clone())
        } else {
            rng.rv()
        };
        if x != y {
            return (x, y);
        }
    }
}

/// `P(‖x‖_Q < ε) > 1 − λ`.
pub fn epslambda_membership(
    space: &DiscreteSpace,
    family: &[Seminorm],
    eps: &Scalar,
    lambda: &Scalar,
    x: &EcRv,
) -> Result<bool> {
    if !scalar::is_positive(eps) {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    if !scalar::is_positive(lambda) || *lambda >= Scalar::one() {
        return Err(Error::InvalidParameter("lambda must lie in (0, 1)".into()));
    }
    let event = family_norm(family, x).event_where(|v| v < eps);
    Ok(space.probability(&event) > Scalar::one() - lambda)
}
