//! Random gauge functions `p_U(x) = ∧{ξ ∈ L⁰₊₊ : x ∈ ξU}`.
//!
//! On a discrete space where every atom has positive mass the lattice
//! infimum of a family bounded below is the pointwise infimum, so gauges of
//! the supported shapes have exact closed forms:
//!
//! * a ball `{‖x‖ ≤ ε}` (after folding scalings and ball intersections) is
//!   `{ρ·|x| ≤ 1}` for a ratio `ρ ∈ L⁰₊`, with gauge `ρ·|x|`;
//! * `M + B_ε` and its scalings have gauge `θ`, since `Ĩ_{j}x ∈ M ⊆ δU_ε`
//!   for every `δ ∈ L⁰₊₊`.
//!
//! Closed forms are cross-checked by [`GaugeCertificate`]s, which are
//! re-verified through [`SetDescriptor::contains`] alone.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result, Site};
use crate::measure::AtomId;
use crate::rv::EcRv;
use crate::sample::Sampler;
use crate::scalar::{self, Scalar};
use crate::seminorm::{family_weight, Seminorm};
use crate::sets::SetDescriptor;

/// Normal form of a gauge-supported set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GaugeShape {
    /// `{x : ρ·|x| ≤ 1}`.
    BallLike { ratio: EcRv },
    /// `M + B_ε`.
    MPlus { radius: EcRv },
}

impl GaugeShape {
    pub fn of(set: &SetDescriptor) -> Result<Self> {
        match set {
            SetDescriptor::Ball { family, radius } => Ok(GaugeShape::BallLike {
                ratio: &family_weight(family) * &radius.reciprocal()?,
            }),
            SetDescriptor::MPlusBall(radius) => Ok(GaugeShape::MPlus {
                radius: radius.clone(),
            }),
            // ξ(ρ|x| ≤ 1) = {ρ|x|/|ξ| ≤ 1};  ξ(M + B_ε) = M + B_{|ξ|ε}
            SetDescriptor::Scale(xi, inner) => {
                let scale = xi.abs();
                Ok(match GaugeShape::of(inner)? {
                    GaugeShape::BallLike { ratio } => GaugeShape::BallLike {
                        ratio: &ratio * &scale.reciprocal()?,
                    },
                    GaugeShape::MPlus { radius } => GaugeShape::MPlus {
                        radius: &radius * &scale,
                    },
                })
            }
            SetDescriptor::Intersect(members) => {
                let mut ratio = EcRv::zero();
                for m in members {
                    match GaugeShape::of(m)? {
                        GaugeShape::BallLike { ratio: r } => ratio = ratio.max(&r),
                        GaugeShape::MPlus { .. } => {
                            return Err(Error::UnsupportedShape(
                                "intersect with a non-ball member".into(),
                            ))
                        }
                    }
                }
                Ok(GaugeShape::BallLike { ratio })
            }
            SetDescriptor::Translate(..) => Err(Error::UnsupportedShape("translate".into())),
        }
    }

    pub fn gauge(&self, x: &EcRv) -> EcRv {
        match self {
            GaugeShape::BallLike { ratio } => ratio * &x.abs(),
            GaugeShape::MPlus { .. } => EcRv::zero(),
        }
    }
}

pub fn gauge_closed_form(set: &SetDescriptor, x: &EcRv) -> Result<EcRv> {
    Ok(GaugeShape::of(set)?.gauge(x))
}

/// Witness that `p_S(x) ≤ witness`, tight to `tolerance` at the probe atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaugeCertificate {
    pub target_set: SetDescriptor,
    pub point: EcRv,
    pub witness: EcRv,
    pub probe_atoms: Vec<AtomId>,
    pub claimed_bound: EcRv,
    pub tolerance: Scalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CertificateCheck {
    pub witness_positive: bool,
    /// `point ∈ witness · target_set`.
    pub membership: bool,
    /// `witness(j) ≤ claimed_bound(j) + tolerance` at every probe atom.
    pub tight: bool,
}

impl CertificateCheck {
    pub fn passed(&self) -> bool {
        self.witness_positive && self.membership && self.tight
    }
}

impl GaugeCertificate {
    /// Re-checks the certificate from membership and order alone.
    pub fn verify(&self) -> CertificateCheck {
        let witness_positive = self.witness.is_strictly_positive();
        let membership = witness_positive
            && SetDescriptor::Scale(self.witness.clone(), Box::new(self.target_set.clone()))
                .contains(&self.point)
                .unwrap_or(false);
        let slack = self.claimed_bound.map(|v| v + &self.tolerance);
        let tight = self
            .probe_atoms
            .iter()
            .all(|&j| self.witness.value_at(j) <= slack.value_at(j));
        CertificateCheck {
            witness_positive,
            membership,
            tight,
        }
    }
}

/// Probe atoms `1..=horizon`.
pub fn probe_range(horizon: u64) -> Vec<AtomId> {
    (1..=horizon).map(AtomId::new).collect()
}

/// Default tolerance `2^-20`.
pub fn default_tolerance() -> Scalar {
    scalar::dyadic(20)
}

/// Builds an upper certificate with slack `tol/2` over the closed form at
/// each probe atom.
pub fn gauge_upper_certificate(
    set: &SetDescriptor,
    x: &EcRv,
    probe_atoms: &[AtomId],
    tol: &Scalar,
) -> Result<GaugeCertificate> {
    if *tol <= Scalar::zero() {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let shape = GaugeShape::of(set)?;
    let bound = shape.gauge(x);
    let slack = scalar::half(tol);
    let witness = match &shape {
        GaugeShape::BallLike { .. } => bound.map(|v| v + &slack),
        GaugeShape::MPlus { radius } => {
            // only the tail matters for M + B_ε membership
            let tail = if x.tail().is_zero() {
                slack.clone()
            } else {
                num_traits::Signed::abs(x.tail()) / radius.tail()
            };
            EcRv::new(probe_atoms.iter().map(|&j| (j, slack.clone())), tail)
        }
    };
    Ok(GaugeCertificate {
        target_set: set.clone(),
        point: x.clone(),
        witness,
        probe_atoms: probe_atoms.to_vec(),
        claimed_bound: bound,
        tolerance: tol.clone(),
    })
}

/// Either an `L⁰`-seminorm `p` (checked through `V = {p ≤ 1}`) or a set `U`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoundtripTarget {
    Seminorm(Seminorm),
    Set(SetDescriptor),
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct RoundtripReport {
    pub samples: usize,
    /// `p_V(x) ≠ p(x)`; seminorm targets only.
    pub gauge_mismatches: usize,
    /// `x ∈ U` disagreeing with `p_U(x) ≤ 1`.
    pub membership_disagreements: usize,
    /// Samples with `p_U(x) < 1` on all of `Ω`.
    pub strict_cases: usize,
    /// `p_U(x) < 1` on `Ω` but `x ∉ U`.
    pub strict_inclusion_failures: usize,
    pub inside_samples: usize,
    pub boundary_samples: usize,
    #[serde(skip)]
    pub witnesses: Vec<EcRv>,
}

impl RoundtripReport {
    pub fn passed(&self) -> bool {
        self.gauge_mismatches == 0
            && self.membership_disagreements == 0
            && self.strict_inclusion_failures == 0
    }
}

/// `V = {x : p(x) ≤ 1}`.
pub fn unit_ball_of(p: &Seminorm) -> SetDescriptor {
    SetDescriptor::Ball {
        family: vec![p.clone()],
        radius: EcRv::one(),
    }
}

/// Checks `p_V = p`, `{p_U ≤ 1} = U` and `{p_U < 1 on Ω} ⊆ U` on random
/// points: a third arbitrary, a third drawn from `U`, a third rescaled so the
/// gauge is exactly 1 wherever it is nonzero.
pub fn roundtrip_check(target: &RoundtripTarget, samples: usize, seed: u64) -> Result<RoundtripReport> {
    let (set, seminorm) = match target {
        RoundtripTarget::Seminorm(p) => (unit_ball_of(p), Some(p)),
        RoundtripTarget::Set(u) => (u.clone(), None),
    };
    let shape = GaugeShape::of(&set)?;
    let mut rng = Sampler::new(seed);
    let mut report = RoundtripReport {
        samples,
        ..RoundtripReport::default()
    };
    let one = Scalar::from_integer(1.into());
    for i in 0..samples {
        let x = match i % 3 {
            0 => rng.rv(),
            1 => set.sample_member(&mut rng).unwrap_or_else(|| rng.rv()),
            _ => {
                let x = rng.rv();
                let g = shape.gauge(&x);
                let unit = g.map(|v| if v.is_zero() { one.clone() } else { v.recip() });
                &x * &unit
            }
        };
        let g = shape.gauge(&x);
        if let Some(p) = seminorm {
            if g != p.evaluate(&x) {
                report.gauge_mismatches += 1;
                report.witnesses.push(x.clone());
            }
        }
        let inside = set.contains(&x)?;
        let below_one = g.le(&EcRv::one());
        if inside {
            report.inside_samples += 1;
        }
        if g.sites().any(|(_, v)| *v == one) {
            report.boundary_samples += 1;
        }
        if inside != below_one {
            report.membership_disagreements += 1;
            report.witnesses.push(x.clone());
        }
        if g.lt(&EcRv::one()) {
            report.strict_cases += 1;
            if !inside {
                report.strict_inclusion_failures += 1;
                report.witnesses.push(x.clone());
            }
        }
    }
    Ok(report)
}

/// Where `p_S(x) < 1` fails, if anywhere.
pub fn gauge_below_one_violation(set: &SetDescriptor, x: &EcRv) -> Result<Option<Site>> {
    let g = gauge_closed_form(set, x)?;
    Ok(g.find_violation(|v| *v < Scalar::from_integer(1.into())))
}
