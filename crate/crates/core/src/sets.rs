//! Decidable descriptors for the `L⁰`-convex sets used by the constructions:
//! seminorm balls, `M + B_ε`, scalings, translates and finite intersections.

use num_traits::{Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::AtomId;
use crate::rv::EcRv;
use crate::sample::Sampler;
use crate::scalar::{self, Scalar};
use crate::seminorm::{family_norm, family_weight, Seminorm};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SetDescriptor {
    /// `U_{Q,ε} = {x : ‖x‖ ≤ ε for all ‖·‖ ∈ Q}`.
    Ball { family: Vec<Seminorm>, radius: EcRv },
    /// `U_ε = M + B_ε` where `M` is the finitely supported elements and
    /// `B_ε = {x : |x| ≤ ε}`.
    MPlusBall(EcRv),
    /// `ξS`.
    Scale(EcRv, Box<SetDescriptor>),
    /// `y + S`.
    Translate(EcRv, Box<SetDescriptor>),
    Intersect(Vec<SetDescriptor>),
}

impl SetDescriptor {
    pub fn ball(family: Vec<Seminorm>, radius: EcRv) -> Result<Self> {
        let s = SetDescriptor::Ball { family, radius };
        s.validate()?;
        Ok(s)
    }

    pub fn m_plus_ball(radius: EcRv) -> Result<Self> {
        let s = SetDescriptor::MPlusBall(radius);
        s.validate()?;
        Ok(s)
    }

    pub fn scale(xi: EcRv, inner: SetDescriptor) -> Result<Self> {
        let s = SetDescriptor::Scale(xi, Box::new(inner));
        s.validate()?;
        Ok(s)
    }

    pub fn translate(y: EcRv, inner: SetDescriptor) -> Self {
        SetDescriptor::Translate(y, Box::new(inner))
    }

    pub fn intersect(members: Vec<SetDescriptor>) -> Result<Self> {
        let s = SetDescriptor::Intersect(members);
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SetDescriptor::Ball { family, radius } => {
                family.iter().try_for_each(Seminorm::validate)?;
                require_positive(radius, "ball radius")
            }
            SetDescriptor::MPlusBall(radius) => require_positive(radius, "m_plus_ball radius"),
            SetDescriptor::Scale(xi, inner) => {
                if let Some(site) = xi.find_violation(|v| !v.is_zero()) {
                    return Err(Error::NotInvertible(site));
                }
                inner.validate()
            }
            SetDescriptor::Translate(_, inner) => inner.validate(),
            SetDescriptor::Intersect(members) => {
                if members.is_empty() {
                    return Err(Error::InvalidDescriptor(
                        "intersect[] needs at least one member".into(),
                    ));
                }
                members.iter().try_for_each(SetDescriptor::validate)
            }
        }
    }

    pub fn contains(&self, x: &EcRv) -> Result<bool> {
        match self {
            SetDescriptor::Ball { family, radius } => {
                Ok(family.iter().all(|s| s.evaluate(x).le(radius)))
            }
            // x = m + y with m finitely supported and |y| ≤ ε is possible iff
            // |x(j)| ≤ ε(j) for all but finitely many j, i.e. at the tails.
            SetDescriptor::MPlusBall(radius) => Ok(x.tail().abs() <= *radius.tail()),
            SetDescriptor::Scale(xi, inner) => inner.contains(&(&xi.reciprocal()? * x)),
            SetDescriptor::Translate(y, inner) => inner.contains(&(x - y)),
            SetDescriptor::Intersect(members) => {
                for m in members {
                    if !m.contains(x)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// Largest atom named anywhere in the descriptor. Membership of
    /// `c·Ĩ_{j}` is the same for every `j` beyond it.
    pub fn max_listed(&self) -> Option<AtomId> {
        match self {
            SetDescriptor::Ball { family, radius } => family
                .iter()
                .filter_map(Seminorm::max_listed)
                .chain(radius.max_listed())
                .max(),
            SetDescriptor::MPlusBall(radius) => radius.max_listed(),
            SetDescriptor::Scale(v, inner) | SetDescriptor::Translate(v, inner) => {
                v.max_listed().max(inner.max_listed())
            }
            SetDescriptor::Intersect(m) => m.iter().filter_map(SetDescriptor::max_listed).max(),
        }
    }

    pub fn shape_name(&self) -> &'static str {
        match self {
            SetDescriptor::Ball { .. } => "ball",
            SetDescriptor::MPlusBall(_) => "m_plus_ball",
            SetDescriptor::Scale(..) => "scale",
            SetDescriptor::Translate(..) => "translate",
            SetDescriptor::Intersect(_) => "intersect",
        }
    }

    /// Sufficient condition for `y + S = S`.
    pub fn absorbs_translation(&self, y: &EcRv) -> bool {
        if y.is_zero() {
            return true;
        }
        match self {
            SetDescriptor::Ball { family, .. } => (&family_weight(family) * y).is_zero(),
            SetDescriptor::MPlusBall(_) => y.in_m(),
            SetDescriptor::Scale(xi, inner) => match xi.reciprocal() {
                Ok(inv) => inner.absorbs_translation(&(&inv * y)),
                Err(_) => false,
            },
            SetDescriptor::Translate(_, inner) => inner.absorbs_translation(y),
            SetDescriptor::Intersect(m) => m.iter().all(|s| s.absorbs_translation(y)),
        }
    }

    /// Convexity, absorbency and balancedness established from the shape.
    /// A `false` flag means "not established", not "refuted".
    pub fn structural_flags(&self) -> StructuralFlags {
        match self {
            SetDescriptor::Ball { .. } | SetDescriptor::MPlusBall(_) => StructuralFlags::ALL,
            // multiplication by an invertible ξ is an L⁰-linear bijection
            SetDescriptor::Scale(_, inner) => inner.structural_flags(),
            SetDescriptor::Translate(y, inner) => {
                let f = inner.structural_flags();
                if inner.absorbs_translation(y) {
                    f
                } else {
                    StructuralFlags {
                        l0_convex: f.l0_convex,
                        l0_absorbent: false,
                        l0_balanced: false,
                    }
                }
            }
            SetDescriptor::Intersect(members) => {
                let flags: Vec<_> = members.iter().map(SetDescriptor::structural_flags).collect();
                let convex = flags.iter().all(|f| f.l0_convex);
                let balanced = flags.iter().all(|f| f.l0_balanced);
                StructuralFlags {
                    l0_convex: convex,
                    l0_balanced: balanced,
                    // max of the member absorption factors works for balanced members
                    l0_absorbent: balanced && flags.iter().all(|f| f.l0_absorbent),
                }
            }
        }
    }

    /// Draws a point of the set, including boundary points. `None` only for
    /// intersections where no candidate could be pulled into every member.
    pub fn sample_member(&self, rng: &mut Sampler) -> Option<EcRv> {
        match self {
            SetDescriptor::Ball { family, radius } => {
                let x = rng.rv();
                let t = rng.rv_unit();
                let norm = family_norm(family, &x);
                let target = radius * &t;
                // rescale x pointwise so that ‖y‖ = t·ε wherever ‖x‖ > 0
                let factor = norm.zip_with(&target, |n, tg| {
                    if n.is_zero() {
                        Scalar::from_integer(1.into())
                    } else {
                        tg / n
                    }
                });
                Some(&x * &factor)
            }
            SetDescriptor::MPlusBall(radius) => {
                let m = rng.rv_in_m();
                let b = radius * &rng.rv_signed_unit();
                Some(&m + &b)
            }
            SetDescriptor::Scale(xi, inner) => inner.sample_member(rng).map(|s| xi * &s),
            SetDescriptor::Translate(y, inner) => inner.sample_member(rng).map(|s| y + &s),
            SetDescriptor::Intersect(members) => {
                let mut candidate = members.first()?.sample_member(rng)?;
                for _ in 0..64 {
                    if self.contains(&candidate).ok()? {
                        return Some(candidate);
                    }
                    candidate = candidate.scale(&scalar::ratio(1, 2));
                }
                None
            }
        }
    }
}

fn require_positive(x: &EcRv, what: &str) -> Result<()> {
    if x.is_strictly_positive() {
        Ok(())
    } else {
        Err(Error::InvalidDescriptor(format!(
            "{what} must be strictly positive everywhere"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StructuralFlags {
    pub l0_convex: bool,
    pub l0_absorbent: bool,
    pub l0_balanced: bool,
}

impl StructuralFlags {
    pub const ALL: StructuralFlags = StructuralFlags {
        l0_convex: true,
        l0_absorbent: true,
        l0_balanced: true,
    };
}

/// Randomized confirmation of the three defining properties.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FlagConfirmation {
    pub samples: usize,
    pub convex_failures: usize,
    pub balanced_failures: usize,
    pub absorbent_failures: usize,
    /// Samples skipped because no member could be drawn.
    pub skipped: usize,
    /// `(ξ, x)` with `x ∈ S`, `|ξ| ≤ 1` and `ξx ∉ S`.
    pub balanced_witness: Option<(EcRv, EcRv)>,
    /// `(ξ, x1, x2)` with a convex combination leaving the set.
    pub convex_witness: Option<(EcRv, EcRv, EcRv)>,
    pub absorbent_witness: Option<EcRv>,
}

impl FlagConfirmation {
    /// No sampled failure contradicts a structurally established flag.
    pub fn consistent_with(&self, flags: &StructuralFlags) -> bool {
        (!flags.l0_convex || self.convex_failures == 0)
            && (!flags.l0_balanced || self.balanced_failures == 0)
            && (!flags.l0_absorbent || self.absorbent_failures == 0)
    }
}

/// Smallest `ξ = 2^k·(1 + |x|)`, `k ≤ 64`, with `x ∈ ξS`.
pub fn find_absorbing_factor(set: &SetDescriptor, x: &EcRv) -> Option<EcRv> {
    let base = &x.abs() + &EcRv::one();
    let mut xi = base;
    for _ in 0..=64 {
        let scaled = SetDescriptor::Scale(xi.clone(), Box::new(set.clone()));
        if scaled.contains(x).ok()? {
            return Some(xi);
        }
        xi = xi.scale(&scalar::int(2));
    }
    None
}

pub fn confirm_flags(set: &SetDescriptor, samples: usize, seed: u64) -> FlagConfirmation {
    let mut rng = Sampler::new(seed);
    let mut out = FlagConfirmation {
        samples,
        ..FlagConfirmation::default()
    };
    for i in 0..samples {
        let (Some(x1), Some(x2)) = (set.sample_member(&mut rng), set.sample_member(&mut rng)) else {
            out.skipped += 1;
            continue;
        };
        let lambda = rng.rv_unit();
        let one_minus = &EcRv::one() - &lambda;
        let comb = &(&lambda * &x1) + &(&one_minus * &x2);
        if !set.contains(&comb).unwrap_or(false) {
            out.convex_failures += 1;
            out.convex_witness.get_or_insert((lambda, x1.clone(), x2));
        }

        let xi = match i % 5 {
            0 => EcRv::constant(scalar::int(-1)),
            1 => EcRv::zero(),
            _ => rng.rv_signed_unit(),
        };
        // translates are probed at their base point too
        let x = match set {
            SetDescriptor::Translate(y, _) if i % 5 == 0 && rng.rng().gen_bool(0.5) => y.clone(),
            _ => x1,
        };
        if set.contains(&x).unwrap_or(false) && !set.contains(&(&xi * &x)).unwrap_or(false) {
            out.balanced_failures += 1;
            out.balanced_witness.get_or_insert((xi, x));
        }

        let probe = rng.rv();
        if find_absorbing_factor(set, &probe).is_none() {
            out.absorbent_failures += 1;
            out.absorbent_witness.get_or_insert(probe);
        }
    }
    out
}

impl Sampler {
    /// A random seminorm ball with one to three seminorms.
    pub fn ball(&mut self) -> SetDescriptor {
        let n = self.rng().gen_range(1..=3);
        let family = (0..n).map(|_| self.seminorm()).collect();
        SetDescriptor::Ball {
            family,
            radius: self.rv_positive(),
        }
    }

    pub fn m_plus_ball(&mut self) -> SetDescriptor {
        SetDescriptor::MPlusBall(self.rv_positive())
    }
}
