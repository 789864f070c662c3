//! A closed grammar of `L⁰`-seminorms on `E = L⁰`.
//!
//! Every member has the form `‖x‖ = w·|x|` for an effective weight `w ∈ L⁰₊`,
//! which is what makes gauges and separation properties decidable.

use rand::Rng;

use crate::error::{Error, Result};
use crate::measure::EventSet;
use crate::rv::EcRv;
use crate::sample::Sampler;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Seminorm {
    Zero,
    /// `‖x‖ = w·|x|` with `w ∈ L⁰₊`.
    Weighted(EcRv),
    /// `‖x‖ = Ĩ_A·|x|`.
    Localized(EventSet),
    /// Pointwise maximum of the members.
    FiniteSup(Vec<Seminorm>),
}

impl Seminorm {
    pub fn weighted(w: EcRv) -> Result<Self> {
        if !w.is_nonnegative() {
            return Err(Error::InvalidDescriptor(
                "weighted seminorm needs a nonnegative weight".into(),
            ));
        }
        Ok(Seminorm::Weighted(w))
    }

    pub fn sup(members: Vec<Seminorm>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidDescriptor("sup[] needs at least one member".into()));
        }
        Ok(Seminorm::FiniteSup(members))
    }

    /// `‖·‖ = |·|`.
    pub fn absolute() -> Self {
        Seminorm::Weighted(EcRv::one())
    }

    /// Checks the grammar invariants recursively.
    pub fn validate(&self) -> Result<()> {
        match self {
            Seminorm::Zero | Seminorm::Localized(_) => Ok(()),
            Seminorm::Weighted(w) if !w.is_nonnegative() => Err(Error::InvalidDescriptor(
                "weighted seminorm needs a nonnegative weight".into(),
            )),
            Seminorm::Weighted(_) => Ok(()),
            Seminorm::FiniteSup(m) if m.is_empty() => {
                Err(Error::InvalidDescriptor("sup[] needs at least one member".into()))
            }
            Seminorm::FiniteSup(m) => m.iter().try_for_each(Seminorm::validate),
        }
    }

    /// The `w` with `‖x‖ = w·|x|` for all `x`.
    pub fn effective_weight(&self) -> EcRv {
        match self {
            Seminorm::Zero => EcRv::zero(),
            Seminorm::Weighted(w) => w.clone(),
            Seminorm::Localized(a) => EcRv::indicator(a),
            Seminorm::FiniteSup(members) => members
                .iter()
                .map(Seminorm::effective_weight)
                .reduce(|acc, w| acc.max(&w))
                .unwrap_or_else(EcRv::zero),
        }
    }

    /// Evaluates directly from the grammar, without the effective weight.
    pub fn evaluate(&self, x: &EcRv) -> EcRv {
        match self {
            Seminorm::Zero => EcRv::zero(),
            Seminorm::Weighted(w) => w * &x.abs(),
            Seminorm::Localized(a) => x.abs().indicator_mul(a),
            Seminorm::FiniteSup(members) => members
                .iter()
                .map(|s| s.evaluate(x))
                .reduce(|acc, v| acc.max(&v))
                .unwrap_or_else(EcRv::zero),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.effective_weight().is_zero()
    }

    pub fn max_listed(&self) -> Option<crate::measure::AtomId> {
        match self {
            Seminorm::Zero => None,
            Seminorm::Weighted(w) => w.max_listed(),
            Seminorm::Localized(a) => a.max_listed(),
            Seminorm::FiniteSup(m) => m.iter().filter_map(Seminorm::max_listed).max(),
        }
    }
}

/// `‖x‖_Q`: the pointwise maximum over a finite family (θ for an empty one).
pub fn family_norm(family: &[Seminorm], x: &EcRv) -> EcRv {
    family
        .iter()
        .map(|s| s.evaluate(x))
        .reduce(|acc, v| acc.max(&v))
        .unwrap_or_else(EcRv::zero)
}

/// Pointwise maximum of the effective weights of a family.
pub fn family_weight(family: &[Seminorm]) -> EcRv {
    family
        .iter()
        .map(Seminorm::effective_weight)
        .reduce(|acc, w| acc.max(&w))
        .unwrap_or_else(EcRv::zero)
}

/// The separating condition `∨{‖x‖ : ‖·‖ ∈ P} = 0 ⇒ x = θ`.
///
/// Holds iff the combined weight is strictly positive at every atom.
pub fn separates_points(family: &[Seminorm]) -> bool {
    family_weight(family).is_strictly_positive()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomFailure {
    /// `‖ξx‖ ≠ |ξ|·‖x‖`.
    Homogeneity { xi: EcRv, x: EcRv },
    /// `‖x + y‖ ≰ ‖x‖ + ‖y‖`.
    Triangle { x: EcRv, y: EcRv },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AxiomReport {
    pub samples: usize,
    pub homogeneity_failures: usize,
    pub triangle_failures: usize,
    /// At most a handful of counterexamples, in discovery order.
    pub witnesses: Vec<AxiomFailure>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.homogeneity_failures == 0 && self.triangle_failures == 0
    }
}

const MAX_WITNESSES: usize = 8;

/// Randomized check of homogeneity and the triangle inequality for an
/// arbitrary evaluator. `ξ = 0` is always among the probes.
pub fn axioms_check_with<F>(eval: F, sample_count: usize, seed: u64) -> AxiomReport
where
    F: Fn(&EcRv) -> EcRv,
{
    let mut rng = Sampler::new(seed);
    let mut report = AxiomReport {
        samples: sample_count,
        ..AxiomReport::default()
    };
    for i in 0..sample_count {
        let xi = match i % 4 {
            0 => EcRv::zero(),
            1 => rng.indicator(),
            _ => rng.rv(),
        };
        let x = rng.rv();
        let y = rng.rv();
        if eval(&(&xi * &x)) != &xi.abs() * &eval(&x) {
            report.homogeneity_failures += 1;
            if report.witnesses.len() < MAX_WITNESSES {
                report.witnesses.push(AxiomFailure::Homogeneity { xi, x: x.clone() });
            }
        }
        let lhs = eval(&(&x + &y));
        let rhs = &eval(&x) + &eval(&y);
        if !lhs.le(&rhs) {
            report.triangle_failures += 1;
            if report.witnesses.len() < MAX_WITNESSES {
                report.witnesses.push(AxiomFailure::Triangle { x, y });
            }
        }
    }
    report
}

pub fn axioms_check(s: &Seminorm, sample_count: usize, seed: u64) -> AxiomReport {
    axioms_check_with(|x| s.evaluate(x), sample_count, seed)
}

impl Sampler {
    /// A random grammar seminorm of nesting depth at most 2.
    pub fn seminorm(&mut self) -> Seminorm {
        self.seminorm_at(0)
    }

    fn seminorm_at(&mut self, depth: u32) -> Seminorm {
        let choice = if depth >= 1 { self.rng().gen_range(0..3) } else { self.rng().gen_range(0..4) };
        match choice {
            0 => Seminorm::Localized(self.event()),
            1 => Seminorm::Weighted(self.rv().abs()),
            2 if self.rng().gen_bool(0.1) => Seminorm::Zero,
            2 => Seminorm::Weighted(self.rv_positive()),
            _ => {
                let n = self.rng().gen_range(1..=3);
                Seminorm::FiniteSup((0..n).map(|_| self.seminorm_at(depth + 1)).collect())
            }
        }
    }
}
