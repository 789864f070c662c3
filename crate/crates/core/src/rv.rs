//! Eventually-constant rational random variables: an exact fragment of `L⁰`.
//!
//! An [`EcRv`] is a finite set of atom overrides on top of a constant tail
//! value. Every atom has positive mass, so almost-sure statements are
//! pointwise statements and equality of classes is structural equality of the
//! canonical form.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result, Site};
use crate::measure::{AtomId, EventSet};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EcRv {
    overrides: BTreeMap<AtomId, Scalar>,
    tail: Scalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CombineOp {
    Add,
    Sub,
    Mul,
    Min,
    Max,
}

impl CombineOp {
    pub const ALL: [CombineOp; 5] = [
        CombineOp::Add,
        CombineOp::Sub,
        CombineOp::Mul,
        CombineOp::Min,
        CombineOp::Max,
    ];

    pub fn apply(self, a: &Scalar, b: &Scalar) -> Scalar {
        match self {
            CombineOp::Add => a + b,
            CombineOp::Sub => a - b,
            CombineOp::Mul => a * b,
            CombineOp::Min => crate::scalar::min(a, b),
            CombineOp::Max => crate::scalar::max(a, b),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CombineOp::Add => "add",
            CombineOp::Sub => "sub",
            CombineOp::Mul => "mul",
            CombineOp::Min => "min",
            CombineOp::Max => "max",
        }
    }
}

/// Pointwise comparison of `x` against `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderReport {
    pub leq_everywhere: bool,
    /// Atoms where `x < y`.
    pub strict_set: EventSet,
    /// Atoms where `x = y`.
    pub equal_set: EventSet,
}

impl OrderReport {
    /// `x < y` at every atom.
    pub fn strict_everywhere(&self) -> bool {
        self.strict_set.is_omega()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Classification {
    pub in_l0_plus: bool,
    pub in_l0_plusplus: bool,
    /// Finite support, i.e. membership in `span{Ĩ_{j}}`.
    pub in_m: bool,
}

impl EcRv {
    /// Builds the canonical form: overrides equal to the tail are dropped.
    pub fn new<I: IntoIterator<Item = (AtomId, Scalar)>>(overrides: I, tail: Scalar) -> Self {
        // later entries win for repeated atoms
        let mut overrides: BTreeMap<AtomId, Scalar> = overrides.into_iter().collect();
        overrides.retain(|_, v| *v != tail);
        EcRv { overrides, tail }
    }

    pub fn constant(c: Scalar) -> Self {
        EcRv {
            overrides: BTreeMap::new(),
            tail: c,
        }
    }

    pub fn zero() -> Self {
        EcRv::constant(Scalar::zero())
    }

    pub fn one() -> Self {
        EcRv::constant(Scalar::one())
    }

    /// `Ĩ_A`.
    pub fn indicator(event: &EventSet) -> Self {
        let (inside, outside) = match event {
            EventSet::Finite(_) => (Scalar::one(), Scalar::zero()),
            EventSet::Cofinite(_) => (Scalar::zero(), Scalar::one()),
        };
        EcRv::new(
            event.listed().iter().map(|&a| (a, inside.clone())),
            outside,
        )
    }

    pub fn value_at(&self, atom: AtomId) -> &Scalar {
        self.overrides.get(&atom).unwrap_or(&self.tail)
    }

    pub fn tail(&self) -> &Scalar {
        &self.tail
    }

    pub fn overrides(&self) -> &BTreeMap<AtomId, Scalar> {
        &self.overrides
    }

    pub fn is_constant(&self) -> bool {
        self.overrides.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.overrides.is_empty() && self.tail.is_zero()
    }

    pub fn max_listed(&self) -> Option<AtomId> {
        self.overrides.keys().next_back().copied()
    }

    /// Override atoms followed by the tail: every distinct pointwise situation.
    pub fn sites(&self) -> impl Iterator<Item = (Site, &Scalar)> {
        self.overrides
            .iter()
            .map(|(&a, v)| (Site::Atom(a), v))
            .chain(std::iter::once((Site::Tail, &self.tail)))
    }

    pub fn map<F: Fn(&Scalar) -> Scalar>(&self, f: F) -> Self {
        EcRv::new(
            self.overrides.iter().map(|(&a, v)| (a, f(v))),
            f(&self.tail),
        )
    }

    pub fn zip_with<F: Fn(&Scalar, &Scalar) -> Scalar>(&self, other: &EcRv, f: F) -> Self {
        let atoms: BTreeSet<AtomId> = self
            .overrides
            .keys()
            .chain(other.overrides.keys())
            .copied()
            .collect();
        EcRv::new(
            atoms
                .into_iter()
                .map(|a| (a, f(self.value_at(a), other.value_at(a)))),
            f(&self.tail, &other.tail),
        )
    }

    pub fn combine(op: CombineOp, x: &EcRv, y: &EcRv) -> Self {
        x.zip_with(y, |a, b| op.apply(a, b))
    }

    pub fn min(&self, other: &EcRv) -> Self {
        EcRv::combine(CombineOp::Min, self, other)
    }

    pub fn max(&self, other: &EcRv) -> Self {
        EcRv::combine(CombineOp::Max, self, other)
    }

    pub fn abs(&self) -> Self {
        self.map(|v| v.abs())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        self.map(|v| v * c)
    }

    /// `Ĩ_A · x`.
    pub fn indicator_mul(&self, event: &EventSet) -> Self {
        match event {
            EventSet::Finite(atoms) => EcRv::new(
                atoms.iter().map(|&a| (a, self.value_at(a).clone())),
                Scalar::zero(),
            ),
            EventSet::Cofinite(excluded) => EcRv::new(
                self.overrides
                    .iter()
                    .map(|(&a, v)| (a, v.clone()))
                    .chain(excluded.iter().map(|&a| (a, Scalar::zero()))),
                self.tail.clone(),
            ),
        }
    }

    pub fn reciprocal(&self) -> Result<Self> {
        if let Some((site, _)) = self.sites().find(|(_, v)| v.is_zero()) {
            return Err(Error::NotInvertible(site));
        }
        Ok(self.map(|v| v.recip()))
    }

    /// The event `{j : pred(x(j))}`.
    pub fn event_where<F: Fn(&Scalar) -> bool>(&self, pred: F) -> EventSet {
        if pred(&self.tail) {
            EventSet::cofinite(
                self.overrides
                    .iter()
                    .filter(|(_, v)| !pred(v))
                    .map(|(&a, _)| a),
            )
        } else {
            EventSet::finite(
                self.overrides
                    .iter()
                    .filter(|(_, v)| pred(v))
                    .map(|(&a, _)| a),
            )
        }
    }

    /// `{j : x(j) ≠ 0}`.
    pub fn support(&self) -> EventSet {
        self.event_where(|v| !v.is_zero())
    }

    pub fn all<F: Fn(&Scalar) -> bool>(&self, pred: F) -> bool {
        self.sites().all(|(_, v)| pred(v))
    }

    /// First site where `pred` fails.
    pub fn find_violation<F: Fn(&Scalar) -> bool>(&self, pred: F) -> Option<Site> {
        self.sites().find(|(_, v)| !pred(v)).map(|(s, _)| s)
    }

    pub fn order_compare(&self, other: &EcRv) -> OrderReport {
        let diff = other - self;
        OrderReport {
            leq_everywhere: diff.all(|v| !v.is_negative()),
            strict_set: diff.event_where(|v| v.is_positive()),
            equal_set: diff.event_where(|v| v.is_zero()),
        }
    }

    /// `self ≤ other` at every atom.
    pub fn le(&self, other: &EcRv) -> bool {
        (other - self).all(|v| !v.is_negative())
    }

    /// `self < other` at every atom.
    pub fn lt(&self, other: &EcRv) -> bool {
        (other - self).all(|v| v.is_positive())
    }

    /// `self ≤ other` on the atoms of `event`.
    pub fn le_on(&self, other: &EcRv, event: &EventSet) -> bool {
        (other - self).indicator_mul(event).all(|v| !v.is_negative())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.all(|v| !v.is_negative())
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.all(|v| v.is_positive())
    }

    pub fn classify(&self) -> Classification {
        Classification {
            in_l0_plus: self.is_nonnegative(),
            in_l0_plusplus: self.is_strictly_positive(),
            in_m: self.tail.is_zero(),
        }
    }

    pub fn in_m(&self) -> bool {
        self.tail.is_zero()
    }

    /// `self(j) = other(j)` for every `j >= from`.
    pub fn agrees_from(&self, other: &EcRv, from: AtomId) -> bool {
        let diff = self - other;
        diff.tail.is_zero() && diff.overrides.range(from..).next().is_none()
    }
}

impl Add for &EcRv {
    type Output = EcRv;
    fn add(self, rhs: &EcRv) -> EcRv {
        EcRv::combine(CombineOp::Add, self, rhs)
    }
}

impl Sub for &EcRv {
    type Output = EcRv;
    fn sub(self, rhs: &EcRv) -> EcRv {
        EcRv::combine(CombineOp::Sub, self, rhs)
    }
}

impl Mul for &EcRv {
    type Output = EcRv;
    fn mul(self, rhs: &EcRv) -> EcRv {
        EcRv::combine(CombineOp::Mul, self, rhs)
    }
}

impl Neg for &EcRv {
    type Output = EcRv;
    fn neg(self) -> EcRv {
        self.map(|v| -v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn a(n: u64) -> AtomId {
        AtomId::new(n)
    }

    fn rv(pairs: &[(u64, Scalar)], tail: Scalar) -> EcRv {
        EcRv::new(pairs.iter().map(|(j, v)| (a(*j), v.clone())), tail)
    }

    // Pointwise oracle: evaluate on atoms 1..=n.
    fn table(x: &EcRv, n: u64) -> Vec<Scalar> {
        (1..=n).map(|j| x.value_at(a(j)).clone()).collect()
    }

    #[test]
    fn canonical_form_drops_tail_values() {
        let x = rv(&[(1, int(0)), (2, int(3))], int(0));
        assert_eq!(x.overrides().len(), 1);
        assert_eq!(x, rv(&[(2, int(3))], int(0)));
    }

    #[test]
    fn combine_examples() {
        let x = rv(&[(1, int(3))], int(0));
        let y = rv(&[(2, int(1))], int(2));
        let sum = EcRv::combine(CombineOp::Add, &x, &y);
        assert_eq!(sum, rv(&[(1, int(5)), (2, int(1))], int(2)));
        assert_eq!(
            table(&sum, 8),
            vec![int(5), int(1), int(2), int(2), int(2), int(2), int(2), int(2)]
        );
        let m = EcRv::combine(CombineOp::Min, &x, &y);
        assert_eq!(m, rv(&[(1, int(2))], int(0)));
        assert_eq!(EcRv::combine(CombineOp::Mul, &EcRv::one(), &y), y);
    }

    #[test]
    fn abs_examples() {
        assert_eq!(rv(&[(2, int(-5))], int(-1)).abs(), rv(&[(2, int(5))], int(1)));
        assert_eq!(EcRv::zero().abs(), EcRv::zero());
        let nn = rv(&[(3, int(4))], ratio(1, 2));
        assert_eq!(nn.abs(), nn);
    }

    #[test]
    fn indicator_mul_examples() {
        let seven = EcRv::constant(int(7));
        assert_eq!(
            seven.indicator_mul(&EventSet::finite([a(1), a(2)])),
            rv(&[(1, int(7)), (2, int(7))], int(0))
        );
        assert_eq!(
            seven.indicator_mul(&EventSet::cofinite([a(1)])),
            rv(&[(1, int(0))], int(7))
        );
        let x = rv(&[(4, int(-2))], int(3));
        assert_eq!(x.indicator_mul(&EventSet::omega()), x);
        assert_eq!(x.indicator_mul(&EventSet::empty()), EcRv::zero());
        let ev = EventSet::cofinite([a(2), a(4)]);
        assert_eq!(x.indicator_mul(&ev), &EcRv::indicator(&ev) * &x);
    }

    #[test]
    fn reciprocal_examples() {
        let x = rv(&[(1, int(2))], int(4));
        assert_eq!(x.reciprocal().unwrap(), rv(&[(1, ratio(1, 2))], ratio(1, 4)));
        assert_eq!(x.reciprocal().unwrap().reciprocal().unwrap(), x);
        assert_eq!(EcRv::one().reciprocal().unwrap(), EcRv::one());
        assert_eq!(
            rv(&[(3, int(0))], int(1)).reciprocal(),
            Err(Error::NotInvertible(Site::Atom(a(3))))
        );
        assert_eq!(
            EcRv::zero().reciprocal(),
            Err(Error::NotInvertible(Site::Tail))
        );
    }

    #[test]
    fn order_examples() {
        let r = EcRv::zero().order_compare(&rv(&[(1, int(0))], int(1)));
        assert!(r.leq_everywhere);
        assert_eq!(r.strict_set, EventSet::cofinite([a(1)]));
        assert_eq!(r.equal_set, EventSet::singleton(a(1)));

        let x = rv(&[(5, ratio(-1, 3))], int(2));
        let r = x.order_compare(&x);
        assert!(r.leq_everywhere);
        assert!(r.equal_set.is_omega());
        assert!(r.strict_set.is_empty());

        let r = rv(&[(1, int(5))], int(0)).order_compare(&EcRv::one());
        assert!(!r.leq_everywhere);
        assert!(!r.strict_set.contains(a(1)));
    }

    #[test]
    fn classify_examples() {
        let c = rv(&[(3, int(5))], int(0)).classify();
        assert!(c.in_m && c.in_l0_plus && !c.in_l0_plusplus);
        let c = EcRv::one().classify();
        assert!(!c.in_m && c.in_l0_plusplus);
        assert!(EcRv::zero().classify().in_m);
    }

    // Oracle for M: every element of span{Ĩ_{j}} is Σ ξ_i Ĩ_{j_i}, whose support
    // is contained in {j_i}. Build such combinations directly and compare.
    #[test]
    fn m_membership_matches_span_generators() {
        let gens = [(1u64, ratio(3, 2)), (4, int(-2)), (9, int(7))];
        let coeffs = [rv(&[(1, int(2))], int(5)), EcRv::constant(int(3)), rv(&[(9, int(0))], int(1))];
        let mut span_elem = EcRv::zero();
        for ((j, _), xi) in gens.iter().zip(coeffs.iter()) {
            span_elem = &span_elem + &(xi * &EcRv::indicator(&EventSet::singleton(a(*j))));
        }
        assert!(span_elem.classify().in_m);
        assert!(span_elem.support().is_finite());
        // a nonzero tail would need infinitely many generators
        assert!(!EcRv::one().support().is_finite());
    }

    #[test]
    fn agreement_beyond_atom() {
        let x = rv(&[(2, int(1)), (7, int(4))], int(3));
        let y = rv(&[(2, int(9))], int(3));
        assert!(!x.agrees_from(&y, a(1)));
        assert!(!x.agrees_from(&y, a(7)));
        assert!(x.agrees_from(&y, a(8)));
    }
}
