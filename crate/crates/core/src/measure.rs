//! Countable discrete probability spaces, decidable events and partitions.
//!
//! The sample space is `Ω = {1, 2, 3, ...}`. A space carries finitely many
//! explicit atom masses followed by a geometric dyadic tail, so every event in
//! the finite/cofinite algebra has an exactly computable probability.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

/// A point of `Ω`, indexed from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct AtomId(u64);

impl AtomId {
    /// Panics on 0; use [`AtomId::try_new`] for untrusted input.
    pub const fn new(index: u64) -> Self {
        assert!(index >= 1, "atoms are indexed from 1");
        AtomId(index)
    }

    pub const fn try_new(index: u64) -> Option<Self> {
        if index >= 1 {
            Some(AtomId(index))
        } else {
            None
        }
    }

    pub const fn index(self) -> u64 {
        self.0
    }

    pub const fn next(self) -> Self {
        AtomId(self.0 + 1)
    }
}

impl TryFrom<u64> for AtomId {
    type Error = String;
    fn try_from(v: u64) -> std::result::Result<Self, String> {
        AtomId::try_new(v).ok_or_else(|| "atom index must be >= 1".to_string())
    }
}

impl From<AtomId> for u64 {
    fn from(a: AtomId) -> u64 {
        a.0
    }
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An event of the finite/cofinite Boolean algebra on `Ω`.
///
/// `Finite(s)` is the set `s`; `Cofinite(s)` is `Ω \ s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EventSet {
    Finite(BTreeSet<AtomId>),
    Cofinite(BTreeSet<AtomId>),
}

impl EventSet {
    pub fn empty() -> Self {
        EventSet::Finite(BTreeSet::new())
    }

    pub fn omega() -> Self {
        EventSet::Cofinite(BTreeSet::new())
    }

    pub fn singleton(atom: AtomId) -> Self {
        EventSet::Finite(BTreeSet::from([atom]))
    }

    pub fn finite<I: IntoIterator<Item = AtomId>>(atoms: I) -> Self {
        EventSet::Finite(atoms.into_iter().collect())
    }

    pub fn cofinite<I: IntoIterator<Item = AtomId>>(excluded: I) -> Self {
        EventSet::Cofinite(excluded.into_iter().collect())
    }

    /// `{lo, ..., hi}`, empty when `hi < lo`.
    pub fn range(lo: u64, hi: u64) -> Self {
        EventSet::Finite((lo.max(1)..=hi).map(AtomId).collect())
    }

    /// `{j : j >= start}`.
    pub fn from_atom(start: AtomId) -> Self {
        EventSet::Cofinite((1..start.0).map(AtomId).collect())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, EventSet::Finite(_))
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, EventSet::Finite(s) if s.is_empty())
    }

    pub fn is_omega(&self) -> bool {
        matches!(self, EventSet::Cofinite(s) if s.is_empty())
    }

    /// The listed atoms: members of a finite set, exclusions of a cofinite one.
    pub fn listed(&self) -> &BTreeSet<AtomId> {
        match self {
            EventSet::Finite(s) | EventSet::Cofinite(s) => s,
        }
    }

    pub fn contains(&self, atom: AtomId) -> bool {
        match self {
            EventSet::Finite(s) => s.contains(&atom),
            EventSet::Cofinite(s) => !s.contains(&atom),
        }
    }

    pub fn complement(&self) -> Self {
        match self {
            EventSet::Finite(s) => EventSet::Cofinite(s.clone()),
            EventSet::Cofinite(s) => EventSet::Finite(s.clone()),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        use EventSet::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a | b),
            (Finite(a), Cofinite(b)) | (Cofinite(b), Finite(a)) => Cofinite(b - a),
            (Cofinite(a), Cofinite(b)) => Cofinite(a & b),
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        use EventSet::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a & b),
            (Finite(a), Cofinite(b)) | (Cofinite(b), Finite(a)) => Finite(a - b),
            (Cofinite(a), Cofinite(b)) => Cofinite(a | b),
        }
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.intersection(&other.complement())
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection(other).is_empty()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    /// Largest atom mentioned in the representation, if any.
    pub fn max_listed(&self) -> Option<AtomId> {
        self.listed().iter().next_back().copied()
    }
}

/// A countable discrete probability space on `Ω = {1, 2, ...}`.
///
/// Atoms `1..=N` carry explicit masses; atom `j > N` has mass `c·2^-j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteSpace {
    explicit: Vec<Scalar>,
    tail_coefficient: Scalar,
}

impl Default for DiscreteSpace {
    fn default() -> Self {
        DiscreteSpace::canonical()
    }
}

impl DiscreteSpace {
    /// `P({j}) = 2^-j`.
    pub fn canonical() -> Self {
        DiscreteSpace {
            explicit: Vec::new(),
            tail_coefficient: Scalar::one(),
        }
    }

    /// `explicit[i]` is the mass of atom `i + 1`.
    pub fn new(explicit: Vec<Scalar>, tail_coefficient: Scalar) -> Result<Self> {
        for (i, w) in explicit.iter().enumerate() {
            if *w <= Scalar::zero() || *w >= Scalar::one() {
                return Err(Error::InvalidSpace(format!(
                    "weight of atom {} must lie in (0, 1), got {}",
                    i + 1,
                    w
                )));
            }
        }
        if tail_coefficient <= Scalar::zero() {
            return Err(Error::InvalidSpace(
                "tail coefficient must be positive".into(),
            ));
        }
        let n = explicit.len() as u32;
        let total: Scalar =
            explicit.iter().sum::<Scalar>() + &tail_coefficient * scalar::dyadic(n);
        if total != Scalar::one() {
            return Err(Error::InvalidSpace(format!(
                "total mass is {total}, expected 1"
            )));
        }
        Ok(DiscreteSpace {
            explicit,
            tail_coefficient,
        })
    }

    pub fn explicit_weights(&self) -> &[Scalar] {
        &self.explicit
    }

    pub fn tail_coefficient(&self) -> &Scalar {
        &self.tail_coefficient
    }

    pub fn is_canonical(&self) -> bool {
        self.explicit.is_empty() && self.tail_coefficient.is_one()
    }

    pub fn atom_mass(&self, atom: AtomId) -> Scalar {
        let j = atom.index();
        match self.explicit.get((j - 1) as usize) {
            Some(w) => w.clone(),
            None => &self.tail_coefficient * scalar::dyadic(j as u32),
        }
    }

    /// Exact `P(A)`; cofinite events use `1 - P(Aᶜ)`.
    pub fn probability(&self, event: &EventSet) -> Scalar {
        let listed: Scalar = event.listed().iter().map(|&a| self.atom_mass(a)).sum();
        match event {
            EventSet::Finite(_) => listed,
            EventSet::Cofinite(_) => Scalar::one() - listed,
        }
    }

    /// True when `P({j}) = c·2^-j` for every `j >= start`.
    pub fn is_dyadic_from(&self, start: AtomId) -> bool {
        (start.index()..=self.explicit.len() as u64).all(|j| {
            self.explicit[(j - 1) as usize] == &self.tail_coefficient * scalar::dyadic(j as u32)
        })
    }
}

/// A partition of `Ω` into events with positive probability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Partition {
    Finite(Vec<EventSet>),
    /// Finite prefix cells covering `{1, ..., tail_start - 1}`, then the
    /// singletons `{tail_start}, {tail_start + 1}, ...`.
    SingletonTail {
        prefix: Vec<EventSet>,
        tail_start: AtomId,
    },
}

impl Partition {
    pub fn finite(cells: Vec<EventSet>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidDescriptor("partition has no cells".into()));
        }
        check_disjoint_nonempty(&cells).map_err(Error::InvalidDescriptor)?;
        let union = cells
            .iter()
            .fold(EventSet::empty(), |acc, c| acc.union(c));
        if !union.is_omega() {
            return Err(Error::InvalidDescriptor(
                "cells do not cover Ω".into(),
            ));
        }
        Ok(Partition::Finite(cells))
    }

    pub fn singleton_tail(prefix: Vec<EventSet>, tail_start: AtomId) -> Result<Self> {
        if prefix.iter().any(|c| !c.is_finite()) {
            return Err(Error::MalformedPrefix("prefix cells must be finite".into()));
        }
        check_disjoint_nonempty(&prefix).map_err(Error::MalformedPrefix)?;
        let union = prefix.iter().fold(EventSet::empty(), |acc, c| acc.union(c));
        let expected = EventSet::range(1, tail_start.index() - 1);
        if union != expected {
            return Err(Error::MalformedPrefix(format!(
                "prefix cells must cover exactly the atoms 1..{} without gaps",
                tail_start.index() - 1
            )));
        }
        Ok(Partition::SingletonTail { prefix, tail_start })
    }

    pub fn trivial() -> Self {
        Partition::Finite(vec![EventSet::omega()])
    }

    /// Number of cells, `None` for a countably infinite partition.
    pub fn cell_count(&self) -> Option<usize> {
        match self {
            Partition::Finite(cells) => Some(cells.len()),
            Partition::SingletonTail { .. } => None,
        }
    }

    /// The `n`-th cell, counted from 1.
    pub fn cell(&self, n: usize) -> Option<EventSet> {
        if n == 0 {
            return None;
        }
        match self {
            Partition::Finite(cells) => cells.get(n - 1).cloned(),
            Partition::SingletonTail { prefix, tail_start } => {
                if n <= prefix.len() {
                    Some(prefix[n - 1].clone())
                } else {
                    let offset = (n - prefix.len() - 1) as u64;
                    Some(EventSet::singleton(AtomId(tail_start.index() + offset)))
                }
            }
        }
    }

    /// Index (from 1) of the cell containing `atom`.
    pub fn cell_index_of(&self, atom: AtomId) -> usize {
        match self {
            Partition::Finite(cells) => {
                1 + cells
                    .iter()
                    .position(|c| c.contains(atom))
                    .expect("partition covers Ω")
            }
            Partition::SingletonTail { prefix, tail_start } => {
                if atom < *tail_start {
                    1 + prefix
                        .iter()
                        .position(|c| c.contains(atom))
                        .expect("prefix covers atoms below the tail")
                } else {
                    prefix.len() + 1 + (atom.index() - tail_start.index()) as usize
                }
            }
        }
    }

    /// Largest atom named in the representation.
    pub fn max_listed(&self) -> Option<AtomId> {
        match self {
            Partition::Finite(cells) => cells.iter().filter_map(EventSet::max_listed).max(),
            Partition::SingletonTail { tail_start, .. } => Some(*tail_start),
        }
    }
}

fn check_disjoint_nonempty(cells: &[EventSet]) -> std::result::Result<(), String> {
    for (i, a) in cells.iter().enumerate() {
        if a.is_empty() {
            return Err(format!("cell {} is empty", i + 1));
        }
        for (k, b) in cells.iter().enumerate().skip(i + 1) {
            if !a.is_disjoint(b) {
                return Err(format!("cells {} and {} overlap", i + 1, k + 1));
            }
        }
    }
    Ok(())
}

/// Builds the partition `{B_1, ..., B_k} ∪ {C_n : n >= 1}` where the `B_i` are
/// the given atom cells and `C_n = {tail_start - 1 + n}`, so that
/// `P(C_n) = P(Ω') / 2^n` with `Ω' = {j >= tail_start}`.
pub fn build_countable_partition(
    space: &DiscreteSpace,
    atom_cells: Vec<EventSet>,
    tail_start: AtomId,
) -> Result<Partition> {
    let partition = Partition::singleton_tail(atom_cells, tail_start)?;
    if !space.is_dyadic_from(tail_start) {
        return Err(Error::NonDyadicTail(tail_start));
    }
    Ok(partition)
}

/// One row of the tail-mass law `P(C_n) = P(Ω')/2^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailCellMass {
    pub n: u32,
    pub cell: EventSet,
    pub mass: Scalar,
    pub expected: Scalar,
}

impl TailCellMass {
    pub fn holds(&self) -> bool {
        self.mass == self.expected
    }
}

/// Tail cells `C_1..C_upto` of a singleton-tail partition with their exact
/// masses against `P(Ω')/2^n`. Empty for finite partitions.
pub fn tail_cell_masses(space: &DiscreteSpace, partition: &Partition, upto: u32) -> Vec<TailCellMass> {
    let Partition::SingletonTail { prefix, tail_start } = partition else {
        return Vec::new();
    };
    let rest = space.probability(&EventSet::from_atom(*tail_start));
    (1..=upto)
        .map(|n| {
            let cell = partition
                .cell(prefix.len() + n as usize)
                .expect("singleton tail is infinite");
            TailCellMass {
                n,
                mass: space.probability(&cell),
                expected: &rest * scalar::dyadic(n),
                cell,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn a(n: u64) -> AtomId {
        AtomId::new(n)
    }

    // Independent oracle: Σ 2^-j over explicit atoms, in f64-free rational form.
    fn dyadic_sum(atoms: &[u64]) -> Scalar {
        atoms.iter().map(|&j| ratio(1, 1 << j)).sum()
    }

    #[test]
    fn canonical_probabilities() {
        let p = DiscreteSpace::canonical();
        let e = EventSet::finite([a(1), a(3)]);
        assert_eq!(p.probability(&e), dyadic_sum(&[1, 3]));
        assert_eq!(p.probability(&e), ratio(5, 8));
        assert_eq!(p.probability(&EventSet::omega()), int(1));
        assert_eq!(
            p.probability(&EventSet::cofinite([a(1), a(2)])),
            ratio(1, 4)
        );
        assert_eq!(p.probability(&EventSet::empty()), int(0));
    }

    #[test]
    fn space_validation() {
        // atoms 1,2 carry 1/4 each; tail 2^-j * 2 for j>2 sums to 1/2.
        let s = DiscreteSpace::new(vec![ratio(1, 4), ratio(1, 4)], int(2)).unwrap();
        assert_eq!(s.probability(&EventSet::omega()), int(1));
        assert_eq!(s.atom_mass(a(3)), ratio(1, 4));
        assert_eq!(
            s.probability(&EventSet::from_atom(a(3))),
            ratio(1, 2)
        );
        assert!(DiscreteSpace::new(vec![ratio(1, 2)], int(2)).is_err());
        assert!(DiscreteSpace::new(vec![int(1)], int(0)).is_err());
        assert!(DiscreteSpace::new(vec![], ratio(1, 2)).is_err());
    }

    #[test]
    fn event_algebra() {
        let f = EventSet::finite([a(1), a(2)]);
        let c = EventSet::cofinite([a(2), a(3)]);
        assert_eq!(f.union(&c), EventSet::cofinite([a(3)]));
        assert_eq!(f.intersection(&c), EventSet::finite([a(1)]));
        assert_eq!(f.complement().complement(), f);
        assert_eq!(c.difference(&f), EventSet::cofinite([a(1), a(2), a(3)]));
        assert!(EventSet::empty().is_subset(&f));
        assert!(f.is_subset(&EventSet::omega()));
    }

    #[test]
    fn countable_partition_masses() {
        let p = DiscreteSpace::canonical();
        let part = build_countable_partition(
            &p,
            vec![EventSet::singleton(a(1)), EventSet::singleton(a(2))],
            a(3),
        )
        .unwrap();
        let rows = tail_cell_masses(&p, &part, 20);
        assert_eq!(rows.len(), 20);
        for row in &rows {
            assert!(row.holds());
            assert_eq!(row.cell, EventSet::singleton(a(row.n as u64 + 2)));
            assert_eq!(row.mass, ratio(1, 4) * scalar::dyadic(row.n));
        }
    }

    #[test]
    fn pure_singleton_partition() {
        let p = DiscreteSpace::canonical();
        let part = build_countable_partition(&p, vec![], a(1)).unwrap();
        for row in tail_cell_masses(&p, &part, 12) {
            assert_eq!(row.mass, scalar::dyadic(row.n));
        }
    }

    #[test]
    fn two_cell_prefix_sums_to_one() {
        let p = DiscreteSpace::canonical();
        let part =
            build_countable_partition(&p, vec![EventSet::finite([a(1), a(2)])], a(3)).unwrap();
        let horizon = 30;
        let mut total = Scalar::zero();
        let mut seen = EventSet::empty();
        for n in 1..=horizon {
            let cell = part.cell(n).unwrap();
            assert!(seen.is_disjoint(&cell));
            assert!(p.probability(&cell) > Scalar::zero());
            total += p.probability(&cell);
            seen = seen.union(&cell);
        }
        let remainder = p.probability(&seen.complement());
        assert_eq!(total + remainder, int(1));
        // the uncovered part is exactly {j > horizon + 1}
        assert_eq!(seen.complement(), EventSet::from_atom(a(horizon as u64 + 2)));
    }

    #[test]
    fn malformed_prefix() {
        let p = DiscreteSpace::canonical();
        let overlap = vec![EventSet::finite([a(1), a(2)]), EventSet::singleton(a(2))];
        assert!(matches!(
            build_countable_partition(&p, overlap, a(3)),
            Err(Error::MalformedPrefix(_))
        ));
        let gap = vec![EventSet::singleton(a(1))];
        assert!(matches!(
            build_countable_partition(&p, gap, a(3)),
            Err(Error::MalformedPrefix(_))
        ));
        let empty_cell = vec![EventSet::singleton(a(1)), EventSet::empty()];
        assert!(matches!(
            build_countable_partition(&p, empty_cell, a(2)),
            Err(Error::MalformedPrefix(_))
        ));
    }

    #[test]
    fn non_dyadic_tail_rejected() {
        let s = DiscreteSpace::new(vec![ratio(1, 3), ratio(1, 6)], int(2)).unwrap();
        assert!(!s.is_dyadic_from(a(2)));
        assert!(s.is_dyadic_from(a(3)));
        assert!(matches!(
            build_countable_partition(&s, vec![EventSet::singleton(a(1))], a(2)),
            Err(Error::NonDyadicTail(_))
        ));
        let part = build_countable_partition(
            &s,
            vec![EventSet::singleton(a(1)), EventSet::singleton(a(2))],
            a(3),
        )
        .unwrap();
        assert!(tail_cell_masses(&s, &part, 20).iter().all(TailCellMass::holds));
    }

    #[test]
    fn cell_indexing() {
        let part = Partition::singleton_tail(
            vec![EventSet::finite([a(1), a(3)]), EventSet::singleton(a(2))],
            a(4),
        )
        .unwrap();
        assert_eq!(part.cell_index_of(a(3)), 1);
        assert_eq!(part.cell_index_of(a(2)), 2);
        assert_eq!(part.cell_index_of(a(4)), 3);
        assert_eq!(part.cell_index_of(a(10)), 9);
        assert_eq!(part.cell(9), Some(EventSet::singleton(a(10))));
        assert!(Partition::finite(vec![EventSet::singleton(a(1))]).is_err());
        assert!(Partition::finite(vec![EventSet::singleton(a(1)), EventSet::omega()]).is_err());
    }
}
