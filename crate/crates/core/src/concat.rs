//! Gluing along countable partitions and the relative countable
//! concatenation property.
//!
//! Sequences come in two finitely describable shapes. For a singleton-tail
//! partition every cell beyond a computable index is a singleton `{j}` with
//! `j` past every atom named by the inputs, so "for all `n`" reduces to a
//! finite range plus one tail comparison.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{AtomId, EventSet, Partition};
use crate::rv::EcRv;
use crate::scalar;
use crate::seminorm::Seminorm;
use crate::sets::SetDescriptor;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceSpec {
    /// `x_n = prefix[n]` for `n ≤ prefix.len()`, then `tail`.
    EventuallyConstant { prefix: Vec<EcRv>, tail: EcRv },
    /// `x_n = c·Ĩ_{A_n}` for the `n`-th cell `A_n` of the partition.
    Diagonal(EcRv),
}

impl SequenceSpec {
    pub fn constant(x: EcRv) -> Self {
        SequenceSpec::EventuallyConstant {
            prefix: Vec::new(),
            tail: x,
        }
    }

    /// `x_n` for the partition's `n`-th cell (`n ≥ 1`).
    pub fn element(&self, part: &Partition, n: usize) -> EcRv {
        match self {
            SequenceSpec::EventuallyConstant { prefix, tail } => {
                prefix.get(n - 1).unwrap_or(tail).clone()
            }
            SequenceSpec::Diagonal(c) => {
                let cell = part.cell(n).unwrap_or_else(EventSet::empty);
                c.indicator_mul(&cell)
            }
        }
    }

    /// The element every late `x_n` agrees with on its own cell.
    fn reference(&self) -> &EcRv {
        match self {
            SequenceSpec::EventuallyConstant { tail, .. } => tail,
            SequenceSpec::Diagonal(c) => c,
        }
    }

    fn explicit_len(&self) -> usize {
        match self {
            SequenceSpec::EventuallyConstant { prefix, .. } => prefix.len(),
            SequenceSpec::Diagonal(_) => 0,
        }
    }

    fn max_listed(&self) -> Option<AtomId> {
        match self {
            SequenceSpec::EventuallyConstant { prefix, tail } => {
                prefix.iter().filter_map(EcRv::max_listed).chain(tail.max_listed()).max()
            }
            SequenceSpec::Diagonal(c) => c.max_listed(),
        }
    }

    /// Applies `f` elementwise. For `Diagonal` this assumes `f(c·Ĩ_A) = f(c)·Ĩ_A`,
    /// which holds for every grammar seminorm.
    pub fn map(&self, f: impl Fn(&EcRv) -> EcRv) -> Self {
        match self {
            SequenceSpec::EventuallyConstant { prefix, tail } => SequenceSpec::EventuallyConstant {
                prefix: prefix.iter().map(&f).collect(),
                tail: f(tail),
            },
            SequenceSpec::Diagonal(c) => SequenceSpec::Diagonal(f(c)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GlueResult {
    Representable(EcRv),
    /// The glue exists in `L⁰` but is not eventually constant. Neither
    /// sequence shape produces this; it is kept for callers that build
    /// glues from other sources.
    NotRepresentable(String),
}

impl GlueResult {
    pub fn value(&self) -> Option<&EcRv> {
        match self {
            GlueResult::Representable(x) => Some(x),
            GlueResult::NotRepresentable(_) => None,
        }
    }
}

/// Number of cells to inspect one by one so that every later cell is a
/// singleton `{j}` past all atoms in `names` and past the explicit prefix.
fn explicit_cells(part: &Partition, seq: &SequenceSpec, names: Option<AtomId>, horizon: u64) -> usize {
    match part {
        Partition::Finite(cells) => cells.len(),
        Partition::SingletonTail { prefix, tail_start } => {
            let past_names = names.map_or(0, |a| {
                prefix.len() + (a.index() + 1).saturating_sub(tail_start.index()) as usize
            });
            (horizon as usize).max(prefix.len()).max(seq.explicit_len()).max(past_names)
        }
    }
}

fn first_atom_after(part: &Partition, cells: usize) -> Option<AtomId> {
    match part {
        Partition::Finite(_) => None,
        Partition::SingletonTail { .. } => part.cell(cells + 1).and_then(|c| c.max_listed()),
    }
}

pub fn glue(seq: &SequenceSpec, part: &Partition) -> Result<GlueResult> {
    if let (SequenceSpec::EventuallyConstant { prefix, .. }, Some(k)) = (seq, part.cell_count()) {
        if prefix.len() > k {
            return Err(Error::IncompatibleSpec(format!(
                "sequence lists {} elements but the partition has {k} cells",
                prefix.len()
            )));
        }
    }
    if let SequenceSpec::Diagonal(c) = seq {
        // Ĩ_{A_n}·c = x_n on every cell, whatever the partition
        return Ok(GlueResult::Representable(c.clone()));
    }
    let glued = match part {
        Partition::Finite(cells) => cells
            .iter()
            .enumerate()
            .map(|(i, cell)| seq.element(part, i + 1).indicator_mul(cell))
            .fold(EcRv::zero(), |acc, piece| &acc + &piece),
        Partition::SingletonTail { .. } => {
            let n = explicit_cells(part, seq, seq.max_listed(), 0);
            let last = first_atom_after(part, n).expect("singleton tail is infinite");
            let overrides = (1..last.index()).map(|j| {
                let atom = AtomId::new(j);
                let x_n = seq.element(part, part.cell_index_of(atom));
                (atom, x_n.value_at(atom).clone())
            });
            EcRv::new(overrides, seq.reference().tail().clone())
        }
    };
    Ok(GlueResult::Representable(glued))
}

/// Outcome of checking `Ĩ_{A_n}x = Ĩ_{A_n}x_n` for every cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GlueCheck {
    pub cells_checked: usize,
    /// First cell where the identity fails.
    pub mismatch: Option<usize>,
    /// Agreement with the sequence's reference element on all later cells;
    /// `true` for finite partitions.
    pub tail_law: bool,
}

impl GlueCheck {
    pub fn holds(&self) -> bool {
        self.mismatch.is_none() && self.tail_law
    }
}

pub fn verify_glue(seq: &SequenceSpec, part: &Partition, x: &EcRv, horizon: u64) -> GlueCheck {
    let names = seq.max_listed().max(x.max_listed());
    let n = explicit_cells(part, seq, names, horizon);
    let mismatch = (1..=n).find(|&k| {
        let cell = part.cell(k).expect("cell index in range");
        x.indicator_mul(&cell) != seq.element(part, k).indicator_mul(&cell)
    });
    let tail_law = match first_atom_after(part, n) {
        None => true,
        Some(from) => x.agrees_from(seq.reference(), from),
    };
    GlueCheck {
        cells_checked: n,
        mismatch,
        tail_law,
    }
}

/// First `n` with `x_n ∉ S`, checking one representative for the cells where
/// membership can no longer change.
fn first_outside(set: &SetDescriptor, seq: &SequenceSpec, part: &Partition, horizon: u64) -> Result<Option<usize>> {
    let names = seq.max_listed().max(set.max_listed());
    let n = explicit_cells(part, seq, names, horizon);
    let upto = if part.cell_count().is_some() { n } else { n + 1 };
    for k in 1..=upto {
        if !set.contains(&seq.element(part, k))? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceOutcome {
    pub sequence: SequenceSpec,
    /// First element outside the set; such sequences are not counterexamples.
    pub outside_at: Option<usize>,
    pub glue: GlueResult,
    pub glue_check: GlueCheck,
    pub glue_contained: Option<bool>,
    /// For balls: `‖glue‖ = glue of (‖x_n‖)` for every seminorm of the family.
    pub seminorm_identity: Option<bool>,
}

impl SequenceOutcome {
    /// The sequence lies in the set, glues, and the glue escapes.
    pub fn is_cc_failure(&self) -> bool {
        self.outside_at.is_none() && self.glue_contained == Some(false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CcReport {
    pub outcomes: Vec<SequenceOutcome>,
    pub precondition_failures: usize,
    pub cc_failures: usize,
    pub identity_failures: usize,
    pub glue_failures: usize,
}

impl CcReport {
    pub fn holds(&self) -> bool {
        self.cc_failures == 0 && self.identity_failures == 0 && self.glue_failures == 0
    }
}

pub fn relative_cc_check(
    set: &SetDescriptor,
    part: &Partition,
    seqs: &[SequenceSpec],
    horizon: u64,
) -> Result<CcReport> {
    let mut report = CcReport::default();
    for seq in seqs {
        let outside_at = first_outside(set, seq, part, horizon)?;
        let glued = glue(seq, part)?;
        let (glue_check, glue_contained, seminorm_identity) = match glued.value() {
            Some(x) => {
                let check = verify_glue(seq, part, x, horizon);
                let identity = match set {
                    SetDescriptor::Ball { family, .. } => Some(ball_identity(family, seq, part, x)?),
                    _ => None,
                };
                (check, Some(set.contains(x)?), identity)
            }
            None => (
                GlueCheck {
                    cells_checked: 0,
                    mismatch: None,
                    tail_law: true,
                },
                None,
                None,
            ),
        };
        let outcome = SequenceOutcome {
            sequence: seq.clone(),
            outside_at,
            glue: glued,
            glue_check,
            glue_contained,
            seminorm_identity,
        };
        if outcome.outside_at.is_some() {
            report.precondition_failures += 1;
        } else {
            if outcome.is_cc_failure() {
                report.cc_failures += 1;
            }
            if outcome.seminorm_identity == Some(false) {
                report.identity_failures += 1;
            }
        }
        if !outcome.glue_check.holds() {
            report.glue_failures += 1;
        }
        report.outcomes.push(outcome);
    }
    Ok(report)
}

fn ball_identity(family: &[Seminorm], seq: &SequenceSpec, part: &Partition, x: &EcRv) -> Result<bool> {
    for s in family {
        let values = seq.map(|xn| s.evaluate(xn));
        let Some(expected) = glue(&values, part)?.value().cloned() else {
            return Ok(false);
        };
        if s.evaluate(x) != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Pieces `2ε·Ĩ_{n}` of `M ⊆ M + B_ε` whose glue `2ε` escapes `M + B_ε`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CcFailureWitness {
    pub epsilon: EcRv,
    pub set: SetDescriptor,
    pub sequence: SequenceSpec,
    pub partition: Partition,
    pub glue: EcRv,
    pub pieces_checked: usize,
    pub pieces_in_m: bool,
    pub pieces_in_set: bool,
    pub glue_check: GlueCheck,
    pub glue_contained: bool,
}

impl CcFailureWitness {
    pub fn validates(&self) -> bool {
        self.pieces_in_m && self.pieces_in_set && self.glue_check.holds() && !self.glue_contained
    }
}

pub fn cc_failure_witness(epsilon: &EcRv, horizon: u64) -> Result<CcFailureWitness> {
    let set = SetDescriptor::m_plus_ball(epsilon.clone())?;
    let partition = Partition::singleton_tail(Vec::new(), AtomId::new(1))?;
    let sequence = SequenceSpec::Diagonal(epsilon.scale(&scalar::int(2)));
    let glue = glue(&sequence, &partition)?
        .value()
        .cloned()
        .expect("diagonal glue is representable");
    let names = sequence.max_listed().max(set.max_listed());
    let n = explicit_cells(&partition, &sequence, names, horizon) + 1;
    let pieces: Vec<EcRv> = (1..=n).map(|k| sequence.element(&partition, k)).collect();
    let pieces_in_m = pieces.iter().all(EcRv::in_m);
    let mut pieces_in_set = true;
    for p in &pieces {
        pieces_in_set &= set.contains(p)?;
    }
    Ok(CcFailureWitness {
        glue_check: verify_glue(&sequence, &partition, &glue, horizon),
        glue_contained: set.contains(&glue)?,
        epsilon: epsilon.clone(),
        set,
        sequence,
        partition,
        glue,
        pieces_checked: n,
        pieces_in_m,
        pieces_in_set,
    })
}

/// The partition `B_n` with `Ĩ_{B_n}x ∈ U` built from `p_U(x) < 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReverseConstruction {
    pub partition: Partition,
    pub pieces_checked: usize,
    /// First cell `n` with `Ĩ_{B_n}x ∉ U`.
    pub piece_outside: Option<usize>,
    /// One representative past every named atom, standing for all later cells.
    pub tail_law: bool,
    pub glue_check: GlueCheck,
}

impl ReverseConstruction {
    pub fn validates(&self) -> bool {
        self.piece_outside.is_none() && self.tail_law && self.glue_check.holds()
    }
}

pub fn reverse_partition_construct(set: &SetDescriptor, x: &EcRv, horizon: u64) -> Result<ReverseConstruction> {
    let partition = match set {
        // A_n = {1..n}, so B_1 = A_1 and B_n = {n}
        SetDescriptor::MPlusBall(_) => Partition::singleton_tail(Vec::new(), AtomId::new(1))?,
        // Ĩ_A x ∈ U already for A = Ω
        SetDescriptor::Ball { .. } => Partition::trivial(),
        other => {
            return Err(Error::UnsupportedShape(format!(
                "reverse construction for {}",
                other.shape_name()
            )))
        }
    };
    if let Some(site) = crate::gauge::gauge_below_one_violation(set, x)? {
        return Err(Error::GaugeNotBelowOne(site));
    }
    let pieces = SequenceSpec::Diagonal(x.clone());
    let names = x.max_listed().max(set.max_listed());
    let n = explicit_cells(&partition, &pieces, names, horizon);
    let mut piece_outside = None;
    for k in 1..=n {
        if !set.contains(&pieces.element(&partition, k))? {
            piece_outside = Some(k);
            break;
        }
    }
    let tail_law = match partition.cell_count() {
        Some(_) => true,
        None => set.contains(&pieces.element(&partition, n + 1))?,
    };
    let glued = glue(&pieces, &partition)?
        .value()
        .cloned()
        .expect("diagonal glue is representable");
    let mut glue_check = verify_glue(&pieces, &partition, &glued, horizon);
    if glued != *x {
        glue_check.mismatch.get_or_insert(0);
    }
    Ok(ReverseConstruction {
        partition,
        pieces_checked: n,
        piece_outside,
        tail_law,
        glue_check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Site;
    use crate::sample::Sampler;
    use crate::scalar::{int, ratio};

    fn a(n: u64) -> AtomId {
        AtomId::new(n)
    }

    fn c(v: i64) -> EcRv {
        EcRv::constant(int(v))
    }

    fn unit_ball() -> SetDescriptor {
        SetDescriptor::ball(vec![Seminorm::absolute()], EcRv::one()).unwrap()
    }

    #[test]
    fn glue_examples() {
        let part = Partition::finite(vec![EventSet::singleton(a(1)), EventSet::cofinite([a(1)])]).unwrap();
        let seq = SequenceSpec::EventuallyConstant {
            prefix: vec![c(3), c(5)],
            tail: c(5),
        };
        let g = glue(&seq, &part).unwrap();
        assert_eq!(g, GlueResult::Representable(EcRv::new([(a(1), int(3))], int(5))));
        assert!(verify_glue(&seq, &part, g.value().unwrap(), 32).holds());

        let st = Partition::singleton_tail(vec![], a(1)).unwrap();
        let diag = SequenceSpec::Diagonal(c(2));
        assert_eq!(glue(&diag, &st).unwrap().value(), Some(&c(2)));
        assert!(verify_glue(&diag, &st, &c(2), 32).holds());
        assert!(!verify_glue(&diag, &st, &c(3), 32).holds());

        let x = EcRv::new([(a(4), int(-1))], ratio(1, 3));
        for p in [part, st] {
            let g = glue(&SequenceSpec::constant(x.clone()), &p).unwrap();
            assert_eq!(g.value(), Some(&x));
        }
    }

    #[test]
    fn singleton_tail_glue_assembles_prefix() {
        let part = Partition::singleton_tail(vec![EventSet::finite([a(1), a(2)])], a(3)).unwrap();
        // cells {1,2}, {3}, {4}, ...
        let seq = SequenceSpec::EventuallyConstant {
            prefix: vec![c(7), c(8), EcRv::new([(a(4), int(1))], int(0))],
            tail: c(-1),
        };
        let x = glue(&seq, &part).unwrap().value().cloned().unwrap();
        assert_eq!(
            x,
            EcRv::new([(a(1), int(7)), (a(2), int(7)), (a(3), int(8)), (a(4), int(1))], int(-1))
        );
        assert!(verify_glue(&seq, &part, &x, 4).holds());
        // breaking the tail is caught beyond any horizon
        let broken = EcRv::new(x.overrides().clone(), int(0));
        let check = verify_glue(&seq, &part, &broken, 4);
        assert!(!check.holds());
    }

    #[test]
    fn incompatible_prefix() {
        let part = Partition::trivial();
        let seq = SequenceSpec::EventuallyConstant {
            prefix: vec![c(1), c(2)],
            tail: c(0),
        };
        assert!(matches!(glue(&seq, &part), Err(Error::IncompatibleSpec(_))));
    }

    #[test]
    fn glue_is_unique_on_fragment() {
        let mut rng = Sampler::new(8);
        let part = Partition::singleton_tail(vec![EventSet::singleton(a(1))], a(2)).unwrap();
        for _ in 0..100 {
            let seq = SequenceSpec::EventuallyConstant {
                prefix: vec![rng.rv(), rng.rv()],
                tail: rng.rv(),
            };
            let x = glue(&seq, &part).unwrap().value().cloned().unwrap();
            let y = rng.rv();
            if verify_glue(&seq, &part, &y, 8).holds() {
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn forward_direction_on_balls() {
        let u = unit_ball();
        let part = Partition::finite(vec![EventSet::singleton(a(1)), EventSet::cofinite([a(1)])]).unwrap();
        let mut rng = Sampler::new(3);
        let seqs: Vec<_> = (0..50)
            .map(|_| SequenceSpec::EventuallyConstant {
                prefix: vec![u.sample_member(&mut rng).unwrap(), u.sample_member(&mut rng).unwrap()],
                tail: EcRv::zero(),
            })
            .collect();
        let r = relative_cc_check(&u, &part, &seqs, 32).unwrap();
        assert!(r.holds(), "{r:?}");
        assert_eq!(r.precondition_failures, 0);
        assert!(r.outcomes.iter().all(|o| o.seminorm_identity == Some(true)));
    }

    #[test]
    fn precondition_failures_are_not_counterexamples() {
        let u = unit_ball();
        let r = relative_cc_check(&u, &Partition::trivial(), &[SequenceSpec::constant(c(5))], 32).unwrap();
        assert_eq!(r.precondition_failures, 1);
        assert_eq!(r.cc_failures, 0);
    }

    #[test]
    fn cc_failure_examples() {
        let w = cc_failure_witness(&EcRv::one(), 32).unwrap();
        assert!(w.validates(), "{w:?}");
        assert_eq!(w.glue, c(2));
        let eps = EcRv::new([(a(1), int(4))], int(1));
        let w = cc_failure_witness(&eps, 32).unwrap();
        assert!(w.validates());
        assert_eq!(w.glue, EcRv::new([(a(1), int(8))], int(2)));

        let set = SetDescriptor::m_plus_ball(EcRv::one()).unwrap();
        let r = relative_cc_check(&set, &w.partition, &[SequenceSpec::Diagonal(c(2))], 32).unwrap();
        assert_eq!(r.cc_failures, 1);
        assert!(!r.holds());
    }

    #[test]
    fn reverse_examples() {
        let u = SetDescriptor::m_plus_ball(EcRv::one()).unwrap();
        let r = reverse_partition_construct(&u, &c(7), 32).unwrap();
        assert!(r.validates(), "{r:?}");
        assert_eq!(r.partition.cell(5), Some(EventSet::singleton(a(5))));

        let r = reverse_partition_construct(&unit_ball(), &EcRv::constant(ratio(1, 2)), 32).unwrap();
        assert!(r.validates());
        assert_eq!(r.partition, Partition::trivial());

        assert!(matches!(
            reverse_partition_construct(&unit_ball(), &c(2), 32),
            Err(Error::GaugeNotBelowOne(Site::Tail))
        ));
    }
}
