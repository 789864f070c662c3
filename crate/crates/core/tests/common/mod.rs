#![allow(dead_code)]

use l0check::scalar::{int, ratio};
use l0check::{AtomId, EcRv, EventSet, Scalar};
use proptest::prelude::*;

/// Atoms drawn by the strategies; everything past this behaves like the tail.
pub const ATOMS: u64 = 12;

/// Pointwise checks look this far, well past every named atom.
pub const SCAN: u64 = 64;

pub fn a(n: u64) -> AtomId {
    AtomId::new(n)
}

pub fn atom() -> impl Strategy<Value = AtomId> {
    (1..=ATOMS).prop_map(AtomId::new)
}

pub fn scalar() -> impl Strategy<Value = Scalar> + Clone {
    prop_oneof![
        (-4i64..=4).prop_map(int),
        (-60i64..=60, 1i64..=24).prop_map(|(n, d)| ratio(n, d)),
    ]
}

pub fn positive() -> impl Strategy<Value = Scalar> + Clone {
    (1i64..=40, 1i64..=12).prop_map(|(n, d)| ratio(n, d))
}

fn rv_from(values: impl Strategy<Value = Scalar> + Clone) -> impl Strategy<Value = EcRv> {
    (prop::collection::vec((atom(), values.clone()), 0..6), values)
        .prop_map(|(overrides, tail)| EcRv::new(overrides, tail))
}

pub fn rv() -> impl Strategy<Value = EcRv> {
    rv_from(scalar())
}

pub fn rv_positive() -> impl Strategy<Value = EcRv> {
    rv_from(positive())
}

pub fn rv_in_m() -> impl Strategy<Value = EcRv> {
    prop::collection::vec((atom(), scalar()), 0..6).prop_map(|o| EcRv::new(o, int(0)))
}

pub fn event() -> impl Strategy<Value = EventSet> {
    (prop::collection::btree_set(atom(), 0..6), any::<bool>()).prop_map(|(atoms, finite)| {
        if finite {
            EventSet::finite(atoms)
        } else {
            EventSet::cofinite(atoms)
        }
    })
}

/// All atoms `1..=SCAN` followed by the tail value, for pointwise comparisons.
pub fn points(x: &EcRv) -> Vec<Scalar> {
    (1..=SCAN).map(|j| x.value_at(a(j)).clone()).chain([x.tail().clone()]).collect()
}
