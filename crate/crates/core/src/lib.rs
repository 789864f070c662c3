//! Exact calculus of `L⁰`-modules over a countable discrete probability space.
//!
//! The crate works on `E = L⁰(ℱ, ℝ)` for `Ω = {1, 2, ...}` restricted to the
//! eventually-constant rational fragment ([`EcRv`]). On that fragment every
//! object used to study locally `L⁰`-convex topologies is decidable:
//! seminorm balls, the sets `M + B_ε`, random gauges, neighborhood-base
//! axioms, closures of `{θ}` and `M`, and countable concatenation along
//! finitely describable partitions.

pub mod concat;
pub mod error;
pub mod evidence;
pub mod expr;
pub mod gauge;
pub mod measure;
pub mod rv;
pub mod sample;
pub mod scalar;
pub mod seminorm;
pub mod sets;
pub mod syntax;
pub mod topology;

pub use concat::{glue, GlueResult, SequenceSpec};
pub use error::{Error, ParseError, Result, Site};
pub use gauge::{gauge_closed_form, gauge_upper_certificate, GaugeCertificate};
pub use measure::{AtomId, DiscreteSpace, EventSet, Partition};
pub use rv::{CombineOp, EcRv, OrderReport};
pub use sample::Sampler;
pub use scalar::Scalar;
pub use seminorm::Seminorm;
pub use evidence::{EvidenceReport, RunParams, Verdict};
pub use sets::SetDescriptor;
pub use topology::NeighborhoodBase;
