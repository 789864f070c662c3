//! Seeded random generators for the randomized checks.
//!
//! Defaults: at most 8 overrides on atoms 1..16, numerators and denominators
//! bounded by 2^16. Roughly a third of all scalars are small integers so that
//! ties and zeros show up often.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::measure::{AtomId, EventSet};
use crate::rv::EcRv;
use crate::scalar::Scalar;

pub const ATOM_RANGE: u64 = 16;
pub const MAX_OVERRIDES: usize = 8;
pub const VALUE_BOUND: i64 = 1 << 16;

#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream derived from `seed` and a label.
    pub fn derived(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Sampler { rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn atom(&mut self) -> AtomId {
        AtomId::new(self.rng.gen_range(1..=ATOM_RANGE))
    }

    pub fn rational(&mut self) -> Scalar {
        if self.rng.gen_bool(0.3) {
            return Scalar::from_integer(BigInt::from(self.rng.gen_range(-4i64..=4)));
        }
        let num = self.rng.gen_range(-VALUE_BOUND..=VALUE_BOUND);
        let den = self.rng.gen_range(1..=VALUE_BOUND);
        Scalar::new(num.into(), den.into())
    }

    pub fn positive_rational(&mut self) -> Scalar {
        if self.rng.gen_bool(0.3) {
            return Scalar::from_integer(BigInt::from(self.rng.gen_range(1i64..=4)));
        }
        let num = self.rng.gen_range(1..=VALUE_BOUND);
        let den = self.rng.gen_range(1..=VALUE_BOUND);
        Scalar::new(num.into(), den.into())
    }

    /// A value in `[0, 1]`, hitting both endpoints now and then.
    pub fn unit_rational(&mut self) -> Scalar {
        match self.rng.gen_range(0..10) {
            0 => Scalar::from_integer(0.into()),
            1 => Scalar::from_integer(1.into()),
            _ => {
                let den = self.rng.gen_range(1..=VALUE_BOUND);
                let num = self.rng.gen_range(0..=den);
                Scalar::new(num.into(), den.into())
            }
        }
    }

    fn rv_with<F: FnMut(&mut Self) -> Scalar>(&mut self, mut value: F) -> EcRv {
        let k = self.rng.gen_range(0..=MAX_OVERRIDES);
        let overrides: Vec<(AtomId, Scalar)> = (0..k).map(|_| (self.atom(), value(self))).collect();
        let tail = value(self);
        EcRv::new(overrides, tail)
    }

    /// An arbitrary element; about a quarter have zero tail (lie in `M`).
    pub fn rv(&mut self) -> EcRv {
        if self.rng.gen_bool(0.25) {
            self.rv_in_m()
        } else {
            self.rv_with(Self::rational)
        }
    }

    /// An element of `L⁰₊₊`.
    pub fn rv_positive(&mut self) -> EcRv {
        self.rv_with(Self::positive_rational)
    }

    /// `0 ≤ ξ ≤ 1`.
    pub fn rv_unit(&mut self) -> EcRv {
        self.rv_with(Self::unit_rational)
    }

    /// `|ξ| ≤ 1`.
    pub fn rv_signed_unit(&mut self) -> EcRv {
        self.rv_with(|s| {
            let v = s.unit_rational();
            if s.rng.gen_bool(0.5) {
                -v
            } else {
                v
            }
        })
    }

    /// A finitely supported element (in `M`).
    pub fn rv_in_m(&mut self) -> EcRv {
        let k = self.rng.gen_range(0..=MAX_OVERRIDES);
        let overrides: Vec<(AtomId, Scalar)> =
            (0..k).map(|_| (self.atom(), self.rational())).collect();
        EcRv::new(overrides, Scalar::from_integer(0.into()))
    }

    /// An element with nonzero tail (not in `M`).
    pub fn rv_not_in_m(&mut self) -> EcRv {
        loop {
            let x = self.rv_with(Self::rational);
            if !x.in_m() {
                return x;
            }
        }
    }

    /// A random finite or cofinite subset, listing at most 6 atoms of 1..16.
    pub fn event(&mut self) -> EventSet {
        let k = self.rng.gen_range(0..=6);
        let atoms: Vec<AtomId> = (0..k).map(|_| self.atom()).collect();
        if self.rng.gen_bool(0.5) {
            EventSet::finite(atoms)
        } else {
            EventSet::cofinite(atoms)
        }
    }

    pub fn indicator(&mut self) -> EcRv {
        let e = self.event();
        EcRv::indicator(&e)
    }
}
