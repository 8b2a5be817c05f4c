//! Counting t-tuples of pairwise disjoint members of a set family.
//!
//! For t divisible by 3, split each tuple into three blocks of t/3
//! members. A dynamic program counts, for every (s t/3)-subset A, the
//! ordered (t/3)-tuples of pairwise disjoint members with union exactly
//! A; the disjoint-triples form glues three blocks together.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::counters::Counters;
use crate::error::{Error, Result};
use crate::linsys::{weighted_disjoint_triples_counted, DeltaResult, GammaChoice};
use crate::sdproduct::MatmulBackend;
use crate::setcore::{SetFunction, Subset, MAX_UNIVERSE};

/// A family of distinct s-element subsets of an n-element universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFamily {
    n: u32,
    s: u32,
    members: Vec<Subset>,
}

impl SetFamily {
    pub fn new(n: u32, s: u32, members: Vec<Subset>) -> Result<Self> {
        if n == 0 || n > MAX_UNIVERSE {
            return Err(Error::Parameter(format!(
                "universe size must be in 1..={MAX_UNIVERSE}, got {n}"
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for m in &members {
            if m.size() != s {
                return Err(Error::Shape(format!(
                    "family member {:?} has size {}, expected {s}",
                    m.members(),
                    m.size()
                )));
            }
            if !m.fits_universe(n) {
                return Err(Error::InvalidSubset(format!(
                    "family member {:?} leaves the {n}-element universe",
                    m.members()
                )));
            }
            if !seen.insert(m.bits()) {
                return Err(Error::Parameter(format!(
                    "family members must be distinct sets; {:?} repeats",
                    m.members()
                )));
            }
        }
        Ok(SetFamily { n, s, members })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn members(&self) -> &[Subset] {
        &self.members
    }

    /// All s-subsets of an n-element universe.
    pub fn complete(n: u32, s: u32) -> Result<Self> {
        let members = crate::setcore::subsets(n, s).collect();
        SetFamily::new(n, s, members)
    }
}

/// For every (s * t3)-subset A, the number of ordered t3-tuples of
/// pairwise disjoint members whose union is exactly A. Layered DP keyed
/// by the union bitmask; layer r holds unions of r members.
pub fn union_count_dp(family: &SetFamily, t3: u32) -> Result<SetFunction> {
    if t3 == 0 {
        return Err(Error::Parameter("tuple length must be at least 1".into()));
    }
    let q = family.s * t3;
    let mut out = SetFunction::zeros(family.n, q)?;
    if q > family.n {
        return Ok(out);
    }
    let mut layer: HashMap<u64, BigInt> = HashMap::new();
    layer.insert(0, BigInt::from(1));
    for _ in 0..t3 {
        let mut next: HashMap<u64, BigInt> = HashMap::new();
        for (mask, count) in &layer {
            for m in &family.members {
                if m.bits() & mask == 0 {
                    *next.entry(mask | m.bits()).or_insert_with(BigInt::zero) += count;
                }
            }
        }
        layer = next;
    }
    for (mask, count) in layer {
        out.set(Subset::from_bits(mask), count)?;
    }
    Ok(out)
}

/// Outcome of a packing count with the underlying Delta provenance.
#[derive(Debug, Clone)]
pub struct PackingOutcome {
    /// Ordered t-tuples of pairwise disjoint members.
    pub ordered: BigInt,
    pub delta: DeltaResult,
}

/// Counts ordered t-tuples of pairwise disjoint members of the family.
/// Requires t >= 3 and divisible by 3.
pub fn count_set_packings(
    family: &SetFamily,
    t: u32,
    gamma: GammaChoice,
    backend: MatmulBackend,
) -> Result<BigInt> {
    Ok(count_set_packings_detailed(family, t, gamma, backend, &Counters::new())?.ordered)
}

pub fn count_set_packings_detailed(
    family: &SetFamily,
    t: u32,
    gamma: GammaChoice,
    backend: MatmulBackend,
    counters: &Counters,
) -> Result<PackingOutcome> {
    if t < 3 || t % 3 != 0 {
        return Err(Error::Parameter(format!(
            "tuple length t must be a positive multiple of 3, got {t}"
        )));
    }
    let g = union_count_dp(family, t / 3)?;
    let delta = weighted_disjoint_triples_counted(&g, &g, &g, gamma, backend, counters)?;
    Ok(PackingOutcome {
        ordered: delta.delta.clone(),
        delta,
    })
}
