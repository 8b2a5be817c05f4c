//! Universe/subset encoding, colexicographic ranking of q-subsets,
//! symmetric-difference utilities, and the feasible size set `j_support`.
//!
//! Subsets of a universe of at most [`MAX_UNIVERSE`] elements are stored as
//! `u64` bitmasks. Ranks are colexicographic, so ranks computed over a
//! universe of size `n` stay valid for any larger universe.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Hard cap on universe size imposed by the bitmask representation.
pub const MAX_UNIVERSE: u32 = 64;

/// Guard on dense table allocations (set functions, transform tables).
/// C(n, q) may not exceed this; all desk-scale targets use n <= 20.
pub const MAX_TABLE_ENTRIES: u64 = 1 << 24;

/// Exact binomial coefficient. Returns 0 when `k > n`. Every value with
/// `n <= 64` fits in a `u64`; intermediate products use `u128`.
pub fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc as u64
}

/// Falling factorial n * (n-1) * ... * (n-k+1) as an exact integer.
pub fn falling_factorial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::from(1);
    for i in 0..k {
        if i >= n {
            return BigInt::zero();
        }
        acc *= BigInt::from(n - i);
    }
    acc
}

/// A subset of `{0, ..., 63}` stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u64) -> Self {
        Subset(bits)
    }

    /// Builds a subset from element indices. Rejects duplicates and
    /// elements >= 64.
    pub fn from_members(members: &[u32]) -> Result<Self> {
        let mut bits = 0u64;
        for &e in members {
            if e >= MAX_UNIVERSE {
                return Err(Error::InvalidSubset(format!(
                    "element {e} exceeds the {MAX_UNIVERSE}-element bitmask limit"
                )));
            }
            if bits & (1u64 << e) != 0 {
                return Err(Error::InvalidSubset(format!("duplicate element {e}")));
            }
            bits |= 1u64 << e;
        }
        Ok(Subset(bits))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn size(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, e: u32) -> bool {
        e < MAX_UNIVERSE && self.0 & (1u64 << e) != 0
    }

    pub fn insert(self, e: u32) -> Self {
        debug_assert!(e < MAX_UNIVERSE);
        Subset(self.0 | (1u64 << e))
    }

    pub fn remove(self, e: u32) -> Self {
        Subset(self.0 & !(1u64 << e))
    }

    /// Sorted element indices.
    pub fn members(self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.size() as usize);
        let mut bits = self.0;
        while bits != 0 {
            let e = bits.trailing_zeros();
            out.push(e);
            bits &= bits - 1;
        }
        out
    }

    pub fn symmetric_difference(self, other: Self) -> Self {
        Subset(self.0 ^ other.0)
    }

    pub fn union(self, other: Self) -> Self {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        Subset(self.0 & !other.0)
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersection_size(self, other: Self) -> u32 {
        (self.0 & other.0).count_ones()
    }

    /// True when every member is below `n`.
    pub fn fits_universe(self, n: u32) -> bool {
        if n >= MAX_UNIVERSE {
            return true;
        }
        self.0 >> n == 0
    }
}

/// X ⊕ Y, the elements in exactly one of the two sets.
pub fn symmetric_difference(x: Subset, y: Subset) -> Subset {
    x.symmetric_difference(y)
}

/// Colexicographic rank of `sub` among the subsets of its size over an
/// `n`-element universe. The rank does not depend on `n` beyond the
/// membership check, which is what makes universe padding cheap.
pub fn rank_subset(sub: Subset, n: u32) -> Result<u64> {
    if !sub.fits_universe(n) {
        return Err(Error::InvalidSubset(format!(
            "subset {:?} has members outside universe of size {n}",
            sub.members()
        )));
    }
    let mut rank = 0u64;
    for (i, c) in sub.members().into_iter().enumerate() {
        rank += binomial(c, i as u32 + 1);
    }
    Ok(rank)
}

/// Inverse of [`rank_subset`] for subsets of size `q`.
pub fn unrank_subset(rank: u64, n: u32, q: u32) -> Result<Subset> {
    let total = binomial(n, q);
    if rank >= total {
        return Err(Error::Range(format!(
            "rank {rank} out of range for C({n},{q}) = {total}"
        )));
    }
    let mut rank = rank;
    let mut sub = Subset::EMPTY;
    let mut hi = n;
    for i in (1..=q).rev() {
        // Largest c with C(c, i) <= rank; scan downward from the previous
        // member since members are strictly decreasing in this direction.
        let mut c = hi - 1;
        while binomial(c, i) > rank {
            c -= 1;
        }
        rank -= binomial(c, i);
        sub = sub.insert(c);
        hi = c;
    }
    Ok(sub)
}

/// All q-subsets of an n-element universe in colexicographic order, which
/// for bitmasks coincides with increasing numeric order (Gosper's hack).
pub fn subsets(n: u32, q: u32) -> SubsetIter {
    let current = if q > n {
        None
    } else if q == 0 {
        Some(0)
    } else if q >= 64 {
        Some(u64::MAX)
    } else {
        Some((1u64 << q) - 1)
    };
    SubsetIter { n, q, current }
}

pub struct SubsetIter {
    n: u32,
    q: u32,
    current: Option<u64>,
}

impl Iterator for SubsetIter {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        let bits = self.current?;
        let out = Subset(bits);
        self.current = if self.q == 0 {
            None
        } else {
            let c = bits & bits.wrapping_neg();
            let r = bits.wrapping_add(c);
            if r == 0 {
                None
            } else {
                let next = (((r ^ bits) >> 2) / c) | r;
                let limit = if self.n >= 64 { u64::MAX } else { (1u64 << self.n) - 1 };
                if next > limit {
                    None
                } else {
                    Some(next)
                }
            }
        };
        Some(out)
    }
}

/// All k-element subsets of a fixed ground set, in colex order relative
/// to the ground set's member positions.
pub fn k_subsets_of(ground: Subset, k: u32) -> Vec<Subset> {
    let members = ground.members();
    subsets(members.len() as u32, k)
        .map(|pos| {
            let mut bits = 0u64;
            for p in pos.members() {
                bits |= 1u64 << members[p as usize];
            }
            Subset(bits)
        })
        .collect()
}

/// J_q: the feasible sizes of A ⊕ B ⊕ C over q-subsets. Exactly the
/// values j in 0..=3q with j ≡ q (mod 2); there are floor(3q/2) + 1 of
/// them.
pub fn j_support(q: u32) -> Vec<u32> {
    (0..=3 * q).filter(|j| j % 2 == q % 2).collect()
}

/// A dense table of exact integer values over all q-subsets of an
/// n-element universe, indexed by colexicographic rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFunction {
    n: u32,
    q: u32,
    values: Vec<BigInt>,
}

impl SetFunction {
    pub fn zeros(n: u32, q: u32) -> Result<Self> {
        if n == 0 || n > MAX_UNIVERSE {
            return Err(Error::Parameter(format!(
                "universe size must be in 1..={MAX_UNIVERSE}, got {n}"
            )));
        }
        let len = binomial(n, q);
        if len > MAX_TABLE_ENTRIES {
            return Err(Error::Scope(format!(
                "C({n},{q}) = {len} exceeds the dense table limit {MAX_TABLE_ENTRIES}"
            )));
        }
        Ok(SetFunction {
            n,
            q,
            values: vec![BigInt::zero(); len as usize],
        })
    }

    pub fn constant(n: u32, q: u32, v: BigInt) -> Result<Self> {
        let mut f = Self::zeros(n, q)?;
        for slot in f.values.iter_mut() {
            *slot = v.clone();
        }
        Ok(f)
    }

    /// Point mass: 1 at `at`, 0 elsewhere.
    pub fn point_mass(n: u32, q: u32, at: Subset) -> Result<Self> {
        if at.size() != q {
            return Err(Error::Shape(format!(
                "point mass subset has size {}, expected {q}",
                at.size()
            )));
        }
        let mut f = Self::zeros(n, q)?;
        f.set(at, BigInt::from(1))?;
        Ok(f)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, sub: Subset) -> Result<&BigInt> {
        if sub.size() != self.q {
            return Err(Error::Shape(format!(
                "subset size {} does not match q = {}",
                sub.size(),
                self.q
            )));
        }
        let r = rank_subset(sub, self.n)?;
        Ok(&self.values[r as usize])
    }

    pub fn value_at_rank(&self, rank: u64) -> &BigInt {
        &self.values[rank as usize]
    }

    pub fn set(&mut self, sub: Subset, v: BigInt) -> Result<()> {
        if sub.size() != self.q {
            return Err(Error::Shape(format!(
                "subset size {} does not match q = {}",
                sub.size(),
                self.q
            )));
        }
        let r = rank_subset(sub, self.n)?;
        self.values[r as usize] = v;
        Ok(())
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    /// Sum of all values.
    pub fn total(&self) -> BigInt {
        let mut acc = BigInt::zero();
        for v in &self.values {
            acc += v;
        }
        acc
    }

    pub fn iter(&self) -> impl Iterator<Item = (Subset, &BigInt)> {
        subsets(self.n, self.q).zip(self.values.iter())
    }

    /// Checks that another function shares this one's universe and subset
    /// size.
    pub fn same_shape(&self, other: &SetFunction) -> Result<()> {
        if self.n != other.n || self.q != other.q {
            return Err(Error::Shape(format!(
                "set functions disagree: (n={}, q={}) vs (n={}, q={})",
                self.n, self.q, other.n, other.q
            )));
        }
        Ok(())
    }
}
