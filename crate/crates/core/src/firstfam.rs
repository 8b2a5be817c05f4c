//! Right-hand sides of the first equation family.
//!
//! For i-tuples (u_1, ..., u_i) of universe elements, let Z be the
//! symmetric difference of the singletons {u_l}. The first family's
//! right-hand side is
//!
//! ```text
//! y_i = sum over all i-tuples of T_0(Z) - T_1(Z)
//! ```
//!
//! where T_p(Z) sums f(A)g(B)h(C) over triples whose symmetric difference
//! meets Z with parity p. Equating y_i with sum_j (n-2j)^i x_j for every
//! i gives a Vandermonde system on the per-size triple totals x_j.
//!
//! The tuple sum collapses by symmetry: all Z of equal size s contribute
//! the same tuple multiplicity, so y_i is assembled from the per-size
//! sums of T_0 - T_1 weighted by how many i-tuples hit each individual
//! Z. [`ln_table`] tabulates the total number of i-tuples whose running
//! symmetric difference has size s; dividing by C(n, s) gives the
//! per-target-set multiplicity used in the assembly.

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::Zero;

use crate::counters::Counters;
use crate::error::{Error, Result};
use crate::setcore::SetFunction;
use crate::transforms::{parity_transform_counted, TransformTable};

/// Total counts L[i][s] of i-tuples over an n-element universe whose
/// running symmetric difference has size s.
#[derive(Debug, Clone)]
pub struct LnTable {
    n: u32,
    i_max: u32,
    s_cap: u32,
    rows: Vec<Vec<BigInt>>,
}

impl LnTable {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn i_max(&self) -> u32 {
        self.i_max
    }

    /// L[i][s]; zero outside the stored triangle (s > min(i, n)).
    pub fn value(&self, i: u32, s: u32) -> BigInt {
        if i > self.i_max || s > i || s > self.s_cap {
            return BigInt::zero();
        }
        self.rows[i as usize][s as usize].clone()
    }

    pub fn row(&self, i: u32) -> &[BigInt] {
        &self.rows[i as usize]
    }
}

fn ln_rows(n: u32, i_max: u32, s_cap: u32) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(i_max as usize + 1);
    for i in 0..=i_max {
        let width = i.min(s_cap) as usize + 1;
        let mut row = vec![BigInt::zero(); width];
        if i == 0 {
            row[0] = BigInt::from(1);
        } else {
            let prev = &rows[i as usize - 1];
            let at = |s: i64| -> BigInt {
                if s < 0 || s as usize >= prev.len() {
                    BigInt::zero()
                } else {
                    prev[s as usize].clone()
                }
            };
            for s in 0..width as i64 {
                row[s as usize] = if s == 0 {
                    at(1)
                } else {
                    (n as i64 - s + 1) * at(s - 1) + (s + 1) * at(s + 1)
                };
            }
        }
        rows.push(row);
    }
    rows
}

/// Tabulates L[i][s] for 0 <= s <= i <= i_max via the insertion
/// recurrence: a tuple ending with s odd-count elements either had s-1 of
/// them and gained a fresh element (n-s+1 ways) or had s+1 and repeated
/// one of them (s+1 ways).
pub fn ln_table(n: u32, i_max: u32) -> Result<LnTable> {
    if i_max > n {
        return Err(Error::Range(format!(
            "i_max = {i_max} exceeds universe size {n}; the recurrence coefficients assume s <= n \
             (use ln_table_extended for longer tuples)"
        )));
    }
    Ok(LnTable {
        n,
        i_max,
        s_cap: i_max,
        rows: ln_rows(n, i_max, i_max),
    })
}

/// Same recurrence with the size axis capped at n, valid for arbitrarily
/// long tuples: no symmetric difference can exceed the universe, and the
/// s = n column correctly receives nothing from above.
pub fn ln_table_extended(n: u32, i_max: u32) -> LnTable {
    let s_cap = i_max.min(n);
    LnTable {
        n,
        i_max,
        s_cap,
        rows: ln_rows(n, i_max, s_cap),
    }
}

/// Per-target-set tuple multiplicities: entry (i, s) is the number of
/// i-tuples whose symmetric difference equals one fixed s-subset. Equal
/// to L[i][s] / C(n, s); built directly by conditioning on the last
/// element (inside the target: s ways down, outside: n-s ways up).
pub(crate) fn tuple_multiplicity(n: u32, i_max: u32) -> Vec<Vec<BigInt>> {
    let s_cap = i_max.min(n) as usize;
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(i_max as usize + 1);
    for i in 0..=i_max as usize {
        let width = i.min(s_cap) + 1;
        let mut row = vec![BigInt::zero(); width];
        if i == 0 {
            row[0] = BigInt::from(1);
        } else {
            let prev = &rows[i - 1];
            let at = |s: i64| -> BigInt {
                if s < 0 || s as usize >= prev.len() {
                    BigInt::zero()
                } else {
                    prev[s as usize].clone()
                }
            };
            for s in 0..width as i64 {
                row[s as usize] = s * at(s - 1) + (n as i64 - s) * at(s + 1);
            }
        }
        rows.push(row);
    }
    rows
}

/// (n - 2j)^i with the convention 0^0 = 1.
pub fn vandermonde_coeff(n: u32, i: u32, j: u32) -> BigInt {
    let base = BigInt::from(n as i64 - 2 * j as i64);
    base.pow(i)
}

/// For each s-subset Z (by colex rank), T_0(Z) - T_1(Z): the signed sum
/// of f(A)g(B)h(C) over all triples, weighted by the parity of
/// |(A ⊕ B ⊕ C) ∩ Z|. Assembled from the four even-parity products of
/// the three parity transforms minus the four odd ones; the factored
/// form (f_pi_0 - f_pi_1)(g_pi_0 - g_pi_1)(h_pi_0 - h_pi_1) is the
/// cross-check used in tests.
pub fn t_parity_difference(
    f: &SetFunction,
    g: &SetFunction,
    h: &SetFunction,
    s: u32,
) -> Result<Vec<BigInt>> {
    t_parity_difference_counted(f, g, h, s, &Counters::new())
}

pub fn t_parity_difference_counted(
    f: &SetFunction,
    g: &SetFunction,
    h: &SetFunction,
    s: u32,
    counters: &Counters,
) -> Result<Vec<BigInt>> {
    f.same_shape(g)?;
    f.same_shape(h)?;
    let fp = parity_transform_counted(f, s, counters)?;
    let gp = parity_transform_counted(g, s, counters)?;
    let hp = parity_transform_counted(h, s, counters)?;
    Ok(t_difference_from_parity(&fp, &gp, &hp))
}

pub(crate) fn t_difference_from_parity(
    fp: &TransformTable,
    gp: &TransformTable,
    hp: &TransformTable,
) -> Vec<BigInt> {
    let rows = fp.rows().len();
    (0..rows)
        .map(|zr| {
            let zr = zr as u64;
            let f0 = fp.value_at_rank(zr, 0);
            let f1 = fp.value_at_rank(zr, 1);
            let g0 = gp.value_at_rank(zr, 0);
            let g1 = gp.value_at_rank(zr, 1);
            let h0 = hp.value_at_rank(zr, 0);
            let h1 = hp.value_at_rank(zr, 1);
            let t0 = f0 * g0 * h0 + f1 * g1 * h0 + f1 * g0 * h1 + f0 * g1 * h1;
            let t1 = f1 * g1 * h1 + f0 * g0 * h1 + f0 * g1 * h0 + f1 * g0 * h0;
            t0 - t1
        })
        .collect()
}

/// Right-hand sides of the first family for i = 0 .. floor((3/2 - gamma) q).
#[derive(Debug, Clone)]
pub struct FirstFamilyRhs {
    pub gamma: Rational64,
    pub y: Vec<BigInt>,
}

impl FirstFamilyRhs {
    pub fn i_max(&self) -> u32 {
        self.y.len() as u32 - 1
    }
}

pub(crate) fn check_gamma(gamma: Rational64) -> Result<()> {
    if gamma < Rational64::zero() || gamma > Rational64::new(1, 2) {
        return Err(Error::Parameter(format!(
            "gamma must lie in [0, 1/2], got {gamma}"
        )));
    }
    Ok(())
}

pub(crate) fn first_family_i_max(q: u32, gamma: Rational64) -> u32 {
    let bound = (Rational64::new(3, 2) - gamma) * Rational64::from_integer(q as i64);
    let floored = bound.floor().to_integer();
    debug_assert!(!floored.is_negative());
    floored as u32
}

/// Evaluates y_i for all 0 <= i <= floor((3/2 - gamma) q) by the
/// per-size aggregation: y_i = sum over s of (tuples per fixed s-set) *
/// (sum over Z of T_0(Z) - T_1(Z)).
pub fn y_values(
    f: &SetFunction,
    g: &SetFunction,
    h: &SetFunction,
    gamma: Rational64,
) -> Result<FirstFamilyRhs> {
    y_values_counted(f, g, h, gamma, &Counters::new())
}

pub fn y_values_counted(
    f: &SetFunction,
    g: &SetFunction,
    h: &SetFunction,
    gamma: Rational64,
    counters: &Counters,
) -> Result<FirstFamilyRhs> {
    check_gamma(gamma)?;
    f.same_shape(g)?;
    f.same_shape(h)?;
    let n = f.n();
    let q = f.q();
    let i_max = first_family_i_max(q, gamma);
    let s_max = i_max.min(n);

    // Per-size totals of T_0 - T_1 over all Z of that size.
    let mut sigma = Vec::with_capacity(s_max as usize + 1);
    for s in 0..=s_max {
        let table = t_parity_difference_counted(f, g, h, s, counters)?;
        let mut acc = BigInt::zero();
        for v in &table {
            acc += v;
        }
        sigma.push(acc);
    }

    let mult = tuple_multiplicity(n, i_max);
    let y = (0..=i_max as usize)
        .map(|i| {
            let mut acc = BigInt::zero();
            for (s, sig) in sigma.iter().enumerate() {
                if s < mult[i].len() && !mult[i][s].is_zero() {
                    acc += &mult[i][s] * sig;
                }
            }
            acc
        })
        .collect();
    Ok(FirstFamilyRhs { gamma, y })
}
