//! Intersection and parity transforms of a set function.
//!
//! For f defined on q-subsets of an n-element universe, the intersection
//! transform tabulates, for every s-subset Z and every t,
//!
//! ```text
//! f_iota_t(Z) = sum of f(A) over q-subsets A with |A ∩ Z| = t
//! ```
//!
//! and the parity transform the analogous sums with |A ∩ Z| even or odd.
//!
//! The evaluation is a layered DP: first the superset sums
//! `T_w(W) = sum of f(A) over A ⊇ W` are built level by level from
//! `|W| = q` down to `|W| = 0` (each step an exact division by the number
//! of ways an extra element was chosen), then for every Z the sums
//! `c_w(Z) = sum of T_w(W) over w-subsets W ⊆ Z` collapse to the
//! intersection counts by binomial inversion. Cost is polynomial in the
//! table sizes; the naive double loop in [`crate::oracle`] is the
//! correctness reference.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;

use crate::counters::Counters;
use crate::error::{Error, Result};
use crate::setcore::{binomial, rank_subset, subsets, SetFunction, Subset, MAX_TABLE_ENTRIES};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    Intersection,
    Parity,
}

/// Values of a transform indexed by (colex rank of Z, t or p).
#[derive(Debug, Clone)]
pub struct TransformTable {
    n: u32,
    q: u32,
    s: u32,
    kind: TransformKind,
    values: Vec<Vec<BigInt>>,
}

impl TransformTable {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    /// Largest stored second index: min(s, q) for intersection tables, 1
    /// for parity tables.
    pub fn t_max(&self) -> u32 {
        match self.kind {
            TransformKind::Intersection => self.s.min(self.q),
            TransformKind::Parity => 1,
        }
    }

    pub fn value(&self, z: Subset, t: u32) -> Result<&BigInt> {
        if z.size() != self.s {
            return Err(Error::Shape(format!(
                "index set has size {}, table expects {}",
                z.size(),
                self.s
            )));
        }
        if t > self.t_max() {
            return Err(Error::Range(format!(
                "second index {t} exceeds {}",
                self.t_max()
            )));
        }
        let r = rank_subset(z, self.n)?;
        Ok(&self.values[r as usize][t as usize])
    }

    pub fn value_at_rank(&self, rank: u64, t: u32) -> &BigInt {
        &self.values[rank as usize][t as usize]
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.values
    }
}

fn check_s(f: &SetFunction, s: u32) -> Result<()> {
    if s > f.n() {
        return Err(Error::Range(format!(
            "transform index size s = {s} exceeds universe size {}",
            f.n()
        )));
    }
    if binomial(f.n(), s) > MAX_TABLE_ENTRIES {
        return Err(Error::Scope(format!(
            "C({},{s}) exceeds the dense table limit",
            f.n()
        )));
    }
    Ok(())
}

/// Superset-sum levels T_w(W) = sum of f(A) over q-subsets A ⊇ W, for
/// all w from q down to 0. Level q is f itself; each lower level is the
/// element-extension sum of the level above divided by the multiplicity
/// q - w, which is always exact.
pub(crate) fn superset_levels(f: &SetFunction, down_to: u32) -> Vec<Vec<BigInt>> {
    let n = f.n();
    let q = f.q();
    let down_to = down_to.min(q);
    let mut levels: Vec<Vec<BigInt>> = vec![Vec::new(); q as usize + 1];
    levels[q as usize] = f.values().to_vec();
    for m in (down_to..q).rev() {
        let mut acc = vec![BigInt::zero(); binomial(n, m) as usize];
        for (upper_rank, v) in subsets(n, m + 1).enumerate() {
            let val = &levels[m as usize + 1][upper_rank];
            if val.is_zero() {
                continue;
            }
            for u in v.members() {
                let w = v.remove(u);
                let r = rank_subset(w, n).expect("member subset stays in universe");
                acc[r as usize] += val;
            }
        }
        let divisor = BigInt::from(q - m);
        for slot in acc.iter_mut() {
            let (quot, rem) = slot.div_rem(&divisor);
            assert!(rem.is_zero(), "superset level division must be exact");
            *slot = quot;
        }
        levels[m as usize] = acc;
    }
    levels
}

/// Intersection transform of f over all s-subsets Z.
pub fn intersection_transform(f: &SetFunction, s: u32) -> Result<TransformTable> {
    intersection_transform_counted(f, s, &Counters::new())
}

pub fn intersection_transform_counted(
    f: &SetFunction,
    s: u32,
    counters: &Counters,
) -> Result<TransformTable> {
    check_s(f, s)?;
    let n = f.n();
    let q = f.q();
    let t_max = s.min(q);
    let levels = superset_levels(f, 0);
    for m in 0..=t_max.min(q) {
        counters.add_transform(levels[m as usize].len() as u64);
    }

    // Pascal triangle for the inversion coefficients.
    let mut choose = vec![vec![0i64; t_max as usize + 1]; t_max as usize + 1];
    for w in 0..=t_max as usize {
        choose[w][0] = 1;
        for t in 1..=w {
            choose[w][t] = choose[w - 1][t - 1] + if t <= w - 1 { choose[w - 1][t] } else { 0 };
        }
    }

    let zs: Vec<Subset> = subsets(n, s).collect();
    let values: Vec<Vec<BigInt>> = zs
        .par_iter()
        .map(|z| {
            // c_w = sum of T_w(W) over w-subsets W of Z, for w <= t_max.
            let mut c = vec![BigInt::zero(); t_max as usize + 1];
            let members = z.members();
            for mask in 0u64..(1u64 << members.len()) {
                let w = mask.count_ones();
                if w > t_max {
                    continue;
                }
                let mut bits = 0u64;
                let mut mm = mask;
                while mm != 0 {
                    let p = mm.trailing_zeros();
                    bits |= 1u64 << members[p as usize];
                    mm &= mm - 1;
                }
                let r = rank_subset(Subset::from_bits(bits), n).expect("subset of Z fits");
                c[w as usize] += &levels[w as usize][r as usize];
            }
            // Binomial inversion: f_iota_t = sum over w >= t of
            // (-1)^(w-t) C(w,t) c_w.
            let mut row = Vec::with_capacity(t_max as usize + 1);
            for t in 0..=t_max as usize {
                let mut acc = BigInt::zero();
                for w in t..=t_max as usize {
                    let coeff = choose[w][t] * if (w - t) % 2 == 0 { 1 } else { -1 };
                    acc += coeff * &c[w];
                }
                row.push(acc);
            }
            row
        })
        .collect();
    counters.add_transform(values.len() as u64 * (t_max as u64 + 1));

    let mut values = values;
    fault_hook(&mut values);
    Ok(TransformTable {
        n,
        q,
        s,
        kind: TransformKind::Intersection,
        values,
    })
}

/// Parity transform of f over all s-subsets Z: entry p sums f(A) over
/// the A whose intersection with Z has parity p.
pub fn parity_transform(f: &SetFunction, s: u32) -> Result<TransformTable> {
    parity_transform_counted(f, s, &Counters::new())
}

pub fn parity_transform_counted(
    f: &SetFunction,
    s: u32,
    counters: &Counters,
) -> Result<TransformTable> {
    let inter = intersection_transform_counted(f, s, counters)?;
    let values: Vec<Vec<BigInt>> = inter
        .values
        .iter()
        .map(|row| {
            let mut even = BigInt::zero();
            let mut odd = BigInt::zero();
            for (t, v) in row.iter().enumerate() {
                if t % 2 == 0 {
                    even += v;
                } else {
                    odd += v;
                }
            }
            vec![even, odd]
        })
        .collect();
    counters.add_transform(values.len() as u64 * 2);
    Ok(TransformTable {
        n: inter.n,
        q: inter.q,
        s,
        kind: TransformKind::Parity,
        values,
    })
}

#[cfg(not(feature = "inject-fault"))]
fn fault_hook(_values: &mut [Vec<BigInt>]) {}

#[cfg(feature = "inject-fault")]
fn fault_hook(values: &mut [Vec<BigInt>]) {
    if let Some(row) = values.first_mut() {
        if let Some(v) = row.first_mut() {
            *v += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{naive_intersection_transform, naive_parity_transform};
    use num_traits::One;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_fn(rng: &mut ChaCha8Rng, n: u32, q: u32) -> SetFunction {
        let mut f = SetFunction::zeros(n, q).unwrap();
        for sub in subsets(n, q) {
            f.set(sub, BigInt::from(rng.gen_range(-99i64..=99))).unwrap();
        }
        f
    }

    #[test]
    fn all_ones_pairs_examples() {
        // f ≡ 1 on pairs from a 4-element universe, Z = {0}: three pairs
        // contain 0 and three avoid it.
        let f = SetFunction::constant(4, 2, BigInt::one()).unwrap();
        let t = intersection_transform(&f, 1).unwrap();
        let z = Subset::from_members(&[0]).unwrap();
        assert_eq!(t.value(z, 1).unwrap(), &BigInt::from(3));
        assert_eq!(t.value(z, 0).unwrap(), &BigInt::from(3));
    }

    #[test]
    fn empty_z_sums_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random_fn(&mut rng, 5, 2);
        let t = intersection_transform(&f, 0).unwrap();
        assert_eq!(t.value(Subset::EMPTY, 0).unwrap(), &f.total());
        let p = parity_transform(&f, 0).unwrap();
        assert_eq!(p.value(Subset::EMPTY, 0).unwrap(), &f.total());
        assert_eq!(p.value(Subset::EMPTY, 1).unwrap(), &BigInt::zero());
    }

    #[test]
    fn parity_example_all_ones() {
        let f = SetFunction::constant(4, 2, BigInt::one()).unwrap();
        let p = parity_transform(&f, 1).unwrap();
        let z = Subset::from_members(&[0]).unwrap();
        assert_eq!(p.value(z, 0).unwrap(), &BigInt::from(3));
        assert_eq!(p.value(z, 1).unwrap(), &BigInt::from(3));
    }

    #[test]
    fn parity_single_point_even_overlap() {
        let at = Subset::from_members(&[0, 1]).unwrap();
        let mut f = SetFunction::zeros(4, 2).unwrap();
        f.set(at, BigInt::from(5)).unwrap();
        let p = parity_transform(&f, 2).unwrap();
        assert_eq!(p.value(at, 0).unwrap(), &BigInt::from(5));
        assert_eq!(p.value(at, 1).unwrap(), &BigInt::zero());
    }

    #[test]
    fn s_above_n_is_range_error() {
        let f = SetFunction::zeros(4, 2).unwrap();
        assert!(intersection_transform(&f, 5).is_err());
    }

    #[cfg_attr(feature = "inject-fault", ignore = "fault injection breaks transforms")]
    #[test]
    fn matches_naive_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in 1..=8u32 {
            for q in 0..=3.min(n) {
                let f = random_fn(&mut rng, n, q);
                for s in 0..=4.min(n) {
                    let fast = intersection_transform(&f, s).unwrap();
                    let naive = naive_intersection_transform(&f, s);
                    for (zr, row) in naive.iter().enumerate() {
                        for (t, v) in row.iter().enumerate() {
                            assert_eq!(fast.value_at_rank(zr as u64, t as u32), v);
                        }
                    }
                    let fastp = parity_transform(&f, s).unwrap();
                    let naivep = naive_parity_transform(&f, s);
                    for (zr, row) in naivep.iter().enumerate() {
                        for (p, v) in row.iter().enumerate() {
                            assert_eq!(fastp.value_at_rank(zr as u64, p as u32), v);
                        }
                    }
                }
            }
        }
    }

    #[cfg_attr(feature = "inject-fault", ignore = "fault injection breaks transforms")]
    #[test]
    fn row_sums_and_parity_sums_recover_total() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = random_fn(&mut rng, 7, 3);
        let total = f.total();
        for s in 0..=4u32 {
            let t = intersection_transform(&f, s).unwrap();
            let p = parity_transform(&f, s).unwrap();
            for zr in 0..binomial(7, s) {
                let mut acc = BigInt::zero();
                for ti in 0..=t.t_max() {
                    acc += t.value_at_rank(zr, ti);
                }
                assert_eq!(acc, total);
                assert_eq!(
                    p.value_at_rank(zr, 0) + p.value_at_rank(zr, 1),
                    total
                );
            }
        }
    }

    #[cfg_attr(feature = "inject-fault", ignore = "fault injection breaks transforms")]
    #[test]
    fn parity_difference_matches_signed_sum() {
        // f_pi_0(Z) - f_pi_1(Z) = sum of f(A) * (-1)^{|A ∩ Z|}.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = random_fn(&mut rng, 6, 2);
        for s in 0..=3u32 {
            let p = parity_transform(&f, s).unwrap();
            for (zr, z) in subsets(6, s).enumerate() {
                let mut signed = BigInt::zero();
                for (a, v) in f.iter() {
                    if a.intersection_size(z) % 2 == 0 {
                        signed += v;
                    } else {
                        signed -= v;
                    }
                }
                assert_eq!(
                    p.value_at_rank(zr as u64, 0) - p.value_at_rank(zr as u64, 1),
                    signed
                );
            }
        }
    }

    #[cfg_attr(feature = "inject-fault", ignore = "fault injection breaks transforms")]
    #[test]
    fn transform_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f = random_fn(&mut rng, 6, 2);
        let g = random_fn(&mut rng, 6, 2);
        let mut sum = SetFunction::zeros(6, 2).unwrap();
        for sub in subsets(6, 2) {
            sum.set(sub, f.value(sub).unwrap() + g.value(sub).unwrap())
                .unwrap();
        }
        let tf = intersection_transform(&f, 2).unwrap();
        let tg = intersection_transform(&g, 2).unwrap();
        let ts = intersection_transform(&sum, 2).unwrap();
        for zr in 0..binomial(6, 2) {
            for t in 0..=2u32 {
                assert_eq!(
                    ts.value_at_rank(zr, t),
                    &(tf.value_at_rank(zr, t) + tg.value_at_rank(zr, t))
                );
            }
        }
    }
}
