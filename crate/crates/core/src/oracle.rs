//! Independent brute-force reference implementations.
//!
//! These share types with the fast modules but no computation: each is a
//! literal loop nest over the defining sum, deliberately unoptimized,
//! with scope guards so the test suites cannot wander into exponential
//! territory by accident.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::packing::SetFamily;
use crate::setcore::{binomial, j_support, subsets, SetFunction, Subset};
use crate::subgraph::Graph;

/// Delta(f, g, h) by the direct triple loop with the pairwise
/// disjointness filter.
pub fn brute_delta(f: &SetFunction, g: &SetFunction, h: &SetFunction) -> Result<BigInt> {
    f.same_shape(g)?;
    f.same_shape(h)?;
    let mut acc = BigInt::zero();
    for (a, fa) in f.iter() {
        for (b, gb) in g.iter() {
            for (c, hc) in h.iter() {
                if a.is_disjoint(b) && a.is_disjoint(c) && b.is_disjoint(c) {
                    acc += fa * gb * hc;
                }
            }
        }
    }
    Ok(acc)
}

/// All x_j by the direct triple loop classifying each triple by the size
/// of A ⊕ B ⊕ C. Returned ascending by j over J_q.
pub fn brute_xj(
    f: &SetFunction,
    g: &SetFunction,
    h: &SetFunction,
) -> Result<Vec<(u32, BigInt)>> {
    f.same_shape(g)?;
    f.same_shape(h)?;
    let support = j_support(f.q());
    let mut acc: Vec<BigInt> = vec![BigInt::zero(); support.len()];
    for (a, fa) in f.iter() {
        for (b, gb) in g.iter() {
            for (c, hc) in h.iter() {
                let j = a.symmetric_difference(b).symmetric_difference(c).size();
                let slot = support
                    .iter()
                    .position(|&s| s == j)
                    .expect("triple size lies in J_q");
                acc[slot] += fa * gb * hc;
            }
        }
    }
    Ok(support.into_iter().zip(acc).collect())
}

/// Number of i-tuples over an n-element universe whose running symmetric
/// difference has each possible size, by plain enumeration of all n^i
/// tuples. Index s of the result holds the count for size s.
pub fn tuple_sym_diff_counts(n: u32, i: u32) -> Vec<BigInt> {
    let mut counts = vec![BigInt::zero(); i as usize + 1];
    let mut tuple = vec![0u32; i as usize];
    loop {
        let mut z = 0u64;
        for &u in &tuple {
            z ^= 1u64 << u;
        }
        counts[z.count_ones() as usize] += 1;
        let mut pos = 0;
        loop {
            if pos == tuple.len() {
                return counts;
            }
            tuple[pos] += 1;
            if tuple[pos] < n {
                break;
            }
            tuple[pos] = 0;
            pos += 1;
        }
    }
}

/// Intersection transform by the naive double loop over (Z, A); rows by
/// colex rank of Z, columns by t.
pub fn naive_intersection_transform(f: &SetFunction, s: u32) -> Vec<Vec<BigInt>> {
    let n = f.n();
    let t_max = s.min(f.q()) as usize;
    subsets(n, s)
        .map(|z| {
            let mut row = vec![BigInt::zero(); t_max + 1];
            for (a, v) in f.iter() {
                row[a.intersection_size(z) as usize] += v;
            }
            row
        })
        .collect()
}

/// Parity transform by the naive double loop.
pub fn naive_parity_transform(f: &SetFunction, s: u32) -> Vec<Vec<BigInt>> {
    let n = f.n();
    subsets(n, s)
        .map(|z| {
            let mut row = vec![BigInt::zero(), BigInt::zero()];
            for (a, v) in f.iter() {
                row[(a.intersection_size(z) % 2) as usize] += v;
            }
            row
        })
        .collect()
}

/// Symmetric-difference product by enumeration of all (A, B) pairs.
pub fn naive_sd_product(f: &SetFunction, g: &SetFunction, ell: u32) -> Result<Vec<BigInt>> {
    f.same_shape(g)?;
    let n = f.n();
    let mut out = vec![BigInt::zero(); binomial(n, ell) as usize];
    for (d_rank, d) in subsets(n, ell).enumerate() {
        for (a, fa) in f.iter() {
            for (b, gb) in g.iter() {
                if a.symmetric_difference(b) == d {
                    out[d_rank] += fa * gb;
                }
            }
        }
    }
    Ok(out)
}

/// Number of subgraphs of `host` isomorphic to `pattern`, by exhaustive
/// injective edge-preserving maps deduplicated by their image subgraph.
pub fn brute_subgraph_count(pattern: &Graph, host: &Graph) -> Result<BigInt> {
    if pattern.n() > 8 || host.n() > 10 {
        return Err(Error::Scope(format!(
            "brute-force subgraph counting is limited to patterns on 8 and hosts on 10 vertices, \
             got {} and {}",
            pattern.n(),
            host.n()
        )));
    }
    let k = pattern.n() as usize;
    let n = host.n() as usize;
    let mut images: HashSet<(Vec<u32>, Vec<(u32, u32)>)> = HashSet::new();
    let mut map = vec![u32::MAX; k];
    let mut used = vec![false; n];

    fn extend(
        pattern: &Graph,
        host: &Graph,
        map: &mut Vec<u32>,
        used: &mut Vec<bool>,
        depth: usize,
        images: &mut HashSet<(Vec<u32>, Vec<(u32, u32)>)>,
    ) {
        let k = map.len();
        if depth == k {
            let mut verts: Vec<u32> = map.clone();
            verts.sort_unstable();
            let mut edges: Vec<(u32, u32)> = pattern
                .edges()
                .iter()
                .map(|&(u, v)| {
                    let (a, b) = (map[u as usize], map[v as usize]);
                    (a.min(b), a.max(b))
                })
                .collect();
            edges.sort_unstable();
            images.insert((verts, edges));
            return;
        }
        for cand in 0..host.n() {
            if used[cand as usize] {
                continue;
            }
            let ok = pattern.edges().iter().all(|&(u, v)| {
                let (u, v) = (u as usize, v as usize);
                if u == depth && map[v] != u32::MAX {
                    host.adjacent(cand, map[v])
                } else if v == depth && map[u] != u32::MAX {
                    host.adjacent(cand, map[u])
                } else {
                    true
                }
            });
            if !ok {
                continue;
            }
            map[depth] = cand;
            used[cand as usize] = true;
            extend(pattern, host, map, used, depth + 1, images);
            map[depth] = u32::MAX;
            used[cand as usize] = false;
        }
    }

    extend(pattern, host, &mut map, &mut used, 0, &mut images);
    Ok(BigInt::from(images.len() as u64))
}

/// Number of ordered t-tuples of pairwise disjoint members of the family,
/// by plain enumeration with a running disjointness mask.
pub fn brute_packing_count(family: &SetFamily, t: u32) -> Result<BigInt> {
    let size = family.members().len() as u128;
    let mut budget: u128 = 1;
    for _ in 0..t {
        budget = budget.saturating_mul(size.max(1));
        if budget > 10_000_000 {
            return Err(Error::Scope(format!(
                "brute-force packing enumeration over |F|^t = {size}^{t} is out of scope"
            )));
        }
    }

    fn extend(members: &[Subset], mask: u64, remaining: u32, acc: &mut BigInt) {
        if remaining == 0 {
            *acc += 1;
            return;
        }
        for m in members {
            if m.bits() & mask == 0 {
                extend(members, mask | m.bits(), remaining - 1, acc);
            }
        }
    }

    let mut acc = BigInt::zero();
    extend(family.members(), 0, t, &mut acc);
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn brute_delta_examples() {
        let ones = SetFunction::constant(3, 1, BigInt::one()).unwrap();
        assert_eq!(brute_delta(&ones, &ones, &ones).unwrap(), BigInt::from(6));

        // Universe too small for three disjoint pairs.
        let small = SetFunction::constant(5, 2, BigInt::from(3)).unwrap();
        assert_eq!(brute_delta(&small, &small, &small).unwrap(), BigInt::zero());

        let a = Subset::from_members(&[0]).unwrap();
        let b = Subset::from_members(&[1]).unwrap();
        let c = Subset::from_members(&[2]).unwrap();
        let f = SetFunction::point_mass(3, 1, a).unwrap();
        let mut g = SetFunction::zeros(3, 1).unwrap();
        g.set(b, BigInt::from(5)).unwrap();
        let mut h = SetFunction::zeros(3, 1).unwrap();
        h.set(c, BigInt::from(7)).unwrap();
        assert_eq!(brute_delta(&f, &g, &h).unwrap(), BigInt::from(35));
    }

    #[test]
    fn brute_xj_examples() {
        let ones2 = SetFunction::constant(2, 1, BigInt::one()).unwrap();
        let xs = brute_xj(&ones2, &ones2, &ones2).unwrap();
        assert_eq!(xs, vec![(1, BigInt::from(8)), (3, BigInt::zero())]);

        let ones3 = SetFunction::constant(3, 1, BigInt::one()).unwrap();
        let xs = brute_xj(&ones3, &ones3, &ones3).unwrap();
        assert_eq!(xs, vec![(1, BigInt::from(21)), (3, BigInt::from(6))]);
        let total: BigInt = xs.into_iter().map(|(_, v)| v).sum();
        assert_eq!(total, BigInt::from(27));
    }

    #[test]
    fn tuple_counts_sum_to_n_pow_i() {
        for n in 1..=4u32 {
            for i in 0..=4u32 {
                let counts = tuple_sym_diff_counts(n, i);
                let total: BigInt = counts.iter().sum();
                assert_eq!(total, BigInt::from(n).pow(i));
            }
        }
    }
}
