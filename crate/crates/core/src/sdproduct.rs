//! Symmetric-difference products via exact integer matrix multiplication,
//! and the direct (second-family) evaluation of the indeterminates x_j.
//!
//! For f, g on q-subsets and even ℓ, the table
//!
//! ```text
//! (f ⊕ g)(D) = sum of f(A) g(B) over pairs with A ⊕ B = D,  |D| = ℓ
//! ```
//!
//! is recovered from the product of two rectangular matrices: F indexed
//! by (half-difference I, overlap K) holding f(I ∪ K) on disjoint pairs,
//! and G transposed likewise for g. The overlap K ranges over
//! (q - ℓ/2)-subsets and is the inner dimension of the product.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::counters::Counters;
use crate::error::{Error, Result};
use crate::setcore::{
    binomial, k_subsets_of, rank_subset, subsets, SetFunction, Subset, MAX_TABLE_ENTRIES,
};
use crate::transforms::intersection_transform_counted;

/// Dense matrix of exact integers, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.get_mut(i, i) = BigInt::from(1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(IntMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }

    fn row_slice(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
}

/// Multiplication strategy. All backends produce bit-identical results;
/// they differ only in operation order and padding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatmulBackend {
    Naive,
    Blocked,
    StrassenSquare,
    #[default]
    Auto,
}

impl MatmulBackend {
    pub const ALL: [MatmulBackend; 4] = [
        MatmulBackend::Naive,
        MatmulBackend::Blocked,
        MatmulBackend::StrassenSquare,
        MatmulBackend::Auto,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MatmulBackend::Naive => "naive",
            MatmulBackend::Blocked => "blocked",
            MatmulBackend::StrassenSquare => "strassen",
            MatmulBackend::Auto => "auto",
        }
    }
}

impl std::str::FromStr for MatmulBackend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(MatmulBackend::Naive),
            "blocked" => Ok(MatmulBackend::Blocked),
            "strassen" | "strassen_square" => Ok(MatmulBackend::StrassenSquare),
            "auto" => Ok(MatmulBackend::Auto),
            other => Err(Error::Parameter(format!(
                "unknown matmul backend '{other}' (expected naive|blocked|strassen|auto)"
            ))),
        }
    }
}

/// Square blocks at or below this edge length use the blocked kernel.
const STRASSEN_CUTOFF: usize = 64;
const BLOCK: usize = 32;

pub fn matmul(a: &IntMatrix, b: &IntMatrix, backend: MatmulBackend) -> Result<IntMatrix> {
    matmul_counted(a, b, backend, &Counters::new())
}

pub fn matmul_counted(
    a: &IntMatrix,
    b: &IntMatrix,
    backend: MatmulBackend,
    counters: &Counters,
) -> Result<IntMatrix> {
    if a.cols != b.rows {
        return Err(Error::Shape(format!(
            "inner dimensions disagree: {}x{} times {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(match backend {
        MatmulBackend::Naive => mul_naive(a, b, counters),
        MatmulBackend::Blocked => mul_blocked(a, b, counters),
        MatmulBackend::StrassenSquare => mul_strassen_entry(a, b, counters),
        MatmulBackend::Auto => mul_auto(a, b, counters),
    })
}

fn mul_naive(a: &IntMatrix, b: &IntMatrix, counters: &Counters) -> IntMatrix {
    let mut out = IntMatrix::zeros(a.rows, b.cols);
    out.data
        .par_chunks_mut(b.cols.max(1))
        .enumerate()
        .for_each(|(i, out_row)| {
            for k in 0..a.cols {
                let aik = a.get(i, k);
                if aik.is_zero() {
                    continue;
                }
                let brow = b.row_slice(k);
                for (o, bkj) in out_row.iter_mut().zip(brow) {
                    *o += aik * bkj;
                }
            }
        });
    counters.add_matmul(a.rows as u64 * a.cols as u64 * b.cols as u64);
    out
}

fn mul_blocked(a: &IntMatrix, b: &IntMatrix, counters: &Counters) -> IntMatrix {
    let mut out = IntMatrix::zeros(a.rows, b.cols);
    let cols = b.cols;
    out.data
        .par_chunks_mut(cols.max(1) * BLOCK)
        .enumerate()
        .for_each(|(chunk, out_block)| {
            let i0 = chunk * BLOCK;
            let i1 = (i0 + BLOCK).min(a.rows);
            for k0 in (0..a.cols).step_by(BLOCK) {
                let k1 = (k0 + BLOCK).min(a.cols);
                for j0 in (0..cols).step_by(BLOCK) {
                    let j1 = (j0 + BLOCK).min(cols);
                    for i in i0..i1 {
                        let local = (i - i0) * cols;
                        for k in k0..k1 {
                            let aik = a.get(i, k);
                            if aik.is_zero() {
                                continue;
                            }
                            for j in j0..j1 {
                                out_block[local + j] += aik * b.get(k, j);
                            }
                        }
                    }
                }
            }
        });
    counters.add_matmul(a.rows as u64 * a.cols as u64 * b.cols as u64);
    out
}

/// Pads to a square power of two and runs the Strassen recursion; blocks
/// at or below the cutoff fall back to the blocked kernel.
fn mul_strassen_entry(a: &IntMatrix, b: &IntMatrix, counters: &Counters) -> IntMatrix {
    let side = a.rows.max(a.cols).max(b.cols).max(1);
    if side <= STRASSEN_CUTOFF {
        return mul_blocked(a, b, counters);
    }
    let n = side.next_power_of_two();
    let pa = pad_square(a, n);
    let pb = pad_square(b, n);
    let pc = strassen_rec(&pa, &pb, counters);
    let mut out = IntMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for j in 0..b.cols {
            *out.get_mut(i, j) = pc.get(i, j).clone();
        }
    }
    out
}

fn pad_square(m: &IntMatrix, n: usize) -> IntMatrix {
    let mut out = IntMatrix::zeros(n, n);
    for i in 0..m.rows {
        for j in 0..m.cols {
            *out.get_mut(i, j) = m.get(i, j).clone();
        }
    }
    out
}

fn quadrant(m: &IntMatrix, qi: usize, qj: usize) -> IntMatrix {
    let h = m.rows / 2;
    let mut out = IntMatrix::zeros(h, h);
    for i in 0..h {
        for j in 0..h {
            *out.get_mut(i, j) = m.get(qi * h + i, qj * h + j).clone();
        }
    }
    out
}

fn mat_add(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let mut out = a.clone();
    for (o, v) in out.data.iter_mut().zip(&b.data) {
        *o += v;
    }
    out
}

fn mat_sub(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let mut out = a.clone();
    for (o, v) in out.data.iter_mut().zip(&b.data) {
        *o -= v;
    }
    out
}

fn strassen_rec(a: &IntMatrix, b: &IntMatrix, counters: &Counters) -> IntMatrix {
    let n = a.rows;
    if n <= STRASSEN_CUTOFF {
        return mul_blocked(a, b, counters);
    }
    let a11 = quadrant(a, 0, 0);
    let a12 = quadrant(a, 0, 1);
    let a21 = quadrant(a, 1, 0);
    let a22 = quadrant(a, 1, 1);
    let b11 = quadrant(b, 0, 0);
    let b12 = quadrant(b, 0, 1);
    let b21 = quadrant(b, 1, 0);
    let b22 = quadrant(b, 1, 1);

    let m1 = strassen_rec(&mat_add(&a11, &a22), &mat_add(&b11, &b22), counters);
    let m2 = strassen_rec(&mat_add(&a21, &a22), &b11, counters);
    let m3 = strassen_rec(&a11, &mat_sub(&b12, &b22), counters);
    let m4 = strassen_rec(&a22, &mat_sub(&b21, &b11), counters);
    let m5 = strassen_rec(&mat_add(&a11, &a12), &b22, counters);
    let m6 = strassen_rec(&mat_sub(&a21, &a11), &mat_add(&b11, &b12), counters);
    let m7 = strassen_rec(&mat_sub(&a12, &a22), &mat_add(&b21, &b22), counters);

    let c11 = mat_add(&mat_sub(&mat_add(&m1, &m4), &m5), &m7);
    let c12 = mat_add(&m3, &m5);
    let c21 = mat_add(&m2, &m4);
    let c22 = mat_add(&mat_add(&mat_sub(&m1, &m2), &m3), &m6);

    let h = n / 2;
    let mut out = IntMatrix::zeros(n, n);
    for i in 0..h {
        for j in 0..h {
            *out.get_mut(i, j) = c11.get(i, j).clone();
            *out.get_mut(i, j + h) = c12.get(i, j).clone();
            *out.get_mut(i + h, j) = c21.get(i, j).clone();
            *out.get_mut(i + h, j + h) = c22.get(i, j).clone();
        }
    }
    out
}

/// Rectangular products with a long inner dimension decompose into a sum
/// of square products over inner chunks; everything else goes to the
/// blocked kernel.
fn mul_auto(a: &IntMatrix, b: &IntMatrix, counters: &Counters) -> IntMatrix {
    let outer = a.rows.max(b.cols).max(1);
    if a.cols <= outer {
        return mul_blocked(a, b, counters);
    }
    let mut out = IntMatrix::zeros(a.rows, b.cols);
    for k0 in (0..a.cols).step_by(outer) {
        let k1 = (k0 + outer).min(a.cols);
        let mut pa = IntMatrix::zeros(outer, outer);
        for i in 0..a.rows {
            for k in k0..k1 {
                *pa.get_mut(i, k - k0) = a.get(i, k).clone();
            }
        }
        let mut pb = IntMatrix::zeros(outer, outer);
        for k in k0..k1 {
            for j in 0..b.cols {
                *pb.get_mut(k - k0, j) = b.get(k, j).clone();
            }
        }
        let prod = mul_blocked(&pa, &pb, counters);
        for i in 0..a.rows {
            for j in 0..b.cols {
                *out.get_mut(i, j) += prod.get(i, j);
            }
        }
    }
    out
}

/// Which of the two pair matrices to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSide {
    /// Rows are half-difference sets I, columns overlap sets K; entry
    /// (I, K) is f(I ∪ K) on disjoint pairs.
    Left,
    /// The transposed layout for the right factor: rows K, columns J,
    /// entry g(K ∪ J).
    Right,
}

fn check_ell(f: &SetFunction, ell: u32) -> Result<()> {
    if ell % 2 != 0 {
        return Err(Error::Parity(format!(
            "symmetric difference of equal-size sets has even size, got ell = {ell}"
        )));
    }
    if ell > 2 * f.q() {
        return Err(Error::Range(format!(
            "ell = {ell} exceeds 2q = {}",
            2 * f.q()
        )));
    }
    Ok(())
}

/// Builds the pair matrix of f for the given even difference size.
pub fn build_pair_matrix(f: &SetFunction, ell: u32, side: PairSide) -> Result<IntMatrix> {
    check_ell(f, ell)?;
    let n = f.n();
    let q = f.q();
    let half = ell / 2;
    let overlap = q - half;
    let half_count = binomial(n, half) as usize;
    let overlap_count = binomial(n, overlap) as usize;
    if half_count as u64 * overlap_count as u64 > MAX_TABLE_ENTRIES {
        return Err(Error::Scope("pair matrix exceeds the dense table limit".into()));
    }
    let halves: Vec<Subset> = subsets(n, half).collect();
    let overlaps: Vec<Subset> = subsets(n, overlap).collect();
    let (rows, cols): (&[Subset], &[Subset]) = match side {
        PairSide::Left => (&halves, &overlaps),
        PairSide::Right => (&overlaps, &halves),
    };
    let mut m = IntMatrix::zeros(rows.len(), cols.len());
    for (ri, r) in rows.iter().enumerate() {
        for (ci, c) in cols.iter().enumerate() {
            if r.is_disjoint(*c) {
                *m.get_mut(ri, ci) = f.value(r.union(*c))?.clone();
            }
        }
    }
    Ok(m)
}

/// Values of (f ⊕ g) over all subsets D of one even size ℓ, indexed by
/// colex rank.
#[derive(Debug, Clone)]
pub struct SdProductTable {
    n: u32,
    ell: u32,
    values: Vec<BigInt>,
}

impl SdProductTable {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn value(&self, d: Subset) -> Result<&BigInt> {
        if d.size() != self.ell {
            return Err(Error::Shape(format!(
                "set has size {}, table stores size {}",
                d.size(),
                self.ell
            )));
        }
        let r = rank_subset(d, self.n)?;
        Ok(&self.values[r as usize])
    }

    pub fn value_at_rank(&self, rank: u64) -> &BigInt {
        &self.values[rank as usize]
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }
}

/// Computes (f ⊕ g) for one even size ℓ by multiplying the two pair
/// matrices and summing the product over the balanced splits of each D.
pub fn symmetric_difference_product(
    f: &SetFunction,
    g: &SetFunction,
    ell: u32,
    backend: MatmulBackend,
) -> Result<SdProductTable> {
    symmetric_difference_product_counted(f, g, ell, backend, &Counters::new())
}

pub fn symmetric_difference_product_counted(
    f: &SetFunction,
    g: &SetFunction,
    ell: u32,
    backend: MatmulBackend,
    counters: &Counters,
) -> Result<SdProductTable> {
    f.same_shape(g)?;
    check_ell(f, ell)?;
    let n = f.n();
    let left = build_pair_matrix(f, ell, PairSide::Left)?;
    let right = build_pair_matrix(g, ell, PairSide::Right)?;
    let fg = matmul_counted(&left, &right, backend, counters)?;
    let half = ell / 2;
    let values: Vec<BigInt> = subsets(n, ell)
        .map(|d| {
            let mut acc = BigInt::zero();
            for i in k_subsets_of(d, half) {
                let j = d.difference(i);
                let ri = rank_subset(i, n).expect("split of D fits universe");
                let rj = rank_subset(j, n).expect("split of D fits universe");
                acc += fg.get(ri as usize, rj as usize);
            }
            acc
        })
        .collect();
    Ok(SdProductTable { n, ell, values })
}

/// Direct evaluation of the indeterminate x_j: the total weight
/// f(A)g(B)h(C) over triples with |A ⊕ B ⊕ C| = j, assembled from
/// (f ⊕ g) tables and the intersection transform of h.
pub fn x_direct(f: &SetFunction, g: &SetFunction, h: &SetFunction, j: u32) -> Result<BigInt> {
    x_direct_counted(f, g, h, j, MatmulBackend::Auto, &Counters::new())
}

pub fn x_direct_counted(
    f: &SetFunction,
    g: &SetFunction,
    h: &SetFunction,
    j: u32,
    backend: MatmulBackend,
    counters: &Counters,
) -> Result<BigInt> {
    let map = x_direct_batch(f, g, h, &[j], backend, counters)?;
    Ok(map.into_iter().next().expect("one requested j").1)
}

/// Evaluates x_j for several j at once, sharing the per-size product and
/// transform tables.
pub fn x_direct_batch(
    f: &SetFunction,
    g: &SetFunction,
    h: &SetFunction,
    js: &[u32],
    backend: MatmulBackend,
    counters: &Counters,
) -> Result<Vec<(u32, BigInt)>> {
    f.same_shape(g)?;
    f.same_shape(h)?;
    let n = f.n();
    let q = f.q();
    for &j in js {
        if j > 3 * q || j % 2 != q % 2 {
            return Err(Error::Parity(format!(
                "j = {j} is not a feasible triple symmetric-difference size for q = {q}"
            )));
        }
    }

    let mut tables: std::collections::BTreeMap<u32, (SdProductTable, crate::transforms::TransformTable)> =
        std::collections::BTreeMap::new();
    let mut out = Vec::with_capacity(js.len());
    for &j in js {
        let lo = q.saturating_sub(j);
        let hi = (q + j).min(2 * q);
        let mut acc = BigInt::zero();
        let mut ell = lo;
        while ell <= hi {
            // Sizes above n have no witness sets D; sizes below j - q
            // leave no feasible overlap with C.
            if ell <= n && q + ell >= j {
                let t = (q + ell - j) / 2;
                if !tables.contains_key(&ell) {
                    let sdp =
                        symmetric_difference_product_counted(f, g, ell, backend, counters)?;
                    let hi_t = intersection_transform_counted(h, ell, counters)?;
                    tables.insert(ell, (sdp, hi_t));
                }
                let (sdp, hiota) = &tables[&ell];
                for rank in 0..binomial(n, ell) {
                    let w = sdp.value_at_rank(rank);
                    if !w.is_zero() {
                        acc += w * hiota.value_at_rank(rank, t);
                    }
                }
            }
            ell += 2;
        }
        out.push((j, acc));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_xj;
    use crate::setcore::j_support;
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

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(r, c);
        for i in 0..r {
            for j in 0..c {
                *m.get_mut(i, j) = BigInt::from(rng.gen_range(-1_000_000i64..=1_000_000));
            }
        }
        m
    }

    #[test]
    fn matmul_hand_example() {
        let a = IntMatrix::from_rows(vec![
            vec![BigInt::from(1), BigInt::from(2)],
            vec![BigInt::from(3), BigInt::from(4)],
        ])
        .unwrap();
        let b = IntMatrix::from_rows(vec![
            vec![BigInt::from(5), BigInt::from(6)],
            vec![BigInt::from(7), BigInt::from(8)],
        ])
        .unwrap();
        for backend in MatmulBackend::ALL {
            let c = matmul(&a, &b, backend).unwrap();
            assert_eq!(c.get(0, 0), &BigInt::from(19));
            assert_eq!(c.get(0, 1), &BigInt::from(22));
            assert_eq!(c.get(1, 0), &BigInt::from(43));
            assert_eq!(c.get(1, 1), &BigInt::from(50));
        }
    }

    #[test]
    fn identity_is_neutral() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(&mut rng, 5, 5);
        let id = IntMatrix::identity(5);
        for backend in MatmulBackend::ALL {
            assert_eq!(matmul(&id, &a, backend).unwrap(), a);
            assert_eq!(matmul(&a, &id, backend).unwrap(), a);
        }
    }

    #[test]
    fn backends_agree_on_random_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for &(r, m, c) in &[(7usize, 3usize, 7usize), (3, 7, 3), (1, 9, 4), (64, 64, 64), (70, 130, 65)] {
            let a = random_matrix(&mut rng, r, m);
            let b = random_matrix(&mut rng, m, c);
            let reference = matmul(&a, &b, MatmulBackend::Naive).unwrap();
            for backend in [
                MatmulBackend::Blocked,
                MatmulBackend::StrassenSquare,
                MatmulBackend::Auto,
            ] {
                assert_eq!(matmul(&a, &b, backend).unwrap(), reference, "{backend:?}");
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_shape_error() {
        let a = IntMatrix::zeros(2, 3);
        let b = IntMatrix::zeros(4, 2);
        assert!(matmul(&a, &b, MatmulBackend::Naive).is_err());
    }

    #[test]
    fn pair_matrix_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_fn(&mut rng, 4, 2);
        // ell = 0: a single row holding f itself.
        let m = build_pair_matrix(&f, 0, PairSide::Left).unwrap();
        assert_eq!((m.rows(), m.cols()), (1, 6));
        for (r, (_, v)) in f.iter().enumerate() {
            assert_eq!(m.get(0, r), v);
        }
        // ell = 2q: a single overlap column holding f.
        let m = build_pair_matrix(&f, 4, PairSide::Left).unwrap();
        assert_eq!((m.rows(), m.cols()), (6, 1));
        for (r, (_, v)) in f.iter().enumerate() {
            assert_eq!(m.get(r, 0), v);
        }
    }

    #[test]
    fn pair_matrix_all_ones_example() {
        let f = SetFunction::constant(3, 1, BigInt::one()).unwrap();
        let m = build_pair_matrix(&f, 2, PairSide::Left).unwrap();
        assert_eq!((m.rows(), m.cols()), (3, 1));
        for i in 0..3 {
            assert_eq!(m.get(i, 0), &BigInt::one());
        }
    }

    #[test]
    fn pair_matrix_rejects_bad_ell() {
        let f = SetFunction::zeros(4, 2).unwrap();
        assert!(build_pair_matrix(&f, 3, PairSide::Left).is_err());
        assert!(build_pair_matrix(&f, 6, PairSide::Left).is_err());
    }

    #[test]
    fn sd_product_zero_size_is_diagonal_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = random_fn(&mut rng, 5, 2);
        let g = random_fn(&mut rng, 5, 2);
        let t = symmetric_difference_product(&f, &g, 0, MatmulBackend::Auto).unwrap();
        let mut expect = BigInt::zero();
        for (a, v) in f.iter() {
            expect += v * g.value(a).unwrap();
        }
        assert_eq!(t.value(Subset::EMPTY).unwrap(), &expect);
    }

    #[test]
    fn sd_product_singletons_example() {
        let f = SetFunction::constant(3, 1, BigInt::one()).unwrap();
        let t = symmetric_difference_product(&f, &f, 2, MatmulBackend::Auto).unwrap();
        let d = Subset::from_members(&[0, 1]).unwrap();
        assert_eq!(t.value(d).unwrap(), &BigInt::from(2));
    }

    #[test]
    fn sd_product_point_masses() {
        let a = Subset::from_members(&[0, 1]).unwrap();
        let b = Subset::from_members(&[1, 2]).unwrap();
        let f = SetFunction::point_mass(5, 2, a).unwrap();
        let g = SetFunction::point_mass(5, 2, b).unwrap();
        let d = a.symmetric_difference(b);
        let t = symmetric_difference_product(&f, &g, d.size(), MatmulBackend::Auto).unwrap();
        for (sub, v) in subsets(5, d.size()).zip(t.values()) {
            let expect = if sub == d { BigInt::one() } else { BigInt::zero() };
            assert_eq!(v, &expect);
        }
    }

    #[test]
    fn sd_product_matches_naive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=7u32 {
            for q in 0..=3.min(n) {
                let f = random_fn(&mut rng, n, q);
                let g = random_fn(&mut rng, n, q);
                for ell in (0..=2 * q).step_by(2) {
                    let t = symmetric_difference_product(&f, &g, ell, MatmulBackend::Auto)
                        .unwrap();
                    for (d, got) in subsets(n, ell).zip(t.values()) {
                        let mut expect = BigInt::zero();
                        for (a, fa) in f.iter() {
                            for (b, gb) in g.iter() {
                                if a.symmetric_difference(b) == d {
                                    expect += fa * gb;
                                }
                            }
                        }
                        assert_eq!(got, &expect, "n={n} q={q} ell={ell}");
                    }
                }
            }
        }
    }

    #[test]
    fn x_direct_examples() {
        let ones2 = SetFunction::constant(2, 1, BigInt::one()).unwrap();
        assert_eq!(x_direct(&ones2, &ones2, &ones2, 1).unwrap(), BigInt::from(8));
        let ones3 = SetFunction::constant(3, 1, BigInt::one()).unwrap();
        assert_eq!(x_direct(&ones3, &ones3, &ones3, 3).unwrap(), BigInt::from(6));
        // j = 3q cannot be realized when the universe is too small.
        let f = SetFunction::constant(2, 1, BigInt::from(4)).unwrap();
        assert_eq!(x_direct(&f, &f, &f, 3).unwrap(), BigInt::zero());
    }

    #[test]
    fn x_direct_rejects_infeasible_j() {
        let f = SetFunction::constant(3, 1, BigInt::one()).unwrap();
        assert!(x_direct(&f, &f, &f, 2).is_err());
        assert!(x_direct(&f, &f, &f, 5).is_err());
    }

    #[test]
    fn x_direct_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 1..=7u32 {
            for q in 0..=2.min(n) {
                let f = random_fn(&mut rng, n, q);
                let g = random_fn(&mut rng, n, q);
                let h = random_fn(&mut rng, n, q);
                let expect = brute_xj(&f, &g, &h).unwrap();
                for (j, xj) in expect {
                    let got = x_direct(&f, &g, &h, j).unwrap();
                    assert_eq!(got, xj, "n={n} q={q} j={j}");
                }
            }
        }
    }

    #[test]
    fn x_direct_range_clamp_is_lossless() {
        // Sweeping every even ell from 0 to 2q gives the same answer as
        // the clamped range.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random_fn(&mut rng, 6, 2);
        let g = random_fn(&mut rng, 6, 2);
        let h = random_fn(&mut rng, 6, 2);
        let counters = Counters::new();
        for j in j_support(2) {
            let mut unrestricted = BigInt::zero();
            for ell in (0..=4u32).step_by(2) {
                if 2 + ell < j {
                    continue;
                }
                let t = (2 + ell - j) / 2;
                if t > ell.min(2) {
                    continue;
                }
                let sdp =
                    symmetric_difference_product(&f, &g, ell, MatmulBackend::Auto).unwrap();
                let hi = intersection_transform_counted(&h, ell, &counters).unwrap();
                for rank in 0..binomial(6, ell) {
                    unrestricted += sdp.value_at_rank(rank) * hi.value_at_rank(rank, t);
                }
            }
            assert_eq!(x_direct(&f, &g, &h, j).unwrap(), unrestricted, "j={j}");
        }
    }
}
