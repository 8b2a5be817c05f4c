//! Seeded self-test: runs a compact version of the full invariant grid
//! (every fast path against its brute-force oracle) and reports one
//! named pass/fail per check. The CLI exposes this as `selftest`.

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::firstfam::{vandermonde_coeff, y_values};
use crate::linsys::{tau_gamma, weighted_disjoint_triples, GammaChoice};
use crate::oracle::{
    brute_delta, brute_packing_count, brute_subgraph_count, brute_xj,
    naive_intersection_transform, tuple_sym_diff_counts,
};
use crate::packing::{count_set_packings, SetFamily};
use crate::sdproduct::{matmul, x_direct, IntMatrix, MatmulBackend};
use crate::setcore::{binomial, j_support, rank_subset, subsets, unrank_subset, SetFunction};
use crate::subgraph::{
    builtin_decomposition, count_subgraph_occurrences, five_partition, BuiltinPattern,
};
use crate::transforms::intersection_transform;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct SelftestReport {
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn record(&mut self, name: &'static str, outcome: std::result::Result<(), String>) {
        match outcome {
            Ok(()) => self.checks.push(CheckResult {
                name,
                passed: true,
                detail: String::new(),
            }),
            Err(detail) => self.checks.push(CheckResult {
                name,
                passed: false,
                detail,
            }),
        }
    }
}

fn random_fn(rng: &mut ChaCha8Rng, n: u32, q: u32) -> SetFunction {
    let mut f = SetFunction::zeros(n, q).expect("desk-scale table");
    for sub in subsets(n, q) {
        f.set(sub, BigInt::from(rng.gen_range(-99i64..=99))).unwrap();
    }
    f
}

/// Runs every check with randomness derived from `seed`.
pub fn run(seed: u64) -> SelftestReport {
    let mut report = SelftestReport::default();

    report.record("rank-unrank-roundtrip", {
        let mut out = Ok(());
        'outer: for n in 1..=10u32 {
            for q in 0..=n {
                for r in 0..binomial(n, q) {
                    let sub = unrank_subset(r, n, q).unwrap();
                    if rank_subset(sub, n).unwrap() != r {
                        out = Err(format!("mismatch at n={n} q={q} rank={r}"));
                        break 'outer;
                    }
                }
            }
        }
        out
    });

    report.record("j-support-size", {
        (0..=20u32)
            .find(|&q| j_support(q).len() as u32 != 3 * q / 2 + 1)
            .map_or(Ok(()), |q| Err(format!("wrong size at q={q}")))
    });

    report.record("intersection-transform-vs-naive", {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x11);
        let mut out = Ok(());
        'outer: for n in 2..=7u32 {
            for q in 1..=2.min(n) {
                let f = random_fn(&mut rng, n, q);
                for s in 0..=3.min(n) {
                    let fast = intersection_transform(&f, s).unwrap();
                    let slow = naive_intersection_transform(&f, s);
                    for (zr, row) in slow.iter().enumerate() {
                        for (t, v) in row.iter().enumerate() {
                            if fast.value_at_rank(zr as u64, t as u32) != v {
                                out = Err(format!("mismatch at n={n} q={q} s={s} z-rank={zr} t={t}"));
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        out
    });

    report.record("ln-table-vs-enumeration", {
        let mut out = Ok(());
        'outer: for n in 1..=5u32 {
            for i in 0..=4.min(n) {
                let table = crate::firstfam::ln_table(n, i).unwrap();
                let counts = tuple_sym_diff_counts(n, i);
                for s in 0..=i {
                    if table.value(i, s) != counts[s as usize] {
                        out = Err(format!("mismatch at n={n} i={i} s={s}"));
                        break 'outer;
                    }
                }
            }
        }
        out
    });

    report.record("first-family-identity", {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x22);
        let mut out = Ok(());
        'outer: for (n, q) in [(5u32, 1u32), (6, 1), (5, 2), (7, 2)] {
            let f = random_fn(&mut rng, n, q);
            let g = random_fn(&mut rng, n, q);
            let h = random_fn(&mut rng, n, q);
            let rhs = y_values(&f, &g, &h, Rational64::zero()).unwrap();
            let xs = brute_xj(&f, &g, &h).unwrap();
            for i in 0..=rhs.i_max() {
                let mut lhs = BigInt::zero();
                for (j, x) in &xs {
                    lhs += vandermonde_coeff(n, i, *j) * x;
                }
                if lhs != rhs.y[i as usize] {
                    out = Err(format!("identity fails at n={n} q={q} i={i}"));
                    break 'outer;
                }
            }
        }
        out
    });

    report.record("x-direct-vs-brute", {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x33);
        let mut out = Ok(());
        'outer: for (n, q) in [(5u32, 1u32), (6, 2), (7, 2)] {
            let f = random_fn(&mut rng, n, q);
            let g = random_fn(&mut rng, n, q);
            let h = random_fn(&mut rng, n, q);
            for (j, expect) in brute_xj(&f, &g, &h).unwrap() {
                if x_direct(&f, &g, &h, j).unwrap() != expect {
                    out = Err(format!("x_{j} mismatch at n={n} q={q}"));
                    break 'outer;
                }
            }
        }
        out
    });

    report.record("matmul-backends-agree", {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x44);
        let mut a = IntMatrix::zeros(17, 9);
        let mut b = IntMatrix::zeros(9, 23);
        for i in 0..17 {
            for j in 0..9 {
                *a.get_mut(i, j) = BigInt::from(rng.gen_range(-1000i64..=1000));
            }
        }
        for i in 0..9 {
            for j in 0..23 {
                *b.get_mut(i, j) = BigInt::from(rng.gen_range(-1000i64..=1000));
            }
        }
        let reference = matmul(&a, &b, MatmulBackend::Naive).unwrap();
        MatmulBackend::ALL
            .iter()
            .find(|&&backend| matmul(&a, &b, backend).unwrap() != reference)
            .map_or(Ok(()), |b| Err(format!("{} disagrees with naive", b.name())))
    });

    report.record("delta-vs-brute-grid", {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x55);
        let gammas = [
            GammaChoice::Fixed(Rational64::zero()),
            GammaChoice::Fixed(Rational64::new(1, 8)),
            GammaChoice::Auto,
        ];
        let mut out = Ok(());
        'outer: for (n, q) in [(5u32, 1u32), (6, 1), (6, 2), (8, 2)] {
            let f = random_fn(&mut rng, n, q);
            let g = random_fn(&mut rng, n, q);
            let h = random_fn(&mut rng, n, q);
            let expect = brute_delta(&f, &g, &h).unwrap();
            let expect_x = brute_xj(&f, &g, &h).unwrap();
            for gamma in gammas {
                let r =
                    weighted_disjoint_triples(&f, &g, &h, gamma, MatmulBackend::Auto).unwrap();
                if r.delta != expect || r.x != expect_x {
                    out = Err(format!("delta mismatch at n={n} q={q} gamma={:?}", gamma));
                    break 'outer;
                }
            }
        }
        out
    });

    report.record("packing-vs-brute", {
        let fam = SetFamily::complete(6, 2).unwrap();
        let fast = count_set_packings(&fam, 3, GammaChoice::Auto, MatmulBackend::Auto).unwrap();
        let slow = brute_packing_count(&fam, 3).unwrap();
        if fast == slow && fast == BigInt::from(90) {
            Ok(())
        } else {
            Err(format!("pairs of [6], t=3: fast {fast}, brute {slow}"))
        }
    });

    report.record("subgraph-vs-brute", {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x66);
        let kinds = [
            BuiltinPattern::Path(4),
            BuiltinPattern::Matching(2),
            BuiltinPattern::Cycle(4),
        ];
        let mut out = Ok(());
        for kind in kinds {
            let (p, pd) = builtin_decomposition(kind).unwrap();
            let mut edges = Vec::new();
            let n = 7u32;
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.5) {
                        edges.push((u, v));
                    }
                }
            }
            let host = crate::subgraph::Graph::new(n, &edges).unwrap();
            let fast =
                count_subgraph_occurrences(&p, &host, &pd, GammaChoice::Auto, MatmulBackend::Auto)
                    .unwrap();
            let slow = brute_subgraph_count(&p, &host).unwrap();
            if fast != slow {
                out = Err(format!("{kind:?} on random host: fast {fast}, brute {slow}"));
                break;
            }
        }
        out
    });

    report.record("five-partition-invariants", {
        let mut out = Ok(());
        for k in 1..=8u32 {
            let (p, pd) = builtin_decomposition(BuiltinPattern::Path(k)).unwrap();
            if let Err(e) = five_partition(&p, &pd).and_then(|fp| fp.verify(&p, pd.width())) {
                out = Err(format!("path:{k}: {e}"));
                break;
            }
        }
        out
    });

    report.record("tau-gamma-reference", {
        let (tau, gamma) =
            tau_gamma(Rational64::new(23727, 10000), Rational64::new(3, 10)).unwrap();
        let tau_f = *tau.numer() as f64 / *tau.denom() as f64;
        let exact = tau_gamma(Rational64::from_integer(2), Rational64::one()).unwrap();
        if (tau_f - 0.045302).abs() < 1e-6
            && gamma == tau * Rational64::from_integer(3)
            && exact == (Rational64::new(1, 18), Rational64::new(1, 6))
        {
            Ok(())
        } else {
            Err(format!("tau={tau} gamma={gamma}"))
        }
    });

    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[cfg_attr(feature = "inject-fault", ignore = "fault injection must fail selftest")]
    #[test]
    fn default_seed_passes() {
        let report = run(0);
        for check in &report.checks {
            assert!(check.passed, "{}: {}", check.name, check.detail);
        }
    }

    #[cfg_attr(feature = "inject-fault", ignore = "fault injection must fail selftest")]
    #[test]
    fn other_seeds_pass_too() {
        assert!(run(7).all_passed());
        assert!(run(8).all_passed());
    }

    #[cfg(feature = "inject-fault")]
    #[test]
    fn injected_fault_is_caught() {
        let report = run(0);
        assert!(!report.all_passed());
        assert!(report
            .checks
            .iter()
            .any(|c| !c.passed && c.name.contains("transform")));
    }
}
