//! Assembly and exact solution of the hybrid equation system whose
//! solution vector contains Delta(f, g, h) = x_{3q}.
//!
//! The unknowns are the per-size triple totals x_j for j in J_q. The
//! first family contributes rows sum_j (n-2j)^i x_j = y_i for
//! i = 0 .. floor((3/2 - gamma) q); the second family pins x_j directly
//! for the small j in J_q ∩ {0, ..., floor(2 gamma q)}. Substituting the
//! pinned values into the first-family rows leaves a square Vandermonde
//! system on distinct nodes n - 2j, solved by fraction-free (Bareiss)
//! elimination; surplus rows are verified exactly after the solve.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;

use crate::counters::{CounterSnapshot, Counters};
use crate::error::{Error, Result};
use crate::firstfam::{
    check_gamma, first_family_i_max, vandermonde_coeff, y_values_counted, FirstFamilyRhs,
};
use crate::sdproduct::{x_direct_batch, MatmulBackend};
use crate::setcore::{j_support, SetFunction};

/// Which equations to take from each family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationSelection {
    pub gamma: Rational64,
    /// First family uses i = 0 ..= first_i_max.
    pub first_i_max: u32,
    /// Indeterminates solved directly by the second family.
    pub second_js: Vec<u32>,
    /// Set when the literal selection came up short and the pure first
    /// family was used instead.
    pub fell_back: bool,
}

impl EquationSelection {
    pub fn equation_count(&self) -> usize {
        self.first_i_max as usize + 1 + self.second_js.len()
    }
}

/// Applies the two selection formulas and checks that together they reach
/// the required floor(3q/2) + 1 equations; on a shortfall (possible only
/// for tiny q under aggressive rounding) falls back to the pure first
/// family, which always suffices.
pub fn select_equations(q: u32, _n: u32, gamma: Rational64) -> Result<EquationSelection> {
    check_gamma(gamma)?;
    let needed = (3 * q / 2 + 1) as usize;
    let first_i_max = first_family_i_max(q, gamma);
    let second_cap = (Rational64::from_integer(2) * gamma * Rational64::from_integer(q as i64))
        .floor()
        .to_integer() as u32;
    let second_js: Vec<u32> = j_support(q).into_iter().filter(|&j| j <= second_cap).collect();
    let selection = EquationSelection {
        gamma,
        first_i_max,
        second_js,
        fell_back: false,
    };
    if selection.equation_count() >= needed {
        return Ok(selection);
    }
    Ok(EquationSelection {
        gamma: Rational64::zero(),
        first_i_max: 3 * q / 2,
        second_js: Vec::new(),
        fell_back: true,
    })
}

/// One first-family row after substitution of the directly-solved
/// indeterminates.
#[derive(Debug, Clone)]
pub struct EquationRow {
    pub i: u32,
    /// Coefficients aligned with `EquationSystem::unknown_js`.
    pub coeffs: Vec<BigInt>,
    pub rhs: BigInt,
}

#[derive(Debug, Clone)]
pub struct EquationSystem {
    pub n: u32,
    pub q: u32,
    /// Indeterminates not fixed by the second family, ascending.
    pub unknown_js: Vec<u32>,
    /// Directly solved values, ascending by j.
    pub known: Vec<(u32, BigInt)>,
    pub rows: Vec<EquationRow>,
}

/// Builds the substituted system from the selection, the first-family
/// right-hand sides, and the directly solved values.
pub fn assemble_system(
    n: u32,
    q: u32,
    rhs: &FirstFamilyRhs,
    known: Vec<(u32, BigInt)>,
) -> EquationSystem {
    let known_js: Vec<u32> = known.iter().map(|(j, _)| *j).collect();
    let unknown_js: Vec<u32> = j_support(q)
        .into_iter()
        .filter(|j| !known_js.contains(j))
        .collect();
    let rows = rhs
        .y
        .iter()
        .enumerate()
        .map(|(i, y)| {
            let i = i as u32;
            let mut adjusted = y.clone();
            for (j, x) in &known {
                adjusted -= vandermonde_coeff(n, i, *j) * x;
            }
            EquationRow {
                i,
                coeffs: unknown_js
                    .iter()
                    .map(|&j| vandermonde_coeff(n, i, j))
                    .collect(),
                rhs: adjusted,
            }
        })
        .collect();
    EquationSystem {
        n,
        q,
        unknown_js,
        known,
        rows,
    }
}

/// Fraction-free Gaussian elimination (Bareiss) on the leading square
/// block, integer back-substitution, then exact verification of every
/// retained row. Returns the full x vector over J_q, ascending by j.
pub fn solve_system(sys: &EquationSystem) -> Result<Vec<(u32, BigInt)>> {
    let m = sys.unknown_js.len();
    if sys.rows.len() < m {
        return Err(Error::Internal(format!(
            "system has {} rows for {m} unknowns",
            sys.rows.len()
        )));
    }

    // Augmented working copy of the leading m x m block.
    let mut a: Vec<Vec<BigInt>> = sys.rows[..m]
        .iter()
        .map(|row| {
            let mut r = row.coeffs.clone();
            r.push(row.rhs.clone());
            r
        })
        .collect();

    let mut prev = BigInt::from(1);
    for k in 0..m.saturating_sub(1) {
        if a[k][k].is_zero() {
            let pivot = (k + 1..m).find(|&r| !a[r][k].is_zero()).ok_or_else(|| {
                Error::Internal(
                    "singular leading block in a Vandermonde system on distinct nodes".into(),
                )
            })?;
            a.swap(k, pivot);
        }
        for i in k + 1..m {
            for j in k + 1..=m {
                let num = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                let (quot, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                a[i][j] = quot;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }

    let mut solution = vec![BigInt::zero(); m];
    for i in (0..m).rev() {
        if a[i][i].is_zero() {
            return Err(Error::Internal("zero pivot after elimination".into()));
        }
        let mut num = a[i][m].clone();
        for j in i + 1..m {
            num -= &a[i][j] * &solution[j];
        }
        let (quot, rem) = num.div_rem(&a[i][i]);
        if !rem.is_zero() {
            return Err(Error::Internal(
                "non-integral solution: inconsistent inputs or arithmetic fault".into(),
            ));
        }
        solution[i] = quot;
    }

    // Every retained row, including surplus ones, must hold exactly.
    for row in &sys.rows {
        let mut lhs = BigInt::zero();
        for (c, x) in row.coeffs.iter().zip(&solution) {
            lhs += c * x;
        }
        if lhs != row.rhs {
            return Err(Error::Internal(format!(
                "surplus equation i = {} not satisfied by the solved vector",
                row.i
            )));
        }
    }

    let mut full: Vec<(u32, BigInt)> = sys
        .known
        .iter()
        .cloned()
        .chain(
            sys.unknown_js
                .iter()
                .cloned()
                .zip(solution),
        )
        .collect();
    full.sort_by_key(|(j, _)| *j);
    Ok(full)
}

/// Gamma is either caller-fixed or left to the library default of 1/6,
/// the balance point when rectangular multiplication is no better than
/// repeated square blocks (which is what this crate ships).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaChoice {
    Auto,
    Fixed(Rational64),
}

impl GammaChoice {
    pub fn resolve(self) -> Rational64 {
        match self {
            GammaChoice::Auto => Rational64::new(1, 6),
            GammaChoice::Fixed(g) => g,
        }
    }
}

impl std::str::FromStr for GammaChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(GammaChoice::Auto);
        }
        let parse_err = || Error::Parameter(format!("cannot parse gamma '{s}'"));
        let ratio = if let Some((num, den)) = s.split_once('/') {
            let num: i64 = num.trim().parse().map_err(|_| parse_err())?;
            let den: i64 = den.trim().parse().map_err(|_| parse_err())?;
            if den == 0 {
                return Err(parse_err());
            }
            Rational64::new(num, den)
        } else if let Some((int, frac)) = s.split_once('.') {
            let int_part: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| parse_err())? };
            if frac.is_empty() || frac.len() > 9 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(parse_err());
            }
            let scale = 10i64.pow(frac.len() as u32);
            let frac_part: i64 = frac.parse().map_err(|_| parse_err())?;
            Rational64::new(int_part * scale + frac_part, scale)
        } else {
            Rational64::from_integer(s.trim().parse().map_err(|_| parse_err())?)
        };
        Ok(GammaChoice::Fixed(ratio))
    }
}

/// Result of a Delta evaluation with provenance for benchmarking.
#[derive(Debug, Clone)]
pub struct DeltaResult {
    pub delta: BigInt,
    /// Full solution over J_q, ascending by j.
    pub x: Vec<(u32, BigInt)>,
    pub gamma: Rational64,
    pub fell_back: bool,
    pub backend: MatmulBackend,
    pub counters: CounterSnapshot,
}

/// Evaluates the weighted disjoint-triples form by building and solving
/// the hybrid system; the answer is the j = 3q component.
pub fn weighted_disjoint_triples(
    f: &SetFunction,
    g: &SetFunction,
    h: &SetFunction,
    gamma: GammaChoice,
    backend: MatmulBackend,
) -> Result<DeltaResult> {
    weighted_disjoint_triples_counted(f, g, h, gamma, backend, &Counters::new())
}

pub fn weighted_disjoint_triples_counted(
    f: &SetFunction,
    g: &SetFunction,
    h: &SetFunction,
    gamma: GammaChoice,
    backend: MatmulBackend,
    counters: &Counters,
) -> Result<DeltaResult> {
    f.same_shape(g)?;
    f.same_shape(h)?;
    let n = f.n();
    let q = f.q();
    let selection = select_equations(q, n, gamma.resolve())?;
    let effective_gamma = selection.gamma;

    let known = x_direct_batch(f, g, h, &selection.second_js, backend, counters)?;
    let rhs = y_values_counted(f, g, h, effective_gamma, counters)?;
    debug_assert_eq!(rhs.i_max(), selection.first_i_max);

    let sys = assemble_system(n, q, &rhs, known);
    let x = solve_system(&sys)?;
    let delta = x
        .iter()
        .find(|(j, _)| *j == 3 * q)
        .map(|(_, v)| v.clone())
        .ok_or_else(|| Error::Internal("solution vector misses j = 3q".into()))?;
    Ok(DeltaResult {
        delta,
        x,
        gamma: effective_gamma,
        fell_back: selection.fell_back,
        backend,
        counters: counters.snapshot(),
    })
}

/// The advertised runtime exponents as a pure calculator: given the
/// square exponent omega and the rectangular exponent alpha, returns the
/// savings constant tau and the balance parameter gamma, as exact
/// rationals. For alpha >= 1/2 the pair is exactly (1/18, 1/6).
pub fn tau_gamma(omega: Rational64, alpha: Rational64) -> Result<(Rational64, Rational64)> {
    let two = Rational64::from_integer(2);
    let three = Rational64::from_integer(3);
    if omega < two || omega >= three {
        return Err(Error::Parameter(format!(
            "omega must lie in [2, 3), got {omega}"
        )));
    }
    if alpha <= Rational64::zero() || alpha > Rational64::from_integer(1) {
        return Err(Error::Parameter(format!(
            "alpha must lie in (0, 1], got {alpha}"
        )));
    }
    if alpha >= Rational64::new(1, 2) {
        return Ok((Rational64::new(1, 18), Rational64::new(1, 6)));
    }
    let one = Rational64::from_integer(1);
    let num = (three - omega) * (one - alpha);
    let denom_tau = Rational64::from_integer(36)
        - Rational64::from_integer(6) * (one + omega) * (one + alpha);
    if denom_tau <= Rational64::zero() {
        return Err(Error::Parameter(
            "exponent pair leaves no positive balance denominator".into(),
        ));
    }
    let tau = num / denom_tau;
    let gamma = tau * three;
    Ok((tau, gamma))
}
