//! Instance parameters, the solution grid, and exact verification.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numtheory::{is_prime, pow_checked, sylvester_exceeds};

/// Exact rational with arbitrary-precision parts, always kept reduced.
pub type Rational = num_rational::BigRational;

/// One enumeration problem: decompose 1 into `n` unit fractions with
/// denominators `p^a q^b`, `0 <= a <= alpha_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Params {
    p: u64,
    q: u64,
    n: u64,
    alpha_p: u32,
}

impl Params {
    /// `p` must be prime, `q >= 2` coprime to `p`, `n >= 2`, `alpha_p >= 1`,
    /// and `p^alpha_p` must fit in 64 bits.
    pub fn new(p: u64, q: u64, n: u64, alpha_p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParams(format!("p = {p} is not prime")));
        }
        if q < 2 {
            return Err(Error::InvalidParams(format!("q = {q} must be at least 2")));
        }
        if p.gcd(&q) != 1 {
            return Err(Error::InvalidParams(format!("gcd(p, q) != 1 for p = {p}, q = {q}")));
        }
        if n < 2 {
            return Err(Error::InvalidParams(format!("n = {n} must be at least 2")));
        }
        if alpha_p < 1 {
            return Err(Error::InvalidParams("alpha_p must be at least 1".into()));
        }
        pow_checked(p, alpha_p)
            .map_err(|_| Error::InvalidParams(format!("{p}^{alpha_p} is too large; lower alpha_p")))?;
        Ok(Self { p, q, n, alpha_p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn alpha_p(&self) -> u32 {
        self.alpha_p
    }

    /// Number of columns in a row.
    pub fn width(&self) -> usize {
        self.alpha_p as usize + 1
    }

    /// `p^alpha_p`; validated at construction.
    pub fn p_pow(&self) -> u64 {
        self.p.pow(self.alpha_p)
    }

    pub fn q_is_prime(&self) -> bool {
        is_prime(self.q)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, p={}, q={}, alpha_p={})", self.n, self.p, self.q, self.alpha_p)
    }
}

/// One row of a solution table. Entry `a` (0-based) counts the copies of
/// `1/(p^a q^b)` at the row's q-exponent `b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowVec(Vec<u64>);

impl RowVec {
    pub fn new(entries: Vec<u64>) -> Self {
        Self(entries)
    }

    pub fn zeros(width: usize) -> Self {
        Self(vec![0; width])
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn entries_mut(&mut self) -> &mut [u64] {
        &mut self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    pub fn into_entries(self) -> Vec<u64> {
        self.0
    }
}

impl From<Vec<u64>> for RowVec {
    fn from(entries: Vec<u64>) -> Self {
        Self(entries)
    }
}

impl fmt::Display for RowVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

/// `sum_i k_i p^(alpha+1-i)` with `alpha + 1` the row length.
pub fn row_value(row: &RowVec, p: u64) -> u128 {
    row.entries().iter().fold(0u128, |acc, &k| {
        acc.checked_mul(p as u128)
            .and_then(|v| v.checked_add(k as u128))
            .expect("row value exceeds 128 bits")
    })
}

/// Which terminal shape a solution has.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SolutionKind {
    /// Row `b = 0` is nonzero.
    Bottom,
    /// Minimal q-valuation is at least 1.
    Last,
}

impl SolutionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolutionKind::Bottom => "bottom",
            SolutionKind::Last => "last",
        }
    }
}

/// The table `{k_{a,b}}`. `rows[b]` is the row at q-exponent `b`, bottom first.
#[derive(Debug, Clone)]
pub struct SolutionGrid {
    params: Params,
    rows: Vec<RowVec>,
}

impl SolutionGrid {
    pub fn new(params: Params, rows: Vec<RowVec>) -> Self {
        Self { params, rows }
    }

    pub fn from_entries(params: Params, rows: Vec<Vec<u64>>) -> Self {
        Self::new(params, rows.into_iter().map(RowVec::new).collect())
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn rows(&self) -> &[RowVec] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<RowVec> {
        self.rows
    }

    /// Drops all-zero rows from the top.
    pub fn trimmed(mut self) -> Self {
        while self.rows.last().is_some_and(RowVec::is_zero) {
            self.rows.pop();
        }
        self
    }

    pub fn part_count(&self) -> u64 {
        self.rows.iter().map(RowVec::total).sum()
    }

    /// Highest q-exponent carrying a nonzero entry.
    pub fn alpha_q(&self) -> Option<usize> {
        self.rows.iter().rposition(|r| !r.is_zero())
    }

    pub fn kind(&self) -> SolutionKind {
        match self.rows.first() {
            Some(row) if !row.is_zero() => SolutionKind::Bottom,
            _ => SolutionKind::Last,
        }
    }

    /// 1 for bottom-row solutions; for last-row solutions one more than the
    /// minimal q-valuation.
    pub fn height(&self) -> usize {
        match self.kind() {
            SolutionKind::Bottom => 1,
            SolutionKind::Last => self.rows.iter().position(|r| !r.is_zero()).unwrap_or(0) + 1,
        }
    }

    /// Some entry with `a >= 1` is nonzero.
    pub fn p_appears(&self) -> bool {
        self.rows.iter().any(|r| r.entries().iter().skip(1).any(|&k| k > 0))
    }

    /// Some row with `b >= 1` is nonzero.
    pub fn q_appears(&self) -> bool {
        self.rows.iter().skip(1).any(|r| !r.is_zero())
    }

    /// Only the first column is used, so `p` never occurs.
    pub fn is_unicolumn(&self) -> bool {
        !self.p_appears()
    }

    /// Distinct-denominator solutions: every entry is at most 1.
    pub fn is_distinct(&self) -> bool {
        self.rows.iter().all(|r| r.entries().iter().all(|&k| k <= 1))
    }

    /// The denominators with multiplicity, ascending.
    pub fn denominators(&self) -> Vec<BigUint> {
        let p = BigUint::from(self.params.p);
        let q = BigUint::from(self.params.q);
        let mut out = Vec::new();
        let mut q_pow = BigUint::one();
        for row in &self.rows {
            let mut d = q_pow.clone();
            for &k in row.entries() {
                for _ in 0..k {
                    out.push(d.clone());
                }
                d *= &p;
            }
            q_pow *= &q;
        }
        out.sort();
        out
    }
}

impl PartialEq for SolutionGrid {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for SolutionGrid {}

impl PartialOrd for SolutionGrid {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SolutionGrid {
    fn cmp(&self, other: &Self) -> Ordering {
        canonical_key(self)
            .cmp(&canonical_key(other))
            .then_with(|| self.params.cmp(&other.params))
    }
}

impl fmt::Display for SolutionGrid {
    /// Tableau layout: top row first, entries space-separated.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows.iter().rev().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{row}")?;
        }
        Ok(())
    }
}

/// Exact `sum k_{a,b} / (p^a q^b)`.
pub fn grid_sum(grid: &SolutionGrid) -> Rational {
    let p = BigInt::from(grid.params.p);
    let q = BigInt::from(grid.params.q);
    let mut sum = Rational::zero();
    let mut q_pow = BigInt::one();
    for row in &grid.rows {
        let mut d = q_pow.clone();
        for &k in row.entries() {
            if k > 0 {
                sum += Rational::new(BigInt::from(k), d.clone());
            }
            d *= &p;
        }
        q_pow *= &q;
    }
    sum
}

/// Reason a grid fails verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    SumNotOne,
    PartCount { expected: u64, found: u64 },
    PAbsent,
    QAbsent,
    RowWidth { b: usize, len: usize },
    DenominatorTooLarge { a: usize, b: usize },
    TopRowZero,
}

impl Failure {
    /// Stable short reason code.
    pub fn code(&self) -> &'static str {
        match self {
            Failure::SumNotOne => "sum not 1",
            Failure::PartCount { .. } => "wrong part count",
            Failure::PAbsent => "p absent",
            Failure::QAbsent => "q absent",
            Failure::RowWidth { .. } => "row width",
            Failure::DenominatorTooLarge { .. } => "denominator not below S_n",
            Failure::TopRowZero => "top row zero",
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::PartCount { expected, found } => {
                write!(f, "{}: expected {expected}, found {found}", self.code())
            }
            Failure::RowWidth { b, len } => write!(f, "{}: row {b} has {len} entries", self.code()),
            Failure::DenominatorTooLarge { a, b } => write!(f, "{}: p^{a} q^{b}", self.code()),
            _ => f.write_str(self.code()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub is_valid: bool,
    pub sum: Rational,
    pub part_count: u64,
    pub p_appears: bool,
    pub q_appears: bool,
    /// Every used denominator is strictly below the Sylvester number `S_n`.
    pub max_denominator_ok: bool,
    pub failures: Vec<Failure>,
}

impl VerificationReport {
    pub fn has(&self, code: &str) -> bool {
        self.failures.iter().any(|f| f.code() == code)
    }
}

/// Checks every solution invariant and reports all failures at once.
pub fn verify(grid: &SolutionGrid) -> VerificationReport {
    let params = grid.params;
    let mut failures = Vec::new();

    let sum = grid_sum(grid);
    if sum != Rational::one() {
        failures.push(Failure::SumNotOne);
    }

    let part_count = grid.part_count();
    if part_count != params.n {
        failures.push(Failure::PartCount { expected: params.n, found: part_count });
    }

    let p_appears = grid.p_appears();
    if !p_appears {
        failures.push(Failure::PAbsent);
    }
    let q_appears = grid.q_appears();
    if !q_appears {
        failures.push(Failure::QAbsent);
    }

    for (b, row) in grid.rows.iter().enumerate() {
        if row.len() != params.width() {
            failures.push(Failure::RowWidth { b, len: row.len() });
        }
    }

    if grid.rows.last().map_or(true, RowVec::is_zero) {
        failures.push(Failure::TopRowZero);
    }

    let n = u32::try_from(params.n).unwrap_or(u32::MAX);
    let p = BigUint::from(params.p);
    let q = BigUint::from(params.q);
    let mut max_denominator_ok = true;
    let mut q_pow = BigUint::one();
    for (b, row) in grid.rows.iter().enumerate() {
        let mut d = q_pow.clone();
        for (a, &k) in row.entries().iter().enumerate() {
            if k > 0 && !sylvester_exceeds(n, &d) {
                max_denominator_ok = false;
                failures.push(Failure::DenominatorTooLarge { a, b });
            }
            d *= &p;
        }
        q_pow *= &q;
    }

    VerificationReport {
        is_valid: failures.is_empty(),
        sum,
        part_count,
        p_appears,
        q_appears,
        max_denominator_ok,
        failures,
    }
}

/// Comparable identity of a grid: its entries, row-major from `b = 0`,
/// with all-zero top rows removed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridKey(Vec<Vec<u64>>);

pub fn canonical_key(grid: &SolutionGrid) -> GridKey {
    let top = grid.alpha_q().map_or(0, |b| b + 1);
    GridKey(grid.rows[..top].iter().map(|r| r.entries().to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(p: u64, q: u64, n: u64, alpha: u32, rows: Vec<Vec<u64>>) -> SolutionGrid {
        SolutionGrid::from_entries(Params::new(p, q, n, alpha).unwrap(), rows)
    }

    fn intro_example() -> SolutionGrid {
        grid(2, 3, 7, 3, vec![vec![0, 1, 1, 0], vec![0, 0, 0, 2], vec![0, 3, 0, 0]])
    }

    #[test]
    fn params_validation() {
        assert!(Params::new(2, 3, 7, 3).is_ok());
        assert!(Params::new(2, 91, 13, 4).is_ok());
        assert!(Params::new(4, 3, 7, 3).is_err());
        assert!(Params::new(2, 6, 7, 3).is_err());
        assert!(Params::new(2, 1, 7, 3).is_err());
        assert!(Params::new(2, 3, 1, 3).is_err());
        assert!(Params::new(2, 3, 7, 0).is_err());
        assert!(Params::new(2, 3, 7, 64).is_err());
    }

    #[test]
    fn row_values() {
        assert_eq!(row_value(&RowVec::new(vec![0, 3, 0, 0]), 2), 12);
        assert_eq!(row_value(&RowVec::new(vec![0, 1, 1, 2]), 2), 8);
        assert_eq!(row_value(&RowVec::zeros(3), 5), 0);
    }

    #[test]
    fn sums() {
        assert_eq!(grid_sum(&intro_example()), Rational::one());
        let five = grid(2, 3, 5, 5, vec![vec![0, 1, 0, 1, 0, 1], vec![1, 0, 0, 0, 0, 1]]);
        assert_eq!(grid_sum(&five), Rational::one());
        assert!(verify(&five).is_valid);
        assert!(grid_sum(&grid(2, 3, 5, 1, vec![vec![0, 0]])).is_zero());
    }

    #[test]
    fn sum_ignores_zero_rows_on_top() {
        let mut rows = intro_example().into_rows();
        rows.push(RowVec::zeros(4));
        let padded = SolutionGrid::new(*intro_example().params(), rows);
        assert_eq!(grid_sum(&padded), Rational::one());
        assert_eq!(canonical_key(&padded), canonical_key(&intro_example()));
        assert_eq!(padded, intro_example());
        assert!(verify(&padded).has("top row zero"));
    }

    #[test]
    fn verification_accepts_examples() {
        let report = verify(&intro_example());
        assert!(report.is_valid, "{:?}", report.failures);
        assert_eq!(intro_example().kind(), SolutionKind::Bottom);
        assert_eq!(intro_example().height(), 1);

        let three = grid(2, 3, 3, 2, vec![vec![0, 1, 0], vec![1, 1, 0]]);
        assert!(verify(&three).is_valid);
    }

    #[test]
    fn pure_q_row_is_rejected() {
        // q copies of 1/q
        let g = grid(2, 5, 5, 2, vec![vec![0, 0, 0], vec![5, 0, 0]]);
        let report = verify(&g);
        assert!(!report.is_valid);
        assert_eq!(report.failures, vec![Failure::PAbsent]);
        assert_eq!(g.kind(), SolutionKind::Last);
        assert_eq!(g.height(), 2);
    }

    #[test]
    fn mutations_hit_matching_failure() {
        let base = intro_example();
        let params = *base.params();

        // sum and count both break when one entry changes
        let mut rows = base.clone().into_rows();
        rows[2].entries_mut()[1] = 2;
        let r = verify(&SolutionGrid::new(params, rows));
        assert!(r.has("sum not 1") && r.has("wrong part count"));

        // part count alone: same grid claimed for another n
        let other = SolutionGrid::new(Params::new(2, 3, 8, 3).unwrap(), base.clone().into_rows());
        assert_eq!(verify(&other).failures, vec![Failure::PartCount { expected: 8, found: 7 }]);

        // q absent: 1/2 + 1/2
        let r = verify(&grid(2, 3, 2, 1, vec![vec![0, 2]]));
        assert!(r.has("q absent") && !r.q_appears);

        // width
        let mut rows = base.clone().into_rows();
        rows[0] = RowVec::new(vec![0, 1, 1, 0, 0]);
        assert!(verify(&SolutionGrid::new(params, rows)).has("row width"));

        // 1/(2 * 7^3) is far above S_2 = 3
        let big = grid(2, 7, 2, 1, vec![vec![0, 0], vec![0, 0], vec![0, 0], vec![0, 1]]);
        let r = verify(&big);
        assert!(!r.max_denominator_ok && r.has("denominator not below S_n"));
    }

    #[test]
    fn keys_distinguish_entries() {
        let a = intro_example();
        let mut rows = a.clone().into_rows();
        rows[1].entries_mut()[3] = 1;
        let b = SolutionGrid::new(*a.params(), rows);
        assert_ne!(canonical_key(&a), canonical_key(&b));
        assert_eq!(canonical_key(&a), canonical_key(&a.clone()));
    }

    #[test]
    fn tableau_prints_top_first() {
        assert_eq!(intro_example().to_string(), "0 3 0 0\n0 0 0 2\n0 1 1 0");
    }
}
