//! Closed-form limits on which `q` can occur, existence thresholds, and the
//! explicit `p = 2` construction.
//!
//! Every value here is exact integer arithmetic. Bounds written "q <= X" are
//! returned as `X`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{verify, Params, RowVec, SolutionGrid};
use crate::moves::right_move;
use crate::numtheory::{digit_sum, is_prime, pow_checked, residue_mod_power, to_digits};

fn p_pow_signed(p: u64, alpha: u32) -> Result<i64> {
    let v = pow_checked(p, alpha)?;
    i64::try_from(v).map_err(|_| Error::Overflow(format!("{p}^{alpha} exceeds i64")))
}

fn check_k(alpha: u32, k: u32) -> Result<()> {
    if k < 1 || k > alpha {
        return Err(Error::OutOfRange(format!("k = {k} outside 1..={alpha}")));
    }
    Ok(())
}

/// `p^alpha n`; any solution has `q` strictly below it.
pub fn q_bound_basic(p: u64, alpha: u32, n: u64) -> Result<i64> {
    Ok(p_pow_signed(p, alpha)? * n as i64)
}

/// `q <= max(p^a((p-1)(2a-k)+2) - 1, p^a(n-1-(p-1)(a-k)) - 1)` for a given `k`.
pub fn q_bound_k(p: u64, alpha: u32, n: u64, k: u32) -> Result<i64> {
    check_k(alpha, k)?;
    let pa = p_pow_signed(p, alpha)?;
    let (p, a, k, n) = (p as i64, alpha as i64, k as i64, n as i64);
    let first = pa * ((p - 1) * (2 * a - k) + 2) - 1;
    let second = pa * (n - 1 - (p - 1) * (a - k)) - 1;
    Ok(first.max(second))
}

/// Best available upper bound (inclusive) on `q`.
pub fn q_bound_best(p: u64, alpha: u32, n: u64) -> Result<i64> {
    let mut best = q_bound_basic(p, alpha, n)? - 1;
    for k in 1..=alpha {
        best = best.min(q_bound_k(p, alpha, n, k)?);
    }
    Ok(best)
}

/// Minimal `n` admitting the two-row `p = 2` construction.
pub fn construction_threshold(alpha2: u32, q: u64) -> Result<u64> {
    if q % 2 == 0 || q < 3 {
        return Err(Error::OutOfRange(format!("q = {q} must be odd and at least 3")));
    }
    let c = residue_mod_power(q, 2, alpha2);
    Ok((q - c) / pow_checked(2, alpha2)? + digit_sum(c, 2) + alpha2 as u64)
}

/// An explicit solution with `n` parts in `2^a q^b`, `a <= alpha2`.
///
/// Starts from the two rows `[(q - c)/2^alpha, digits of c]` and
/// `[0, 1, ..., 1]` where `c = q mod 2^alpha`, inserts copies of the top row
/// with its last digit cleared, and spends the leftover parts as right moves
/// on the top row, leftmost unit first.
pub fn construct_p2(alpha2: u32, q: u64, n: u64) -> Result<SolutionGrid> {
    let threshold = construction_threshold(alpha2, q)?;
    if n < threshold {
        return Err(Error::OutOfRange(format!("n = {n} below construction threshold {threshold}")));
    }
    let params = Params::new(2, q, n, alpha2)?;
    let c = residue_mod_power(q, 2, alpha2);
    let head = (q - c) / params.p_pow();

    let mut top = vec![head];
    top.extend(to_digits(c, 2, alpha2 as usize)?.into_digits());
    let mut middle = top.clone();
    *middle.last_mut().expect("width >= 2") = 0;
    let bottom: Vec<u64> = std::iter::once(0).chain(std::iter::repeat(1).take(alpha2 as usize)).collect();

    let step = head + digit_sum(c, 2) - 1;
    let extra = n - threshold;
    let (copies, moves) = (extra / step, extra % step);

    let mut top = RowVec::new(top);
    for _ in 0..moves {
        let j = top.entries()[..alpha2 as usize]
            .iter()
            .position(|&k| k > 0)
            .ok_or_else(|| Error::Internal(format!("no right move left on top row {top}")))?;
        top = right_move(&top, j + 1, 2)?;
    }

    let mut rows = vec![RowVec::new(bottom)];
    rows.extend(std::iter::repeat(RowVec::new(middle)).take(copies as usize));
    rows.push(top);
    let grid = SolutionGrid::new(params, rows);
    let report = verify(&grid);
    if !report.is_valid {
        return Err(Error::Internal(format!("construction for (alpha2={alpha2}, q={q}, n={n}) failed: {:?}", report.failures)));
    }
    Ok(grid)
}

/// Lower bound on `n` for large `q`: minimum over `1 <= s < p^k` of
/// `(sq - <sq>)/p^alpha + N(<sq>)`, plus `(alpha - k)(p - 1) + 1`.
pub fn converse_threshold(p: u64, alpha: u32, k: u32, q: u64) -> Result<u64> {
    check_k(alpha, k)?;
    let pa = pow_checked(p, alpha)?;
    let pk = pow_checked(p, k)?;
    let best = (1..pk)
        .map(|s| {
            let sq = s.checked_mul(q).ok_or_else(|| Error::Overflow(format!("{s} * {q}")))?;
            let r = sq % pa;
            Ok((sq - r) / pa + digit_sum(r, p))
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .min()
        .expect("p^k - 1 >= 1");
    Ok(best + (alpha - k) as u64 * (p - 1) + 1)
}

/// Whether `q >= p^alpha((p-1)(2 alpha - k) + 2) - 2`, the regime where
/// [`converse_threshold`] holds.
pub fn converse_applies(p: u64, alpha: u32, k: u32, q: u64) -> Result<bool> {
    check_k(alpha, k)?;
    let pa = p_pow_signed(p, alpha)?;
    let need = pa * ((p as i64 - 1) * (2 * alpha as i64 - k as i64) + 2) - 2;
    Ok(q as i64 >= need)
}

/// Existence for `p = 2` and large prime `q`: iff `n` reaches the
/// construction threshold.
pub fn cns_exists_p2(alpha2: u32, q: u64, n: u64) -> Result<bool> {
    if !is_prime(q) || q == 2 {
        return Err(Error::OutOfRange(format!("q = {q} must be an odd prime")));
    }
    if !converse_applies(2, alpha2, 1, q)? {
        return Err(Error::OutOfRange(format!(
            "q = {q} below 2^{alpha2}(2*{alpha2}+1)-2; the criterion is not an equivalence there"
        )));
    }
    Ok(n >= construction_threshold(alpha2, q)?)
}

/// Existence with `p = 2`, `alpha2 = 2`: iff `q <= 4n - 11`. Fails for `q = 3`.
pub fn alpha2_exists_p2(q: u64, n: u64) -> Result<bool> {
    if q == 3 {
        return Err(Error::OutOfRange("q = 3 is the known exception".into()));
    }
    if !is_prime(q) || q == 2 {
        return Err(Error::OutOfRange(format!("q = {q} must be an odd prime")));
    }
    Ok((q as i64) <= 4 * n as i64 - 11)
}

/// `q <= slope * n + intercept` for primes `q = c (mod 2^alpha2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinearBound {
    pub slope: i64,
    pub intercept: i64,
}

impl LinearBound {
    pub fn at(&self, n: u64) -> i64 {
        self.slope * n as i64 + self.intercept
    }
}

/// `2^alpha2 (n - N_1(c) - alpha2) + c` as a line in `n`.
pub fn residue_bound_line(alpha2: u32, c: u64) -> Result<LinearBound> {
    let slope = p_pow_signed(2, alpha2)?;
    if c % 2 == 0 || c as i64 >= slope {
        return Err(Error::OutOfRange(format!("residue c = {c} must be odd and below 2^{alpha2}")));
    }
    Ok(LinearBound { slope, intercept: c as i64 - slope * (digit_sum(c, 2) as i64 + alpha2 as i64) })
}

pub fn residue_bound(alpha2: u32, c: u64, n: u64) -> Result<i64> {
    Ok(residue_bound_line(alpha2, c)?.at(n))
}

/// Applicability of the threshold results for a particular `q`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BoundNotes {
    /// `p = 2` and `n` reaches the construction threshold: a solution exists.
    pub construction_guarantees: Option<bool>,
    /// Per `k`, `(applies, threshold)` of the converse lower bound on `n`.
    pub converse: BTreeMap<u32, (bool, u64)>,
    /// Some applicable `k` has `n` below its threshold: no solution.
    pub converse_excludes: bool,
    /// `p = 2`, `q` prime and large: the exact existence verdict.
    pub cns_verdict: Option<bool>,
    /// `p = 2`, `alpha = 2`, `q` prime `!= 3`: the exact existence verdict.
    pub alpha2_verdict: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsReport {
    pub q_basic: i64,
    pub q_best: i64,
    pub per_k: BTreeMap<u32, i64>,
    pub notes: Option<BoundNotes>,
}

pub fn bounds_report(p: u64, alpha: u32, n: u64, q: Option<u64>) -> Result<BoundsReport> {
    let q_basic = q_bound_basic(p, alpha, n)?;
    let per_k = (1..=alpha).map(|k| Ok((k, q_bound_k(p, alpha, n, k)?))).collect::<Result<_>>()?;
    let q_best = q_bound_best(p, alpha, n)?;
    let notes = q.map(|q| bound_notes(p, alpha, n, q)).transpose()?;
    Ok(BoundsReport { q_basic, q_best, per_k, notes })
}

pub fn bound_notes(p: u64, alpha: u32, n: u64, q: u64) -> Result<BoundNotes> {
    let mut notes = BoundNotes::default();
    for k in 1..=alpha {
        let applies = converse_applies(p, alpha, k, q)?;
        let threshold = converse_threshold(p, alpha, k, q)?;
        notes.converse_excludes |= applies && n < threshold;
        notes.converse.insert(k, (applies, threshold));
    }
    if p == 2 && q % 2 == 1 && q >= 3 {
        notes.construction_guarantees = Some(n >= construction_threshold(alpha, q)?);
        notes.cns_verdict = cns_exists_p2(alpha, q, n).ok();
        if alpha == 2 {
            notes.alpha2_verdict = alpha2_exists_p2(q, n).ok();
        }
    }
    Ok(notes)
}
