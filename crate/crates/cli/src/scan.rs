//! Existence and counts over every candidate `q` for fixed `(p, alpha, n)`.

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;
use unitfrac_core::bounds::{bound_notes, q_bound_best};
use unitfrac_core::enumerator::{count, exists};
use unitfrac_core::numtheory::is_prime;
use unitfrac_core::{Params, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QRecord {
    pub q: u64,
    pub prime: bool,
    pub exists: bool,
    /// Number of solutions, when requested.
    pub count: Option<usize>,
    /// `q <= q_bound_best`; always true for scanned candidates.
    pub within_best_bound: bool,
    /// `p = 2` and `n` reaches the construction threshold.
    pub construction_guarantees: Option<bool>,
    /// Some applicable converse threshold exceeds `n`.
    pub converse_excludes: bool,
    /// Exact verdict of the large-`q` equivalence for `p = 2`, when it applies.
    pub cns_verdict: Option<bool>,
    /// Exact verdict of the `alpha = 2`, `p = 2` criterion, when it applies.
    pub alpha2_verdict: Option<bool>,
    /// For prime `q`, a closed-form verdict disagrees with the enumeration.
    pub contradiction: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub p: u64,
    pub alpha: u32,
    pub n: u64,
    pub q_best: i64,
    pub records: Vec<QRecord>,
    /// Candidates without solutions lying between two that have some.
    pub gaps: Vec<u64>,
}

impl ScanReport {
    pub fn record(&self, q: u64) -> Option<&QRecord> {
        self.records.iter().find(|r| r.q == q)
    }

    pub fn present(&self) -> impl Iterator<Item = u64> + '_ {
        self.records.iter().filter(|r| r.exists).map(|r| r.q)
    }
}

/// Scans `2 <= q <= q_bound_best` coprime to `p`, optionally primes only.
/// Counting enumerates every solution and can be far slower than existence.
pub fn scan_q(p: u64, alpha: u32, n: u64, primes_only: bool, with_counts: bool) -> Result<ScanReport> {
    let q_best = q_bound_best(p, alpha, n)?;
    let candidates: Vec<u64> = (2..=q_best.max(1) as u64)
        .filter(|q| q.gcd(&p) == 1)
        .filter(|&q| !primes_only || is_prime(q))
        .collect();

    let records = candidates
        .into_par_iter()
        .map(|q| {
            let params = Params::new(p, q, n, alpha)?;
            let count = if with_counts { Some(count(&params)?) } else { None };
            let exists = match count {
                Some(c) => c > 0,
                None => exists(&params)?,
            };
            let notes = bound_notes(p, alpha, n, q)?;
            let prime = is_prime(q);
            let contradiction = prime
                && (notes.construction_guarantees == Some(true) && !exists
                    || notes.converse_excludes && exists
                    || notes.cns_verdict.is_some_and(|v| v != exists)
                    || notes.alpha2_verdict.is_some_and(|v| v != exists));
            Ok(QRecord {
                q,
                prime,
                exists,
                count,
                within_best_bound: q as i64 <= q_best,
                construction_guarantees: notes.construction_guarantees,
                converse_excludes: notes.converse_excludes,
                cns_verdict: notes.cns_verdict,
                alpha2_verdict: notes.alpha2_verdict,
                contradiction,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let first = records.iter().position(|r| r.exists);
    let last = records.iter().rposition(|r| r.exists);
    let gaps = match (first, last) {
        (Some(lo), Some(hi)) => records[lo..=hi].iter().filter(|r| !r.exists).map(|r| r.q).collect(),
        _ => Vec::new(),
    };

    Ok(ScanReport { p, alpha, n, q_best, records, gaps })
}
