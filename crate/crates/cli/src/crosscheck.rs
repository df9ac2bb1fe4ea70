//! Differential check of the row search against the brute-force oracle.

use num_integer::Integer;
use unitfrac_core::enumerator::enumerate;
use unitfrac_core::numtheory::{alpha_cap_at_most, is_prime};
use unitfrac_core::oracle::brute_enumerate;
use unitfrac_core::{Params, Result, SolutionGrid};

/// Every prime `p` in `ps` against every coprime `q` in `qs`, for
/// `2 <= n <= n_max` and `1 <= alpha <= min(alpha_max, alpha_cap(p, n))`.
#[derive(Debug, Clone, Default)]
pub struct CrossCheckRange {
    pub ps: Vec<u64>,
    pub qs: Vec<u64>,
    pub n_max: u64,
    pub alpha_max: u32,
}

impl CrossCheckRange {
    pub fn instances(&self) -> Vec<Params> {
        let mut out = Vec::new();
        for &p in self.ps.iter().filter(|&&p| is_prime(p)) {
            for &q in self.qs.iter().filter(|&&q| q >= 2 && q.gcd(&p) == 1) {
                for n in 2..=self.n_max {
                    let cap = alpha_cap_at_most(p, n as u32, self.alpha_max);
                    for alpha in 1..=cap {
                        if let Ok(params) = Params::new(p, q, n, alpha) {
                            out.push(params);
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Mismatch {
    pub params: Params,
    /// Found by the oracle only.
    pub missing: Vec<SolutionGrid>,
    /// Found by the enumerator only.
    pub extra: Vec<SolutionGrid>,
}

#[derive(Debug, Clone)]
pub struct CrossCheckSummary {
    pub instances: usize,
    pub solutions: usize,
    /// First disagreement; checking stops there.
    pub mismatch: Option<Mismatch>,
}

impl CrossCheckSummary {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

pub fn cross_check(range: &CrossCheckRange) -> Result<CrossCheckSummary> {
    cross_check_with(range, enumerate, |p| Ok(brute_enumerate(p)))
}

/// Compares two enumerators as canonical sets on every instance in `range`.
pub fn cross_check_with<F, G>(range: &CrossCheckRange, candidate: F, reference: G) -> Result<CrossCheckSummary>
where
    F: Fn(&Params) -> Result<Vec<SolutionGrid>>,
    G: Fn(&Params) -> Result<Vec<SolutionGrid>>,
{
    let mut summary = CrossCheckSummary { instances: 0, solutions: 0, mismatch: None };
    for params in range.instances() {
        let mut got = candidate(&params)?;
        let mut want = reference(&params)?;
        got.sort();
        got.dedup();
        want.sort();
        want.dedup();
        summary.instances += 1;
        if got != want {
            let missing = want.iter().filter(|g| got.binary_search(g).is_err()).cloned().collect();
            let extra = got.iter().filter(|g| want.binary_search(g).is_err()).cloned().collect();
            summary.mismatch = Some(Mismatch { params, missing, extra });
            return Ok(summary);
        }
        summary.solutions += got.len();
    }
    Ok(summary)
}
