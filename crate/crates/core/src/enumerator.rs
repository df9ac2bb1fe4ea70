//! Row-by-row search for every solution table.
//!
//! The search starts at the top row and walks down one q-valuation at a time.
//! Each row is written in its reduced form (first column free, every other
//! column a base-p digit) together with a count `l` of right moves still to be
//! applied to it. Between rows the pushed-down mass is carried as a seed
//! `p^alpha * s_tilde + s`. A branch ends either on a bottom row (q-valuation
//! 0, only powers of `p`) or on a last row (remaining mass is exactly
//! `p^alpha q^b`, so every row below is empty).
//!
//! Reduced solutions are then expanded by all placements of their right
//! moves, deduplicated, stripped of pure-q tables and verified exactly.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{verify, Params, RowVec, SolutionGrid, SolutionKind};
use crate::moves::{bottom_completion, expand_row};
use crate::numtheory::{ceil_log_sylvester, digit_sum, p_valuation, power_exponent};

/// Search node after `depth` rows have been fixed.
#[derive(Debug, Clone)]
pub struct SearchState {
    pub depth: usize,
    /// Variables not yet placed, counting pending right moves.
    pub remaining: i128,
    pub s_tilde: i128,
    pub s: i128,
    /// `(l, reduced row)` from the top row down.
    pub trail: Vec<(u64, RowVec)>,
}

/// A solution before its right moves are expanded.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedSolution {
    /// `(l, reduced row)` from the top row down. For bottom-row solutions the
    /// last entry is the bottom row.
    pub trail: Vec<(u64, RowVec)>,
    pub kind: SolutionKind,
    pub alpha_q: usize,
    pub height: usize,
}

impl ReducedSolution {
    /// Empty rows under a last row.
    pub fn zero_rows_below(&self) -> usize {
        self.alpha_q + 1 - self.trail.len()
    }
}

/// Largest search depth any solution can need: `ceil(log_q S_n) + 2`.
/// Saturates when that logarithm is beyond any feasible search.
pub fn depth_cap(params: &Params) -> usize {
    let n = u32::try_from(params.n()).unwrap_or(u32::MAX);
    ceil_log_sylvester(params.q(), n, 4096).map_or(usize::MAX, |e| e as usize + 2)
}

/// First-row choice `(l_1, s_1, s_tilde_1)`.
#[derive(Debug, Clone, Copy)]
struct Root {
    l: u64,
    s: i128,
    s_tilde: i128,
}

struct Search<'a, F> {
    params: &'a Params,
    p: i128,
    q: i128,
    p_pow: i128,
    alpha: i128,
    depth_cap: usize,
    visit: F,
}

impl<F> Search<'_, F>
where
    F: FnMut(ReducedSolution) -> ControlFlow<()>,
{
    fn new(params: &Params, visit: F) -> Search<'_, F> {
        Search {
            params,
            p: params.p() as i128,
            q: params.q() as i128,
            p_pow: params.p_pow() as i128,
            alpha: params.alpha_p() as i128,
            depth_cap: depth_cap(params),
            visit,
        }
    }

    /// Reduced row carrying `p^alpha s_tilde + s` down while receiving
    /// `p^alpha prev_tilde + prev` from above, and its entry count.
    fn build_row(&self, prev: i128, prev_tilde: i128, s: i128, s_tilde: i128) -> Option<(RowVec, i128)> {
        let d = self.q * s - prev;
        let head = self.q * s_tilde - prev_tilde + d.div_euclid(self.p_pow);
        if head < 0 {
            return None;
        }
        let mut tail = d.rem_euclid(self.p_pow) as u64;
        let width = self.params.width();
        let mut entries = vec![0u64; width];
        entries[0] = head as u64;
        for slot in entries[1..].iter_mut().rev() {
            *slot = tail % self.params.p();
            tail /= self.params.p();
        }
        let parts = entries.iter().map(|&k| k as i128).sum();
        Some((RowVec::new(entries), parts))
    }

    /// Largest number of left moves a row drawn from `remaining` variables
    /// can have absorbed.
    fn max_moves(&self, remaining: i128) -> u64 {
        (self.alpha * (remaining / self.p)) as u64
    }

    fn roots(&self) -> Vec<Root> {
        let n = self.params.n() as i128;
        let mut roots = Vec::new();
        for s in 0..self.p_pow {
            for s_tilde in 0..=n / self.q {
                if s == 0 && s_tilde == 0 {
                    continue;
                }
                for l in 0..=self.max_moves(n) {
                    roots.push(Root { l, s, s_tilde });
                }
            }
        }
        roots
    }

    fn run_root(&mut self, root: Root) -> Result<ControlFlow<()>> {
        let n = self.params.n() as i128;
        let Some((row, parts)) = self.build_row(0, 0, root.s, root.s_tilde) else {
            return Ok(ControlFlow::Continue(()));
        };
        let remaining = n - root.l as i128 * (self.p - 1) - parts;
        if remaining < 0 {
            return Ok(ControlFlow::Continue(()));
        }
        let trail = vec![(root.l, row)];
        if remaining == 0 {
            // a single admissible row at q-valuation b + 1; l_1 != 0 keeps p present
            if root.s == 0 && root.l != 0 {
                if let Some(b) = power_exponent(root.s_tilde as u64, self.params.q()) {
                    let b = b as usize;
                    let found = ReducedSolution { trail, kind: SolutionKind::Last, alpha_q: b + 1, height: b + 2 };
                    return Ok((self.visit)(found));
                }
            }
            return Ok(ControlFlow::Continue(()));
        }
        let mut state = SearchState { depth: 1, remaining, s_tilde: root.s_tilde, s: root.s, trail };
        self.descend(&mut state)
    }

    /// Tries every row `depth + 1` below `state`.
    fn descend(&mut self, state: &mut SearchState) -> Result<ControlFlow<()>> {
        if state.depth > self.depth_cap {
            return Err(Error::Internal(format!(
                "search depth {} exceeds cap {} for {}",
                state.depth, self.depth_cap, self.params
            )));
        }
        let prev = state.s;
        let prev_tilde = state.s_tilde;
        let n_prev = state.remaining;
        let step = state.depth + 1;
        let max_moves = self.max_moves(n_prev);

        if prev_tilde == 0 {
            // bottom row: NOT of s completes it, then l right moves
            let v = p_valuation(prev as u64, self.params.p()).expect("seed is nonzero") as i128;
            let digits = digit_sum(prev as u64, self.params.p()) as i128;
            for l in 0..=max_moves {
                let m = l as i128 + self.alpha - v;
                if self.p * m - (m - 1) - digits == n_prev {
                    let bottom = bottom_completion(prev as u64, self.params)?;
                    let mut trail = state.trail.clone();
                    trail.push((l, bottom));
                    let found = ReducedSolution { trail, kind: SolutionKind::Bottom, alpha_q: step - 1, height: 1 };
                    if (self.visit)(found).is_break() {
                        return Ok(ControlFlow::Break(()));
                    }
                }
            }
        }

        // mass available for the last-row test; the carry term is 1 when prev > 0
        let last_room = n_prev + prev_tilde + i128::from(prev > 0);

        for s in 0..self.p_pow {
            let shift = (self.q * s - prev).div_euclid(self.p_pow);
            let room = n_prev + prev_tilde - shift;
            if room < 0 {
                continue;
            }
            for s_tilde in 0..=room / self.q {
                if s == 0 && s_tilde == 0 {
                    continue;
                }
                let Some((row, parts)) = self.build_row(prev, prev_tilde, s, s_tilde) else {
                    continue;
                };
                for l in 0..=max_moves {
                    let remaining = n_prev - l as i128 * (self.p - 1) - parts;
                    if remaining < 0 {
                        break;
                    }
                    if remaining == 0 {
                        if last_room >= self.q && s == 0 {
                            if let Some(b) = power_exponent(s_tilde as u64, self.params.q()) {
                                if self.q.pow(b + 1) <= last_room {
                                    let b = b as usize;
                                    let mut trail = state.trail.clone();
                                    trail.push((l, row.clone()));
                                    let found = ReducedSolution {
                                        trail,
                                        kind: SolutionKind::Last,
                                        alpha_q: b + step,
                                        height: b + 2,
                                    };
                                    if (self.visit)(found).is_break() {
                                        return Ok(ControlFlow::Break(()));
                                    }
                                }
                            }
                        }
                        continue;
                    }
                    state.trail.push((l, row.clone()));
                    let mut next = SearchState {
                        depth: step,
                        remaining,
                        s_tilde,
                        s,
                        trail: std::mem::take(&mut state.trail),
                    };
                    let flow = self.descend(&mut next);
                    state.trail = next.trail;
                    state.trail.pop();
                    if flow?.is_break() {
                        return Ok(ControlFlow::Break(()));
                    }
                }
            }
        }
        Ok(ControlFlow::Continue(()))
    }
}

/// Every reduced solution reachable in the search, in canonical order.
pub fn enumerate_reduced(params: &Params) -> Result<Vec<ReducedSolution>> {
    let roots = Search::new(params, |_| ControlFlow::Continue(())).roots();
    let per_root: Vec<Vec<ReducedSolution>> = roots
        .into_par_iter()
        .map(|root| {
            let mut found = Vec::new();
            let mut search = Search::new(params, |r| {
                found.push(r);
                ControlFlow::Continue(())
            });
            let _ = search.run_root(root)?;
            Ok(found)
        })
        .collect::<Result<_>>()?;
    let mut all: Vec<ReducedSolution> = per_root.into_iter().flatten().collect();
    all.sort();
    Ok(all)
}

/// All grids obtained by placing each row's pending right moves in every way.
pub fn expand_reduced(reduced: &ReducedSolution, params: &Params) -> BTreeSet<SolutionGrid> {
    let width = params.width();
    // bottom-up
    let mut partial: Vec<Vec<RowVec>> = vec![vec![RowVec::zeros(width); reduced.zero_rows_below()]];
    for (l, row) in reduced.trail.iter().rev() {
        let options = expand_row(row, *l, params.p());
        if options.is_empty() {
            return BTreeSet::new();
        }
        partial = partial
            .into_iter()
            .flat_map(|rows| {
                options.iter().map(move |opt| {
                    let mut rows = rows.clone();
                    rows.push(opt.clone());
                    rows
                })
            })
            .collect();
    }
    partial.into_iter().map(|rows| SolutionGrid::new(*params, rows)).collect()
}

/// Expands, drops pure-q tables, and verifies every survivor.
fn finish(reduced: &ReducedSolution, params: &Params) -> Result<Vec<SolutionGrid>> {
    let mut out = Vec::new();
    for grid in expand_reduced(reduced, params) {
        if grid.is_unicolumn() {
            continue;
        }
        let report = verify(&grid);
        if !report.is_valid {
            let reasons: Vec<String> = report.failures.iter().map(ToString::to_string).collect();
            return Err(Error::Internal(format!(
                "assembled grid fails verification for {params} ({}):\n{grid}",
                reasons.join(", ")
            )));
        }
        out.push(grid);
    }
    Ok(out)
}

/// Every solution, each listed once, in canonical order.
pub fn enumerate(params: &Params) -> Result<Vec<SolutionGrid>> {
    let reduced = enumerate_reduced(params)?;
    let expanded: Vec<Vec<SolutionGrid>> =
        reduced.par_iter().map(|r| finish(r, params)).collect::<Result<_>>()?;
    let unique: BTreeSet<SolutionGrid> = expanded.into_iter().flatten().collect();
    Ok(unique.into_iter().collect())
}

pub fn count(params: &Params) -> Result<usize> {
    enumerate(params).map(|all| all.len())
}

/// Whether any solution exists; stops at the first one found.
pub fn exists(params: &Params) -> Result<bool> {
    let roots = Search::new(params, |_| ControlFlow::Continue(())).roots();
    roots
        .into_par_iter()
        .map(|root| {
            let mut failure = None;
            let mut search = Search::new(params, |r| match finish(&r, params) {
                Ok(grids) if grids.is_empty() => ControlFlow::Continue(()),
                Ok(_) => ControlFlow::Break(()),
                Err(e) => {
                    failure = Some(e);
                    ControlFlow::Break(())
                }
            });
            let flow = search.run_root(root)?;
            match failure {
                Some(e) => Err(e),
                None => Ok(flow.is_break()),
            }
        })
        .try_fold(|| false, |acc, hit| hit.map(|h| acc || h))
        .try_reduce(|| false, |a, b| Ok(a || b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u64, p: u64, q: u64, alpha: u32) -> Params {
        Params::new(p, q, n, alpha).unwrap()
    }

    fn row(v: &[u64]) -> RowVec {
        RowVec::new(v.to_vec())
    }

    #[test]
    fn intro_example_reduced_record() {
        let pq = params(7, 2, 3, 3);
        // [0,3,0,0] is [1,1,0,0] after one right move; [0,0,0,2] is [0,0,1,0] after one
        let expected = vec![(1, row(&[1, 1, 0, 0])), (1, row(&[0, 0, 1, 0])), (0, row(&[0, 1, 1, 0]))];
        let reduced = enumerate_reduced(&pq).unwrap();
        let hit = reduced.iter().find(|r| r.trail == expected).expect("reduced record present");
        assert_eq!(hit.kind, SolutionKind::Bottom);
        assert_eq!(hit.alpha_q, 2);
        let grids = expand_reduced(hit, &pq);
        let example = SolutionGrid::from_entries(pq, vec![vec![0, 1, 1, 0], vec![0, 0, 0, 2], vec![0, 3, 0, 0]]);
        assert!(grids.contains(&example));
    }

    #[test]
    fn single_last_row_record() {
        let pq = params(7, 3, 5, 2);
        let reduced = enumerate_reduced(&pq).unwrap();
        let last: Vec<_> = reduced.iter().filter(|r| r.kind == SolutionKind::Last).collect();
        // [4,3,0] is [5,0,0] after one right move
        assert_eq!(last.len(), 1);
        let record = last[0];
        assert_eq!(record.trail, vec![(1, row(&[5, 0, 0]))]);
        assert_eq!((record.alpha_q, record.height), (1, 2));
        let grids = expand_reduced(record, &pq);
        assert_eq!(grids.len(), 1);
        assert_eq!(grids.first().unwrap().rows(), &[row(&[0, 0, 0]), row(&[4, 3, 0])]);
    }

    #[test]
    fn zero_moves_expand_to_trail() {
        let pq = params(3, 2, 3, 2);
        let r = ReducedSolution {
            trail: vec![(0, row(&[1, 1, 0])), (0, row(&[0, 1, 0]))],
            kind: SolutionKind::Bottom,
            alpha_q: 1,
            height: 1,
        };
        let grids = expand_reduced(&r, &pq);
        assert_eq!(grids.len(), 1);
        assert_eq!(grids.first().unwrap().rows(), &[row(&[0, 1, 0]), row(&[1, 1, 0])]);
    }

    #[test]
    fn expansion_count_is_product() {
        let pq = params(9, 2, 3, 3);
        for r in enumerate_reduced(&pq).unwrap() {
            let product: usize = r.trail.iter().map(|(l, row)| expand_row(row, *l, 2).len()).product();
            assert_eq!(expand_reduced(&r, &pq).len(), product);
        }
    }

    #[test]
    fn counts_and_existence() {
        assert_eq!(count(&params(7, 3, 5, 2)).unwrap(), 22);
        assert!(enumerate(&params(10, 3, 53, 2)).unwrap().is_empty());
        assert!(count(&params(3, 2, 3, 2)).unwrap() >= 1);
        assert!(exists(&params(3, 2, 3, 2)).unwrap());
        assert!(!exists(&params(8, 2, 31, 3)).unwrap());
    }

    #[test]
    fn deterministic_output() {
        let pq = params(7, 2, 5, 2);
        assert_eq!(enumerate(&pq).unwrap(), enumerate(&pq).unwrap());
    }

    #[test]
    fn discarded_pure_q_solution_is_produced_then_removed() {
        // five copies of 1/5: reduced records with every l = 0
        let pq = params(5, 2, 5, 2);
        let grids = enumerate(&pq).unwrap();
        assert!(grids.iter().all(|g| !g.is_unicolumn()));
        let pure = SolutionGrid::from_entries(pq, vec![vec![0, 0, 0], vec![5, 0, 0]]);
        assert!(!grids.contains(&pure));
    }

    #[test]
    fn depth_caps() {
        // S_7 = 10650056950807, 3^27 < S_7 <= 3^28
        assert_eq!(depth_cap(&params(7, 2, 3, 3)), 30);
    }
}
