//! Row-level operations: admissibility, push values, horizontal moves,
//! reduction of a row into the next one down, and bottom-row completion.
//!
//! Column indices `j` in the move functions are 1-based, as in the tableau:
//! column `j` holds the entry for `p^(j-1)`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{row_value, Params, RowVec};
use crate::numtheory::{not_op_extended, p_valuation, to_digits};

/// Mass carried one q-valuation down, split as `p^alpha * s_tilde + s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReductionSeed {
    pub s_tilde: u64,
    pub s: u64,
}

impl ReductionSeed {
    /// The row `[s_tilde, 0, ..., 0, s]` it stands for.
    pub fn seeded_row(&self, width: usize) -> RowVec {
        let mut entries = vec![0; width];
        entries[0] = self.s_tilde;
        entries[width - 1] += self.s;
        RowVec::new(entries)
    }
}

pub fn is_admissible(row: &RowVec, params: &Params) -> bool {
    row_value(row, params.p()) % params.q() as u128 == 0
}

pub fn push_value(row: &RowVec, params: &Params) -> Result<u128> {
    let value = row_value(row, params.p());
    if value % params.q() as u128 != 0 {
        return Err(Error::NotAdmissible { value, q: params.q() });
    }
    Ok(value / params.q() as u128)
}

/// Trades one unit in column `j` for `p` units in column `j + 1`.
pub fn right_move(row: &RowVec, j: usize, p: u64) -> Result<RowVec> {
    if j == 0 || j >= row.len() {
        return Err(Error::InvalidMove(format!("no column to the right of column {j}")));
    }
    if row.entries()[j - 1] == 0 {
        return Err(Error::InvalidMove(format!("column {j} is empty")));
    }
    let mut out = row.clone();
    let e = out.entries_mut();
    e[j - 1] -= 1;
    e[j] += p;
    Ok(out)
}

/// Inverse of [`right_move`]: `p` units in column `j + 1` become one unit in column `j`.
pub fn left_move(row: &RowVec, j: usize, p: u64) -> Result<RowVec> {
    if j == 0 || j >= row.len() {
        return Err(Error::InvalidMove(format!("no column to the right of column {j}")));
    }
    if row.entries()[j] < p {
        return Err(Error::InvalidMove(format!("column {} holds fewer than {p} units", j + 1)));
    }
    let mut out = row.clone();
    let e = out.entries_mut();
    e[j] -= p;
    e[j - 1] += 1;
    Ok(out)
}

/// All distinct rows reachable from `row` by exactly `l` right moves.
///
/// Computed layer by layer; each layer is deduplicated before the next move.
pub fn expand_row(row: &RowVec, l: u64, p: u64) -> BTreeSet<RowVec> {
    let mut layer = BTreeSet::from([row.clone()]);
    for _ in 0..l {
        let mut next = BTreeSet::new();
        for r in &layer {
            for j in 1..r.len() {
                if r.entries()[j - 1] > 0 {
                    next.insert(right_move(r, j, p).expect("source box checked non-empty"));
                }
            }
        }
        if next.is_empty() {
            return next;
        }
        layer = next;
    }
    layer
}

/// The row of value `value` with every column after the first below `p`.
pub fn canonical_row(value: u128, params: &Params) -> Result<RowVec> {
    let p_pow = params.p_pow() as u128;
    let head = u64::try_from(value / p_pow)
        .map_err(|_| Error::Overflow(format!("row value {value} too large")))?;
    let tail = (value % p_pow) as u64;
    let mut entries = Vec::with_capacity(params.width());
    entries.push(head);
    entries.extend(to_digits(tail, params.p(), params.alpha_p() as usize)?.into_digits());
    Ok(RowVec::new(entries))
}

/// Splits the push value of an admissible row into the seed of the next row.
pub fn reduce_row(row: &RowVec, params: &Params) -> Result<ReductionSeed> {
    let t = push_value(row, params)?;
    let p_pow = params.p_pow() as u128;
    let s_tilde = u64::try_from(t / p_pow)
        .map_err(|_| Error::Overflow(format!("push value {t} too large")))?;
    Ok(ReductionSeed { s_tilde, s: (t % p_pow) as u64 })
}

/// The unique row `[0, d_2, ..., d_{alpha+1}]` with digits below `p` that,
/// together with `s` pushed into its last column, is a bottom row.
pub fn bottom_completion(s: u64, params: &Params) -> Result<RowVec> {
    let complement = not_op_extended(s, params.p(), params.alpha_p())?;
    let row = canonical_row(complement as u128, params)?;
    debug_assert_eq!(row.entries()[0], 0);
    debug_assert!({
        // nonzero digits live in columns 2..=alpha - v + 1
        let v = p_valuation(s, params.p()).unwrap() as usize;
        row.entries()[params.width() - v..].iter().all(|&d| d == 0)
    });
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::{digit_sum, p_valuation};
    use proptest::prelude::*;

    fn params(p: u64, q: u64, alpha: u32) -> Params {
        Params::new(p, q, 7, alpha).unwrap()
    }

    fn row(v: &[u64]) -> RowVec {
        RowVec::new(v.to_vec())
    }

    #[test]
    fn admissibility_and_push() {
        let pq = params(2, 3, 3);
        assert!(is_admissible(&row(&[0, 3, 0, 0]), &pq));
        assert!(!is_admissible(&row(&[1, 0, 0, 0]), &pq));
        assert!(is_admissible(&RowVec::zeros(4), &pq));
        assert_eq!(push_value(&row(&[0, 3, 0, 0]), &pq).unwrap(), 4);
        assert_eq!(push_value(&row(&[0, 0, 0, 6]), &pq).unwrap(), 2);
        assert_eq!(push_value(&RowVec::zeros(4), &pq).unwrap(), 0);
        assert!(matches!(
            push_value(&row(&[1, 0, 0, 0]), &pq),
            Err(Error::NotAdmissible { value: 8, q: 3 })
        ));
    }

    #[test]
    fn horizontal_moves() {
        assert_eq!(right_move(&row(&[1, 0]), 1, 2).unwrap(), row(&[0, 2]));
        assert_eq!(right_move(&row(&[0, 3, 0, 0]), 2, 2).unwrap(), row(&[0, 2, 2, 0]));
        assert!(right_move(&row(&[0, 1]), 1, 3).is_err());
        assert!(right_move(&row(&[0, 1]), 2, 3).is_err());

        assert_eq!(left_move(&row(&[0, 2]), 1, 2).unwrap(), row(&[1, 0]));
        assert_eq!(left_move(&row(&[0, 0, 0, 2]), 3, 2).unwrap(), row(&[0, 0, 1, 0]));
        assert!(left_move(&row(&[0, 1]), 1, 2).is_err());
    }

    #[test]
    fn expansions() {
        let got = expand_row(&row(&[2, 0, 0]), 2, 2);
        assert_eq!(got, BTreeSet::from([row(&[0, 4, 0]), row(&[1, 1, 2])]));
        let r = row(&[3, 1, 4]);
        assert_eq!(expand_row(&r, 0, 5), BTreeSet::from([r.clone()]));
        assert!(expand_row(&row(&[0, 1]), 1, 2).is_empty());
    }

    #[test]
    fn reductions() {
        let pq = params(2, 3, 3);
        assert_eq!(reduce_row(&row(&[0, 3, 0, 0]), &pq).unwrap(), ReductionSeed { s_tilde: 0, s: 4 });
        assert_eq!(reduce_row(&row(&[0, 0, 0, 6]), &pq).unwrap(), ReductionSeed { s_tilde: 0, s: 2 });
        // [q^2, 0, ..., 0] pushes exactly p^alpha q
        assert_eq!(reduce_row(&row(&[9, 0, 0, 0]), &pq).unwrap(), ReductionSeed { s_tilde: 3, s: 0 });
        assert!(reduce_row(&row(&[1, 0, 0, 0]), &pq).is_err());
        assert_eq!(ReductionSeed { s_tilde: 1, s: 2 }.seeded_row(4), row(&[1, 0, 0, 2]));
    }

    #[test]
    fn completions() {
        assert_eq!(bottom_completion(2, &params(2, 3, 3)).unwrap(), row(&[0, 1, 1, 0]));
        assert_eq!(bottom_completion(4, &params(2, 3, 3)).unwrap(), row(&[0, 1, 0, 0]));
        assert_eq!(bottom_completion(1, &params(3, 5, 2)).unwrap(), row(&[0, 2, 2]));
        assert!(bottom_completion(0, &params(2, 3, 3)).is_err());
        assert!(bottom_completion(8, &params(2, 3, 3)).is_err());
    }

    #[test]
    fn completion_entry_count_matches_variable_identity() {
        // p(l + alpha - v) - (l + alpha - v - 1) - N(s) parts after l right moves
        for (p, q) in [(2u64, 3u64), (3, 2), (5, 3)] {
            for alpha in 1..=4u32 {
                let pq = Params::new(p, q, 7, alpha).unwrap();
                for s in 1..pq.p_pow() {
                    let base = bottom_completion(s, &pq).unwrap();
                    let v = p_valuation(s, p).unwrap() as u64;
                    for l in 0..3u64 {
                        let m = l + alpha as u64 - v;
                        let expected = (p * m + 1).checked_sub(m + digit_sum(s, p));
                        for r in expand_row(&base, l, p) {
                            assert_eq!(Some(r.total()), expected);
                        }
                    }
                }
            }
        }
    }

    fn small_row(max_len: usize) -> impl Strategy<Value = Vec<u64>> {
        prop::collection::vec(0u64..5, 2..=max_len)
    }

    proptest! {
        #[test]
        fn moves_preserve_value(entries in small_row(5), p in prop::sample::select(vec![2u64, 3, 5]), j in 1usize..5) {
            let r = RowVec::new(entries);
            prop_assume!(j < r.len());
            if let Ok(moved) = right_move(&r, j, p) {
                prop_assert_eq!(row_value(&moved, p), row_value(&r, p));
                prop_assert_eq!(moved.total(), r.total() + p - 1);
                prop_assert_eq!(left_move(&moved, j, p).unwrap(), r.clone());
            }
            if let Ok(moved) = left_move(&r, j, p) {
                prop_assert_eq!(row_value(&moved, p), row_value(&r, p));
                prop_assert_eq!(moved.total() + p - 1, r.total());
            }
        }

        #[test]
        fn expansion_totals_and_values(entries in small_row(4), p in prop::sample::select(vec![2u64, 3]), l in 0u64..4) {
            let r = RowVec::new(entries);
            for e in expand_row(&r, l, p) {
                prop_assert_eq!(e.total(), r.total() + l * (p - 1));
                prop_assert_eq!(row_value(&e, p), row_value(&r, p));
            }
        }

        #[test]
        fn expansion_composes(entries in small_row(4), p in prop::sample::select(vec![2u64, 3]), a in 0u64..3, b in 0u64..3) {
            let r = RowVec::new(entries);
            let staged: BTreeSet<RowVec> = expand_row(&r, a, p)
                .iter()
                .flat_map(|mid| expand_row(mid, b, p))
                .collect();
            prop_assert_eq!(staged, expand_row(&r, a + b, p));
        }
    }
}
