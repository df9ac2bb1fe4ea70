//! Brute-force reference enumerator.
//!
//! Picks the `n` denominators in nondecreasing order from the finite set of
//! all `p^a q^b` below the Sylvester number `S_n`, keeping the remaining sum
//! as an exact rational. Shares nothing with the row-based search except the
//! model types. Intended for `n` up to about 10.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::model::{Params, Rational, SolutionGrid};
use crate::numtheory::sylvester;

#[derive(Debug, Clone)]
struct Denominator {
    value: BigInt,
    a: usize,
    b: usize,
}

/// Every `p^a q^b < S_n` with `a <= alpha_p`, ascending.
fn candidate_denominators(params: &Params) -> Vec<Denominator> {
    let bound = BigInt::from(sylvester(params.n() as u32));
    let p = BigInt::from(params.p());
    let q = BigInt::from(params.q());
    let mut out = Vec::new();
    let mut q_pow = BigInt::one();
    let mut b = 0;
    while q_pow < bound {
        let mut d = q_pow.clone();
        for a in 0..=params.alpha_p() as usize {
            if d >= bound {
                break;
            }
            out.push(Denominator { value: d.clone(), a, b });
            d *= &p;
        }
        q_pow *= &q;
        b += 1;
    }
    out.sort_by(|x, y| x.value.cmp(&y.value));
    out
}

struct Search<'a> {
    denominators: &'a [Denominator],
    chosen: Vec<usize>,
    found: Vec<Vec<usize>>,
}

impl Search<'_> {
    /// Chooses `left` more denominators, all at index `>= start`, whose
    /// reciprocals sum to `rest`.
    fn run(&mut self, rest: &Rational, left: usize, start: usize) {
        if left == 1 {
            if rest.numer().is_one() {
                let target = rest.denom();
                if let Ok(i) = self.denominators[start..].binary_search_by(|d| d.value.cmp(target)) {
                    self.chosen.push(start + i);
                    self.found.push(self.chosen.clone());
                    self.chosen.pop();
                }
            }
            return;
        }
        // 1/d <= rest  <=>  d >= ceil(den / num)
        let lowest = Integer::div_ceil(rest.denom(), rest.numer());
        let first = start + self.denominators[start..].partition_point(|d| d.value < lowest);
        let k = BigInt::from(left);
        for i in first..self.denominators.len() {
            let d = &self.denominators[i].value;
            // left / d >= rest  <=>  d * num <= left * den
            if d * rest.numer() > &k * rest.denom() {
                break;
            }
            let next = rest - Rational::new(BigInt::one(), d.clone());
            if !next.is_positive() {
                continue;
            }
            self.chosen.push(i);
            self.run(&next, left - 1, i);
            self.chosen.pop();
        }
    }
}

fn assemble(params: &Params, denominators: &[Denominator], picks: &[usize]) -> SolutionGrid {
    let height = picks.iter().map(|&i| denominators[i].b).max().unwrap_or(0) + 1;
    let mut rows = vec![vec![0u64; params.width()]; height];
    for &i in picks {
        rows[denominators[i].b][denominators[i].a] += 1;
    }
    SolutionGrid::from_entries(*params, rows)
}

/// All solutions with both bases present, in canonical order.
pub fn brute_enumerate(params: &Params) -> Vec<SolutionGrid> {
    let denominators = candidate_denominators(params);
    let n = params.n() as usize;
    let one = Rational::one();

    // split on the first (smallest) denominator
    let first_choices: Vec<usize> = (0..denominators.len())
        .take_while(|&i| denominators[i].value <= BigInt::from(n))
        .collect();

    let found: Vec<Vec<usize>> = first_choices
        .into_par_iter()
        .flat_map_iter(|i| {
            let d = &denominators[i].value;
            let rest = &one - Rational::new(BigInt::one(), d.clone());
            let mut search = Search { denominators: &denominators, chosen: vec![i], found: Vec::new() };
            if rest.is_zero() {
                if n == 1 {
                    search.found.push(vec![i]);
                }
            } else {
                search.run(&rest, n - 1, i);
            }
            search.found
        })
        .collect();

    let grids: BTreeSet<SolutionGrid> = found
        .iter()
        .map(|picks| assemble(params, &denominators, picks))
        .filter(|g| g.p_appears() && g.q_appears())
        .collect();
    grids.into_iter().collect()
}

pub fn brute_count(params: &Params) -> usize {
    brute_enumerate(params).len()
}

/// Largest q-exponent the oracle considers, from `q^b < S_n`.
pub fn max_q_exponent(params: &Params) -> usize {
    let bound = sylvester(params.n() as u32);
    let q = BigUint::from(params.q());
    let mut b = 0;
    let mut q_pow = q.clone();
    while q_pow < bound {
        q_pow *= &q;
        b += 1;
    }
    b
}
