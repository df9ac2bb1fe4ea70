//! Base-p arithmetic primitives.
//!
//! Digits are stored most-significant first, matching the left-to-right
//! column order of a solution row (column 2 holds the highest power).

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

/// Fixed-width base-p digit vector, most-significant digit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DigitVec {
    digits: Vec<u64>,
    base: u64,
}

impl DigitVec {
    pub fn new(digits: Vec<u64>, base: u64) -> Result<Self> {
        if base < 2 {
            return Err(Error::OutOfRange(format!("base {base} < 2")));
        }
        if let Some(d) = digits.iter().find(|&&d| d >= base) {
            return Err(Error::OutOfRange(format!("digit {d} not below base {base}")));
        }
        Ok(Self { digits, base })
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn width(&self) -> usize {
        self.digits.len()
    }

    pub fn digit_sum(&self) -> u64 {
        self.digits.iter().sum()
    }

    pub fn into_digits(self) -> Vec<u64> {
        self.digits
    }
}

/// `p^alpha`, or an overflow error when it does not fit in 64 bits.
pub fn pow_checked(p: u64, alpha: u32) -> Result<u64> {
    p.checked_pow(alpha)
        .ok_or_else(|| Error::Overflow(format!("{p}^{alpha} exceeds 64 bits")))
}

/// `m mod p^alpha`.
pub fn residue_mod_power(m: u64, p: u64, alpha: u32) -> u64 {
    match p.checked_pow(alpha) {
        Some(modulus) => m % modulus,
        // p^alpha is larger than any u64
        None => m,
    }
}

pub fn to_digits(m: u64, p: u64, width: usize) -> Result<DigitVec> {
    if p < 2 {
        return Err(Error::OutOfRange(format!("base {p} < 2")));
    }
    let mut digits = vec![0; width];
    let mut rest = m;
    for slot in digits.iter_mut().rev() {
        *slot = rest % p;
        rest /= p;
    }
    if rest != 0 {
        return Err(Error::Overflow(format!("{m} does not fit in {width} base-{p} digits")));
    }
    Ok(DigitVec { digits, base: p })
}

pub fn from_digits(digits: &DigitVec) -> Result<u64> {
    digits.digits.iter().try_fold(0u64, |acc, &d| {
        acc.checked_mul(digits.base)
            .and_then(|v| v.checked_add(d))
            .ok_or_else(|| Error::Overflow("digit vector value exceeds 64 bits".into()))
    })
}

pub fn digit_sum(mut m: u64, p: u64) -> u64 {
    debug_assert!(p >= 2);
    let mut sum = 0;
    while m > 0 {
        sum += m % p;
        m /= p;
    }
    sum
}

pub fn p_valuation(mut m: u64, p: u64) -> Result<u32> {
    if m == 0 {
        return Err(Error::OutOfRange("valuation of 0 is undefined".into()));
    }
    let mut v = 0;
    while m % p == 0 {
        m /= p;
        v += 1;
    }
    Ok(v)
}

/// Digit-wise complement: digits strictly above the valuation become
/// `p - 1 - d`, the digit at the valuation becomes `p - d`, lower zeros stay.
/// The result satisfies `s + not_op(s) = p^(L+1)` with `L` the leading index.
pub fn not_op(s: u64, p: u64) -> Result<u64> {
    let v = p_valuation(s, p)?;
    let mut digits = Vec::new();
    let mut rest = s;
    while rest > 0 {
        digits.push(rest % p);
        rest /= p;
    }
    // digits[0] is the least significant
    let mut out = 0u64;
    for (j, &d) in digits.iter().enumerate().rev() {
        let nd = match (j as u32).cmp(&v) {
            std::cmp::Ordering::Greater => p - 1 - d,
            std::cmp::Ordering::Equal => p - d,
            std::cmp::Ordering::Less => 0,
        };
        out = out * p + nd;
    }
    Ok(out)
}

/// Extended complement over a fixed width: `p^alpha - s`.
pub fn not_op_extended(s: u64, p: u64, alpha: u32) -> Result<u64> {
    let modulus = pow_checked(p, alpha)?;
    if s == 0 || s >= modulus {
        return Err(Error::OutOfRange(format!("need 1 <= s < {p}^{alpha}, got {s}")));
    }
    Ok(modulus - s)
}

/// The i-th Sylvester number (1-based): 2, 3, 7, 43, 1807, ...
pub fn sylvester(i: u32) -> BigUint {
    assert!(i >= 1, "Sylvester numbers are indexed from 1");
    let mut s = BigUint::from(2u32);
    for _ in 1..i {
        // S_{k+1} = S_k^2 - S_k + 1
        s = &s * &s - &s + BigUint::one();
    }
    s
}

/// Whether `S_n > value`. Stops as soon as some `S_i` exceeds `value`, so it
/// stays cheap for large `n` and small `value`.
pub fn sylvester_exceeds(n: u32, value: &BigUint) -> bool {
    assert!(n >= 1, "Sylvester numbers are indexed from 1");
    let mut s = BigUint::from(2u32);
    for _ in 1..n {
        if &s > value {
            return true;
        }
        s = &s * &s - &s + BigUint::one();
    }
    &s > value
}

/// Largest `alpha` with `p^alpha < S_n`.
pub fn alpha_cap(p: u64, n: u32) -> u32 {
    alpha_cap_at_most(p, n, u32::MAX)
}

/// `min(alpha_cap(p, n), limit)` without materialising `S_n` past `p^limit`.
pub fn alpha_cap_at_most(p: u64, n: u32, limit: u32) -> u32 {
    let p = BigUint::from(p);
    let mut power = p.clone();
    let mut alpha = 0;
    while alpha < limit && sylvester_exceeds(n, &power) {
        power *= &p;
        alpha += 1;
    }
    alpha
}

/// Smallest `e <= limit` with `base^e >= S_n`, if any.
pub fn ceil_log_sylvester(base: u64, n: u32, limit: u32) -> Option<u32> {
    let base = BigUint::from(base);
    let mut power = BigUint::one();
    for e in 0..=limit {
        if !sylvester_exceeds(n, &power) {
            return Some(e);
        }
        power *= &base;
    }
    None
}

/// Trial division; adequate for desk-scale q.
pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    if m % 2 == 0 {
        return m == 2;
    }
    let mut d = 3;
    while d * d <= m {
        if m % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Returns `Some(b)` when `m == q^b`.
pub fn power_exponent(mut m: u64, q: u64) -> Option<u32> {
    if m == 0 {
        return None;
    }
    let mut b = 0;
    while m % q == 0 {
        m /= q;
        b += 1;
    }
    (m == 1).then_some(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn residues() {
        assert_eq!(residue_mod_power(53, 3, 2), 8);
        assert_eq!(residue_mod_power(0, 2, 4), 0);
        assert_eq!(residue_mod_power(71, 2, 3), 7);
        assert_eq!(residue_mod_power(71, 2, 200), 71);
    }

    #[test]
    fn digits() {
        assert_eq!(to_digits(12, 2, 4).unwrap().digits(), &[1, 1, 0, 0]);
        assert_eq!(to_digits(8, 3, 2).unwrap().digits(), &[2, 2]);
        assert_eq!(to_digits(0, 5, 3).unwrap().digits(), &[0, 0, 0]);
        assert!(matches!(to_digits(16, 2, 4), Err(Error::Overflow(_))));
        assert!(DigitVec::new(vec![0, 3], 3).is_err());
    }

    #[test]
    fn digit_sums_and_valuations() {
        assert_eq!(digit_sum(5, 2), 2);
        assert_eq!(digit_sum(8, 3), 4);
        assert_eq!(digit_sum(0, 7), 0);
        assert_eq!(p_valuation(12, 2).unwrap(), 2);
        assert_eq!(p_valuation(6, 3).unwrap(), 1);
        assert_eq!(p_valuation(1, 5).unwrap(), 0);
        assert!(p_valuation(0, 2).is_err());
    }

    #[test]
    fn not_operator() {
        assert_eq!(not_op(6, 2).unwrap(), 2);
        assert_eq!(not_op(5, 3).unwrap(), 4);
        assert_eq!(not_op(4, 2).unwrap(), 4);
        assert!(not_op(0, 2).is_err());

        assert_eq!(not_op_extended(2, 2, 3).unwrap(), 6);
        assert_eq!(not_op_extended(4, 2, 3).unwrap(), 4);
        assert_eq!(not_op_extended(1, 3, 2).unwrap(), 8);
        assert!(not_op_extended(0, 2, 3).is_err());
        assert!(not_op_extended(8, 2, 3).is_err());
    }

    /// Digit-wise construction over a fixed width, zeros above the leading
    /// digit complemented to p-1.
    fn not_extended_digitwise(s: u64, p: u64, alpha: u32) -> u64 {
        let v = p_valuation(s, p).unwrap();
        let digits = to_digits(s, p, alpha as usize).unwrap().into_digits();
        let mut out = 0;
        for (i, &d) in digits.iter().enumerate() {
            let j = alpha - 1 - i as u32;
            let nd = if j > v {
                p - 1 - d
            } else if j == v {
                p - d
            } else {
                0
            };
            out = out * p + nd;
        }
        out
    }

    #[test]
    fn extended_not_matches_digitwise_definition() {
        for p in [2u64, 3, 5] {
            for alpha in 1..=6u32 {
                for s in 1..p.pow(alpha) {
                    let ext = not_op_extended(s, p, alpha).unwrap();
                    assert_eq!(ext, not_extended_digitwise(s, p, alpha), "p={p} a={alpha} s={s}");
                    let v = p_valuation(s, p).unwrap() as u64;
                    assert_eq!(
                        digit_sum(ext, p) + digit_sum(s, p),
                        (p - 1) * (alpha as u64 - v) + 1
                    );
                }
            }
        }
    }

    #[test]
    fn sylvester_numbers() {
        assert_eq!(sylvester(1), BigUint::from(2u32));
        assert_eq!(sylvester(2), BigUint::from(3u32));
        assert_eq!(sylvester(4), BigUint::from(43u32));
        assert_eq!(sylvester(5), BigUint::from(1807u32));
        // S_{i+1} = 1 + prod S_k
        let mut prod = BigUint::one();
        for i in 1..10 {
            prod *= sylvester(i);
            assert_eq!(sylvester(i + 1), &prod + 1u32);
        }
    }

    #[test]
    fn alpha_caps() {
        assert_eq!(alpha_cap(2, 4), 5);
        assert_eq!(alpha_cap(3, 3), 1);
        assert_eq!(alpha_cap(2, 1), 0);
        assert_eq!(alpha_cap(3, 2), 0);
        assert_eq!(alpha_cap_at_most(2, 4, 3), 3);
        assert_eq!(alpha_cap_at_most(2, 4, 9), 5);
        // S_60 is never built
        assert_eq!(alpha_cap_at_most(2, 60, 40), 40);
    }

    #[test]
    fn sylvester_comparisons() {
        assert!(sylvester_exceeds(4, &BigUint::from(42u32)));
        assert!(!sylvester_exceeds(4, &BigUint::from(43u32)));
        assert!(sylvester_exceeds(1000, &BigUint::from(u64::MAX)));
        // 3^7 = 2187 >= S_5 = 1807 > 3^6
        assert_eq!(ceil_log_sylvester(3, 5, 100), Some(7));
        assert_eq!(ceil_log_sylvester(2, 1000, 100), None);
    }

    #[test]
    fn primes_and_powers() {
        let small: Vec<u64> = (0..30).filter(|&m| is_prime(m)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(!is_prime(91));
        assert_eq!(power_exponent(25, 5), Some(2));
        assert_eq!(power_exponent(1, 5), Some(0));
        assert_eq!(power_exponent(10, 5), None);
        assert_eq!(power_exponent(0, 5), None);
    }

    proptest! {
        #[test]
        fn digits_round_trip(m in 0u64..1_000_000, p in 2u64..11) {
            let width = 1 + (64 - m.leading_zeros()) as usize;
            let dv = to_digits(m, p, width).unwrap();
            prop_assert_eq!(dv.width(), width);
            prop_assert_eq!(from_digits(&dv).unwrap(), m);
            prop_assert_eq!(dv.digit_sum(), digit_sum(m, p));
        }

        #[test]
        fn not_op_complements_to_next_power(s in 1u64..1_000_000, p in prop::sample::select(vec![2u64, 3, 5, 7])) {
            let mut next = 1u64;
            while next <= s {
                next *= p;
            }
            prop_assert_eq!(s + not_op(s, p).unwrap(), next);
        }
    }
}
