//! Exact integer and rational helpers shared by every formula.

use std::ops::{Mul, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{FromPrimitive, One, Zero};

use crate::multiset::IntMultiSet;

pub type BigRational = num_rational::BigRational;

/// Factorials memoized up to a fixed bound; larger arguments are computed
/// on demand from the last stored entry.
#[derive(Debug)]
pub struct FactorialTable {
    table: Vec<BigInt>,
}

pub const DEFAULT_FACTORIAL_BOUND: usize = 256;

impl FactorialTable {
    pub fn with_bound(bound: usize) -> Self {
        let mut table = Vec::with_capacity(bound + 1);
        table.push(BigInt::one());
        for i in 1..=bound {
            let next = &table[i - 1] * BigInt::from(i);
            table.push(next);
        }
        FactorialTable { table }
    }

    pub fn bound(&self) -> usize {
        self.table.len() - 1
    }

    pub fn get(&self, n: usize) -> BigInt {
        if let Some(v) = self.table.get(n) {
            return v.clone();
        }
        let mut acc = self.table.last().cloned().unwrap_or_else(BigInt::one);
        for i in self.table.len()..=n {
            acc *= BigInt::from(i);
        }
        acc
    }
}

fn table() -> &'static FactorialTable {
    static TABLE: OnceLock<FactorialTable> = OnceLock::new();
    TABLE.get_or_init(|| FactorialTable::with_bound(DEFAULT_FACTORIAL_BOUND))
}

pub fn factorial(n: usize) -> BigInt {
    table().get(n)
}

/// Binomial coefficient `C(m, j)` for any integer `m`.
///
/// Zero for `j < 0` and for `0 <= m < j`. For negative `m` the value is
/// `(m)_j / j!`, so `C(-1, j) = (-1)^j`.
pub fn binomial(m: i64, j: i64) -> BigInt {
    if j < 0 || (m >= 0 && j > m) {
        return BigInt::zero();
    }
    if m >= 0 {
        let j = j.min(m - j);
        let mut acc = BigInt::one();
        for i in 0..j {
            acc = acc * BigInt::from(m - i) / BigInt::from(i + 1);
        }
        return acc;
    }
    let num = falling_factorial(&BigInt::from(m), j as usize);
    num / factorial(j as usize)
}

/// `(Σ parts)! / Π parts!`; 1 for the empty multiset.
pub fn multinomial(parts: &IntMultiSet) -> BigInt {
    multinomial_of(parts.values())
}

pub fn multinomial_of(parts: &[u32]) -> BigInt {
    let total: usize = parts.iter().map(|&p| p as usize).sum();
    let den: BigInt = parts.iter().map(|&p| factorial(p as usize)).product();
    factorial(total) / den
}

/// `x (x-1) ··· (x-n+1)`, equal to 1 when `n = 0`.
pub fn falling_factorial<T>(x: &T, n: usize) -> T
where
    T: Clone + One + FromPrimitive + Sub<Output = T> + Mul<Output = T>,
{
    let mut acc = T::one();
    for i in 0..n {
        let shift = T::from_usize(i).expect("falling factorial shift fits");
        acc = acc * (x.clone() - shift);
    }
    acc
}

/// `Σ_{k=lo}^{hi} (-1)^k C(m, k-lo)`; zero when `hi < lo`.
///
/// This is the truncation factor of the closed product formula.
pub fn alt_binomial_partial_sum(m: i64, lo: i64, hi: i64) -> BigInt {
    let mut acc = BigInt::zero();
    for k in lo..=hi {
        let term = binomial(m, k - lo);
        if k.rem_euclid(2) == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// `(-1)^e` as a BigInt.
pub fn sign(e: usize) -> BigInt {
    if e.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

pub fn rational(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The `"num/den"` text form used in every JSON report, e.g. `-5/1`.
pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let (n, d) = s.split_once('/')?;
    let n: BigInt = n.trim().parse().ok()?;
    let d: BigInt = d.trim().parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

/// Converts an integral rational to a BigInt.
pub fn to_integer(q: &BigRational) -> Option<BigInt> {
    q.is_integer().then(|| q.to_integer())
}

pub fn serialize_rational<S: serde::Serializer>(
    q: &BigRational,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

pub fn serialize_bigint<S: serde::Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(4, 2), bi(6));
        assert_eq!(binomial(3, 5), bi(0));
        assert_eq!(binomial(-1, 0), bi(1));
        assert_eq!(binomial(-1, 1), bi(-1));
        assert_eq!(binomial(-1, 4), bi(1));
        assert_eq!(binomial(-3, 2), bi(6));
        assert_eq!(binomial(5, -1), bi(0));
        assert_eq!(binomial(0, 0), bi(1));
    }

    #[test]
    fn pascal_rule() {
        for m in 1..=30i64 {
            for j in 0..=m {
                assert_eq!(binomial(m, j), binomial(m - 1, j - 1) + binomial(m - 1, j));
            }
        }
    }

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial(&IntMultiSet::from([2, 2])), bi(6));
        assert_eq!(multinomial(&IntMultiSet::from([2, 2, 2])), bi(90));
        assert_eq!(multinomial(&IntMultiSet::empty()), bi(1));
        for a in 0..=12u32 {
            for b in 0..=12u32 {
                assert_eq!(
                    multinomial(&IntMultiSet::from([a, b])),
                    binomial((a + b) as i64, a as i64)
                );
            }
        }
    }

    #[test]
    fn falling_factorial_examples() {
        assert_eq!(falling_factorial(&bi(5), 2), bi(20));
        assert_eq!(falling_factorial(&bi(7), 0), bi(1));
        assert_eq!(falling_factorial(&bi(3), 4), bi(0));
        assert_eq!(falling_factorial(&bi(-2), 3), bi(-24));
        assert_eq!(falling_factorial(&ratio(1, 2), 2), ratio(-1, 4));
    }

    #[test]
    fn alt_sum_examples() {
        assert_eq!(alt_binomial_partial_sum(0, 1, 2), bi(-1));
        assert_eq!(alt_binomial_partial_sum(1, 1, 2), bi(0));
        assert_eq!(alt_binomial_partial_sum(2, 1, 1), bi(-1));
        assert_eq!(alt_binomial_partial_sum(3, 2, 1), bi(0));
    }

    #[test]
    fn alt_sum_full_range_collapses() {
        for lo in 0..6i64 {
            assert_eq!(alt_binomial_partial_sum(0, lo, lo), sign(lo as usize));
            for m in 1..=10i64 {
                assert_eq!(alt_binomial_partial_sum(m, lo, lo + m), bi(0));
            }
        }
    }

    #[test]
    fn factorial_table_growth() {
        let small = FactorialTable::with_bound(5);
        assert_eq!(small.bound(), 5);
        assert_eq!(small.get(5), bi(120));
        assert_eq!(small.get(8), bi(40320));
        assert_eq!(factorial(300), small.get(300));
    }

    #[test]
    fn rational_text_form() {
        assert_eq!(format_rational(&ratio(-10, 2)), "-5/1");
        assert_eq!(format_rational(&ratio(0, 7)), "0/1");
        assert_eq!(parse_rational("6/4"), Some(ratio(3, 2)));
        assert_eq!(parse_rational("1/0"), None);
    }
}
