use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::{is_prime_u64, Rational};
use crate::error::{arg_err, Result};

/// A p-adic valuation; `Infinite` is reserved for the valuation of zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PAdicVal {
    Finite(i64),
    Infinite,
}

impl PAdicVal {
    pub fn is_positive(self) -> bool {
        match self {
            PAdicVal::Finite(v) => v > 0,
            PAdicVal::Infinite => true,
        }
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            PAdicVal::Finite(v) => Some(v),
            PAdicVal::Infinite => None,
        }
    }
}

impl Ord for PAdicVal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (PAdicVal::Finite(a), PAdicVal::Finite(b)) => a.cmp(b),
            (PAdicVal::Finite(_), PAdicVal::Infinite) => Ordering::Less,
            (PAdicVal::Infinite, PAdicVal::Finite(_)) => Ordering::Greater,
            (PAdicVal::Infinite, PAdicVal::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for PAdicVal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::ops::Add for PAdicVal {
    type Output = PAdicVal;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (PAdicVal::Finite(a), PAdicVal::Finite(b)) => PAdicVal::Finite(a + b),
            _ => PAdicVal::Infinite,
        }
    }
}

impl fmt::Display for PAdicVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PAdicVal::Finite(v) => write!(f, "{v}"),
            PAdicVal::Infinite => write!(f, "inf"),
        }
    }
}

/// Exponent of `p` in a nonzero integer, `None` for zero. `p` must be at least 2.
pub fn val_p_int(n: &BigInt, p: u64) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0u64;
    // Strip p^(2^k) blocks first so huge valuations stay cheap.
    let mut powers = vec![p.clone()];
    loop {
        let (q, r) = m.div_rem(powers.last().unwrap());
        if !r.is_zero() {
            break;
        }
        m = q;
        v += 1u64 << (powers.len() - 1);
        let next = powers.last().unwrap() * powers.last().unwrap();
        powers.push(next);
    }
    while let Some(pk) = powers.pop() {
        let (q, r) = m.div_rem(&pk);
        if r.is_zero() {
            m = q;
            v += 1u64 << powers.len();
        }
    }
    Some(v)
}

/// `v_p(x) = v_p(num) - v_p(den)`, infinite for zero.
pub fn val_p(x: &Rational, p: u64) -> Result<PAdicVal> {
    if !is_prime_u64(p) {
        return arg_err(format!("{p} is not prime"));
    }
    if x.is_zero() {
        return Ok(PAdicVal::Infinite);
    }
    let vn = val_p_int(x.numer(), p).unwrap_or(0) as i64;
    let vd = val_p_int(x.denom(), p).unwrap_or(0) as i64;
    Ok(PAdicVal::Finite(vn - vd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    #[test]
    fn valuation_examples() {
        assert_eq!(val_p(&rat(1, 3), 3).unwrap(), PAdicVal::Finite(-1));
        assert_eq!(val_p(&rat(4, 9), 3).unwrap(), PAdicVal::Finite(-2));
        // 458330 = 677^2 + 1; repeated exact division by 5 stops after one step
        let n = 677i64 * 677 + 1;
        let mut m = n;
        let mut oracle = 0;
        while m % 5 == 0 {
            m /= 5;
            oracle += 1;
        }
        assert_eq!(oracle, 1);
        assert_eq!(val_p(&int(n), 5).unwrap(), PAdicVal::Finite(oracle));
        assert_eq!(val_p(&int(0), 5).unwrap(), PAdicVal::Infinite);
    }

    #[test]
    fn non_prime_rejected() {
        assert!(val_p(&int(12), 4).is_err());
        assert!(val_p(&int(12), 1).is_err());
    }

    #[test]
    fn large_valuation() {
        let n = BigInt::from(3).pow(1000) * BigInt::from(7);
        assert_eq!(val_p_int(&n, 3), Some(1000));
        assert_eq!(val_p_int(&n, 7), Some(1));
        assert_eq!(val_p_int(&n, 2), Some(0));
    }
}
