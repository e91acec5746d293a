use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Pow, Signed, Zero};

use super::Rational;

/// Floor of the k-th root of `n`, by bisection between the powers of two
/// fixed by the bit length. No floating point is involved.
pub fn integer_nth_root(n: &BigUint, k: u32) -> BigUint {
    assert!(k >= 1, "root degree must be positive");
    if n.is_zero() || k == 1 {
        return n.clone();
    }
    let bits = n.bits();
    // 2^((bits-1)/k) <= root < 2^((bits-1)/k + 1)
    let e = (bits - 1) / k as u64;
    let mut lo = BigUint::one() << e;
    let mut hi = BigUint::one() << (e + 1);
    // invariant: lo^k <= n < hi^k
    while &hi - &lo > BigUint::one() {
        let mid: BigUint = (&lo + &hi) >> 1u32;
        if Pow::pow(&mid, k) <= *n {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn exact_int_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() && k.is_multiple_of(2) {
        return None;
    }
    let mag = n.magnitude();
    let r = integer_nth_root(mag, k);
    if Pow::pow(&r, k) == *mag {
        let sign = if n.is_negative() { Sign::Minus } else { Sign::Plus };
        Some(BigInt::from_biguint(sign, r))
    } else {
        None
    }
}

/// The rational y with y^k = x, if one exists (the positive one for even k).
pub fn perfect_root(x: &Rational, k: u32) -> Option<Rational> {
    assert!(k >= 2, "power must be at least 2");
    if x.is_zero() {
        return Some(Rational::zero());
    }
    // Lowest terms: x is a k-th power iff numerator and denominator both are.
    let n = exact_int_root(x.numer(), k)?;
    let d = exact_int_root(x.denom(), k)?;
    Some(Rational::new(n, d))
}

/// Whether `x = y^k` for some rational `y`.
pub fn is_perfect_power(x: &Rational, k: u32) -> bool {
    perfect_root(x, k).is_some()
}
