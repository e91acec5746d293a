//! Exact arithmetic: rationals, valuations, perfect powers, integer
//! factorization and cyclotomic integers.

mod cyclotomic;
mod factor;
mod primes;
mod roots;
mod valuation;

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{arg_err, Result};

pub use cyclotomic::{
    cyc_norm, is_pth_power_cyc, reduce_at_split_prime, split_root_of_unity, CycInt, NonPowerWitness, PthPowerVerdict,
};
pub use factor::{factor_int, FactorEffort, FactorStatus, IntFactorization};
pub use primes::{is_prime, is_prime_u64, mul_mod, next_prime_u64, pow_mod};
pub use roots::{integer_nth_root, is_perfect_power, perfect_root};
pub use valuation::{val_p, val_p_int, PAdicVal};

/// Exact rational number; numerator and denominator are kept coprime with a
/// positive denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Hash key for a rational. The `Hash` impl of `Ratio` recurses through the
/// continued fraction, which overflows the stack for values of a few
/// thousand digits.
pub fn hash_key(x: &Rational) -> (BigInt, BigInt) {
    (x.numer().clone(), x.denom().clone())
}

/// Parses `"a"` or `"a/b"` (surrounding whitespace allowed).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let parsed = match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim());
            let d = BigInt::from_str(d.trim());
            match (n, d) {
                (Ok(n), Ok(d)) if !d.is_zero() => Some(Rational::new(n, d)),
                _ => None,
            }
        }
        None => BigInt::from_str(t).ok().map(Rational::from_integer),
    };
    match parsed {
        Some(r) => Ok(r),
        None => arg_err(format!("cannot parse rational {s:?}")),
    }
}

/// `"a/b"`, or `"a"` when the denominator is one.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Serde adapters writing exact values as decimal strings.
pub mod serde_exact {
    use num_bigint::BigInt;
    use serde::Serializer;

    use super::{format_rational, Rational};

    pub fn rational<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn rationals<S: Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(format_rational))
    }

    pub fn opt_rational<S: Serializer>(x: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(x) => s.serialize_some(&format_rational(x)),
            None => s.serialize_none(),
        }
    }

    pub fn bigint<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }
}
