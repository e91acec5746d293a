use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::primes::{is_prime, mul_mod};
use crate::error::{arg_err, Result};

/// Work limits for [`factor_int`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FactorEffort {
    /// Trial division by every integer up to this bound.
    pub trial_bound: u64,
    /// Total Pollard-rho iterations shared across all cofactors.
    pub rho_iterations: u64,
    pub seed: u64,
}

impl Default for FactorEffort {
    fn default() -> Self {
        FactorEffort { trial_bound: 10_000, rho_iterations: 2_000_000, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FactorStatus {
    Complete,
    /// The budget ran out; this cofactor (> 1, composite) remains unsplit.
    Partial(#[serde(serialize_with = "crate::exactnum::serde_exact::bigint")] BigInt),
}

/// `sign * prod(prime^exp) * cofactor == n`, where the cofactor is 1 unless
/// the status is `Partial`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntFactorization {
    pub sign: i8,
    #[serde(serialize_with = "serialize_factors")]
    pub factors: Vec<(BigUint, u32)>,
    pub status: FactorStatus,
}

fn serialize_factors<S: serde::Serializer>(fs: &[(BigUint, u32)], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(fs.iter().map(|(p, e)| (p.to_string(), *e)))
}

impl IntFactorization {
    pub fn is_complete(&self) -> bool {
        self.status == FactorStatus::Complete
    }

    pub fn cofactor(&self) -> BigInt {
        match &self.status {
            FactorStatus::Complete => BigInt::one(),
            FactorStatus::Partial(c) => c.clone(),
        }
    }

    /// Multiplies everything back together.
    pub fn reassemble(&self) -> BigInt {
        let mut acc = self.cofactor();
        for (p, e) in &self.factors {
            acc *= BigInt::from(num_traits::pow(p.clone(), *e as usize));
        }
        if self.sign < 0 {
            -acc
        } else {
            acc
        }
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.iter().map(|(p, _)| p)
    }
}

fn rho_u64(n: u64, c: u64, budget: &mut u64) -> Option<u64> {
    // Brent's variant with batched gcds.
    let f = |x: u64| ((mul_mod(x, x, n) as u128 + c as u128) % n as u128) as u64;
    let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
    let m = 128u64;
    let mut x;
    let mut ys;
    loop {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        loop {
            ys = y;
            let steps = m.min(r - k);
            for _ in 0..steps {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            *budget = budget.saturating_sub(steps);
            let g = q.gcd(&n);
            k += steps;
            if g != 1 {
                if g != n {
                    return Some(g);
                }
                // Backtrack one step at a time.
                loop {
                    ys = f(ys);
                    let g = x.abs_diff(ys).gcd(&n);
                    if g != 1 {
                        return if g != n { Some(g) } else { None };
                    }
                }
            }
            if k >= r || *budget == 0 {
                break;
            }
        }
        if *budget == 0 {
            return None;
        }
        r *= 2;
    }
}

fn rho_big(n: &BigUint, c: u64, budget: &mut u64) -> Option<BigUint> {
    let f = |x: &BigUint| (x * x + c) % n;
    let one = BigUint::one();
    let mut y = BigUint::from(2u32);
    let mut q = BigUint::one();
    let mut r = 1u64;
    let m = 128u64;
    loop {
        let x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        loop {
            let mut ys = y.clone();
            let steps = m.min(r - k);
            for _ in 0..steps {
                y = f(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = (&q * diff) % n;
            }
            *budget = budget.saturating_sub(steps);
            let g = q.gcd(n);
            k += steps;
            if g != one {
                if &g != n {
                    return Some(g);
                }
                loop {
                    ys = f(&ys);
                    let diff = if x > ys { &x - &ys } else { &ys - &x };
                    let g = diff.gcd(n);
                    if g != one {
                        return if &g != n { Some(g) } else { None };
                    }
                }
            }
            if k >= r || *budget == 0 {
                break;
            }
        }
        if *budget == 0 {
            return None;
        }
        r *= 2;
    }
}

fn split(n: &BigUint, budget: &mut u64, seed: u64) -> Option<BigUint> {
    let mut c = 1 + seed % 97;
    while *budget > 0 {
        let found = match n.to_u64() {
            Some(small) => rho_u64(small, c, budget).map(BigUint::from),
            None => rho_big(n, c, budget),
        };
        if found.is_some() {
            return found;
        }
        c += 1;
    }
    None
}

/// Factors a nonzero integer by trial division followed by Pollard rho
/// within the given budget.
pub fn factor_int(n: &BigInt, effort: FactorEffort) -> Result<IntFactorization> {
    if n.is_zero() {
        return arg_err("cannot factor zero");
    }
    let sign = if n.sign() == Sign::Minus { -1 } else { 1 };
    let mut m = n.magnitude().clone();
    let mut found: Vec<BigUint> = Vec::new();

    let mut d = 2u64;
    while d <= effort.trial_bound {
        let dd = BigUint::from(d);
        if &dd * &dd > m {
            break;
        }
        loop {
            let (q, r) = m.div_rem(&dd);
            if !r.is_zero() {
                break;
            }
            found.push(dd.clone());
            m = q;
        }
        d += if d == 2 { 1 } else { 2 };
    }

    let mut cofactor = BigUint::one();
    let mut budget = effort.rho_iterations;
    let mut stack = vec![m];
    while let Some(x) = stack.pop() {
        if x.is_one() {
            continue;
        }
        let small_enough = BigUint::from(effort.trial_bound);
        if &small_enough * &small_enough >= x || is_prime(&x, effort.seed) {
            // Anything below trial_bound^2 left after trial division is prime.
            found.push(x);
            continue;
        }
        match split(&x, &mut budget, effort.seed) {
            Some(f) => {
                let g = &x / &f;
                stack.push(f);
                stack.push(g);
            }
            None => cofactor *= x,
        }
    }

    found.sort();
    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    for p in found {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    let status = if cofactor.is_one() { FactorStatus::Complete } else { FactorStatus::Partial(BigInt::from(cofactor)) };
    Ok(IntFactorization { sign, factors, status })
}
