//! The ring `Z[zeta_p]` for an odd prime `p`, in the power basis
//! `1, zeta, ..., zeta^(p-2)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::primes::{is_prime_u64, pow_mod};
use super::roots::integer_nth_root;
use super::Rational;
use crate::error::{arg_err, Error, Result};
use crate::poly::{resultant, RatPoly};

/// Element of `Z[zeta_p]`, always stored reduced modulo the cyclotomic polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycInt {
    p: u64,
    coeffs: Vec<BigInt>,
}

impl CycInt {
    fn check_p(p: u64) -> Result<()> {
        if p < 3 || !is_prime_u64(p) {
            return arg_err(format!("cyclotomic modulus must be an odd prime, got {p}"));
        }
        Ok(())
    }

    /// Builds from coordinates in `1, zeta, ..., zeta^(k-1)` for any `k`;
    /// higher powers are folded back using `zeta^p = 1`.
    pub fn from_coeffs(p: u64, coeffs: Vec<BigInt>) -> Result<Self> {
        Self::check_p(p)?;
        let n = p as usize;
        let mut wide = vec![BigInt::zero(); n];
        for (i, c) in coeffs.into_iter().enumerate() {
            wide[i % n] += c;
        }
        Ok(Self::reduce(p, wide))
    }

    pub fn from_int(p: u64, n: impl Into<BigInt>) -> Result<Self> {
        Self::from_coeffs(p, vec![n.into()])
    }

    /// `zeta^k`.
    pub fn zeta_pow(p: u64, k: u64) -> Result<Self> {
        Self::check_p(p)?;
        let mut c = vec![BigInt::zero(); p as usize];
        c[(k % p) as usize] = BigInt::one();
        Ok(Self::reduce(p, c))
    }

    /// `t + r * zeta^i`.
    pub fn linear(p: u64, t: impl Into<BigInt>, r: impl Into<BigInt>, i: u64) -> Result<Self> {
        Self::check_p(p)?;
        let mut c = vec![BigInt::zero(); p as usize];
        c[0] += t.into();
        c[(i % p) as usize] += r.into();
        Ok(Self::reduce(p, c))
    }

    // `wide` has length p and represents an element of Z[T]/(T^p - 1);
    // zeta^(p-1) = -(1 + zeta + ... + zeta^(p-2)).
    fn reduce(p: u64, mut wide: Vec<BigInt>) -> Self {
        let top = wide.pop().expect("length p");
        if !top.is_zero() {
            for c in wide.iter_mut() {
                *c -= &top;
            }
        }
        CycInt { p, coeffs: wide }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The integer this element equals, if it lies in `Z`.
    pub fn as_integer(&self) -> Option<&BigInt> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn same_ring(&self, other: &Self) {
        assert_eq!(self.p, other.p, "mixing Z[zeta_p] for different p");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_ring(other);
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        CycInt { p: self.p, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.same_ring(other);
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        CycInt { p: self.p, coeffs }
    }

    pub fn neg(&self) -> Self {
        CycInt { p: self.p, coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_ring(other);
        let n = self.p as usize;
        let mut wide = vec![BigInt::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    wide[(i + j) % n] += a * b;
                }
            }
        }
        Self::reduce(self.p, wide)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = CycInt::from_int(self.p, 1).expect("valid p");
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Coordinate polynomial in `T` (so that the element is its value at zeta).
    pub fn coordinate_poly(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().cloned().map(Rational::from_integer).collect())
    }

    /// Image under zeta -> `root` in `Z/q`.
    pub fn eval_mod(&self, root: u64, q: u64) -> u64 {
        let qb = BigInt::from(q);
        let mut acc = 0u128;
        let mut power = 1u64;
        for c in &self.coeffs {
            let r = c.mod_floor(&qb).to_u64().expect("residue below q");
            acc = (acc + r as u128 * power as u128) % q as u128;
            power = ((power as u128 * root as u128) % q as u128) as u64;
        }
        acc as u64
    }
}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sep = if first { "" } else { " + " };
            first = false;
            match i {
                0 => write!(f, "{sep}{c}")?,
                1 => write!(f, "{sep}{c}*zeta")?,
                _ => write!(f, "{sep}{c}*zeta^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `Phi_p(T) = 1 + T + ... + T^(p-1)`.
fn cyclotomic_poly(p: u64) -> RatPoly {
    RatPoly::new(vec![Rational::one(); p as usize])
}

/// Field norm to `Q`, computed as `Res(Phi_p, x(T))`.
pub fn cyc_norm(x: &CycInt) -> BigInt {
    let r = resultant(&cyclotomic_poly(x.p), &x.coordinate_poly());
    debug_assert!(r.is_integer());
    r.to_integer()
}

/// Smallest element of multiplicative order `p` in `Z/q`; requires q = 1 mod p.
pub fn split_root_of_unity(p: u64, q: u64) -> Result<u64> {
    if !is_prime_u64(q) {
        return arg_err(format!("{q} is not prime"));
    }
    if q % p != 1 {
        return arg_err(format!("{q} is not 1 mod {p}"));
    }
    (2..q).find(|&g| pow_mod(g, p, q) == 1).ok_or_else(|| Error::Internal(format!("no element of order {p} mod {q}")))
}

/// Residue of `x` at the degree-one prime over `q` picked out by sending
/// zeta to [`split_root_of_unity`].
pub fn reduce_at_split_prime(x: &CycInt, q: u64) -> Result<u64> {
    let root = split_root_of_unity(x.p, q)?;
    Ok(x.eval_mod(root, q))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum NonPowerWitness {
    /// The absolute norm is not a p-th power in `Z`.
    Norm(#[serde(serialize_with = "crate::exactnum::serde_exact::bigint")] BigInt),
    /// The residue at a split prime `q` is not a p-th power in `F_q`.
    SplitResidue { q: u64, residue: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum PthPowerVerdict {
    CertifiedNo(NonPowerWitness),
    Inconclusive,
}

impl PthPowerVerdict {
    pub fn is_certified_no(&self) -> bool {
        matches!(self, PthPowerVerdict::CertifiedNo(_))
    }
}

/// Sound test for "x is not a p-th power in `Q(zeta_p)`": the norm test,
/// then p-th power residue symbols at up to `trials` split primes where `x`
/// is a unit. Never answers `CertifiedNo` for an actual p-th power.
pub fn is_pth_power_cyc(x: &CycInt, trials: usize) -> Result<PthPowerVerdict> {
    if x.is_zero() {
        return arg_err("zero has no p-th power certificate");
    }
    let p = x.p;
    let norm = cyc_norm(x);
    let mag = norm.magnitude();
    let root = integer_nth_root(mag, p as u32);
    if num_traits::pow(root, p as usize) != *mag {
        return Ok(PthPowerVerdict::CertifiedNo(NonPowerWitness::Norm(norm)));
    }
    let mut tried = 0;
    let mut q = p + 1;
    while tried < trials {
        // next prime q = 1 mod p
        q += p;
        if !is_prime_u64(q) {
            continue;
        }
        let residue = reduce_at_split_prime(x, q)?;
        if residue == 0 {
            continue;
        }
        tried += 1;
        if pow_mod(residue, (q - 1) / p, q) != 1 {
            return Ok(PthPowerVerdict::CertifiedNo(NonPowerWitness::SplitResidue { q, residue }));
        }
    }
    Ok(PthPowerVerdict::Inconclusive)
}
