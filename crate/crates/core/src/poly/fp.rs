//! Polynomials over a prime field `F_p` and their factorization.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::RatPoly;
use crate::error::{arg_err, Result};
use crate::exactnum::{is_prime_u64, mul_mod, pow_mod};

/// Residues in `[0, p)`, lowest degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpPoly {
    p: u64,
    coeffs: Vec<u64>,
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

impl FpPoly {
    /// Reduces arbitrary residues mod `p`; `p` must be prime.
    pub fn new(p: u64, coeffs: Vec<u64>) -> Result<Self> {
        if !is_prime_u64(p) {
            return arg_err(format!("{p} is not prime"));
        }
        Ok(Self::from_raw(p, coeffs.into_iter().map(|c| c % p).collect()))
    }

    pub fn from_i64(p: u64, coeffs: &[i64]) -> Result<Self> {
        let pi = p as i128;
        Self::new(p, coeffs.iter().map(|&c| (c as i128).rem_euclid(pi) as u64).collect())
    }

    /// Reduction of a rational polynomial; `None` if `p` divides a denominator.
    pub fn from_ratpoly(f: &RatPoly, p: u64) -> Option<Self> {
        let pb = BigInt::from(p);
        let mut out = Vec::with_capacity(f.coeffs().len());
        for c in f.coeffs() {
            let den = c.denom().mod_floor(&pb).to_u64()?;
            if den == 0 {
                return None;
            }
            let num = c.numer().mod_floor(&pb).to_u64()?;
            out.push(mul_mod(num, inv_mod(den, p), p));
        }
        Some(Self::from_raw(p, out))
    }

    pub fn from_bigints(coeffs: &[BigInt], p: u64) -> Self {
        let pb = BigInt::from(p);
        Self::from_raw(p, coeffs.iter().map(|c| c.mod_floor(&pb).to_u64().expect("residue")).collect())
    }

    fn from_raw(p: u64, mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpPoly { p, coeffs }
    }

    fn zero(p: u64) -> Self {
        FpPoly { p, coeffs: Vec::new() }
    }

    fn one(p: u64) -> Self {
        FpPoly { p, coeffs: vec![1] }
    }

    fn x(p: u64) -> Self {
        FpPoly { p, coeffs: vec![0, 1] }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(inv_mod(self.lc(), self.p))
    }

    fn scale(&self, k: u64) -> Self {
        let p = self.p;
        Self::from_raw(p, self.coeffs.iter().map(|&c| mul_mod(c, k, p)).collect())
    }

    pub fn eval(&self, x: u64) -> u64 {
        let p = self.p;
        self.coeffs.iter().rev().fold(0, |acc, &c| ((mul_mod(acc, x, p) as u128 + c as u128) % p as u128) as u64)
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.p;
        let n = self.coeffs.len().max(o.coeffs.len());
        let get = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0);
        Self::from_raw(
            p,
            (0..n).map(|i| ((get(&self.coeffs, i) as u128 + get(&o.coeffs, i) as u128) % p as u128) as u64).collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        let p = self.p;
        let n = self.coeffs.len().max(o.coeffs.len());
        let get = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0);
        Self::from_raw(
            p,
            (0..n)
                .map(|i| ((get(&self.coeffs, i) as u128 + p as u128 - get(&o.coeffs, i) as u128) % p as u128) as u64)
                .collect(),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p);
        }
        let p = self.p as u128;
        let mut out = vec![0u128; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u128 * b as u128) % p;
            }
        }
        Self::from_raw(self.p, out.into_iter().map(|c| c as u64).collect())
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let p = self.p;
        let dd = d.degree().expect("division by zero polynomial");
        if self.coeffs.len() <= dd {
            return (Self::zero(p), self.clone());
        }
        let inv = inv_mod(d.lc(), p);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = mul_mod(rem[k + dd], inv, p);
            if q == 0 {
                continue;
            }
            for (j, &dc) in d.coeffs.iter().enumerate() {
                let t = mul_mod(q, dc, p);
                rem[k + j] = (rem[k + j] + p - t) % p;
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        (Self::from_raw(p, quot), Self::from_raw(p, rem))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s*self + t*o = g`, `g` monic.
    pub fn ext_gcd(&self, o: &Self) -> (Self, Self, Self) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::one(p), Self::zero(p));
        let (mut t0, mut t1) = (Self::zero(p), Self::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let k = inv_mod(r0.lc(), p);
        (r0.scale(k), s0.scale(k), t0.scale(k))
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        Self::from_raw(p, self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| mul_mod(c, i as u64 % p, p)).collect())
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, e: &BigUint, m: &Self) -> Self {
        let mut acc = Self::one(self.p).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            acc = acc.mul(&acc).rem(m);
            if e.bit(i) {
                acc = acc.mul(&base).rem(m);
            }
        }
        acc
    }

    /// The `g` with `g^p = self`, assuming only exponents divisible by `p` occur.
    fn pth_root(&self) -> Self {
        let p = self.p as usize;
        Self::from_raw(self.p, self.coeffs.iter().step_by(p).copied().collect())
    }

    pub fn is_squarefree(&self) -> bool {
        self.deg() == 0 || self.gcd(&self.derivative()).deg() == 0
    }

    pub fn to_ratpoly(&self) -> RatPoly {
        RatPoly::from_bigints(&self.coeffs.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>())
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.to_ratpoly(), self.p)
    }
}

fn squarefree_decomposition(f: &FpPoly) -> Vec<(FpPoly, u32)> {
    let p = f.p;
    let mut out = Vec::new();
    let fd = f.derivative();
    if fd.is_zero() {
        if f.deg() > 0 {
            for (g, m) in squarefree_decomposition(&f.pth_root()) {
                out.push((g, m * p as u32));
            }
        }
        return out;
    }
    let mut c = f.gcd(&fd);
    let mut w = f.div_rem(&c).0.monic();
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.div_rem(&y).0;
        if z.deg() > 0 {
            out.push((z.monic(), i));
        }
        i += 1;
        c = c.div_rem(&y).0;
        w = y;
    }
    if c.deg() > 0 {
        for (g, m) in squarefree_decomposition(&c.monic().pth_root()) {
            out.push((g, m * p as u32));
        }
    }
    out
}

/// Splits a squarefree monic polynomial into products of irreducibles of equal degree.
fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.p;
    let pe = BigUint::from(p);
    let x = FpPoly::x(p);
    let mut rest = f.clone();
    let mut h = x.rem(&rest);
    let mut out = Vec::new();
    let mut i = 1;
    while rest.deg() >= 2 * i {
        h = h.pow_mod(&pe, &rest);
        let g = rest.gcd(&h.sub(&x));
        if g.deg() > 0 {
            rest = rest.div_rem(&g).0.monic();
            h = h.rem(&rest);
            out.push((g, i));
        }
        i += 1;
    }
    if rest.deg() > 0 {
        let d = rest.deg();
        out.push((rest, d));
    }
    out
}

fn random_poly(p: u64, below_deg: usize, rng: &mut ChaCha8Rng) -> FpPoly {
    FpPoly::from_raw(p, (0..below_deg).map(|_| rng.gen_range(0..p)).collect())
}

/// Cantor–Zassenhaus splitting of `f`, a product of irreducibles of degree `d`.
fn equal_degree(f: &FpPoly, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<FpPoly>) {
    let n = f.deg();
    if n == d {
        out.push(f.clone());
        return;
    }
    let p = f.p;
    loop {
        let a = random_poly(p, n, rng);
        if a.deg() == 0 {
            continue;
        }
        let b = if p == 2 {
            // trace map a + a^2 + ... + a^(2^(d-1))
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..d {
                t = t.mul(&t).rem(f);
                acc = acc.add(&t);
            }
            acc
        } else {
            let e = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
            a.pow_mod(&e, f).sub(&FpPoly::one(p))
        };
        let g = f.gcd(&b);
        if g.deg() > 0 && g.deg() < n {
            let h = f.div_rem(&g).0.monic();
            equal_degree(&g, d, rng, out);
            equal_degree(&h, d, rng, out);
            return;
        }
    }
}

/// Default generator seed for equal-degree splitting.
pub const DEFAULT_SPLIT_SEED: u64 = 0x00c0_ffee;

/// Complete factorization into monic irreducibles with multiplicities,
/// sorted by degree then coefficients. The leading coefficient is dropped.
pub fn factor_mod_p(f: &FpPoly, seed: u64) -> Result<Vec<(FpPoly, u32)>> {
    if f.is_zero() {
        return arg_err("cannot factor the zero polynomial");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ f.p);
    let mut out = Vec::new();
    for (sq, mult) in squarefree_decomposition(&f.monic()) {
        for (g, d) in distinct_degree(&sq) {
            let mut pieces = Vec::new();
            equal_degree(&g, d, &mut rng, &mut pieces);
            out.extend(pieces.into_iter().map(|h| (h, mult)));
        }
    }
    out.sort_by(|a, b| (a.0.deg(), &a.0.coeffs, a.1).cmp(&(b.0.deg(), &b.0.coeffs, b.1)));
    Ok(out)
}

/// Degrees of the irreducible factors of a squarefree `f`, without splitting
/// equal-degree parts.
pub fn degree_pattern(f: &FpPoly) -> Vec<usize> {
    let mut degs = Vec::new();
    for (g, d) in distinct_degree(&f.monic()) {
        degs.extend(std::iter::repeat_n(d, g.deg() / d));
    }
    degs.sort_unstable();
    degs
}

pub fn is_irreducible_mod_p(f: &FpPoly) -> bool {
    f.deg() >= 1 && f.is_squarefree() && degree_pattern(f).len() == 1
}
