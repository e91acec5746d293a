//! Factorization over `Q`: squarefree split, modular factorization at a good
//! prime, Hensel lifting and exhaustive recombination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::fp::{factor_mod_p, DEFAULT_SPLIT_SEED};
use super::{degree_pattern, is_irreducible_mod_p, FpPoly, RatPoly};
use crate::error::{cap_err, Result};
use crate::exactnum::{is_prime_u64, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorOptions {
    /// Largest degree handed to the full algorithm.
    pub degree_cap: usize,
    /// Number of good primes examined before choosing one to lift from.
    pub primes_to_try: usize,
    pub seed: u64,
}

impl Default for FactorOptions {
    fn default() -> Self {
        FactorOptions { degree_cap: 64, primes_to_try: 8, seed: DEFAULT_SPLIT_SEED }
    }
}

/// `unit * prod factor^mult`, factors monic and sorted by degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorList {
    #[serde(serialize_with = "crate::exactnum::serde_exact::rational")]
    pub unit: Rational,
    pub factors: Vec<(RatPoly, u32)>,
    pub certified: bool,
}

impl FactorList {
    pub fn reassemble(&self) -> RatPoly {
        self.factors.iter().fold(RatPoly::constant(self.unit.clone()), |acc, (g, m)| &acc * &g.pow(*m))
    }

    /// Irreducible factors counted with multiplicity.
    pub fn count_with_multiplicity(&self) -> u32 {
        self.factors.iter().map(|(_, m)| m).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> =
            self.factors.iter().flat_map(|(g, m)| std::iter::repeat_n(g.deg(), *m as usize)).collect();
        d.sort_unstable();
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Irreducibility {
    Yes,
    No,
    Unknown,
}

/// Yun's algorithm; returns monic squarefree parts with multiplicities.
fn squarefree_over_q(f: &RatPoly) -> Vec<(RatPoly, u32)> {
    let f = f.monic();
    let fd = f.derivative();
    let b = f.gcd(&fd);
    let mut c = f.div_rem(&b).0;
    let mut d = &fd.div_rem(&b).0 - &c.derivative();
    let mut out = Vec::new();
    let mut i = 1;
    while c.deg() > 0 {
        let a = c.gcd(&d);
        c = c.div_rem(&a).0;
        d = &d.div_rem(&a).0 - &c.derivative();
        if a.deg() > 0 {
            out.push((a, i));
        }
        i += 1;
    }
    out
}

fn to_int_poly(f: &RatPoly) -> Vec<BigInt> {
    f.primitive_part().1
}

// Integer polynomial helpers, coefficients lowest degree first, reduced into [0, m).
fn zmod(v: &mut Vec<BigInt>, m: &BigInt) {
    for c in v.iter_mut() {
        *c = c.mod_floor(m);
    }
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

fn zmul(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    zmod(&mut out, m);
    out
}

fn zadd(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    let mut out: Vec<BigInt> = (0..n).map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z)).collect();
    zmod(&mut out, m);
    out
}

fn zsub(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    let mut out: Vec<BigInt> = (0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect();
    zmod(&mut out, m);
    out
}

/// Division by a monic polynomial modulo `m`.
fn zdivrem_monic(a: &[BigInt], d: &[BigInt], m: &BigInt) -> (Vec<BigInt>, Vec<BigInt>) {
    let dd = d.len() - 1;
    debug_assert!(d[dd].is_one());
    let mut rem = a.to_vec();
    if rem.len() <= dd {
        zmod(&mut rem, m);
        return (Vec::new(), rem);
    }
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let q = rem[k + dd].mod_floor(m);
        if q.is_zero() {
            continue;
        }
        for (j, dc) in d.iter().enumerate() {
            rem[k + j] -= &q * dc;
        }
        quot[k] = q;
    }
    rem.truncate(dd);
    zmod(&mut rem, m);
    zmod(&mut quot, m);
    (quot, rem)
}

fn fp_to_z(f: &FpPoly) -> Vec<BigInt> {
    f.coeffs().iter().map(|&c| BigInt::from(c)).collect()
}

/// One quadratic Hensel step: from `f = g h`, `s g + t h = 1` modulo `m`
/// (with `h` monic) to the same relations modulo `m^2`.
fn hensel_step(
    f: &[BigInt],
    g: &[BigInt],
    h: &[BigInt],
    s: &[BigInt],
    t: &[BigInt],
    m2: &BigInt,
) -> (Vec<BigInt>, Vec<BigInt>, Vec<BigInt>, Vec<BigInt>) {
    let e = zsub(f, &zmul(g, h, m2), m2);
    let (q, r) = zdivrem_monic(&zmul(s, &e, m2), h, m2);
    let g2 = zadd(g, &zadd(&zmul(t, &e, m2), &zmul(&q, g, m2), m2), m2);
    let h2 = zadd(h, &r, m2);
    let b = zsub(&zadd(&zmul(s, &g2, m2), &zmul(t, &h2, m2), m2), &[BigInt::one()], m2);
    let (c, d) = zdivrem_monic(&zmul(s, &b, m2), &h2, m2);
    let s2 = zsub(s, &d, m2);
    let t2 = zsub(&zsub(t, &zmul(t, &b, m2), m2), &zmul(&c, &g2, m2), m2);
    (g2, h2, s2, t2)
}

/// Lifts the monic modular factors of `f` (which has `p` not dividing its
/// leading coefficient) to monic factors modulo `p^(2^k) >= bound`.
fn hensel_lift(f: &[BigInt], p: u64, factors: &[FpPoly], bound: &BigInt) -> (Vec<Vec<BigInt>>, BigInt) {
    let pb = BigInt::from(p);
    let mut moduli = vec![pb.clone()];
    while moduli.last().expect("nonempty") < bound {
        let m = moduli.last().expect("nonempty");
        moduli.push(m * m);
    }
    let top = moduli.last().expect("nonempty").clone();
    let mut rest = f.to_vec();
    zmod(&mut rest, &top);
    let mut lifted = Vec::new();
    for i in 0..factors.len() {
        if i + 1 == factors.len() {
            // rest is lc * (last factor); normalize to monic
            let lc = rest.last().expect("nonzero").clone();
            let inv = lc.extended_gcd(&top).x.mod_floor(&top);
            let mut h: Vec<BigInt> = rest.iter().map(|c| c * &inv).collect();
            zmod(&mut h, &top);
            lifted.push(h);
            break;
        }
        let h0 = factors[i].clone();
        let g0 = factors[i + 1..]
            .iter()
            .fold(FpPoly::from_bigints(&[rest.last().expect("nonzero").clone()], p), |acc, q| acc.mul(q));
        let (_, s0, t0) = g0.ext_gcd(&h0);
        let (mut g, mut h, mut s, mut t) = (fp_to_z(&g0), fp_to_z(&h0), fp_to_z(&s0), fp_to_z(&t0));
        for m in moduli.iter().skip(1) {
            let mut fm = rest.clone();
            zmod(&mut fm, m);
            (g, h, s, t) = hensel_step(&fm, &g, &h, &s, &t, m);
        }
        lifted.push(h);
        rest = g;
    }
    (lifted, top)
}

fn symmetric(v: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let half = m / 2;
    v.iter()
        .map(|c| {
            let r = c.mod_floor(m);
            if r > half {
                r - m
            } else {
                r
            }
        })
        .collect()
}

fn int_content_primitive(v: &[BigInt]) -> Vec<BigInt> {
    RatPoly::from_bigints(v).primitive_part().1
}

fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if visit(&idx) {
            return;
        }
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Chooses the good prime with the fewest modular factors among the first
/// `tries` candidates; also returns every examined degree pattern.
fn choose_prime(f: &[BigInt], tries: usize, seed: u64) -> (u64, Vec<FpPoly>, Vec<Vec<usize>>) {
    let lc = f.last().expect("nonzero");
    let mut best: Option<(u64, Vec<FpPoly>)> = None;
    let mut patterns = Vec::new();
    let mut p = 5u64;
    let mut examined = 0;
    while examined < tries {
        p += 1;
        if !is_prime_u64(p) || (lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp = FpPoly::from_bigints(f, p);
        if !fp.is_squarefree() {
            continue;
        }
        examined += 1;
        let pat = degree_pattern(&fp);
        let count = pat.len();
        patterns.push(pat);
        if best.as_ref().is_none_or(|(_, fs)| count < fs.len()) {
            let fs = factor_mod_p(&fp, seed).expect("nonzero").into_iter().map(|(g, _)| g).collect();
            best = Some((p, fs));
        }
        if count == 1 {
            break;
        }
    }
    let (p, fs) = best.expect("some good prime examined");
    (p, fs, patterns)
}

/// Subset sums of a degree pattern.
fn achievable_degrees(pattern: &[usize], n: usize) -> Vec<bool> {
    let mut ok = vec![false; n + 1];
    ok[0] = true;
    for &d in pattern {
        for s in (d..=n).rev() {
            if ok[s - d] {
                ok[s] = true;
            }
        }
    }
    ok
}

/// True if the patterns leave no proper factor degree possible.
fn patterns_force_irreducible(patterns: &[Vec<usize>], n: usize) -> bool {
    let mut ok = vec![true; n + 1];
    for pat in patterns {
        let a = achievable_degrees(pat, n);
        for (o, x) in ok.iter_mut().zip(a) {
            *o &= x;
        }
    }
    (1..n).all(|k| !ok[k])
}

/// Factors a squarefree primitive integer polynomial with positive leading
/// coefficient into primitive irreducibles.
fn factor_squarefree_int(f: &[BigInt], opts: &FactorOptions) -> Vec<Vec<BigInt>> {
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f.to_vec()];
    }
    let (p, modular, patterns) = choose_prime(f, opts.primes_to_try, opts.seed);
    if modular.len() == 1 || patterns_force_irreducible(&patterns, n) {
        return vec![f.to_vec()];
    }
    let lc = f[n].clone();
    // coefficient bound for lc(f) * (any factor scaled to leading coefficient lc(f))
    let max = f.iter().map(|c| c.abs()).max().expect("nonempty");
    let bound = (BigInt::one() << n) * BigInt::from(n + 1) * &max * lc.abs() * 2;
    let (lifted, m) = hensel_lift(f, p, &modular, &bound);

    let mut remaining: Vec<usize> = (0..lifted.len()).collect();
    let mut rest = f.to_vec();
    let mut found = Vec::new();
    let mut s = 1;
    while 2 * s <= remaining.len() {
        let lc_rest = rest.last().expect("nonzero").clone();
        let rest_poly = RatPoly::from_bigints(&rest);
        let mut hit: Option<(Vec<usize>, Vec<BigInt>, RatPoly)> = None;
        combinations(remaining.len(), s, |sub| {
            // constant-term precheck
            let c0 = sub.iter().fold(lc_rest.clone(), |acc, &i| {
                (acc * lifted[remaining[i]].first().cloned().unwrap_or_default()).mod_floor(&m)
            });
            let c0 = symmetric(&[c0], &m).pop().unwrap_or_default();
            let r0 = &rest[0] * &lc_rest;
            if !r0.is_zero() && (c0.is_zero() || !(&r0 % &c0).is_zero()) {
                return false;
            }
            let prod = sub.iter().fold(vec![lc_rest.clone()], |acc, &i| zmul(&acc, &lifted[remaining[i]], &m));
            let g = int_content_primitive(&symmetric(&prod, &m));
            if g.len() < 2 {
                return false;
            }
            let gp = RatPoly::from_bigints(&g);
            match rest_poly.div_exact(&gp) {
                Some(q) if q.has_integer_coeffs() => {
                    hit = Some((sub.iter().map(|&i| remaining[i]).collect(), g, q));
                    true
                }
                _ => false,
            }
        });
        match hit {
            Some((used, g, q)) => {
                remaining.retain(|i| !used.contains(i));
                found.push(g);
                rest = q.coeffs().iter().map(|c| c.to_integer()).collect();
            }
            None => s += 1,
        }
    }
    found.push(rest);
    found
}

/// Certified factorization over `Q` into monic irreducibles.
pub fn factor_over_q(f: &RatPoly) -> Result<FactorList> {
    factor_over_q_with(f, &FactorOptions::default())
}

pub fn factor_over_q_with(f: &RatPoly, opts: &FactorOptions) -> Result<FactorList> {
    let Some(n) = f.degree() else {
        return crate::error::arg_err("cannot factor the zero polynomial");
    };
    if n > opts.degree_cap {
        return cap_err(format!("degree {n} exceeds the factorization cap {}", opts.degree_cap));
    }
    let mut factors = Vec::new();
    for (part, mult) in squarefree_over_q(f) {
        for g in factor_squarefree_int(&to_int_poly(&part), opts) {
            factors.push((RatPoly::from_bigints(&g).monic(), mult));
        }
    }
    factors.sort_by_cached_key(|(h, e)| (h.deg(), h.to_string(), *e));
    Ok(FactorList { unit: f.lc(), factors, certified: true })
}

/// Sound irreducibility test: modular irreducibility, degree-pattern sieve,
/// then full factorization when the degree allows.
pub fn is_irreducible_over_q(f: &RatPoly) -> Irreducibility {
    is_irreducible_over_q_with(f, &FactorOptions::default())
}

/// Largest degree for which modular tests are attempted.
const MODULAR_TEST_CAP: usize = 1024;

pub fn is_irreducible_over_q_with(f: &RatPoly, opts: &FactorOptions) -> Irreducibility {
    let n = match f.degree() {
        None | Some(0) => return Irreducibility::No,
        Some(1) => return Irreducibility::Yes,
        Some(n) => n,
    };
    if f.gcd(&f.derivative()).deg() > 0 {
        return Irreducibility::No;
    }
    if n <= MODULAR_TEST_CAP {
        let g = to_int_poly(f);
        let lc = g.last().expect("nonzero").clone();
        let mut patterns = Vec::new();
        let mut p = 2u64;
        let mut tries = 0;
        while tries < 2 * opts.primes_to_try.max(1) && p < 10_000 {
            p += 1;
            if !is_prime_u64(p) || (&lc % BigInt::from(p)).is_zero() {
                continue;
            }
            let fp = FpPoly::from_bigints(&g, p);
            if !fp.is_squarefree() {
                continue;
            }
            tries += 1;
            if is_irreducible_mod_p(&fp) {
                return Irreducibility::Yes;
            }
            patterns.push(degree_pattern(&fp));
            if patterns_force_irreducible(&patterns, n) {
                return Irreducibility::Yes;
            }
        }
    }
    if n <= opts.degree_cap {
        return match factor_over_q_with(f, opts) {
            Ok(fl) if fl.factors.len() == 1 && fl.factors[0].1 == 1 => Irreducibility::Yes,
            Ok(_) => Irreducibility::No,
            Err(_) => Irreducibility::Unknown,
        };
    }
    Irreducibility::Unknown
}
