//! Orbits of `f(z) = z^d + c` over `Q` and modulo primes.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{arg_err, cap_err, Error, Result};
use crate::exactnum::{
    format_rational, hash_key, is_prime_u64, mul_mod, parse_rational, pow_mod, val_p, PAdicVal, Rational,
};

/// The map `z -> z^d + c` together with a start point `a0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MapSpec {
    pub d: u32,
    pub c: Rational,
    pub a0: Rational,
}

impl MapSpec {
    pub fn new(d: u32, c: Rational) -> Result<Self> {
        Self::with_start(d, c, Rational::zero())
    }

    pub fn with_start(d: u32, c: Rational, a0: Rational) -> Result<Self> {
        if d < 2 {
            return arg_err(format!("degree must be at least 2, got {d}"));
        }
        Ok(MapSpec { d, c, a0 })
    }

    pub fn parse(d: u32, c: &str, a0: Option<&str>) -> Result<Self> {
        let a0 = match a0 {
            Some(s) => parse_rational(s)?,
            None => Rational::zero(),
        };
        Self::with_start(d, parse_rational(c)?, a0)
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        num_traits::pow(x.clone(), self.d as usize) + &self.c
    }

    pub fn critical(&self) -> MapSpec {
        MapSpec { a0: Rational::zero(), ..self.clone() }
    }
}

#[derive(Serialize, Deserialize)]
struct MapSpecRepr {
    d: u32,
    c: String,
    #[serde(default)]
    a0: Option<String>,
}

impl Serialize for MapSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MapSpecRepr { d: self.d, c: format_rational(&self.c), a0: Some(format_rational(&self.a0)) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MapSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MapSpecRepr::deserialize(d)?;
        MapSpec::parse(r.d, &r.c, r.a0.as_deref()).map_err(serde::de::Error::custom)
    }
}

/// Default bound on the bit size of a single orbit value.
pub const DEFAULT_BIT_CAP: u64 = 1_000_000;

fn bit_size(x: &Rational) -> u64 {
    x.numer().bits() + x.denom().bits()
}

/// `f(a0), f^2(a0), ..., f^N(a0)` for the start point of the map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriticalOrbit {
    #[serde(serialize_with = "crate::exactnum::serde_exact::rationals")]
    pub values: Vec<Rational>,
    /// Set when some `f^i(a0) = f^j(a0)` with `0 <= i < j <= N`.
    pub finite: bool,
    /// The first repeat `(i, j)` found.
    pub repeat: Option<(usize, usize)>,
}

impl CriticalOrbit {
    /// `f^n(a0)` for `1 <= n <= N`.
    pub fn a(&self, n: usize) -> &Rational {
        &self.values[n - 1]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Orbit of 0 under `z^d + c`.
pub fn critical_orbit(m: &MapSpec, n: usize) -> Result<CriticalOrbit> {
    orbit(&m.critical(), n, DEFAULT_BIT_CAP)
}

/// Orbit of `m.a0`, refusing values larger than `bit_cap` bits.
pub fn orbit(m: &MapSpec, n: usize, bit_cap: u64) -> Result<CriticalOrbit> {
    if n == 0 {
        return arg_err("orbit length must be at least 1");
    }
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    seen.insert(hash_key(&m.a0), 0);
    let mut values: Vec<Rational> = Vec::with_capacity(n);
    let mut repeat: Option<(usize, usize)> = None;
    let mut x = m.a0.clone();
    for i in 1..=n {
        if let Some((a, b)) = repeat {
            // periodic from here on; copy instead of recomputing
            let period = b - a;
            let j = a + (i - a) % period;
            x = if j == 0 { m.a0.clone() } else { values[j - 1].clone() };
            values.push(x.clone());
            continue;
        }
        x = m.apply(&x);
        if bit_size(&x) > bit_cap {
            return cap_err(format!("orbit value at step {i} exceeds {bit_cap} bits"));
        }
        if let Some(&j) = seen.get(&hash_key(&x)) {
            repeat = Some((j, i));
        } else {
            seen.insert(hash_key(&x), i);
        }
        values.push(x.clone());
    }
    Ok(CriticalOrbit { values, finite: repeat.is_some(), repeat })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RdsViolation {
    pub p: u64,
    /// `"multiple"` for condition (1), `"gcd"` for condition (2).
    pub kind: String,
    pub n: usize,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RdsPrimeReport {
    pub p: u64,
    /// `v_p(a_n)` for `n = 1..=N`.
    pub valuations: Vec<PAdicVal>,
    pub violations: Vec<RdsViolation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RdsReport {
    pub n: usize,
    pub per_prime: Vec<RdsPrimeReport>,
}

impl RdsReport {
    pub fn holds(&self) -> bool {
        self.per_prime.iter().all(|r| r.violations.is_empty())
    }
}

/// Checks rigid divisibility of the critical orbit at each listed prime:
/// `v(a_n) > 0` forces `v(a_kn) = v(a_n)`, and `v(a_n), v(a_j) > 0` forces
/// `v(a_gcd(n,j)) > 0`.
pub fn verify_rds(m: &MapSpec, primes: &[u64], n: usize) -> Result<RdsReport> {
    let orb = critical_orbit(m, n)?;
    if orb.finite {
        return arg_err("the critical orbit is finite; rigid divisibility needs an infinite orbit");
    }
    let mut per_prime = Vec::new();
    for &p in primes {
        let vals = orb.values.iter().map(|a| val_p(a, p)).collect::<Result<Vec<_>>>()?;
        let v = |i: usize| vals[i - 1];
        let mut violations = Vec::new();
        for i in 1..=n {
            if !v(i).is_positive() {
                continue;
            }
            for k in 2..=n / i {
                if v(k * i) != v(i) {
                    violations.push(RdsViolation { p, kind: "multiple".into(), n: i, m: k * i });
                }
            }
            for j in i + 1..=n {
                if v(j).is_positive() && !v(i.gcd(&j)).is_positive() {
                    violations.push(RdsViolation { p, kind: "gcd".into(), n: i, m: j });
                }
            }
        }
        per_prime.push(RdsPrimeReport { p, valuations: vals, violations });
    }
    Ok(RdsReport { n, per_prime })
}

/// The exact set `{ n >= 0 : f^n(a0) = 0 }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZeroSet {
    /// Zero indices before any periodic part.
    pub listed: Vec<u64>,
    /// `Some((s, k))` when the zeros also include `s + jk` for all `j >= 0`.
    pub periodic: Option<(u64, u64)>,
    /// False when neither a repeat nor an escape certificate was found within
    /// the search budget; indices beyond the search are then assumed nonzero.
    pub certified: bool,
}

impl ZeroSet {
    pub fn contains(&self, n: u64) -> bool {
        if self.listed.contains(&n) {
            return true;
        }
        match self.periodic {
            Some((s, k)) => n >= s && (n - s).is_multiple_of(k),
            None => false,
        }
    }
}

/// Steps tried before giving up on an escape certificate.
const ZERO_SEARCH_STEPS: usize = 64;

// |x| >= |c| + 2 forces |f(x)| > |x| forever after.
fn escapes_archimedean(x: &Rational, c: &Rational) -> bool {
    x.abs() >= c.abs() + Rational::from_integer(BigInt::from(2))
}

// v_p(x) < 0 and d v_p(x) < v_p(c) forces v_p to decrease strictly forever after.
fn escapes_nonarchimedean(x: &Rational, m: &MapSpec, den_primes: &[u64]) -> bool {
    den_primes.iter().any(|&p| {
        let vx = val_p(x, p).expect("prime");
        let vc = val_p(&m.c, p).expect("prime");
        match vx {
            PAdicVal::Finite(v) if v < 0 => PAdicVal::Finite(v * m.d as i64) < vc,
            _ => false,
        }
    })
}

fn small_prime_divisors(n: &BigInt) -> Vec<u64> {
    let mut out = Vec::new();
    let mut r = n.abs();
    let mut p = 2u64;
    while p < 1000 && !r.is_one() {
        let pb = BigInt::from(p);
        if (&r % &pb).is_zero() {
            out.push(p);
            while (&r % &pb).is_zero() {
                r /= &pb;
            }
        }
        p += 1;
    }
    out
}

pub fn zero_set(m: &MapSpec) -> Result<ZeroSet> {
    let mut den_primes = small_prime_divisors(m.c.denom());
    den_primes.extend(small_prime_divisors(m.a0.denom()));
    den_primes.sort_unstable();
    den_primes.dedup();
    let mut seen: HashMap<(BigInt, BigInt), u64> = HashMap::new();
    let mut zeros = Vec::new();
    let mut x = m.a0.clone();
    for i in 0..=ZERO_SEARCH_STEPS as u64 {
        if let Some(&j) = seen.get(&hash_key(&x)) {
            // periodic from j with period i - j
            let k = i - j;
            let (tail, cyc): (Vec<u64>, Vec<u64>) = zeros.iter().partition(|&&z| z < j);
            return Ok(match cyc.first() {
                Some(&s) => {
                    debug_assert_eq!(cyc.len(), 1, "0 occurs once per period");
                    ZeroSet { listed: tail, periodic: Some((s, k)), certified: true }
                }
                None => ZeroSet { listed: tail, periodic: None, certified: true },
            });
        }
        if x.is_zero() {
            zeros.push(i);
        } else if escapes_archimedean(&x, &m.c) || escapes_nonarchimedean(&x, m, &den_primes) {
            return Ok(ZeroSet { listed: zeros, periodic: None, certified: true });
        }
        seen.insert(hash_key(&x), i);
        x = m.apply(&x);
        if bit_size(&x) > DEFAULT_BIT_CAP {
            break;
        }
    }
    Ok(ZeroSet { listed: zeros, periodic: None, certified: false })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// First `n >= 0` with `f^n(a0) = 0 mod q` and `f^n(a0) != 0`.
    Divides(u64),
    NotDivides,
    BadPrime(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitModResult {
    pub verdict: Verdict,
    /// Map evaluations performed.
    pub steps: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleAlgorithm {
    Brent,
    Floyd,
}

/// Per-map data reused across many primes.
#[derive(Debug, Clone)]
pub struct OrbitModContext {
    pub map: MapSpec,
    pub zeros: ZeroSet,
}

struct ModMap {
    d: u64,
    c: u64,
    q: u64,
}

impl ModMap {
    fn step(&self, x: u64) -> u64 {
        let y = if self.d == 2 { mul_mod(x, x, self.q) } else { pow_mod(x, self.d, self.q) };
        ((y as u128 + self.c as u128) % self.q as u128) as u64
    }
}

fn reduce_mod(x: &Rational, q: u64) -> Option<u64> {
    let qb = BigInt::from(q);
    let den = x.denom().mod_floor(&qb).to_u64()?;
    if den == 0 {
        return None;
    }
    let num = x.numer().mod_floor(&qb).to_u64()?;
    Some(mul_mod(num, pow_mod(den, q - 2, q), q))
}

/// Tail length `mu` and cycle length `lambda` of the sequence from `x0`.
fn brent(f: &ModMap, x0: u64, steps: &mut u64) -> (u64, u64) {
    let (mut power, mut lam) = (1u64, 1u64);
    let mut tortoise = x0;
    let mut hare = f.step(x0);
    *steps += 1;
    while tortoise != hare {
        if power == lam {
            tortoise = hare;
            power *= 2;
            lam = 0;
        }
        hare = f.step(hare);
        *steps += 1;
        lam += 1;
    }
    let (mut t, mut h) = (x0, x0);
    for _ in 0..lam {
        h = f.step(h);
    }
    let mut mu = 0;
    while t != h {
        t = f.step(t);
        h = f.step(h);
        mu += 1;
    }
    *steps += lam + 2 * mu;
    (mu, lam)
}

fn floyd(f: &ModMap, x0: u64, steps: &mut u64) -> (u64, u64) {
    let mut t = f.step(x0);
    let mut h = f.step(f.step(x0));
    *steps += 3;
    while t != h {
        t = f.step(t);
        h = f.step(f.step(h));
        *steps += 3;
    }
    let mut mu = 0;
    t = x0;
    while t != h {
        t = f.step(t);
        h = f.step(h);
        mu += 1;
    }
    let mut lam = 1;
    h = f.step(t);
    while t != h {
        h = f.step(h);
        lam += 1;
    }
    *steps += 2 * mu + lam;
    (mu, lam)
}

impl OrbitModContext {
    pub fn new(map: &MapSpec) -> Result<Self> {
        Ok(OrbitModContext { map: map.clone(), zeros: zero_set(map)? })
    }

    /// True if `q` divides a denominator of `c` or `a0`.
    pub fn is_bad_prime(&self, q: u64) -> bool {
        let qb = BigInt::from(q);
        (self.map.c.denom() % &qb).is_zero() || (self.map.a0.denom() % &qb).is_zero()
    }

    pub fn divides_mod_q(&self, q: u64) -> Result<OrbitModResult> {
        self.divides_mod_q_with(q, CycleAlgorithm::Brent)
    }

    pub fn divides_mod_q_with(&self, q: u64, alg: CycleAlgorithm) -> Result<OrbitModResult> {
        if !is_prime_u64(q) {
            return arg_err(format!("{q} is not prime"));
        }
        if q >= 1 << 62 {
            return cap_err("modulus too large for word-size orbit arithmetic");
        }
        if self.is_bad_prime(q) {
            return Ok(OrbitModResult {
                verdict: Verdict::BadPrime(format!("{q} divides a denominator of c or a0")),
                steps: 0,
            });
        }
        let f = ModMap { d: self.map.d as u64, c: reduce_mod(&self.map.c, q).expect("good prime"), q };
        let x0 = reduce_mod(&self.map.a0, q).expect("good prime");
        let mut steps = 0;
        let (mu, lam) = match alg {
            CycleAlgorithm::Brent => brent(&f, x0, &mut steps),
            CycleAlgorithm::Floyd => floyd(&f, x0, &mut steps),
        };
        // every value occurs among indices 0 .. mu + lam
        let mut x = x0;
        let mut best: Option<u64> = None;
        for n in 0..mu + lam {
            if x == 0 {
                let hit = if n < mu {
                    (!self.zeros.contains(n)).then_some(n)
                } else {
                    self.first_nonzero_in_progression(n, lam)
                };
                if let Some(h) = hit {
                    best = Some(best.map_or(h, |b| b.min(h)));
                    if h == n {
                        break;
                    }
                }
            }
            x = f.step(x);
            steps += 1;
        }
        let verdict = match best {
            Some(n) => Verdict::Divides(n),
            None => Verdict::NotDivides,
        };
        Ok(OrbitModResult { verdict, steps })
    }

    // first n + j*lam (j >= 0) that is not an exact zero of the orbit
    fn first_nonzero_in_progression(&self, n: u64, lam: u64) -> Option<u64> {
        let bound = match self.zeros.periodic {
            Some((_, k)) => k / lam + 2,
            None => self.zeros.listed.len() as u64 + 1,
        };
        (0..=bound).map(|j| n + j * lam).find(|&i| !self.zeros.contains(i))
    }
}

/// One-shot form of [`OrbitModContext::divides_mod_q`].
pub fn orbit_divides_mod_q(m: &MapSpec, q: u64) -> Result<OrbitModResult> {
    OrbitModContext::new(m)?.divides_mod_q(q)
}

/// Whether `z -> z^p` permutes `Z/q`: decided by `gcd(p, q-1) = 1`, and for
/// `q < 10^4` confirmed by enumeration.
pub fn residue_power_map_is_bijection(q: u64, p: u64) -> Result<bool> {
    if !is_prime_u64(q) {
        return arg_err(format!("{q} is not prime"));
    }
    if !is_prime_u64(p) {
        return arg_err(format!("{p} is not prime"));
    }
    let by_gcd = p.gcd(&(q - 1)) == 1;
    if q < 10_000 {
        let mut hit = vec![false; q as usize];
        for z in 0..q {
            hit[pow_mod(z, p, q) as usize] = true;
        }
        let by_enum = hit.iter().all(|&h| h);
        if by_enum != by_gcd {
            return Err(Error::Internal(format!("power map criterion disagrees with enumeration at q={q}, p={p}")));
        }
    }
    Ok(by_gcd)
}
