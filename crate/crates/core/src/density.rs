//! Empirical density of the primes dividing some element of an orbit:
//! a segmented sieve with residue-class filters feeding per-prime orbit tests.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{MapSpec, OrbitModContext, Verdict};
use crate::error::{arg_err, Error, Result};
use crate::exactnum::{hash_key, serde_exact, Rational};

pub const DEFAULT_MAX_X: u64 = 1_000_000_000;
pub const DEFAULT_CHUNK: u64 = 1 << 18;

/// A residue class `residue mod modulus`, written `"r%m"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueClass {
    pub residue: u64,
    pub modulus: u64,
}

impl ResidueClass {
    pub fn contains(&self, q: u64) -> bool {
        q % self.modulus == self.residue
    }
}

impl std::fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}%{}", self.residue, self.modulus)
    }
}

impl FromStr for ResidueClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Argument(format!("bad residue class {s:?}; expected \"r%m\""));
        let (r, m) = s.trim().split_once('%').ok_or_else(bad)?;
        let residue: u64 = r.trim().parse().map_err(|_| bad())?;
        let modulus: u64 = m.trim().parse().map_err(|_| bad())?;
        if modulus == 0 {
            return Err(bad());
        }
        let residue = residue % modulus;
        if residue.gcd(&modulus) != 1 {
            return arg_err(format!("residue {residue} is not coprime to {modulus}"));
        }
        Ok(ResidueClass { residue, modulus })
    }
}

impl Serialize for ResidueClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ResidueClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveConfig {
    #[serde(rename = "X")]
    pub x: u64,
    /// Allowed classes, all with the same modulus; empty means every prime.
    #[serde(default)]
    pub classes: Vec<ResidueClass>,
    #[serde(default = "default_chunk")]
    pub chunk: u64,
    #[serde(default = "default_max")]
    pub max_x: u64,
}

fn default_chunk() -> u64 {
    DEFAULT_CHUNK
}

fn default_max() -> u64 {
    DEFAULT_MAX_X
}

impl SieveConfig {
    pub fn new(x: u64) -> Self {
        SieveConfig { x, classes: Vec::new(), chunk: DEFAULT_CHUNK, max_x: DEFAULT_MAX_X }
    }

    pub fn with_classes(mut self, classes: Vec<ResidueClass>) -> Self {
        self.classes = classes;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.x < 3 {
            return arg_err("X must be at least 3");
        }
        if self.x > self.max_x {
            return arg_err(format!("X = {} exceeds the maximum {}", self.x, self.max_x));
        }
        if self.chunk < 1024 {
            return arg_err("chunk must be at least 1024");
        }
        if let Some(first) = self.classes.first() {
            if self.classes.iter().any(|c| c.modulus != first.modulus) {
                return arg_err("all residue classes must share one modulus");
            }
        }
        Ok(())
    }

    fn admits(&self, q: u64) -> bool {
        self.classes.is_empty() || self.classes.iter().any(|c| c.contains(q))
    }
}

fn small_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Ascending segments of the primes in `[lo, hi]` that pass the class filter.
pub struct PrimeSegments {
    base: Vec<u64>,
    next: u64,
    hi: u64,
    chunk: u64,
    cfg: SieveConfig,
}

impl Iterator for PrimeSegments {
    type Item = Vec<u64>;
    fn next(&mut self) -> Option<Vec<u64>> {
        if self.next > self.hi {
            return None;
        }
        let lo = self.next;
        let hi = (lo + self.chunk - 1).min(self.hi);
        self.next = hi + 1;
        let mut composite = vec![false; (hi - lo + 1) as usize];
        for &p in &self.base {
            if p * p > hi {
                break;
            }
            let start = (p * p).max(lo.div_ceil(p) * p);
            let mut j = start;
            while j <= hi {
                composite[(j - lo) as usize] = true;
                j += p;
            }
        }
        Some((lo..=hi).filter(|&n| n >= 2 && !composite[(n - lo) as usize] && self.cfg.admits(n)).collect())
    }
}

/// Primes in `[lo, hi]` passing the class filter of `cfg`, as segments.
pub fn prime_segments(lo: u64, hi: u64, cfg: &SieveConfig) -> Result<PrimeSegments> {
    if hi > cfg.max_x {
        return arg_err(format!("upper bound {hi} exceeds the maximum {}", cfg.max_x));
    }
    let root = (hi as f64).sqrt() as u64 + 2;
    Ok(PrimeSegments { base: small_primes(root), next: lo.max(2), hi, chunk: cfg.chunk.max(1024), cfg: cfg.clone() })
}

pub fn primes_in_range(lo: u64, hi: u64, cfg: &SieveConfig) -> Result<Vec<u64>> {
    Ok(prime_segments(lo, hi, cfg)?.flatten().collect())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ClassCount {
    pub class: String,
    /// Good primes classified in this class.
    pub primes: u64,
    pub divides: u64,
    pub not_divides: u64,
    #[serde(serialize_with = "serde_exact::rational")]
    pub ratio: Rational,
    pub ratio_approx: f64,
}

impl ClassCount {
    fn new(class: String) -> Self {
        ClassCount { class, ratio: Rational::zero(), ..Default::default() }
    }

    fn record(&mut self, divides: bool) {
        self.primes += 1;
        if divides {
            self.divides += 1;
        } else {
            self.not_divides += 1;
        }
    }

    fn finish(&mut self) {
        if self.primes > 0 {
            self.ratio = Rational::new(BigInt::from(self.divides), BigInt::from(self.primes));
            self.ratio_approx = self.ratio.to_f64().unwrap_or(f64::NAN);
        }
    }
}

/// Cumulative counts up to one checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    #[serde(rename = "X")]
    pub x: u64,
    pub overall: ClassCount,
    pub per_class: Vec<ClassCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub map: MapSpec,
    pub config: SieveConfig,
    /// All sieved primes, bad ones included.
    pub total_primes: u64,
    pub divides: u64,
    pub not_divides: u64,
    pub bad_primes: Vec<u64>,
    /// `divides / (divides + not_divides)`.
    #[serde(serialize_with = "serde_exact::rational")]
    pub ratio: Rational,
    pub ratio_approx: f64,
    pub per_class: Vec<ClassCount>,
    pub curve: Vec<CurvePoint>,
    /// Set when the exact orbit was seen to repeat.
    pub finite_orbit: bool,
    /// Primes settled by the permutation shortcut instead of cycle detection.
    pub shortcut_primes: u64,
}

impl DensityReport {
    /// Rows `X,class,primes,divides,ratio` for every checkpoint, overall first.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("X,class,primes,divides,ratio\n");
        for pt in &self.curve {
            for c in std::iter::once(&pt.overall).chain(&pt.per_class) {
                let _ = writeln!(s, "{},{},{},{},{:.6}", pt.x, c.class, c.primes, c.divides, c.ratio_approx);
            }
        }
        s
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Bad,
    Divides { shortcut: bool },
    NotDivides,
}

/// Height (bits) past which an orbit is treated as infinite: a repeating
/// orbit stays near the height of `c` and `a0`.
const FINITE_ORBIT_BITS: u64 = 4096;

/// Whether the exact orbit repeats within 64 steps while its terms stay small.
fn orbit_is_finite(m: &MapSpec) -> bool {
    let mut seen = HashSet::new();
    let mut x = m.a0.clone();
    for _ in 0..64 {
        if !seen.insert(hash_key(&x)) {
            return true;
        }
        x = m.apply(&x);
        if x.numer().bits() + x.denom().bits() > FINITE_ORBIT_BITS {
            return false;
        }
    }
    false
}

struct Classifier {
    ctx: OrbitModContext,
    /// `a0 = 0` and the only exact zero of the orbit is at index 0.
    shortcut: bool,
}

impl Classifier {
    fn new(m: &MapSpec) -> Result<Self> {
        let ctx = OrbitModContext::new(m)?;
        let z = &ctx.zeros;
        let shortcut = m.a0.is_zero() && z.certified && z.periodic.is_none() && z.listed == [0];
        Ok(Classifier { ctx, shortcut })
    }

    fn classify(&self, q: u64) -> Result<Outcome> {
        if self.ctx.is_bad_prime(q) {
            return Ok(Outcome::Bad);
        }
        // When z^d permutes Z/q so does f, so the orbit of 0 is a cycle and
        // comes back to 0 at a later index, where the exact value is nonzero.
        if self.shortcut && (self.ctx.map.d as u64).gcd(&(q - 1)) == 1 {
            return Ok(Outcome::Divides { shortcut: true });
        }
        Ok(match self.ctx.divides_mod_q(q)?.verdict {
            Verdict::Divides(_) => Outcome::Divides { shortcut: false },
            Verdict::NotDivides => Outcome::NotDivides,
            Verdict::BadPrime(_) => Outcome::Bad,
        })
    }
}

/// Powers of ten from 10^3 below `x`, then `x`.
pub fn geometric_checkpoints(x: u64) -> Vec<u64> {
    let mut out: Vec<u64> =
        std::iter::successors(Some(1000u64), |c| c.checked_mul(10)).take_while(|&c| c < x).collect();
    out.push(x);
    out
}

/// Classifies every sieved prime up to `cfg.x` with cumulative samples at `checkpoints`.
pub fn density_curve(m: &MapSpec, cfg: &SieveConfig, checkpoints: &[u64]) -> Result<DensityReport> {
    cfg.validate()?;
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return arg_err("checkpoints must be strictly ascending");
    }
    if checkpoints.last().is_some_and(|&c| c > cfg.x) {
        return arg_err("checkpoints must not exceed X");
    }
    let classifier = Classifier::new(m)?;
    let mut overall = ClassCount::new("all".into());
    let mut per_class: Vec<ClassCount> = cfg.classes.iter().map(|c| ClassCount::new(c.to_string())).collect();
    let mut bad_primes = Vec::new();
    let mut total = 0u64;
    let mut shortcut_primes = 0u64;
    let mut curve = Vec::new();
    let mut pending = checkpoints.iter().copied().peekable();
    let snapshot = |x: u64, overall: &ClassCount, per_class: &[ClassCount], curve: &mut Vec<CurvePoint>| {
        let mut pt = CurvePoint { x, overall: overall.clone(), per_class: per_class.to_vec() };
        pt.overall.finish();
        pt.per_class.iter_mut().for_each(ClassCount::finish);
        curve.push(pt);
    };
    for segment in prime_segments(2, cfg.x, cfg)? {
        let outcomes: Vec<Outcome> = segment.par_iter().map(|&q| classifier.classify(q)).collect::<Result<_>>()?;
        for (&q, outcome) in segment.iter().zip(outcomes) {
            while let Some(&c) = pending.peek() {
                if c >= q {
                    break;
                }
                snapshot(c, &overall, &per_class, &mut curve);
                pending.next();
            }
            total += 1;
            let divides = match outcome {
                Outcome::Bad => {
                    bad_primes.push(q);
                    continue;
                }
                Outcome::Divides { shortcut } => {
                    shortcut_primes += shortcut as u64;
                    true
                }
                Outcome::NotDivides => false,
            };
            overall.record(divides);
            if let Some(i) = cfg.classes.iter().position(|c| c.contains(q)) {
                per_class[i].record(divides);
            }
        }
    }
    for c in pending {
        snapshot(c, &overall, &per_class, &mut curve);
    }
    overall.finish();
    per_class.iter_mut().for_each(ClassCount::finish);
    Ok(DensityReport {
        map: m.clone(),
        config: cfg.clone(),
        total_primes: total,
        divides: overall.divides,
        not_divides: overall.not_divides,
        bad_primes,
        ratio: overall.ratio.clone(),
        ratio_approx: overall.ratio_approx,
        per_class,
        curve,
        finite_orbit: orbit_is_finite(m),
        shortcut_primes,
    })
}

/// [`density_curve`] at the checkpoints 10^3, 10^4, ... below `X`, and `X`.
pub fn density_estimate(m: &MapSpec, cfg: &SieveConfig) -> Result<DensityReport> {
    density_curve(m, cfg, &geometric_checkpoints(cfg.x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::orbit_divides_mod_q;
    use crate::exactnum::{int, rat};

    fn cls(s: &str) -> ResidueClass {
        s.parse().unwrap()
    }

    #[test]
    fn sieve_examples() {
        let cfg = SieveConfig::new(100);
        assert_eq!(primes_in_range(2, 20, &cfg).unwrap(), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        let c1 = SieveConfig::new(100).with_classes(vec![cls("1%3")]);
        assert_eq!(primes_in_range(2, 50, &c1).unwrap(), vec![7, 13, 19, 31, 37, 43]);
        let c2 = SieveConfig::new(100).with_classes(vec![cls("2%3")]);
        assert_eq!(primes_in_range(2, 50, &c2).unwrap(), vec![2, 5, 11, 17, 23, 29, 41, 47]);
        assert!("0%3".parse::<ResidueClass>().is_err());
        assert!(primes_in_range(2, DEFAULT_MAX_X + 1, &cfg).is_err());
    }

    #[test]
    fn sieve_matches_trial_division() {
        let mut cfg = SieveConfig::new(200_000);
        cfg.chunk = 1024;
        let sieved = primes_in_range(90_000, 200_000, &cfg).unwrap();
        let direct: Vec<u64> = (90_000..=200_000).filter(|&n| crate::exactnum::is_prime_u64(n)).collect();
        assert_eq!(sieved, direct);
    }

    #[test]
    fn shortcut_agrees_with_cycle_detection() {
        for (d, c) in [(3, int(1)), (5, int(3)), (3, rat(1, 2))] {
            let m = MapSpec::new(d, c).unwrap();
            let cl = Classifier::new(&m).unwrap();
            assert!(cl.shortcut);
            for q in primes_in_range(2, 3000, &SieveConfig::new(3000)).unwrap() {
                let fast = cl.classify(q).unwrap();
                let slow = orbit_divides_mod_q(&m, q).unwrap().verdict;
                let agree = matches!(
                    (fast, slow),
                    (Outcome::Bad, Verdict::BadPrime(_))
                        | (Outcome::Divides { .. }, Verdict::Divides(_))
                        | (Outcome::NotDivides, Verdict::NotDivides)
                );
                assert!(agree, "d={d} q={q}");
            }
        }
    }

    #[test]
    fn small_run_invariants() {
        let m = MapSpec::new(3, int(1)).unwrap();
        let cfg = SieveConfig::new(20_000).with_classes(vec![cls("1%3"), cls("2%3")]);
        let r = density_estimate(&m, &cfg).unwrap();
        assert_eq!(r.total_primes, r.divides + r.not_divides + r.bad_primes.len() as u64);
        let class2 = &r.per_class[1];
        assert_eq!(class2.divides, class2.primes);
        let sum: u64 = r.per_class.iter().map(|c| c.divides).sum();
        assert_eq!(sum, r.divides);
        assert_eq!(r.curve.len(), 3);
        assert_eq!(r.curve.last().unwrap().overall, {
            let mut o = ClassCount::new("all".into());
            o.primes = r.divides + r.not_divides;
            o.divides = r.divides;
            o.not_divides = r.not_divides;
            o.finish();
            o
        });
        assert!(r.to_csv().starts_with("X,class,primes,divides,ratio\n1000,all,"));
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let again = pool.install(|| density_estimate(&m, &cfg).unwrap());
        assert_eq!(again, r);
    }

    #[test]
    fn finite_orbit_case() {
        let m = MapSpec::new(2, int(-2)).unwrap();
        let r = density_estimate(&m, &SieveConfig::new(1000)).unwrap();
        assert!(r.finite_orbit);
        assert_eq!(r.divides, 1);
        assert!(!density_estimate(&MapSpec::new(2, int(1)).unwrap(), &SieveConfig::new(1000)).unwrap().finite_orbit);
    }

    #[test]
    fn bad_primes_excluded() {
        let m = MapSpec::new(2, rat(1, 6)).unwrap();
        let r = density_estimate(&m, &SieveConfig::new(1000)).unwrap();
        assert_eq!(r.bad_primes, vec![2, 3]);
    }
}
