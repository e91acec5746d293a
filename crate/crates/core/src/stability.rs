//! Irreducibility certificates for `g(f^n(z))`, eventual-stability verdicts,
//! factorization shapes, maximality witnesses and the integer-`c` checks over
//! `Z[zeta_p]`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::dynamics::{critical_orbit, MapSpec};
use crate::error::{arg_err, cap_err, Result};
use crate::exactnum::{
    factor_int, format_rational, is_perfect_power, is_pth_power_cyc, perfect_root, serde_exact, val_p, CycInt,
    FactorEffort, NonPowerWitness, PAdicVal, PthPowerVerdict, Rational,
};
use crate::poly::{factor_over_q, is_irreducible_over_q, iterate_map, FactorList, Irreducibility, RatPoly};

/// The sign exponent attached to level `n`: 1 exactly when `n = 1`, `d` is
/// even and `deg g` is odd.
pub fn epsilon(d: u32, n: u32, deg_g: usize) -> u32 {
    u32::from(n == 1 && d.is_multiple_of(2) && deg_g % 2 == 1)
}

fn signed(x: &Rational, eps: u32) -> Rational {
    if eps % 2 == 1 {
        -x.clone()
    } else {
        x.clone()
    }
}

fn prime_divisors_small(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum StabilityCertificate {
    /// Both power conditions hold for every `1 <= n <= levels`.
    FirststabCertified {
        levels: u32,
    },
    /// Condition `condition` fails at level `n`: `value` is a `power`-th power.
    FirststabFails {
        n: u32,
        condition: u8,
        power: u64,
        #[serde(serialize_with = "serde_exact::rational")]
        value: Rational,
    },
    EventuallyStable {
        p: u64,
        e: u64,
        /// `d^ceil(log2 e)`.
        #[serde(serialize_with = "biguint_str")]
        bound: BigUint,
        /// `d^(log2 e)` as a real number, for comparison.
        real_bound: f64,
        /// Smallest prime of `num(c)` not dividing `d`, if any.
        coprime_witness: Option<u64>,
    },
    Inconclusive {
        reason: String,
    },
}

fn biguint_str<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// `g(f^n(0))` for `n = 1..=levels`.
fn g_of_orbit(g: &RatPoly, m: &MapSpec, levels: usize) -> Result<Vec<Rational>> {
    let orb = critical_orbit(m, levels)?;
    Ok(orb.values.iter().map(|a| g.eval(a)).collect())
}

/// Checks the power conditions that make every `g(f^n(z))` irreducible.
pub fn firststab_certify(g: &RatPoly, m: &MapSpec, levels: u32) -> Result<StabilityCertificate> {
    if !g.is_monic() || g.deg() == 0 {
        return arg_err("g must be monic of positive degree");
    }
    match is_irreducible_over_q(g) {
        Irreducibility::Yes => {}
        Irreducibility::No => return arg_err(format!("g = {g} is reducible over Q")),
        Irreducibility::Unknown => return cap_err(format!("could not decide irreducibility of g = {g}")),
    }
    if levels == 0 {
        return arg_err("number of levels must be at least 1");
    }
    let primes = prime_divisors_small(m.d as u64);
    let values = g_of_orbit(g, m, levels as usize)?;
    for (i, v) in values.iter().enumerate() {
        let n = i as u32 + 1;
        let eps = epsilon(m.d, n, g.deg());
        let x = signed(v, eps);
        for &p in &primes {
            if is_perfect_power(&x, p as u32) {
                return Ok(StabilityCertificate::FirststabFails { n, condition: 1, power: p, value: x });
            }
        }
        if m.d.is_multiple_of(4) {
            let y = signed(v, eps + 1) * Rational::from_integer(BigInt::from(4));
            if is_perfect_power(&y, 4) {
                return Ok(StabilityCertificate::FirststabFails { n, condition: 2, power: 4, value: y });
            }
        }
    }
    Ok(StabilityCertificate::FirststabCertified { levels })
}

/// `ceil(log2 e)` for `e >= 1`.
pub fn ceil_log2(e: u64) -> u32 {
    64 - (e - 1).leading_zeros()
}

/// Eventual stability from a prime at which `c` has positive valuation.
pub fn eventual_stability_verdict(m: &MapSpec) -> Result<StabilityCertificate> {
    if m.c.is_zero() {
        return arg_err("c must be nonzero");
    }
    let num = m.c.numer();
    if num.abs().is_one() {
        return Ok(StabilityCertificate::Inconclusive {
            reason: "c is the reciprocal of an integer; no prime has positive valuation".into(),
        });
    }
    let fac = factor_int(num, FactorEffort::default())?;
    let mut best: Option<(BigUint, u64, u64)> = None;
    let mut coprime_witness = None;
    for (p, e) in &fac.factors {
        let Some(p) = p.to_u64() else { continue };
        let e = *e as u64;
        let bound = BigUint::from(m.d).pow(ceil_log2(e));
        if best.as_ref().is_none_or(|(b, _, _)| bound < *b) {
            best = Some((bound, p, e));
        }
        if coprime_witness.is_none() && !(m.d as u64).is_multiple_of(p) {
            coprime_witness = Some(p);
        }
    }
    match best {
        Some((bound, p, e)) => Ok(StabilityCertificate::EventuallyStable {
            p,
            e,
            bound,
            real_bound: (m.d as f64).powf((e as f64).log2()),
            coprime_witness,
        }),
        None => Ok(StabilityCertificate::Inconclusive {
            reason: format!("could not find a prime factor of {num} within the factoring budget"),
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorCount {
    pub n: u32,
    pub count: u32,
    pub degrees: Vec<usize>,
}

/// Number of irreducible factors of `f^n` over `Q` for `n = 1..=levels`.
pub fn factor_count_track(m: &MapSpec, levels: u32) -> Result<Vec<FactorCount>> {
    (1..=levels)
        .map(|n| {
            let fl = factor_over_q(&iterate_map(m, n)?)?;
            Ok(FactorCount { n, count: fl.count_with_multiplicity(), degrees: fl.degrees() })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplittingShape {
    pub holds: bool,
    pub epsilon: u32,
    /// The `h` with `g(f^n(z)) = (-1)^eps h(z) h(-z)`, when found.
    pub h: Option<RatPoly>,
}

/// For `d = 2`, checks whether the given factorization of `g(f^n(z))` has the
/// shape `(-1)^eps h(z) h(-z)`.
pub fn splitting_shape_verify(g: &RatPoly, m: &MapSpec, n: u32, factors: &FactorList) -> Result<SplittingShape> {
    if m.d != 2 {
        return cap_err("the splitting shape check is implemented for d = 2 only");
    }
    if n == 0 {
        return arg_err("level must be at least 1");
    }
    let target = g.compose(&iterate_map(m, n)?);
    if factors.reassemble() != target {
        return arg_err("the factorization does not multiply out to g(f^n(z))");
    }
    let eps = epsilon(2, n, g.deg());
    let half = match target.deg() {
        d if d % 2 == 0 => d / 2,
        _ => return Ok(SplittingShape { holds: false, epsilon: eps, h: None }),
    };
    let mut pieces: Vec<&RatPoly> = Vec::new();
    for (f, mult) in &factors.factors {
        for _ in 0..*mult {
            pieces.push(f);
        }
    }
    if pieces.len() > 20 {
        return cap_err("too many factors for the subset search");
    }
    for mask in 1u32..(1 << pieces.len()) {
        let deg: usize = (0..pieces.len()).filter(|i| mask >> i & 1 == 1).map(|i| pieces[i].deg()).sum();
        if deg != half {
            continue;
        }
        let h = (0..pieces.len()).filter(|i| mask >> i & 1 == 1).fold(RatPoly::one(), |acc, i| &acc * pieces[i]);
        let prod = &h * &h.reflect();
        let signed_prod = if eps == 1 { -&prod } else { prod };
        if signed_prod == target {
            return Ok(SplittingShape { holds: true, epsilon: eps, h: Some(h) });
        }
    }
    Ok(SplittingShape { holds: false, epsilon: eps, h: None })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaximalityWitness {
    pub n: u32,
    pub p: u64,
    /// `v_p(g(f^i(0)))` for `i = 1..=n`.
    pub valuations: Vec<PAdicVal>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum MaximalityOutcome {
    Witness(MaximalityWitness),
    NotFound { reason: String },
}

fn divides_some_iterate(g: &RatPoly, m: &MapSpec) -> Result<bool> {
    let mut k = 0;
    loop {
        let fk = iterate_map(m, k)?;
        if fk.deg() > 256 {
            return Ok(false);
        }
        if fk.deg() >= g.deg() && fk.div_exact(g).is_some() {
            return Ok(true);
        }
        k += 1;
    }
}

/// Searches for a prime `p` not dividing `d` with `v_p(g(f^n(0)))` prime to
/// `d` and `v_p(g(f^i(0))) = 0` for `1 <= i < n`.
pub fn maximality_witness(g: &RatPoly, m: &MapSpec, n: u32, effort: FactorEffort) -> Result<MaximalityOutcome> {
    if n < 2 {
        return arg_err("level must be at least 2");
    }
    if !g.is_monic() {
        return arg_err("g must be monic");
    }
    if !divides_some_iterate(g, m)? {
        return arg_err(format!("g = {g} does not divide an iterate of the map"));
    }
    let values = g_of_orbit(g, m, n as usize)?;
    let top = &values[n as usize - 1];
    if top.is_zero() {
        return Ok(MaximalityOutcome::NotFound { reason: "g(f^n(0)) = 0".into() });
    }
    let mut candidates: Vec<u64> = Vec::new();
    let mut partial = false;
    for part in [top.numer(), top.denom()] {
        if part.abs().is_one() {
            continue;
        }
        let fac = factor_int(part, effort)?;
        partial |= !fac.is_complete();
        candidates.extend(fac.factors.iter().filter_map(|(p, _)| p.to_u64()));
    }
    candidates.sort_unstable();
    candidates.dedup();
    for p in candidates {
        if (m.d as u64).is_multiple_of(p) {
            continue;
        }
        let vals = values.iter().map(|x| val_p(x, p)).collect::<Result<Vec<_>>>()?;
        let last = vals[n as usize - 1].finite().expect("nonzero");
        let coprime = (last.unsigned_abs()).gcd(&(m.d as u64)) == 1;
        let earlier_zero = vals[..n as usize - 1].iter().all(|v| *v == PAdicVal::Finite(0));
        if coprime && earlier_zero {
            return Ok(MaximalityOutcome::Witness(MaximalityWitness { n, p, valuations: vals }));
        }
    }
    let reason = if partial {
        "factorization budget exhausted before a witness was found".to_string()
    } else {
        "no prime satisfies the valuation conditions".to_string()
    };
    Ok(MaximalityOutcome::NotFound { reason })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ZcaseVerdict {
    /// Certified not a p-th power.
    NonPower,
    /// Is a p-th power.
    Power,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZcaseEntry {
    pub n: u32,
    /// `"integer"` or `"cyclotomic"`.
    pub ring: String,
    pub value: String,
    pub verdict: ZcaseVerdict,
    pub witness: Option<NonPowerWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZcaseReport {
    pub p: u64,
    #[serde(serialize_with = "serde_exact::bigint")]
    pub c: BigInt,
    /// `Some(r)` when `c = r^p`.
    #[serde(serialize_with = "opt_bigint")]
    pub r: Option<BigInt>,
    pub entries: Vec<ZcaseEntry>,
}

fn opt_bigint<S: serde::Serializer>(x: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.serialize_some(&x.to_string()),
        None => s.serialize_none(),
    }
}

impl ZcaseReport {
    pub fn all_certified(&self) -> bool {
        self.entries.iter().all(|e| e.verdict == ZcaseVerdict::NonPower)
    }
}

/// Residue trials used for cyclotomic certificates.
pub const ZCASE_TRIALS: usize = 40;

fn integer_entry(n: u32, x: &BigInt, p: u64) -> ZcaseEntry {
    let is_power = perfect_root(&Rational::from_integer(x.clone()), p as u32).is_some();
    ZcaseEntry {
        n,
        ring: "integer".into(),
        value: x.to_string(),
        verdict: if is_power { ZcaseVerdict::Power } else { ZcaseVerdict::NonPower },
        witness: None,
    }
}

/// For `f = z^p + c` with integer `c`: if `c` is not a p-th power, checks
/// that no `f^n(0)` is; if `c = r^p`, checks `f^(n-1)(0) + r` in `Z` and
/// certifies `f^(n-1)(0) + r zeta_p` in `Z[zeta_p]` for `2 <= n <= levels`.
pub fn zcase_suite(p: u64, c: &BigInt, levels: u32) -> Result<ZcaseReport> {
    if p < 3 || !crate::exactnum::is_prime_u64(p) {
        return arg_err(format!("{p} is not an odd prime"));
    }
    if c.is_zero() {
        return arg_err("c must be nonzero");
    }
    let m = MapSpec::new(p as u32, Rational::from_integer(c.clone()))?;
    let orb = critical_orbit(&m, levels.max(1) as usize)?;
    let r = perfect_root(&Rational::from_integer(c.clone()), p as u32).map(|x| x.to_integer());
    let mut entries = Vec::new();
    match &r {
        None => {
            for n in 1..=levels {
                entries.push(integer_entry(n, &orb.a(n as usize).to_integer(), p));
            }
        }
        Some(r) => {
            for n in 2..=levels {
                let prev = orb.a(n as usize - 1).to_integer();
                entries.push(integer_entry(n, &(&prev + r), p));
                let x = CycInt::linear(p, prev, r.clone(), 1)?;
                let (verdict, witness) = if x.is_zero() {
                    (ZcaseVerdict::Power, None)
                } else {
                    match is_pth_power_cyc(&x, ZCASE_TRIALS)? {
                        PthPowerVerdict::CertifiedNo(w) => (ZcaseVerdict::NonPower, Some(w)),
                        PthPowerVerdict::Inconclusive => (ZcaseVerdict::Inconclusive, None),
                    }
                };
                entries.push(ZcaseEntry { n, ring: "cyclotomic".into(), value: x.to_string(), verdict, witness });
            }
        }
    }
    Ok(ZcaseReport { p, c: c.clone(), r, entries })
}

/// Text summary used by the CLI.
pub fn describe(cert: &StabilityCertificate) -> String {
    match cert {
        StabilityCertificate::FirststabCertified { levels } => format!("certified irreducible for n <= {levels}"),
        StabilityCertificate::FirststabFails { n, condition, power, value } => format!(
            "condition ({condition}) fails at n = {n}: {} is {}",
            format_rational(value),
            match power {
                2 => "a square".to_string(),
                3 => "a cube".to_string(),
                k => format!("a perfect {k}th power"),
            }
        ),
        StabilityCertificate::EventuallyStable { p, e, bound, coprime_witness, .. } => format!(
            "eventually stable: v_{p}(c) = {e}, at most {bound} factors{}",
            match coprime_witness {
                Some(q) => format!(", prime {q} does not divide d"),
                None => String::new(),
            }
        ),
        StabilityCertificate::Inconclusive { reason } => format!("inconclusive: {reason}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    fn map(d: u32, c: Rational) -> MapSpec {
        MapSpec::new(d, c).unwrap()
    }

    #[test]
    fn epsilon_rule() {
        assert_eq!(epsilon(2, 1, 1), 1);
        assert_eq!(epsilon(2, 2, 1), 0);
        assert_eq!(epsilon(2, 1, 2), 0);
        assert_eq!(epsilon(3, 1, 1), 0);
    }

    #[test]
    fn firststab_examples() {
        let z = RatPoly::z();
        assert_eq!(
            firststab_certify(&z, &map(2, int(2)), 12).unwrap(),
            StabilityCertificate::FirststabCertified { levels: 12 }
        );
        assert_eq!(
            firststab_certify(&z, &map(2, rat(-9, 8)), 4).unwrap(),
            StabilityCertificate::FirststabFails { n: 2, condition: 1, power: 2, value: rat(9, 64) }
        );
        assert_eq!(
            firststab_certify(&z, &map(3, int(2)), 8).unwrap(),
            StabilityCertificate::FirststabCertified { levels: 8 }
        );
        let reducible: RatPoly = "z^2 - 1".parse().unwrap();
        assert!(firststab_certify(&reducible, &map(2, int(2)), 3).is_err());
    }

    #[test]
    fn condition_two_for_degree_four() {
        // z^4 + 4: -4 is not a square but 4 * 4 = 16 is a 4th power, and
        // indeed z^4 + 4 = (z^2 + 2z + 2)(z^2 - 2z + 2)
        let z = RatPoly::z();
        let m = map(4, int(4));
        let cert = firststab_certify(&z, &m, 3).unwrap();
        assert_eq!(cert, StabilityCertificate::FirststabFails { n: 1, condition: 2, power: 4, value: int(16) });
        assert_eq!(factor_over_q(&iterate_map(&m, 1).unwrap()).unwrap().factors.len(), 2);
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!([1, 2, 3, 4, 5, 8, 9].map(ceil_log2), [0, 1, 2, 2, 3, 3, 4]);
    }

    #[test]
    fn eventual_stability_examples() {
        match eventual_stability_verdict(&map(2, rat(-16, 9))).unwrap() {
            StabilityCertificate::EventuallyStable { p, e, bound, .. } => {
                assert_eq!((p, e, bound), (2, 4, BigUint::from(4u32)));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            eventual_stability_verdict(&map(2, rat(1, 3))).unwrap(),
            StabilityCertificate::Inconclusive { .. }
        ));
        match eventual_stability_verdict(&map(6, int(5))).unwrap() {
            StabilityCertificate::EventuallyStable { p, e, bound, coprime_witness, .. } => {
                assert_eq!((p, e, bound, coprime_witness), (5, 1, BigUint::one(), Some(5)));
            }
            other => panic!("{other:?}"),
        }
        assert!(eventual_stability_verdict(&map(2, int(0))).is_err());
    }

    #[test]
    fn factor_counts() {
        let t = factor_count_track(&map(2, rat(-16, 9)), 3).unwrap();
        assert_eq!(t.iter().map(|x| x.count).collect::<Vec<_>>(), vec![2, 3, 4]);
        let t = factor_count_track(&map(2, int(1)), 3).unwrap();
        assert!(t.iter().all(|x| x.count == 1));
        let t = factor_count_track(&map(2, int(2)), 4).unwrap();
        assert!(t.iter().all(|x| x.count == 1));
    }

    #[test]
    fn splitting_examples() {
        let z = RatPoly::z();
        let m = map(2, rat(-16, 9));
        let fl = factor_over_q(&iterate_map(&m, 1).unwrap()).unwrap();
        let s = splitting_shape_verify(&z, &m, 1, &fl).unwrap();
        assert!(s.holds);
        assert_eq!(s.epsilon, 1);
        let h = s.h.unwrap();
        assert_eq!(-&(&h * &h.reflect()), iterate_map(&m, 1).unwrap());
        for c in [int(1), rat(-5, 4)] {
            let m = map(2, c);
            let fl = factor_over_q(&iterate_map(&m, 1).unwrap()).unwrap();
            assert!(!splitting_shape_verify(&z, &m, 1, &fl).unwrap().holds);
        }
        assert!(splitting_shape_verify(&z, &map(3, int(1)), 1, &fl).is_err());
    }

    #[test]
    fn maximality_examples() {
        let z = RatPoly::z();
        let eff = FactorEffort::default();
        let w = |d, c, n| match maximality_witness(&z, &map(d, c), n, eff).unwrap() {
            MaximalityOutcome::Witness(w) => Some(w.p),
            MaximalityOutcome::NotFound { .. } => None,
        };
        assert_eq!(w(2, int(1), 3), Some(5));
        assert_eq!(w(2, int(1), 4), Some(13));
        // f^3(0) = 9 for z^3 + 1 only involves 3 | d; f^4(0) = 730 = 2 * 5 * 73
        assert_eq!(w(3, int(1), 3), None);
        assert_eq!(w(3, int(1), 4), Some(5));
        assert!(maximality_witness(&z, &map(2, int(1)), 1, eff).is_err());
    }

    #[test]
    fn zcase_examples() {
        let r = zcase_suite(3, &BigInt::from(2), 8).unwrap();
        assert!(r.r.is_none() && r.all_certified() && r.entries.len() == 8);
        let r = zcase_suite(3, &BigInt::from(8), 4).unwrap();
        assert_eq!(r.r, Some(BigInt::from(2)));
        assert!(r.all_certified());
        assert_eq!(r.entries[0].value, "10");
        assert_eq!(r.entries[1].witness, Some(NonPowerWitness::Norm(BigInt::from(52))));
        let r = zcase_suite(5, &BigInt::one(), 2).unwrap();
        assert!(r.all_certified());
        assert!(matches!(r.entries[1].witness, Some(NonPowerWitness::SplitResidue { .. })));
    }
}
