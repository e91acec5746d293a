//! Invariants of orbits modulo primes, sieving and Newton polygons.

use proptest::prelude::*;

use critorbit::density::{primes_in_range, SieveConfig};
use critorbit::dynamics::{critical_orbit, CycleAlgorithm, OrbitModContext, Verdict};
use critorbit::exactnum::{int, is_prime_u64, rat, Rational};
use critorbit::localfields::{newton_polygon, ram_tower};
use critorbit::poly::iterate_map;
use critorbit::MapSpec;

fn reduce(x: &Rational, q: u64) -> Option<u64> {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    let qb = BigInt::from(q);
    let den = x.denom().mod_floor(&qb);
    if den == BigInt::from(0) {
        return None;
    }
    let inv = den.modpow(&(&qb - 2), &qb);
    (x.numer().mod_floor(&qb) * inv).mod_floor(&qb).to_u64()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn brent_and_floyd_agree(d in 2u32..6, num in -20i64..20, den in 1i64..6, a0 in -5i64..5, qi in 0usize..200) {
        let primes = primes_in_range(2, 2000, &SieveConfig::new(2000)).unwrap();
        let q = primes[qi % primes.len()];
        let m = MapSpec::with_start(d, rat(num, den), int(a0)).unwrap();
        let ctx = OrbitModContext::new(&m).unwrap();
        let b = ctx.divides_mod_q_with(q, CycleAlgorithm::Brent).unwrap();
        let f = ctx.divides_mod_q_with(q, CycleAlgorithm::Floyd).unwrap();
        prop_assert_eq!(b.verdict, f.verdict);
    }

    #[test]
    fn verdict_matches_exact_orbit(d in 2u32..4, c in -6i64..7, qi in 0usize..25) {
        // For small q the orbit mod q repeats within q steps; the exact orbit
        // of that length is still small enough to compute.
        let primes = [5u64, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103];
        let q = primes[qi];
        let m = MapSpec::new(d, int(c)).unwrap();
        let ctx = OrbitModContext::new(&m).unwrap();
        let verdict = ctx.divides_mod_q(q).unwrap().verdict;
        // Scan residues directly (values mod q), skipping exact zeros via the zero set.
        let mut x = 0u64;
        let mut first = None;
        for n in 0..=(q as usize + 1) {
            if x == 0 && !ctx.zeros.contains(n as u64) {
                first = Some(n as u64);
                break;
            }
            x = (num_bigint::BigUint::from(x).modpow(&d.into(), &q.into()).to_u64_digits().first().copied().unwrap_or(0)
                + (c.rem_euclid(q as i64) as u64)) % q;
        }
        match first {
            Some(n) => prop_assert_eq!(verdict, Verdict::Divides(n)),
            None => prop_assert_eq!(verdict, Verdict::NotDivides),
        }
    }

    #[test]
    fn orbit_reduction_commutes(d in 2u32..4, num in -9i64..10, den in 1i64..5, q in prop::sample::select(vec![7u64, 11, 13, 17])) {
        let m = MapSpec::new(d, rat(num, den)).unwrap();
        let orb = critical_orbit(&m, 5).unwrap();
        if let Some(c) = reduce(&m.c, q) {
            let mut x = 0u64;
            for v in &orb.values {
                x = (x.pow(d) + c) % q;
                prop_assert_eq!(reduce(v, q), Some(x));
            }
        }
    }

    #[test]
    fn sieve_matches_primality(lo in 0u64..50_000, len in 1u64..5_000, chunk in 1024u64..5000) {
        let mut cfg = SieveConfig::new(100_000);
        cfg.chunk = chunk;
        let got = primes_in_range(lo, lo + len, &cfg).unwrap();
        let want: Vec<u64> = (lo..=lo + len).filter(|&n| is_prime_u64(n)).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn newton_polygon_single_slope(d in 2u32..5, r in 1u32..4, unit in prop::sample::select(vec![1i64, 2, 4, -1]), n in 1u32..4, p in prop::sample::select(vec![3u64, 5, 7])) {
        // v_p(c) = r > 0 and p does not divide d: one segment of slope -r/d^n.
        prop_assume!(!(d as u64).is_multiple_of(p));
        prop_assume!(unit % p as i64 != 0);
        let c = int(unit * (p as i64).pow(r));
        let f = iterate_map(&MapSpec::new(d, c).unwrap(), n).unwrap();
        let np = newton_polygon(&f, p).unwrap();
        prop_assert_eq!(np.segments.len(), 1);
        prop_assert_eq!(np.segments[0].slope.clone(), rat(-(r as i64), (d as i64).pow(n)));
    }

    #[test]
    fn ram_tower_invariants(d in 2u64..8, r in 1u64..65, levels in 1usize..20) {
        let t = ram_tower(d, r, levels, 1).unwrap();
        for n in 1..=levels {
            prop_assert_eq!(t.k[n - 1] % t.k[n], 0);
            prop_assert_eq!(t.e[n], t.e[n - 1] * t.steps[n - 1]);
            if n > t.n0 {
                prop_assert_eq!(t.steps[n - 1], d);
            }
        }
    }
}
