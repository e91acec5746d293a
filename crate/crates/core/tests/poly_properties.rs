//! Invariants of polynomial arithmetic, resultants and factorization.

use num_traits::Zero;
use proptest::prelude::*;

use critorbit::exactnum::{int, perfect_root, rat, val_p, PAdicVal, Rational};
use critorbit::poly::{discriminant, factor_mod_p, factor_over_q, resultant, FpPoly, RatPoly, DEFAULT_SPLIT_SEED};

fn small_poly(max_deg: usize) -> impl Strategy<Value = RatPoly> {
    prop::collection::vec(-6i64..=6, 1..=max_deg + 1).prop_map(|c| RatPoly::from_ints(&c))
}

fn monic_poly(max_deg: usize) -> impl Strategy<Value = RatPoly> {
    prop::collection::vec(-5i64..=5, 1..=max_deg).prop_map(|mut c| {
        c.push(1);
        RatPoly::from_ints(&c)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn division_identity(a in small_poly(6), b in small_poly(3)) {
        prop_assume!(!b.coeffs().is_empty());
        let (q, r) = a.div_rem(&b);
        prop_assert_eq!(&(&q * &b) + &r, a);
        prop_assert!(r.coeffs().is_empty() || r.deg() < b.deg());
    }

    #[test]
    fn resultant_is_multiplicative(a in monic_poly(3), b in monic_poly(3), c in monic_poly(2)) {
        let lhs = resultant(&a, &(&b * &c));
        prop_assert_eq!(lhs, resultant(&a, &b) * resultant(&a, &c));
    }

    #[test]
    fn resultant_vanishes_on_common_factor(a in monic_poly(2), b in monic_poly(2), c in monic_poly(2)) {
        prop_assert!(resultant(&(&a * &c), &(&b * &c)).is_zero());
    }

    #[test]
    fn discriminant_of_product(a in monic_poly(2), b in monic_poly(2)) {
        // disc(ab) = disc(a) disc(b) res(a, b)^2 for monic a, b.
        let r = resultant(&a, &b);
        let lhs = discriminant(&(&a * &b)).unwrap();
        let rhs = discriminant(&a).unwrap() * discriminant(&b).unwrap() * &r * &r;
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn factorization_reassembles(factors in prop::collection::vec(monic_poly(3), 1..4)) {
        let f = factors.iter().fold(RatPoly::from_ints(&[1]), |acc, g| &acc * g);
        prop_assume!(f.deg() >= 1);
        let fl = factor_over_q(&f).unwrap();
        prop_assert_eq!(fl.reassemble(), f);
        prop_assert!(fl.count_with_multiplicity() >= factors.iter().filter(|g| g.deg() >= 1).count() as u32);
        for (h, _) in &fl.factors {
            // No factor of degree >= 2 has a rational root among +-divisors of its constant term.
            if h.deg() >= 2 && h.coeffs()[0].is_integer() {
                let c0 = h.coeffs()[0].numer().clone();
                let bound: i64 = c0.to_string().trim_start_matches('-').parse().unwrap_or(0).min(50);
                for x in -bound..=bound {
                    prop_assert!(!h.eval(&int(x)).is_zero() || bound == 0);
                }
            }
        }
    }

    #[test]
    fn factorization_mod_p_reassembles(coeffs in prop::collection::vec(0u64..101, 2..9), p in prop::sample::select(vec![2u64, 3, 5, 7, 101])) {
        let f = FpPoly::new(p, coeffs).unwrap();
        prop_assume!(f.coeffs().len() >= 2);
        let parts = factor_mod_p(&f, DEFAULT_SPLIT_SEED).unwrap();
        let mut prod = FpPoly::new(p, vec![*f.coeffs().last().unwrap()]).unwrap();
        for (g, e) in &parts {
            for _ in 0..*e {
                prod = prod.mul(g);
            }
        }
        prop_assert_eq!(prod, f);
    }

    #[test]
    fn valuation_is_additive(a in 1i64..10_000, b in 1i64..10_000, c in 1i64..10_000, p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let x = rat(a, b);
        let y = rat(c, 1);
        let lhs = val_p(&(&x * &y), p).unwrap();
        prop_assert_eq!(lhs, val_p(&x, p).unwrap() + val_p(&y, p).unwrap());
        prop_assert_eq!(val_p(&Rational::zero(), p).unwrap(), PAdicVal::Infinite);
    }

    #[test]
    fn perfect_roots_round_trip(a in -300i64..300, b in 1i64..300, k in 2u32..6) {
        prop_assume!(a != 0);
        let x = rat(a, b);
        let xk = x.pow(k as i32);
        let root = perfect_root(&xk, k);
        prop_assert!(root.is_some());
        prop_assert_eq!(root.unwrap().pow(k as i32), xk);
    }
}
