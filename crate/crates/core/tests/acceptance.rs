//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use critorbit::density::{density_curve, density_estimate, ResidueClass, SieveConfig};
use critorbit::dynamics::{critical_orbit, verify_rds};
use critorbit::exactnum::{int, is_perfect_power, is_pth_power_cyc, rat, val_p, CycInt, PAdicVal, Rational};
use critorbit::galoisprocess::{
    brute_force_distribution, conditional_check, exact_yn_distribution, expected_fixed_points, extinction_curve,
    mginv_exhaustive, psi_image_explicit, BaseGroup, Perm, TowerSpec,
};
use critorbit::localfields::{kummer_ram_degree, newton_polygon, ram_tower};
use critorbit::poly::{discriminant, factor_over_q, is_irreducible_over_q, iterate_map, Irreducibility, RatPoly};
use critorbit::stability::{
    describe, eventual_stability_verdict, factor_count_track, firststab_certify, maximality_witness, zcase_suite,
    MaximalityOutcome, StabilityCertificate, ZCASE_TRIALS,
};
use critorbit::MapSpec;

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn map(d: u32, c: Rational) -> MapSpec {
    MapSpec::new(d, c).unwrap()
}

fn classes(list: &[&str]) -> Vec<ResidueClass> {
    list.iter().map(|s| s.parse().unwrap()).collect()
}

fn ratio_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap()
}

// Criteria 1-3 share one sieve run.
struct CubeRun {
    report: critorbit::density::DensityReport,
    seconds: f64,
}

fn cube_run() -> CubeRun {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let m = map(3, int(1));
    let cfg = SieveConfig::new(1_000_000).with_classes(classes(&["1%3", "2%3"]));
    let start = Instant::now();
    let report = pool.install(|| density_curve(&m, &cfg, &[1_000, 10_000, 100_000, 1_000_000])).unwrap();
    CubeRun { report, seconds: start.elapsed().as_secs_f64() }
}

fn ac1(run: &CubeRun) -> Outcome {
    let r = ratio_f64(&run.report.ratio);
    check(
        (r - 0.5).abs() <= 0.02 && run.seconds <= 60.0,
        format!("z^3+1, X=10^6: ratio {r:.5} (tolerance 0.5 +/- 0.02), {:.1}s on 4 threads (limit 60s)", run.seconds),
    )
}

fn ac2(run: &CubeRun) -> Outcome {
    let c = &run.report.per_class[1];
    check(
        c.class == "2%3" && c.divides == c.primes && c.primes > 0,
        format!("class 2%3: {}/{} primes divide, ratio {}", c.divides, c.primes, c.ratio),
    )
}

fn ac3(run: &CubeRun) -> Outcome {
    let ratios: Vec<Rational> = run.report.curve.iter().map(|pt| pt.per_class[0].ratio.clone()).collect();
    let decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
    let shown: Vec<String> = ratios.iter().map(|r| format!("{:.5}", ratio_f64(r))).collect();
    check(decreasing && ratios.len() == 4, format!("class 1%3 at 10^3..10^6: {}", shown.join(" > ")))
}

fn ac4() -> Outcome {
    let r = density_estimate(&map(5, int(3)), &SieveConfig::new(100_000)).unwrap();
    let v = ratio_f64(&r.ratio);
    check(v >= 0.75 - 0.02, format!("z^5+3, X=10^5: ratio {v:.5} (needs >= 0.73)"))
}

fn ac5() -> Outcome {
    let m = map(2, rat(-16, 9));
    let f3 = iterate_map(&m, 3).unwrap();
    let fl = factor_over_q(&f3).unwrap();
    let mut got: Vec<String> = fl.factors.iter().map(|(h, e)| format!("({h})^{e}")).collect();
    let expected = [
        RatPoly::new(vec![rat(2, 9), int(-2), int(1)]),
        RatPoly::new(vec![rat(2, 9), int(2), int(1)]),
        RatPoly::new(vec![rat(-22, 9), int(0), int(1)]),
        RatPoly::new(vec![rat(-10, 9), int(0), int(1)]),
    ];
    let mut want: Vec<String> = expected.iter().map(|h| format!("({h})^1")).collect();
    got.sort();
    want.sort();
    let matches = got == want && fl.unit.is_one() && fl.certified;
    let bound = match eventual_stability_verdict(&m).unwrap() {
        StabilityCertificate::EventuallyStable { bound, .. } => bound.to_string(),
        other => format!("{other:?}"),
    };
    let track = factor_count_track(&m, 5).unwrap();
    let counts: Vec<u32> = track.iter().map(|t| t.count).collect();
    check(
        matches && bound == "4" && counts.iter().all(|&c| c <= 4),
        format!("f^3 = {}; bound {bound}; counts n=1..5 {counts:?}", got.join(" * ")),
    )
}

fn ac6() -> Outcome {
    let f2 = iterate_map(&map(2, rat(1, 3)), 2).unwrap();
    let disc = discriminant(&f2).unwrap();
    check(disc == rat(1024, 81), format!("disc(f^2) for z^2+1/3 = {disc}"))
}

fn ac7() -> Outcome {
    let s = Perm::from_cycles(4, &[&[0, 1], &[2, 3]]).unwrap();
    let elements = vec![
        Perm::identity(4),
        s.clone(),
        Perm::from_cycles(4, &[&[0, 2], &[1, 3]]).unwrap(),
        Perm::from_cycles(4, &[&[0, 3], &[1, 2]]).unwrap(),
    ];
    let img = psi_image_explicit(2, &s, &elements).unwrap();
    let a2 = critical_orbit(&map(2, rat(1, 3)), 2).unwrap().a(2).clone();
    let square = is_perfect_power(&a2, 2);
    check(
        img.elements == vec![0] && a2 == rat(4, 9) && square,
        format!("psi image {:?}; f^2(0) = {a2}, square: {square}", img.elements),
    )
}

fn ac8() -> Outcome {
    let mut compared = 0;
    for d in [2u32, 3] {
        for depth in 1..=3 {
            for t0 in 1..=3 {
                for base in [BaseGroup::Trivial, BaseGroup::Cyclic, BaseGroup::Symmetric] {
                    let mut spec = TowerSpec::full(d, t0, depth);
                    spec.base = base;
                    if spec.order() > 100_000u32.into() {
                        continue;
                    }
                    let exact = exact_yn_distribution(&spec).unwrap();
                    let brute = brute_force_distribution(&spec, 100_000).unwrap();
                    if exact != brute {
                        return Err(format!("mismatch for {spec:?}"));
                    }
                    compared += 1;
                }
            }
        }
    }
    let y = exact_yn_distribution(&TowerSpec::full(2, 1, 2)).unwrap();
    let p2 = y[2].prob_positive();
    let mut martingale = true;
    for d in [2u32, 3] {
        for t0 in 1..=3usize {
            let e = expected_fixed_points(&TowerSpec::full(d, t0, 20)).unwrap();
            martingale &= e.iter().all(|x| *x == int(t0 as i64));
        }
    }
    let mut cond_ok = true;
    let mut d2t1 = Rational::zero();
    for d in [2u32, 3] {
        let r = conditional_check(&TowerSpec::full(d, 1, 6), 16).unwrap();
        cond_ok &= r.all_ok;
        if d == 2 {
            d2t1 = r.entries.iter().find(|e| e.t == 1).unwrap().probability.clone();
        }
    }
    check(
        p2 == rat(3, 8) && martingale && cond_ok && d2t1 == rat(1, 2) && compared > 0,
        format!(
            "{compared} towers match enumeration; P(Y_2>0) = {p2}; E(Y_n) = t0 for n <= 20: {martingale}; \
             conditionals <= 1/2: {cond_ok}, d=2 t=1 gives {d2t1}"
        ),
    )
}

fn ac9() -> Outcome {
    let c = extinction_curve(2, 1, 30).unwrap();
    let q: Vec<Option<Rational>> = c[1..=3].iter().map(|p| p.q_exact.clone()).collect();
    let want = vec![Some(rat(1, 2)), Some(rat(5, 8)), Some(rat(89, 128))];
    let monotone = c.windows(2).all(|w| w[1].survival_upper_exact <= w[0].survival_lower_exact);
    let y30 = &c[30];
    check(
        q == want && y30.survival_upper < 0.1 && monotone,
        format!(
            "q1..q3 = {:?}; P(Y_30>0) in [{:.6}, {:.6}]; non-increasing: {monotone}",
            q.iter().map(|x| x.as_ref().map(|r| r.to_string()).unwrap_or_default()).collect::<Vec<_>>(),
            y30.survival_lower,
            y30.survival_upper
        ),
    )
}

fn ac10() -> Outcome {
    let k = kummer_ram_degree(6, 4).unwrap();
    let t = ram_tower(2, 2, 8, 1).unwrap();
    let divides = t.k.windows(2).all(|w| w[0] % w[1] == 0);
    check(
        k == 3 && t.e[..5] == [1, 1, 2, 4, 8] && t.n0 == 1 && divides,
        format!("kummer(6,4) = {k}; e = {:?}; n0 = {}; k = {:?}", t.e, t.n0, t.k),
    )
}

fn ac11() -> Outcome {
    let m = map(2, int(3));
    let mut slopes = Vec::new();
    for n in 1..=5u32 {
        let np = newton_polygon(&iterate_map(&m, n).unwrap(), 3).unwrap();
        if np.segments.len() != 1 || np.segments[0].slope != rat(-1, 1 << n) {
            return Err(format!("n={n}: segments {:?}", np.segments));
        }
        slopes.push(np.segments[0].slope.to_string());
    }
    check(true, format!("z^2+3 at 3: single slopes {}", slopes.join(", ")))
}

fn ac12() -> Outcome {
    let z = RatPoly::z();
    let a = firststab_certify(&z, &map(2, int(2)), 12).unwrap();
    let b = firststab_certify(&z, &map(2, rat(-9, 8)), 12).unwrap();
    let cyc9 = RatPoly::from_ints(&[1, 0, 0, 1, 0, 0, 1]);
    let irr = is_irreducible_over_q(&cyc9);
    let a_ok = a == StabilityCertificate::FirststabCertified { levels: 12 };
    let b_ok = matches!(&b, StabilityCertificate::FirststabFails { n: 2, value, .. } if *value == rat(9, 64));
    check(
        a_ok && b_ok && irr == Irreducibility::Yes,
        format!("z^2+2: {}; z^2-9/8: {}; z^6+z^3+1: {irr:?}", describe(&a), describe(&b)),
    )
}

fn ac13() -> Outcome {
    let report = zcase_suite(3, &BigInt::from(2), 8).unwrap();
    let mut ones = Vec::new();
    for p in [3u64, 5, 7] {
        let x = CycInt::linear(p, 1, 1, 1).unwrap();
        ones.push(is_pth_power_cyc(&x, ZCASE_TRIALS).unwrap().is_certified_no());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut false_certs = 0;
    let mut tried = 0;
    while tried < 1000 {
        let p = [3u64, 5, 7][tried % 3];
        let coeffs: Vec<BigInt> = (0..p - 1).map(|_| BigInt::from(rng.gen_range(-3i64..=3))).collect();
        if coeffs.iter().all(|c| c.is_zero()) {
            continue;
        }
        let y = CycInt::from_coeffs(p, coeffs).unwrap();
        let x = y.pow(p as u32);
        if is_pth_power_cyc(&x, ZCASE_TRIALS).unwrap().is_certified_no() {
            false_certs += 1;
        }
        tried += 1;
    }
    check(
        report.all_certified() && ones.iter().all(|&b| b) && false_certs == 0,
        format!(
            "p=3 c=2 N=8 all certified: {}; 1+zeta_p for p=3,5,7: {ones:?}; false certificates on {tried} p-th powers: {false_certs}",
            report.all_certified()
        ),
    )
}

fn ac14() -> Outcome {
    let r = verify_rds(&map(2, int(1)), &[2, 3, 5, 7, 13], 12).unwrap();
    let v5 = &r.per_prime.iter().find(|x| x.p == 5).unwrap().valuations;
    let positive: Vec<usize> = (1..=12).filter(|&n| v5[n - 1].is_positive()).collect();
    let values_one = positive.iter().all(|&n| v5[n - 1] == PAdicVal::Finite(1));
    check(
        r.holds() && positive == [3, 6, 9, 12] && values_one,
        format!("violations: {}; v_5 positive at {positive:?}, all equal 1: {values_one}", !r.holds()),
    )
}

/// Re-derives the three witness conditions from the exact orbit.
fn witness_conditions(m: &MapSpec, n: u32, p: u64) -> bool {
    let orb = critical_orbit(m, n as usize).unwrap();
    let d = m.d as u64;
    let last = match val_p(orb.a(n as usize), p).unwrap() {
        PAdicVal::Finite(v) => {
            v > 0 && !(v as u64).is_multiple_of(d) && num_integer::Integer::gcd(&(v as u64), &d) == 1
        }
        PAdicVal::Infinite => false,
    };
    let earlier = (1..n as usize).all(|i| val_p(orb.a(i), p).unwrap() == PAdicVal::Finite(0));
    !d.is_multiple_of(p) && last && earlier
}

fn ac15() -> Outcome {
    let m = map(2, int(1));
    let mut found = Vec::new();
    for (n, want) in [(3u32, 5u64), (4, 13)] {
        match maximality_witness(&RatPoly::z(), &m, n, Default::default()).unwrap() {
            MaximalityOutcome::Witness(w) if w.p == want && witness_conditions(&m, n, w.p) => found.push((n, w.p)),
            other => return Err(format!("n={n}: {other:?}")),
        }
    }
    check(true, format!("z^2+1, g=z: witnesses (n, p) = {found:?}, conditions re-verified"))
}

fn ac16() -> Outcome {
    let mut total = 0;
    let mut modules = 0;
    for d in [2u32, 3] {
        let reports = mginv_exhaustive(d, 4).unwrap();
        if let Some(bad) = reports.iter().find(|r| !r.holds()) {
            return Err(format!("d={d}, m={}: {} submodules without invariants", bad.m, bad.failures.len()));
        }
        total += reports.len();
        modules += reports.iter().map(|r| r.submodules).sum::<usize>();
    }
    check(true, format!("{total} (group, module) pairs, {modules} non-zero submodules, all with fixed vectors"))
}

fn main() {
    let start = Instant::now();
    let run = cube_run();
    let results: Vec<(&str, Outcome)> = vec![
        ("density one half", ac1(&run)),
        ("permutation class", ac2(&run)),
        ("split-class decay", ac3(&run)),
        ("lower bound z^5+3", ac4()),
        ("factorization fixture", ac5()),
        ("discriminant fixture", ac6()),
        ("psi-image fixture", ac7()),
        ("galois process exactness", ac8()),
        ("extinction", ac9()),
        ("ramification", ac10()),
        ("newton polygon", ac11()),
        ("stability certificates", ac12()),
        ("zcase suite", ac13()),
        ("rigid divisibility", ac14()),
        ("maximality witness", ac15()),
        ("mginv property", ac16()),
    ];
    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("AC{:02} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("AC{:02} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed ({:.1}s)", results.len() - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
