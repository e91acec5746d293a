use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::tower::{BaseGroup, KernelSpec, TowerSpec};
use super::wreath::{enumerate_group, fixed_per_level, sample_uniform};
use crate::error::{arg_err, cap_err, Result};
use crate::exactnum::{format_rational, serde_exact, Rational};

/// Largest level width for which full distributions are computed.
pub const MAX_EXACT_WIDTH: u64 = 1024;
/// Denominator size (bits) up to which extinction probabilities stay exact.
pub const EXACT_EXTINCTION_BITS: u64 = 1 << 16;
/// Fixed-point precision of the interval phase of the extinction curve.
pub const INTERVAL_BITS: usize = 256;
/// Samples per Monte Carlo block; each block has its own random stream.
pub const MC_BLOCK: u64 = 1024;

/// An exact probability distribution on the non-negative integers.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProbVector(pub BTreeMap<u64, Rational>);

impl ProbVector {
    pub fn point(k: u64) -> Self {
        ProbVector(BTreeMap::from([(k, Rational::one())]))
    }

    pub fn get(&self, k: u64) -> Rational {
        self.0.get(&k).cloned().unwrap_or_else(Rational::zero)
    }

    fn add(&mut self, k: u64, p: Rational) {
        if p.is_zero() {
            return;
        }
        let slot = self.0.entry(k).or_insert_with(Rational::zero);
        *slot += p;
    }

    pub fn total(&self) -> Rational {
        self.0.values().sum()
    }

    pub fn mean(&self) -> Rational {
        self.0.iter().map(|(&k, p)| p * Rational::from_integer(BigInt::from(k))).sum()
    }

    pub fn prob_positive(&self) -> Rational {
        Rational::one() - self.get(0)
    }
}

impl Serialize for ProbVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, p) in &self.0 {
            m.serialize_entry(&k.to_string(), &format_rational(p))?;
        }
        m.end()
    }
}

fn binomial_row(m: u64) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for j in 1..=m {
        let next = &row[j as usize - 1] * BigInt::from(m - j + 1) / BigInt::from(j);
        row.push(next);
    }
    row
}

/// Distribution of the fixed points at the next level given `m` fixed nodes
/// out of `width` at this level, as `(count, probability)` pairs.
fn transition(d: u32, m: u64, width: u64, ker: KernelSpec) -> Vec<(u64, Rational)> {
    if m == 0 {
        return vec![(0, Rational::one())];
    }
    let dd = BigInt::from(d);
    let d1 = BigInt::from(d - 1);
    let row = binomial_row(m);
    let constrained = matches!(ker, KernelSpec::SumIn(_)) && m == width;
    if !constrained {
        // Each fixed node keeps its fiber fixed with probability 1/d, independently.
        let den = dd.pow(m as u32);
        return (0..=m)
            .map(|j| (d as u64 * j, Rational::new(&row[j as usize] * d1.pow((m - j) as u32), den.clone())))
            .collect();
    }
    // Every node is fixed and the label tuple is uniform among those with sum in H.
    let KernelSpec::SumIn(r) = ker else { unreachable!() };
    let g = d.gcd(&r);
    let h = BigInt::from(d / g);
    let nonzero_tuples = |k: u64| -> BigInt {
        let sign = if k.is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
        let a0 = (d1.pow(k as u32) + &d1 * &sign) / &dd;
        let a1 = (d1.pow(k as u32) - &sign) / &dd;
        a0 + (&h - 1) * a1
    };
    let den = &h * dd.pow((m - 1) as u32);
    (0..=m).map(|j| (d as u64 * j, Rational::new(&row[j as usize] * nonzero_tuples(m - j), den.clone()))).collect()
}

fn derangements(n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::one(), BigInt::zero()];
    for k in 2..=n {
        let next = BigInt::from(k - 1) * (&out[k - 1] + &out[k - 2]);
        out.push(next);
    }
    out.truncate(n + 1);
    out
}

/// Distribution of the number of fixed level-0 points.
fn base_distribution(spec: &TowerSpec) -> Result<ProbVector> {
    let t0 = spec.t0 as u64;
    Ok(match &spec.base {
        BaseGroup::Trivial => ProbVector::point(t0),
        BaseGroup::Cyclic => {
            let mut pv = ProbVector::default();
            pv.add(t0, Rational::new(BigInt::one(), BigInt::from(t0)));
            pv.add(0, Rational::new(BigInt::from(t0 - 1), BigInt::from(t0)));
            pv
        }
        BaseGroup::Symmetric => {
            let n = spec.t0;
            if n > 4096 {
                return cap_err("symmetric base group on more than 4096 points");
            }
            let der = derangements(n);
            let row = binomial_row(n as u64);
            let fact: BigInt = (1..=n).map(BigInt::from).product();
            let mut pv = ProbVector::default();
            for k in 0..=n {
                pv.add(k as u64, Rational::new(&row[k] * &der[n - k], fact.clone()));
            }
            pv
        }
        BaseGroup::Explicit(_) => {
            let els = spec.base_elements()?;
            let n = BigInt::from(els.len());
            let mut pv = ProbVector::default();
            for e in &els {
                pv.add(e.fixed_points() as u64, Rational::new(BigInt::one(), n.clone()));
            }
            pv
        }
    })
}

/// Exact law of `Y_n`, the number of fixed points at level `n`, for every
/// `n` in `0..=depth` under the uniform measure on the group.
pub fn exact_yn_distribution(spec: &TowerSpec) -> Result<Vec<ProbVector>> {
    spec.validate()?;
    let widest = spec.width(spec.depth()).unwrap_or(u64::MAX);
    if widest > MAX_EXACT_WIDTH {
        return cap_err(format!(
            "exact distribution needs t0*d^depth <= {MAX_EXACT_WIDTH} (got {})",
            if widest == u64::MAX { "overflow".to_string() } else { widest.to_string() }
        ));
    }
    let mut out = vec![base_distribution(spec)?];
    for (k, &ker) in spec.kernels.iter().enumerate() {
        let width = spec.width(k).unwrap();
        let mut next = ProbVector::default();
        for (&m, p) in &out[k].0 {
            for (y, q) in transition(spec.d, m, width, ker) {
                next.add(y, p * q);
            }
        }
        out.push(next);
    }
    Ok(out)
}

/// The same law computed by listing every group element.
pub fn brute_force_distribution(spec: &TowerSpec, limit: u64) -> Result<Vec<ProbVector>> {
    let els = enumerate_group(spec, limit)?;
    let n = BigInt::from(els.len());
    let mut out = vec![ProbVector::default(); spec.depth() + 1];
    for e in &els {
        for (lvl, y) in fixed_per_level(e).into_iter().enumerate() {
            out[lvl].add(y, Rational::new(BigInt::one(), n.clone()));
        }
    }
    Ok(out)
}

/// Exact `E(Y_n)` for `n = 0..=depth`, built from the conditional means
/// `E(Y_{n+1} | Y_n = m)` (no full distribution is formed, so deep towers are fine).
pub fn expected_fixed_points(spec: &TowerSpec) -> Result<Vec<Rational>> {
    spec.validate()?;
    let base = base_distribution(spec)?;
    let mut mean = base.mean();
    // Probability that every node of the current level is fixed; only the
    // constrained kernels treat that state differently.
    let mut all_fixed = base.get(spec.t0 as u64);
    let mut out = vec![mean.clone()];
    for (k, &ker) in spec.kernels.iter().enumerate() {
        let later_constrained = spec.kernels[k..].iter().any(|k| matches!(k, KernelSpec::SumIn(_)));
        let width = spec.width(k);
        match (ker, later_constrained) {
            (_, false) => all_fixed = Rational::zero(),
            (KernelSpec::Full, true) => {
                let w = width.ok_or_else(|| crate::Error::Capability("level width overflow".into()))?;
                if w > EXACT_EXTINCTION_BITS {
                    return cap_err("tower too wide to track the all-fixed state exactly");
                }
                all_fixed /= Rational::from_integer(BigInt::from(spec.d).pow(w as u32));
            }
            (KernelSpec::SumIn(r), true) => {
                let w = width.ok_or_else(|| crate::Error::Capability("level width overflow".into()))?;
                if w > EXACT_EXTINCTION_BITS {
                    return cap_err("tower too wide to track the all-fixed state exactly");
                }
                let h = spec.subgroup_size(r);
                // With two or more nodes the first label is uniform on Z/d; a
                // single node has its label uniform on H.
                let cond_mean = if w >= 2 {
                    Rational::from_integer(BigInt::from(w))
                } else {
                    Rational::new(BigInt::from(spec.d), BigInt::from(h))
                };
                mean += &all_fixed * (cond_mean - Rational::from_integer(BigInt::from(w)));
                all_fixed /= Rational::from_integer(BigInt::from(h) * BigInt::from(spec.d).pow(w as u32 - 1));
            }
        }
        out.push(mean.clone());
    }
    Ok(out)
}

/// One row of the conditional check.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionalEntry {
    pub level: usize,
    pub t: u64,
    /// `P(Y_n = dt | Y_{n-1} = dt)` from the transition law.
    #[serde(serialize_with = "serde_exact::rational")]
    pub probability: Rational,
    /// `C(dt, t) ((d-1)/d)^{dt} (d-1)^{-t}`.
    #[serde(serialize_with = "serde_exact::rational")]
    pub closed_form: Rational,
    pub matches: bool,
    pub at_most_half: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionalReport {
    pub entries: Vec<ConditionalEntry>,
    /// `E(Y_n | Y_{n-1} = m) = m` for every checked `m`.
    pub martingale: bool,
    pub all_ok: bool,
}

/// Closed form for the probability that `dt` fixed points stay at `dt`.
pub fn stay_probability(d: u32, t: u64) -> Rational {
    let dt = d as u64 * t;
    let c = &binomial_row(dt)[t as usize];
    let d1 = BigInt::from(d - 1);
    Rational::new(c * d1.pow(dt as u32), BigInt::from(d).pow(dt as u32) * d1.pow(t as u32))
}

/// Checks the one-step law of the fixed-point count on every level with a
/// full kernel, for `t` up to `max_t`.
pub fn conditional_check(spec: &TowerSpec, max_t: u64) -> Result<ConditionalReport> {
    spec.validate()?;
    let d = spec.d;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut entries = Vec::new();
    let mut martingale = true;
    for (k, &ker) in spec.kernels.iter().enumerate() {
        if ker != KernelSpec::Full {
            continue;
        }
        let width = spec.width(k).unwrap_or(u64::MAX);
        let t_top = (width / d as u64).min(max_t);
        for t in 1..=t_top {
            let dt = d as u64 * t;
            let law = transition(d, dt, width, ker);
            let probability = law.iter().find(|(y, _)| *y == dt).map(|(_, p)| p.clone()).unwrap_or_else(Rational::zero);
            let closed_form = stay_probability(d, t);
            entries.push(ConditionalEntry {
                level: k + 1,
                t,
                matches: probability == closed_form,
                at_most_half: probability <= half,
                probability,
                closed_form,
            });
        }
        for m in 0..=width.min(d as u64 * max_t) {
            let law = transition(d, m, width, ker);
            let mean: Rational = law.iter().map(|(y, p)| p * Rational::from_integer(BigInt::from(*y))).sum();
            martingale &= mean == Rational::from_integer(BigInt::from(m));
        }
    }
    let all_ok = martingale && entries.iter().all(|e| e.matches && e.at_most_half);
    Ok(ConditionalReport { entries, martingale, all_ok })
}

/// One level of the extinction curve.
#[derive(Debug, Clone, Serialize)]
pub struct ExtinctionPoint {
    pub n: usize,
    /// `q_n`, the probability that a single root has no fixed descendant at level `n`.
    #[serde(serialize_with = "serde_exact::opt_rational")]
    pub q_exact: Option<Rational>,
    /// `P(Y_n > 0) = 1 - q_n^{t0}` when it is known exactly.
    #[serde(serialize_with = "serde_exact::opt_rational")]
    pub survival_exact: Option<Rational>,
    /// Rigorous enclosure of `P(Y_n > 0)`, rounded outward to `f64`.
    pub survival_lower: f64,
    pub survival_upper: f64,
    #[serde(skip)]
    pub survival_lower_exact: Rational,
    #[serde(skip)]
    pub survival_upper_exact: Rational,
}

fn dyadic(num: &BigInt, bits: usize) -> Rational {
    Rational::new(num.clone(), BigInt::one() << bits)
}

fn outward(x: &Rational, up: bool) -> f64 {
    let v = x.to_f64().unwrap_or(f64::NAN);
    let nudged = if up { v * (1.0 + f64::EPSILON * 4.0) + f64::MIN_POSITIVE } else { v * (1.0 - f64::EPSILON * 4.0) };
    nudged.clamp(0.0, 1.0)
}

/// Fixed-point power with directed rounding: `x^e / 2^{P(e-1)}`.
fn fixed_pow(x: &BigInt, e: u64, bits: usize, up: bool) -> BigInt {
    let one = BigInt::one() << bits;
    let mut acc = one;
    let mut base = x.clone();
    let mut e = e;
    let mul = |a: &BigInt, b: &BigInt| -> BigInt {
        let prod = a * b;
        if up {
            (prod + ((BigInt::one() << bits) - 1)) >> bits
        } else {
            prod >> bits
        }
    };
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(&acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mul(&base, &base);
        }
    }
    acc
}

/// `q_0 = 0`, `q_{n+1} = (d-1)/d + q_n^d / d` and `P(Y_n > 0) = 1 - q_n^{t0}`
/// for the full tower, `n = 0..=n_max`. Values are exact while the
/// denominators stay below [`EXACT_EXTINCTION_BITS`] bits, and are enclosed
/// in outward-rounded dyadic intervals afterwards.
pub fn extinction_curve(d: u32, t0: u64, n_max: usize) -> Result<Vec<ExtinctionPoint>> {
    if d < 2 {
        return arg_err("d must be at least 2");
    }
    if t0 == 0 {
        return arg_err("t0 must be at least 1");
    }
    let dd = BigInt::from(d);
    let head = Rational::new(dd.clone() - 1, dd.clone());
    let inv_d = Rational::new(BigInt::one(), dd.clone());
    let p = INTERVAL_BITS;
    let mut out = Vec::with_capacity(n_max + 1);
    let mut exact = Some(Rational::zero());
    let (mut lo, mut hi) = (BigInt::zero(), BigInt::zero());
    for n in 0..=n_max {
        if n > 0 {
            match &exact {
                Some(q) => {
                    let next = &head + q.pow(d as i32) * &inv_d;
                    if next.denom().bits() * t0 > EXACT_EXTINCTION_BITS {
                        lo = (next.numer() << p).div_floor(next.denom());
                        hi = (next.numer() << p).div_ceil(next.denom());
                        exact = None;
                    } else {
                        exact = Some(next);
                    }
                }
                None => {
                    let scaled: BigInt = (&dd - 1u32) << p;
                    lo = scaled.div_floor(&dd) + fixed_pow(&lo, d as u64, p, false).div_floor(&dd);
                    hi = scaled.div_ceil(&dd) + fixed_pow(&hi, d as u64, p, true).div_ceil(&dd);
                }
            }
        }
        let point = match &exact {
            Some(q) => {
                let s = Rational::one() - q.pow(t0 as i32);
                ExtinctionPoint {
                    n,
                    q_exact: Some(q.clone()),
                    survival_exact: Some(s.clone()),
                    survival_lower: outward(&s, false),
                    survival_upper: outward(&s, true),
                    survival_lower_exact: s.clone(),
                    survival_upper_exact: s,
                }
            }
            None => {
                let one = BigInt::one() << p;
                let s_lo = dyadic(&(&one - fixed_pow(&hi, t0, p, true)), p);
                let s_hi = dyadic(&(&one - fixed_pow(&lo, t0, p, false)), p);
                ExtinctionPoint {
                    n,
                    q_exact: None,
                    survival_exact: None,
                    survival_lower: outward(&s_lo, false),
                    survival_upper: outward(&s_hi, true),
                    survival_lower_exact: s_lo,
                    survival_upper_exact: s_hi,
                }
            }
        };
        out.push(point);
    }
    Ok(out)
}

/// Empirical fixed-point counts from uniform samples.
#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloReport {
    pub samples: u64,
    pub seed: u64,
    pub block_size: u64,
    /// `histograms[n][y]` = number of samples with `Y_n = y`.
    pub histograms: Vec<BTreeMap<u64, u64>>,
    pub mean: Vec<f64>,
    pub positive_fraction: Vec<f64>,
}

/// Samples `samples` uniform elements and records `Y_n` at every level.
/// Block `b` draws from the ChaCha stream `b` of `seed`, so the result does
/// not depend on how many threads run the blocks.
pub fn monte_carlo(spec: &TowerSpec, samples: u64, seed: u64) -> Result<MonteCarloReport> {
    spec.validate()?;
    let levels = spec.depth() + 1;
    let blocks = samples.div_ceil(MC_BLOCK);
    let partial: Vec<Vec<BTreeMap<u64, u64>>> = (0..blocks)
        .into_par_iter()
        .map(|b| -> Result<Vec<BTreeMap<u64, u64>>> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = MC_BLOCK.min(samples - b * MC_BLOCK);
            let mut hist = vec![BTreeMap::new(); levels];
            for _ in 0..count {
                let e = sample_uniform(spec, &mut rng)?;
                for (lvl, y) in fixed_per_level(&e).into_iter().enumerate() {
                    *hist[lvl].entry(y).or_insert(0) += 1;
                }
            }
            Ok(hist)
        })
        .collect::<Result<_>>()?;
    let mut histograms = vec![BTreeMap::new(); levels];
    for block in partial {
        for (lvl, h) in block.into_iter().enumerate() {
            for (y, c) in h {
                *histograms[lvl].entry(y).or_insert(0) += c;
            }
        }
    }
    let total = samples.max(1) as f64;
    let mean =
        histograms.iter().map(|h| h.iter().map(|(y, c)| (*y as f64) * (*c as f64)).sum::<f64>() / total).collect();
    let positive_fraction = histograms
        .iter()
        .map(|h| h.iter().filter(|(y, _)| **y > 0).map(|(_, c)| *c as f64).sum::<f64>() / total)
        .collect();
    Ok(MonteCarloReport { samples, seed, block_size: MC_BLOCK, histograms, mean, positive_fraction })
}
